#pragma once

#include "billiards/simulator.hpp"

#include <string>

namespace billiards {

// Disc paths as polylines and Proper collisions as dots, fitted to a
// 1000x1000 view around the interaction region. Final positions outside that
// region are clipped and listed in an inset.
template <class R>
std::string trajectory_svg(const SystemState<R>& initial, const InjectionSchedule<R>& injections,
                           const SimulationReport<R>& report);

} // namespace billiards
