#pragma once

#include "billiards/simulator.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace billiards {

using json = nlohmann::json;

// Scene file: initial state plus injections, every number a decimal string.
// "precision_bits" (absent or 0 = native double) records the precision the
// scene was written at.
template <class R>
struct Scene {
    SystemState<R> initial;
    InjectionSchedule<R> injections;
    int precision_bits = 0;
    json meta = json::object();
};

template <class R>
json ball_to_json(const BallState<R>& b);
template <class R>
BallState<R> ball_from_json(const json& j);

template <class R>
json scene_to_json(const Scene<R>& s);
template <class R>
Scene<R> scene_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
// Precision recorded in a scene file without parsing its numbers.
int scene_precision_bits(const json& j);

template <class R>
json event_to_json(const CollisionEvent<R>& e);
template <class R>
void write_events_jsonl(std::ostream& os, const std::vector<CollisionEvent<R>>& events);

// Columns time,id,cx,cy,vx,vy; every disc present at the initial time, each
// injection time, each event time and the final time.
template <class R>
void write_trajectory_csv(std::ostream& os, const SystemState<R>& initial, const InjectionSchedule<R>& injections,
                          const SimulationReport<R>& report);

} // namespace billiards
