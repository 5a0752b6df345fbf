#pragma once

#include "billiards/limit.hpp"
#include "billiards/simulator.hpp"

#include <string>
#include <vector>

namespace billiards {

// Rescaled point-mass paths on a shared knot grid. Component layout matches
// LimitEvolution: X^A_m..X^A_1, X^B_0..X^B_n1, X^C_0..X^C_n1.
struct ScaledTrajectory {
    double eps = 0;
    std::vector<BallId> ids;
    std::vector<double> times;                // rescaled knot times, times[0] = 0
    std::vector<std::vector<double>> values;  // values[c][i] at times[i]
    std::vector<std::vector<double>> slopes;  // slopes[c][i] on [times[i], times[i+1])

    double eval(size_t c, double t) const;
    double slope_at(size_t c, double t) const;
    int index(const BallId& id) const;
    // max |X^B_0 + X^C_0 - X^A_1| over the knots
    double sum_defect() const;
};

// Physical configuration whose scaled masses start at Z(0): gaps eps*G along
// the arms, no transverse offsets, and A_m moving along w0 with unit speed.
template <class R>
SystemState<R> realize(const GapInit& g, const R& eps);

template <class R>
ScaledTrajectory extract_scaled(const SimulationReport<R>& report, const SystemState<R>& initial, const R& eps);

double sup_distance(const ScaledTrajectory& X, const LimitEvolution& L, double horizon);

// Right-continuous step function with values in R^d; values[i] holds on [times[i], times[i+1]).
struct PiecewiseConstant {
    std::vector<double> times;
    std::vector<std::vector<double>> values;

    const std::vector<double>& operator()(double t) const;
};

PiecewiseConstant velocity_path(const ScaledTrajectory& X);
PiecewiseConstant velocity_path(const LimitEvolution& L);

// Infimum over time changes lambda with |lambda(t) - t| <= d of sup |f - g o lambda| <= d.
double skorohod_distance(const PiecewiseConstant& f, const PiecewiseConstant& g, double horizon);

struct GapBoundResult {
    bool ok = true;
    double worst_margin = 0;  // min over checks of gap + 2 eps (1 + t)^2
    double worst_time = 0;
    std::string worst_pair;
};

GapBoundResult gap_lower_bound_check(const ScaledTrajectory& X);

struct TransferResult {
    double max_normalized = 0;  // max residual / (eps (1 + t))
    double max_raw = 0;
    long checked = 0;
    bool within(double bound = 16) const { return max_normalized <= bound; }
};

template <class R>
TransferResult velocity_transfer_check(const SimulationReport<R>& report, const R& eps);

struct ConvergenceRow {
    double eps = 0;
    double sup_dist = 0;
    double skorohod_dist = 0;
    long proper_count = 0;
    long expected_count = 0;
    GapBoundResult gaps;
    TransferResult transfer;
    double sum_defect = 0;
};

std::vector<ConvergenceRow> convergence_experiment(const GapInit& g, const std::vector<double>& eps_list,
                                                   const SimConfig<double>& cfg);

std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

} // namespace billiards
