#pragma once

#include "billiards/qsqrt3.hpp"
#include "billiards/scene_io.hpp"
#include "billiards/simulator.hpp"

#include <gmpxx.h>

#include <random>
#include <string>
#include <vector>

namespace billiards {

using Q = mpq_class;

Q parse_rational(const std::string& s);

struct GapInit {
    Q ZB0, ZC0;
    std::vector<Q> GA;  // G^A_2..G^A_m
    std::vector<Q> GB;  // G^B_1..G^B_n1
    std::vector<Q> GC;  // G^C_1..G^C_n1
    Q rho;

    int m() const { return static_cast<int>(GA.size()) + 1; }
    int n1() const { return static_cast<int>(GB.size()); }

    static GapInit from_json(const json& j);
    json to_json() const;
};

// Throws BadGaps unless the ordering, size and ratio constraints hold.
void validate(const GapInit& g);

// Random feasible gaps with denominators dividing 1000.
GapInit random_gaps(int m, int n1, std::mt19937_64& rng);

// Continuous piecewise-linear function on [0, inf); slopes[i] applies on
// [breakpoints[i], breakpoints[i+1]) and the last one from the last breakpoint on.
struct PiecewiseLinear {
    std::vector<Q> breakpoints;
    std::vector<Q> values;
    std::vector<Q> slopes;

    Q operator()(const Q& t) const;
    Q slope_at(const Q& t) const;      // right derivative
    Q slope_before(const Q& t) const;  // left derivative
    double eval(double t) const;
};

struct LimitEvolution {
    int m = 0, n1 = 0;
    GapInit gaps;
    std::vector<Q> tA;  // tA[k-1] = t^A_k
    std::vector<Q> tB;  // tB[j-1] = t^B_j
    std::vector<Q> tC;
    std::vector<Q> VB, VC;  // VB[j-1] = V^B_j
    // Z^A_m..Z^A_1, Z^B_0..Z^B_n1, Z^C_0..Z^C_n1
    std::vector<BallId> ids;
    std::vector<PiecewiseLinear> components;
    // Largest jump between one-sided values over all breakpoints (zero when continuous).
    Q continuity_defect;

    const PiecewiseLinear& z(const BallId& id) const;
    int index(const BallId& id) const;
};

LimitEvolution build_limit(const GapInit& g);

enum class JumpKind { ArmA, HitB, HitC, CrossB, CrossC };
const char* jump_kind_name(JumpKind k);

struct Discontinuity {
    Q time;
    JumpKind kind;
    std::vector<BallId> components;
};

std::vector<Discontinuity> discontinuities(const LimitEvolution& L, const Q& horizon);

struct ConservationResult {
    bool momentum = false;
    bool energy = false;
    bool transfer = false;  // the slope-exchange identities at this time
    bool arm = false;       // slope swaps at every t^A_k
    Vec2<QS3> momentum_before, momentum_after;
    QS3 energy_before, energy_after;
    bool ok() const { return momentum && energy && transfer && arm; }
};

// t must be one of the t^B_j or t^C_j.
ConservationResult conservation_check(const LimitEvolution& L, const Q& t);

struct TerminalChecks {
    Q T;
    Q tC_formula;           // closed-form sum for t^C_n1
    bool tC_matches = false;
    bool tC_bounds = false;
    bool arm_gaps = false;  // adjacent B and C gaps at T are >= 1
    bool a_gap = false;     // Z^A_1(T) - Z^A_2(T) >= 1/2 (vacuous for m = 1)
    bool ratio = false;
    bool ordering = false;
    bool lipschitz = false;
    bool speed = false;     // |DZ| <= n + 2
    bool reversal = false;  // Z^B_j = Y^B_{n1-j+1} after t^B_n1
    bool ok() const {
        return tC_matches && tC_bounds && arm_gaps && a_gap && ratio && ordering && lipschitz && speed && reversal;
    }
};

// Checks at the horizon T = n2 + 4^n1 with n2 >= m.
TerminalChecks terminal_checks(const LimitEvolution& L, int n2);

Q stage_horizon(int n2, int n1);

} // namespace billiards
