#pragma once

#include "billiards/qsqrt3.hpp"
#include "billiards/simulator.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace billiards {

// Static discs carrying pseudo-velocities. F is double or the exact QS3.
template <class F>
struct PinnedConfig {
    std::vector<BallId> ids;
    std::vector<Vec2<F>> centers;
    std::vector<Vec2<F>> velocities;
    std::vector<std::pair<int, int>> contacts;

    int index(const BallId& id) const;
    int contact(const BallId& a, const BallId& b) const;
    const Vec2<F>& velocity(const BallId& id) const { return velocities[index(id)]; }
};

template <class F>
PinnedConfig<F> pseudo_collide(const PinnedConfig<F>& cfg, int contact);

template <class F>
struct PinnedStep {
    int step = 0;
    BallId first, second;
    Vec2<F> pre_first, pre_second, post_first, post_second;
};

template <class F>
struct PinnedHistory {
    PinnedConfig<F> initial;
    PinnedConfig<F> final;
    std::vector<PinnedStep<F>> steps;
};

// Touching two-arm configuration: A1 at the origin moving with w0, B_j = 2j w1,
// C_j = 2j w2 at rest.
template <class F>
PinnedConfig<F> pinned_arms(int n1);

// Wave k = 1..n1: A1B1, B1B2, ..., B_{n1-k}B_{n1-k+1}, then A1C1 and the same
// range on the C arm.
template <class F>
PinnedHistory<F> run_main_schedule(int n1);

enum class Phase { TowardC, TowardB };

// A1 pseudo-velocity after the k-th A1B1 (TowardC) or k-th A1C1 (TowardB).
template <class F>
Vec2<F> closed_form_a1(int k, Phase phase);

template <class F>
void write_history_jsonl(std::ostream& os, const PinnedHistory<F>& h);

} // namespace billiards
