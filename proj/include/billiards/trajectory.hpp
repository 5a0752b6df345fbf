#pragma once

#include "billiards/simulator.hpp"

#include <algorithm>
#include <map>

namespace billiards {

// Piecewise-linear disc paths rebuilt from an initial state, its injections
// and the recorded collision events.
template <class R>
class TrajectoryBook {
public:
    struct Knot {
        R t;
        Vec2<R> c;
        Vec2<R> v;  // velocity from t on
    };

    TrajectoryBook(const SystemState<R>& initial, const InjectionSchedule<R>& injections,
                   const std::vector<CollisionEvent<R>>& events) {
        for (const auto& b : initial.balls) add(b.id, Knot{initial.time, b.center, b.velocity});
        for (const auto& inj : injections) add(inj.ball.id, Knot{inj.time, inj.ball.center, inj.ball.velocity});
        for (const auto& e : events) {
            if (e.kind != CollisionKind::Proper) continue;
            add(e.first, Knot{e.time, e.center_first, e.post_first});
            add(e.second, Knot{e.time, e.center_second, e.post_second});
        }
    }

    const std::vector<BallId>& ids() const { return order_; }
    const std::vector<Knot>& knots(const BallId& id) const { return paths_.at(id); }

    bool exists(const BallId& id, const R& t) const {
        auto it = paths_.find(id);
        return it != paths_.end() && !(t < it->second.front().t);
    }

    BallState<R> at(const BallId& id, const R& t) const {
        const auto& ks = paths_.at(id);
        auto it = std::upper_bound(ks.begin(), ks.end(), t, [](const R& x, const Knot& k) { return x < k.t; });
        const Knot& k = it == ks.begin() ? ks.front() : *(it - 1);
        return BallState<R>{id, k.c + k.v * (t - k.t), k.v};
    }

    // Velocity just before t.
    Vec2<R> velocity_before(const BallId& id, const R& t) const {
        const auto& ks = paths_.at(id);
        auto it = std::lower_bound(ks.begin(), ks.end(), t, [](const Knot& k, const R& x) { return k.t < x; });
        const Knot& k = it == ks.begin() ? ks.front() : *(it - 1);
        return k.v;
    }

private:
    void add(const BallId& id, Knot k) {
        auto [it, fresh] = paths_.try_emplace(id);
        if (fresh) order_.push_back(id);
        it->second.push_back(std::move(k));
    }

    std::map<BallId, std::vector<Knot>> paths_;
    std::vector<BallId> order_;
};

} // namespace billiards
