#include "billiards/constructions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace billiards {

namespace {

template <class R>
R decimal(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return Num<R>::parse(std::string(buf, res.ptr));
}

template <class R>
R max_speed(const SystemState<R>& s) {
    R v(0);
    for (const auto& b : s.balls) v = max_of(v, norm(b.velocity));
    return v;
}

bool recoverable(ErrorKind k) {
    return k == ErrorKind::SimultaneousCollision || k == ErrorKind::PrecisionExhausted ||
           k == ErrorKind::PersistentContact;
}

// Three-disc state at T0 < 0 whose forward evolution has four collisions:
// the rewound one plus the three of the forward scene.
template <class R>
std::optional<SystemState<R>> rewound_base(const R& delta, const SimConfig<R>& cfg) {
    try {
        SystemState<R> s = build_foch_like<R>().initial;
        s.balls[1].center.x = R(2) - delta;
        Simulator<R> rs(reverse_time(s), cfg);
        if (!rs.step()) return std::nullopt;
        const R back = rs.now() + R(1);
        rs.advance_until(back);
        SystemState<R> init = reverse_time(rs.state_at(back));
        init.time = -back;
        Simulator<R> fwd(init, cfg);
        fwd.run();
        if (fwd.proper_count() != 4) return std::nullopt;
        return init;
    } catch (const Error& e) {
        if (recoverable(e.kind())) return std::nullopt;
        throw;
    }
}

template <class R>
struct Alignment {
    R t;
    BallId far_end, near_end, middle;
    R length;
};

// First time after the fourth collision at which the three centers are collinear.
template <class R>
Alignment<R> align(const SystemState<R>& init, const SimConfig<R>& cfg) {
    Simulator<R> sim(init, cfg);
    for (int i = 0; i < 4; ++i)
        if (!sim.step()) throw Error(ErrorKind::AlignmentNotFound, "base configuration has fewer than 4 collisions");
    const R t3 = sim.now();
    const BallState<R> r = sim.ball_at(ball_p(1), t3), b = sim.ball_at(ball_p(2), t3), g = sim.ball_at(ball_p(3), t3);
    const Vec2<R> p1 = b.center - r.center, q1 = b.velocity - r.velocity;
    const Vec2<R> p2 = g.center - r.center, q2 = g.velocity - r.velocity;
    // cross(p1 + q1 s, p2 + q2 s) = c0 + c1 s + c2 s^2
    const R c0 = cross(p1, p2);
    const R c1 = cross(p1, q2) + cross(q1, p2);
    const R c2 = cross(q1, q2);
    std::vector<R> roots;
    if (c2 != R(0)) {
        const R disc = c1 * c1 - R(4) * c2 * c0;
        if (!(disc < R(0))) {
            const R sq = sqrt(disc);
            roots = {(-c1 - sq) / (R(2) * c2), (-c1 + sq) / (R(2) * c2)};
        }
    } else if (c1 != R(0)) {
        roots = {-c0 / c1};
    }
    const R horizon(1e6);
    std::optional<R> s;
    for (const auto& x : roots)
        if (R(0) < x && x < horizon && (!s || x < *s)) s = x;
    if (!s) throw Error(ErrorKind::AlignmentNotFound, "no collinear time within the search horizon");

    Alignment<R> al;
    al.t = t3 + *s;
    const std::vector<BallId> ids{ball_p(1), ball_p(2), ball_p(3)};
    std::vector<Vec2<R>> c;
    for (const auto& id : ids) c.push_back(sim.ball_at(id, al.t).center);
    // The two ends are the farthest-apart pair.
    int e1 = 0, e2 = 1;
    R best = norm(c[0] - c[1]);
    for (auto [i, j] : {std::pair{0, 2}, std::pair{1, 2}})
        if (best < norm(c[i] - c[j])) {
            best = norm(c[i] - c[j]);
            e1 = i;
            e2 = j;
        }
    const int mid = 3 - e1 - e2;
    if (norm(c[e1] - c[mid]) < norm(c[e2] - c[mid])) std::swap(e1, e2);
    al.far_end = ids[e1];
    al.near_end = ids[e2];
    al.middle = ids[mid];
    al.length = best;
    return al;
}

template <class R>
std::optional<Scenario<R>> try_chain(int n, const SystemState<R>& init, const Alignment<R>& al, const R& factor,
                                     const R& gap, bool far_end, const SimConfig<R>& cfg, std::string& why) {
    const int m = n - 3;
    const BallId x_id = far_end ? al.far_end : al.near_end;
    const BallId z_id = far_end ? al.near_end : al.far_end;
    Scenario<R> sc;
    sc.kind = "small";
    sc.initial = init;
    sc.expected_total = 1 + static_cast<long>(n) * (n - 1) / 2;
    std::vector<long> want{4};
    for (int k = 1; k <= m; ++k) want.push_back(k + 2);
    sc.expected_stage_counts = want;
    std::vector<R> bounds{init.time, al.t};
    try {
        Simulator<R> sim(init, cfg);
        sim.advance_until(al.t);
        sc.observed_stage_counts.push_back(sim.proper_count());
        const Vec2<R> zx = sim.ball_at(x_id, al.t).center - sim.ball_at(z_id, al.t).center;
        const Vec2<R> d = zx / norm(zx);
        R t = al.t;
        BallId prev = x_id;
        for (int k = 1; k <= m; ++k) {
            const R v = max_speed(sim.state_at(t)) * factor;
            BallState<R> a{ball_a(k), sim.ball_at(prev, t).center + d * (R(2) + gap), d * (-v)};
            sim.inject(a, t);
            sc.injections.push_back(Injection<R>{t, a});
            if (k > 1) bounds.push_back(t);
            const long before = sim.proper_count();
            for (int i = 0; i < k + 2; ++i)
                if (!sim.step()) break;
            sc.observed_stage_counts.push_back(sim.proper_count() - before);
            if (sc.observed_stage_counts.back() != k + 2) {
                why = "stage " + std::to_string(k) + " produced " + std::to_string(sc.observed_stage_counts.back()) +
                      " collisions";
                return std::nullopt;
            }
            t = sim.now();
            prev = ball_a(k);
        }
        sim.run();
        sc.observed_total = sim.proper_count();
    } catch (const Error& e) {
        if (!recoverable(e.kind())) throw;
        why = e.what();
        return std::nullopt;
    }
    if (sc.observed_total < sc.expected_total) {
        why = "total " + std::to_string(sc.observed_total) + " below " + std::to_string(sc.expected_total);
        return std::nullopt;
    }
    sc.stage_boundaries = bounds;
    return sc;
}

} // namespace

template <class R>
Scenario<R> build_small_family(int n, const SmallFamilyTuning& tuning) {
    if (n < 4 || n > 6) throw Error(ErrorKind::BadN, "small family covers 4 <= n <= 6");
    const SimConfig<R> cfg = SimConfig<R>::defaults();

    double delta = tuning.delta;
    std::optional<SystemState<R>> init = rewound_base(decimal<R>(delta), cfg);
    if (!init) {
        if (!tuning.search) throw Error(ErrorKind::TuningFailed, "base configuration does not give 4 collisions");
        std::vector<double> grid;
        for (int k = 1; k < 100; ++k) grid.push_back(0.05 * k / 100);
        std::sort(grid.begin(), grid.end(),
                  [&](double a, double b) { return std::fabs(a - tuning.delta) < std::fabs(b - tuning.delta); });
        for (double g : grid)
            if ((init = rewound_base(decimal<R>(g), cfg))) {
                delta = g;
                break;
            }
        if (!init) throw Error(ErrorKind::TuningFailed, "no offset in (0, 0.05) gives 4 base collisions");
    }
    const Alignment<R> al = align(*init, cfg);

    std::vector<double> factors{tuning.speed_factor}, gaps{tuning.gap};
    std::vector<bool> ends{tuning.far_end};
    if (tuning.search) {
        for (double f : {1e4, 1e3, 1e5})
            if (f != tuning.speed_factor) factors.push_back(f);
        for (double g : {0.5, 0.25, 1.0})
            if (g != tuning.gap) gaps.push_back(g);
        ends.push_back(!tuning.far_end);
    }
    std::string why;
    for (bool end : ends)
        for (double f : factors)
            for (double g : gaps) {
                auto sc = try_chain(n, *init, al, decimal<R>(f), decimal<R>(g), end, cfg, why);
                if (!sc) continue;
                sc->parameters = json{{"delta", delta},
                                      {"speed_factor", f},
                                      {"gap", g},
                                      {"end", end ? "far" : "near"},
                                      {"t_align", Num<R>::str(al.t)},
                                      {"line", json::array({al.far_end.str(), al.middle.str(), al.near_end.str()})},
                                      {"line_length", Num<R>::to_double(al.length)}};
                return *sc;
            }
    throw Error(ErrorKind::TuningFailed, "no chain tuning reached the target: " + why);
}

template Scenario<double> build_small_family(int, const SmallFamilyTuning&);
template Scenario<BigFloat> build_small_family(int, const SmallFamilyTuning&);

} // namespace billiards
