#include "doctest.h"

#include "billiards/simulator.hpp"

#include <cmath>
#include <random>

using namespace billiards;

namespace {

BallState<double> disc(int k, double x, double y, double vx, double vy) {
    return BallState<double>{ball_p(k), {x, y}, {vx, vy}};
}

SystemState<double> state(std::vector<BallState<double>> balls) {
    SystemState<double> s;
    s.balls = std::move(balls);
    return s;
}

} // namespace

TEST_CASE("collision time against hand solutions") {
    const double tol = 1e-10;
    auto t = time_to_collision(disc(1, 0, 0, 1, 0), disc(2, 5, 0, -1, 0), tol);
    REQUIRE(t);
    CHECK(*t == doctest::Approx(1.5).epsilon(1e-15));
    // |(4 - t, 1)| = 2  =>  t = 4 - sqrt(3)
    t = time_to_collision(disc(1, 0, 0, 1, 0), disc(2, 4, 1, 0, 0), tol);
    REQUIRE(t);
    CHECK(*t == doctest::Approx(4 - std::sqrt(3.0)).epsilon(1e-14));
    CHECK_FALSE(time_to_collision(disc(1, 0, 0, -1, 0), disc(2, 4, 0, 0, 0), tol));
    CHECK_FALSE(time_to_collision(disc(1, 0, 0, 1, 0), disc(2, 4, 3, 0, 0), tol));
    // nearly head-on at large distance: the stable root keeps full relative accuracy
    t = time_to_collision(disc(1, 0, 0, 1e-8, 0), disc(2, 1e4, 1e-3, 0, 0), tol);
    REQUIRE(t);
    const double exact = (1e4 - std::sqrt(4 - 1e-6)) / 1e-8;
    CHECK(std::fabs(*t - exact) / exact < 1e-12);
}

TEST_CASE("collision law exchanges the normal components") {
    auto [a, b] = resolve_collision(disc(1, 0, 0, 1, 0), disc(2, 2, 0, -1, 0), 1e-10, 1e-12);
    CHECK(a.x == doctest::Approx(-1));
    CHECK(b.x == doctest::Approx(1));
    // oblique: normal along (1,1)/sqrt2
    const double s = std::sqrt(2.0);
    auto [c, d] = resolve_collision(disc(1, 0, 0, 1, 0), disc(2, s, s, 0, 0), 1e-10, 1e-12);
    CHECK(c.x == doctest::Approx(0.5));
    CHECK(c.y == doctest::Approx(-0.5));
    CHECK(d.x == doctest::Approx(0.5));
    CHECK(d.y == doctest::Approx(0.5));
    CHECK_THROWS_AS(resolve_collision(disc(1, 0, 0, 1, 0), disc(2, 3, 0, 0, 0), 1e-10, 1e-12), Error);
    CHECK_THROWS_AS(resolve_collision(disc(1, 0, 0, -1, 0), disc(2, 2, 0, 0, 0), 1e-10, 1e-12), Error);
}

TEST_CASE("head-on pair") {
    const auto rep = run(state({disc(1, 0, 0, 1, 0), disc(2, 5, 0, -1, 0)}), {}, SimConfig<double>::defaults());
    CHECK(rep.proper_count == 1);
    CHECK(rep.energy_drift == 0);
    const auto& e = rep.events.at(0);
    CHECK(e.time == doctest::Approx(1.5));
    CHECK(rep.final_state.at(ball_p(1)).velocity.x == doctest::Approx(-1));
    CHECK(rep.quiescent);
}

TEST_CASE("step reports whether a collision happened") {
    Simulator<double> sim(state({disc(1, 0, 0, 1, 0), disc(2, 5, 0, 0, 0)}), SimConfig<double>::defaults());
    CHECK(sim.step());
    CHECK(sim.now() == doctest::Approx(3));
    CHECK_FALSE(sim.step());
}

TEST_CASE("touching chain hit from one end is simultaneous") {
    const auto s = state({disc(1, -1, 0, 1, 0), disc(2, 2, 0, 0, 0), disc(3, 4, 0, 0, 0)});
    try {
        run(s, {}, SimConfig<double>::defaults());
        FAIL("expected a simultaneous collision");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SimultaneousCollision);
    }
}

TEST_CASE("tangent pass is not a proper collision") {
    const auto rep = run(state({disc(1, 0, 0, 1, 0), disc(2, 6, 2, -1, 0)}), {}, SimConfig<double>::defaults());
    CHECK(rep.proper_count == 0);
}

TEST_CASE("overlapping input is rejected") {
    CHECK_THROWS_AS(Simulator<double>(state({disc(1, 0, 0, 0, 0), disc(2, 1, 0, 0, 0)}), SimConfig<double>::defaults()),
                    Error);
}

TEST_CASE("injected disc takes part") {
    InjectionSchedule<double> inj{Injection<double>{2.0, disc(3, 10, 0, -1, 0)}};
    const auto rep = run(state({disc(1, 0, 0, 0, 0)}), inj, SimConfig<double>::defaults());
    REQUIRE(rep.proper_count == 1);
    CHECK(rep.events[0].time == doctest::Approx(10.0));
    CHECK(rep.final_state.at(ball_p(1)).velocity.x == doctest::Approx(-1));
}

TEST_CASE("random gas conserves energy and momentum and never overlaps") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    SystemState<double> s;
    for (int i = 0; i < 12; ++i)
        s.balls.push_back(disc(i + 1, 3.0 * (i % 4) + 0.3 * u(rng), 3.0 * (i / 4) + 0.3 * u(rng), u(rng), u(rng)));
    // gather towards the middle so that plenty of collisions happen
    for (auto& b : s.balls) b.velocity = b.velocity + Vec2<double>{4.5 - b.center.x, 3 - b.center.y} * 0.3;
    const auto rep = run(s, {}, SimConfig<double>::defaults());
    CHECK(rep.proper_count > 5);
    CHECK(rep.energy_drift < 1e-12);
    CHECK(std::fabs(rep.momentum_drift.x) < 1e-12);
    CHECK(std::fabs(rep.momentum_drift.y) < 1e-12);
    CHECK(rep.min_gap > -1e-10);
    for (const auto& e : rep.events)
        if (e.kind == CollisionKind::Proper) CHECK(dot(e.pre_first - e.pre_second, e.normal) < 0);
}

TEST_CASE("time reversal retraces the run") {
    const auto s = state({disc(1, 0, 0, 1, 0.2), disc(2, 5, 0.5, -1, 0), disc(3, 2, 4, 0, -1)});
    auto cfg = SimConfig<double>::defaults();
    cfg.stop_time = 10.0;
    const auto fwd = run(s, {}, cfg);
    REQUIRE(fwd.proper_count >= 1);
    SystemState<double> back = reverse_time(fwd.final_state);
    back.time = 0;
    const auto rev = run(back, {}, cfg);
    CHECK(rev.proper_count == fwd.proper_count);
    for (const auto& b : s.balls) {
        const auto& r = rev.final_state.at(b.id);
        CHECK(r.center.x == doctest::Approx(b.center.x).epsilon(1e-9));
        CHECK(r.center.y == doctest::Approx(b.center.y).epsilon(1e-9));
        CHECK(r.velocity.x == doctest::Approx(-b.velocity.x).epsilon(1e-9));
    }
}

TEST_CASE("big-float backend agrees with double on a simple run") {
    PrecisionScope p(160);
    SystemState<BigFloat> s;
    s.balls = {BallState<BigFloat>{ball_p(1), {BigFloat(0), BigFloat(0)}, {BigFloat(1), BigFloat(0)}},
               BallState<BigFloat>{ball_p(2), {BigFloat(4), BigFloat(1)}, {BigFloat(0), BigFloat(0)}}};
    const auto rep = run(s, {}, SimConfig<BigFloat>::defaults());
    REQUIRE(rep.proper_count == 1);
    const BigFloat exact = BigFloat(4) - sqrt(BigFloat(3));
    CHECK(abs(rep.events[0].time - exact).to_double() < 1e-40);
    CHECK(rep.energy_drift.to_double() < 1e-40);
}
