#include "doctest.h"

#include "billiards/constructions.hpp"

#include <cmath>

using namespace billiards;

namespace {

// Equal masses on a line exchange velocities, so the collision count equals the
// number of pairs whose free trajectories cross.
long crossing_pairs(const SystemState<double>& s) {
    long c = 0;
    for (const auto& a : s.balls)
        for (const auto& b : s.balls)
            if (a.center.x < b.center.x && a.velocity.x > b.velocity.x) ++c;
    return c;
}

} // namespace

TEST_CASE("1-D schedule attains n(n-1)/2") {
    for (int n = 2; n <= 12; ++n) {
        CAPTURE(n);
        const Scenario<double> sc = build_1d_max<double>(n);
        CHECK(sc.expected_total == n * (n - 1) / 2);
        CHECK(crossing_pairs(sc.initial) == n * (n - 1) / 2);
        const auto rep = run(sc.initial, sc.injections, SimConfig<double>::defaults());
        CHECK(rep.proper_count == n * (n - 1) / 2);
    }
    CHECK_THROWS_AS(build_1d_max<double>(1), Error);
}

TEST_CASE("Foch-style scene") {
    const Scenario<double> sc = build_foch_like<double>();
    const auto rep = run(sc.initial, sc.injections, SimConfig<double>::defaults());
    REQUIRE(rep.proper_count == 3);
    const double cited[] = {0.012987, 0.0193063, 10.4153};
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(rep.events[i].time - cited[i]) / cited[i] < 1e-3);
    const auto rev = run(reverse_time(sc.initial), {}, SimConfig<double>::defaults());
    CHECK(rev.proper_count == 1);
}

TEST_CASE("near-triple collision terminal velocities") {
    const double r3 = std::sqrt(3.0);
    struct V { BallId id; double x, y; };
    const V left[] = {{ball_a(1), 0.25, r3 / 4}, {ball_b(1), -1.5, r3 / 2}, {ball_c(1), 1.25, r3 / 4}};
    for (Side side : {Side::Left, Side::Right}) {
        const double mirror = side == Side::Left ? 1 : -1;
        const Scenario<double> sc = build_near_triple(1e-3, side);
        const auto rep = run(sc.initial, {}, SimConfig<double>::defaults());
        CHECK(rep.proper_count == 3);
        for (const V& v : left) {
            const BallId id = v.id;
            const auto& got = rep.final_state.at(id).velocity;
            CAPTURE(id.str());
            CHECK(std::fabs(got.x - mirror * v.x) < 2e-2);
            CHECK(std::fabs(got.y - v.y) < 2e-2);
        }
    }
}

TEST_CASE("stage schedule recursions") {
    const int n = 7;
    const double rho0 = 3, eps0 = 1e-9;
    const StageSchedule<double> s = schedule(n, rho0, eps0);
    const double T = 3 + 16;
    CHECK(s.T == T);
    REQUIRE(s.eps.size() == 3);
    double lambda = 1, Tm = 0;
    for (int m = 1; m <= 3; ++m) {
        CAPTURE(m);
        CHECK(s.eps[m - 1] == doctest::Approx(eps0 * std::pow(1 + 2 * T, m)).epsilon(1e-13));
        CHECK(s.rho[m - 1] == doctest::Approx(rho0 * std::pow(1 + 3 * T, m)).epsilon(1e-13));
        CHECK(s.lambda[m - 1] == doctest::Approx(lambda).epsilon(1e-13));
        CHECK(s.Tm[m - 1] == doctest::Approx(Tm).epsilon(1e-13));
        Tm += s.eps[m - 1] * T / lambda;
        if (m < 3) lambda /= std::sqrt(s.eps[m]);
    }
    CHECK(s.Tm[3] == doctest::Approx(Tm).epsilon(1e-13));
    CHECK(s.expected_stage_counts == std::vector<long>{2, 6, 7, 8});
    CHECK_THROWS_AS(schedule(7, 3.0, 1e-3), Error);
    CHECK_THROWS_AS(schedule(7, 1.5, 1e-9), Error);
}

TEST_CASE("initial-condition clauses on a hand-made configuration") {
    const auto f = frame<double>();
    const double eps = 0.01, rho = 2;
    // A1 at the origin, A2 below with gap 0.8 eps, arms with gaps 0.6 eps (B) and eps (C)
    SystemState<double> s;
    s.balls = {BallState<double>{ball_a(1), {0, 0}, {}}, BallState<double>{ball_a(2), {0, -2 - 0.8 * eps}, {}},
               BallState<double>{ball_b(1), f.w1 * (2 + 0.6 * eps), {}},
               BallState<double>{ball_c(1), f.w2 * (2 + eps), {}}};
    ICReport<double> r = check_ic(s, eps, rho);
    CHECK(r.ok());
    CHECK(r.rho_minus == doctest::Approx(0.6 * eps));
    CHECK(r.rho_plus == doctest::Approx(eps));

    // gap too small for rho
    s.balls[2].center = f.w1 * (2 + 0.3 * eps);
    r = check_ic(s, eps, rho);
    CHECK_FALSE(r.clause[2]);
    // B and C gaps too close in size
    s.balls[2].center = f.w1 * (2 + 0.9 * eps);
    r = check_ic(s, eps, rho);
    CHECK(r.clause[2]);
    CHECK_FALSE(r.clause[3]);
    // A2 pushed sideways
    s.balls[2].center = f.w1 * (2 + 0.6 * eps);
    s.balls[1].center.x = 2 * eps;
    CHECK_FALSE(check_ic(s, eps, rho).clause[1]);

    s.balls.push_back(BallState<double>{ball_p(1), {50, 50}, {}});
    CHECK_THROWS_AS(check_ic(s, eps, rho), Error);
}

TEST_CASE("preparation reaches n1(n1-1) collisions and the first stage conditions") {
    for (int n1 = 1; n1 <= 4; ++n1) {
        CAPTURE(n1);
        const double eps = 1e-6, rho = 3;
        const SystemState<double> prep = build_preparation(n1, eps, rho);
        CHECK(kinetic_energy(prep) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(check_ic(prep, eps, rho).ok());
        const Scenario<double> sc = build_prep_scenario(n1, eps, rho);
        auto cfg = SimConfig<double>::defaults();
        cfg.stop_time = 0.0;
        const auto rep = run(sc.initial, {}, cfg);
        CHECK(rep.proper_count == n1 * (n1 - 1));
        // afterwards the first stage adds n1(n1+1)
        CHECK(run(sc.initial, {}, SimConfig<double>::defaults()).proper_count == 2 * n1 * n1);
    }
}

TEST_CASE("main construction for n = 6 in double") {
    const Scenario<double> sc = build_main(6, 3.0, default_eps0(6), true);
    CHECK(sc.observed_total >= 15);
    REQUIRE(sc.observed_stage_counts.size() == 3);
    CHECK(sc.observed_stage_counts[0] >= 2);
    CHECK(sc.observed_stage_counts[1] >= 6);
    CHECK(sc.observed_stage_counts[2] >= 7);
    for (const auto& ic : sc.stage_ic) CHECK(ic.ok());
    // the scene alone, re-simulated, gives the same total
    const auto rep = run(sc.initial, sc.injections, SimConfig<double>::defaults());
    CHECK(rep.proper_count == sc.observed_total);
}

TEST_CASE("small family n = 4") {
    PrecisionScope p(128);
    const Scenario<BigFloat> sc = build_small_family<BigFloat>(4);
    CHECK(sc.observed_total >= 7);
    const auto rep = run(sc.initial, sc.injections, SimConfig<BigFloat>::defaults());
    CHECK(rep.proper_count >= 7);
    CHECK_THROWS_AS(build_small_family<BigFloat>(7), Error);
}
