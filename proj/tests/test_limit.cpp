#include "doctest.h"

#include "billiards/limit.hpp"
#include "billiards/scaled.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace billiards;

namespace {

GapInit example_11() {
    GapInit g;
    g.ZB0 = Q(1, 2);
    g.ZC0 = Q(1, 2);
    g.GB = {Q(2, 3)};
    g.GC = {Q(1)};
    g.rho = Q(3, 2);
    return g;
}

GapInit example_32() {
    GapInit g;
    g.ZB0 = Q(1, 4);
    g.ZC0 = Q(1, 3);
    g.GA = {Q(1, 2), Q(3, 4)};
    g.GB = {Q(1, 2), Q(2, 3)};
    g.GC = {Q(1), Q(1, 2)};
    g.rho = Q(3);
    return g;
}

// Sample the limit on its own breakpoints to get a scaled trajectory that equals it.
ScaledTrajectory copy_of(const LimitEvolution& L, double horizon) {
    std::set<double> knots{0.0, horizon};
    for (const auto& c : L.components)
        for (const auto& b : c.breakpoints)
            if (b.get_d() < horizon) knots.insert(b.get_d());
    ScaledTrajectory X;
    X.ids = L.ids;
    X.times.assign(knots.begin(), knots.end());
    for (const auto& c : L.components) {
        std::vector<double> v, s;
        for (double t : X.times) v.push_back(c.eval(t));
        for (size_t i = 0; i + 1 < X.times.size(); ++i) s.push_back((v[i + 1] - v[i]) / (X.times[i + 1] - X.times[i]));
        s.push_back(s.back());
        X.values.push_back(v);
        X.slopes.push_back(s);
    }
    return X;
}

PiecewiseConstant steps(std::vector<double> times, std::vector<double> values) {
    PiecewiseConstant p;
    p.times = std::move(times);
    for (double v : values) p.values.push_back({v});
    return p;
}

} // namespace

TEST_CASE("hand-evaluated times for m = 1, n1 = 1") {
    const LimitEvolution L = build_limit(example_11());
    REQUIRE(L.tA.size() == 1);
    CHECK(L.tA[0] == 0);
    CHECK(L.tB[0] == Q(4, 3));
    CHECK(L.tC[0] == Q(16, 9));
    CHECK(L.VB[0] == Q(1, 2));
    CHECK(L.VC[0] == Q(3, 4));
    CHECK(L.continuity_defect == 0);
    const auto d = discontinuities(L, stage_horizon(1, 1));
    CHECK(d.size() == 2);
    const TerminalChecks tc = terminal_checks(L, 1);
    CHECK(tc.tC_formula == Q(16, 9));
    CHECK(tc.tC_matches);
}

TEST_CASE("velocity constants") {
    GapInit g = example_32();
    g.GB.push_back(Q(1, 2));
    g.GC.push_back(Q(1));
    const LimitEvolution L = build_limit(g);
    CHECK(L.VB == std::vector<Q>{Q(1, 2), Q(3, 8), Q(3, 32)});
    CHECK(L.VC == std::vector<Q>{Q(3, 4), Q(3, 16), Q(3, 64)});
}

TEST_CASE("m = 3, n1 = 2 has eight discontinuities") {
    const LimitEvolution L = build_limit(example_32());
    CHECK(L.tA == std::vector<Q>{Q(5, 4), Q(3, 4), Q(0)});
    const auto d = discontinuities(L, stage_horizon(3, 2));
    CHECK(d.size() == 8);
    for (const auto& e : d) {
        if (e.kind != JumpKind::HitB) continue;
        std::set<BallId> got(e.components.begin(), e.components.end());
        CHECK(got == std::set<BallId>{ball_b(0), ball_b(1), ball_c(0)});
    }
    // before tA_{m-1} only Z^A_m moves, at unit speed
    const Q early(1, 2);
    for (size_t c = 0; c < L.ids.size(); ++c) {
        CAPTURE(L.ids[c].str());
        CHECK(L.components[c].slope_at(early) == (L.ids[c] == ball_a(3) ? 1 : 0));
    }
}

TEST_CASE("conservation and transfer at every arm collision") {
    const LimitEvolution L = build_limit(example_32());
    for (const auto& t : L.tB) CHECK(conservation_check(L, t).ok());
    for (const auto& t : L.tC) CHECK(conservation_check(L, t).ok());
    const Q t1 = L.tB[0];
    const auto& B0 = L.z(ball_b(0));
    const auto& B1 = L.z(ball_b(1));
    const auto& C0 = L.z(ball_c(0));
    CHECK(B0.slope_at(t1) == B1.slope_before(t1));
    CHECK(B1.slope_at(t1) == B0.slope_before(t1));
    CHECK(C0.slope_before(t1) == Q(1, 2));
    CHECK(C0.slope_at(t1) == Q(3, 4));
    // tA_k swaps the unit slope down the A chain
    const auto& A3 = L.z(ball_a(3));
    const auto& A2 = L.z(ball_a(2));
    CHECK(A3.slope_before(L.tA[1]) == 1);
    CHECK(A3.slope_at(L.tA[1]) == 0);
    CHECK(A2.slope_at(L.tA[1]) == 1);
    try {
        conservation_check(L, Q(1, 7));
        FAIL("expected NotABreakpoint");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotABreakpoint);
    }
}

TEST_CASE("random feasible gaps") {
    std::mt19937_64 rng(2024);
    for (int m = 1; m <= 4; ++m)
        for (int n1 = 1; n1 <= 3; ++n1)
            for (int rep = 0; rep < 5; ++rep) {
                CAPTURE(m);
                CAPTURE(n1);
                const GapInit g = random_gaps(m, n1, rng);
                CHECK_NOTHROW(validate(g));
                const LimitEvolution L = build_limit(g);
                CHECK(L.continuity_defect == 0);
                const int n2 = m;
                const auto d = discontinuities(L, stage_horizon(n2, n1));
                CHECK(static_cast<int>(d.size()) == m - 1 + n1 * (n1 + 1));
                for (const auto& t : L.tB) CHECK(conservation_check(L, t).ok());
                for (const auto& t : L.tC) CHECK(conservation_check(L, t).ok());
                const TerminalChecks tc = terminal_checks(L, n2);
                CHECK(tc.tC_matches);
                CHECK(tc.tC_bounds);
                CHECK(tc.ordering);
                CHECK(tc.lipschitz);
                CHECK(tc.reversal);
                // the B/C gap and ratio bounds at T need more room than n1 = 1 gives
                if (n1 >= 2) {
                    CHECK(tc.arm_gaps);
                    CHECK(tc.ratio);
                }
                CHECK(tc.a_gap);
                // Z^A_1 = Z^B_0 + Z^C_0
                const Q t = L.tC.back() + 1;
                CHECK(L.z(ball_a(1))(t) == L.z(ball_b(0))(t) + L.z(ball_c(0))(t));
            }
}

TEST_CASE("gap init JSON and validation") {
    const GapInit g = example_32();
    const GapInit back = GapInit::from_json(json::parse(g.to_json().dump()));
    CHECK(back.GA == g.GA);
    CHECK(back.GC == g.GC);
    CHECK(back.rho == g.rho);
    GapInit bad = example_11();
    bad.GB[0] = Q(9, 10);  // more than 2/3 of GC1
    CHECK_THROWS_AS(validate(bad), Error);
    bad = example_11();
    bad.GC[0] = Q(1, 2);  // below 1/rho
    CHECK_THROWS_AS(build_limit(bad), Error);
    bad = example_11();
    bad.ZB0 = Q(3, 4);
    CHECK_THROWS_AS(validate(bad), Error);
    CHECK(parse_rational("-3/6") == Q(-1, 2));
    CHECK(parse_rational("7") == Q(7));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("Skorohod distance on small step functions") {
    const auto f = steps({0, 1}, {0, 1});
    CHECK(skorohod_distance(f, f, 2) == 0);
    CHECK(skorohod_distance(f, steps({0, 1.1}, {0, 1}), 2) == doctest::Approx(0.1));
    CHECK(skorohod_distance(f, steps({0, 1}, {0, 1.2}), 2) == doctest::Approx(0.2));
    // both jumps matched: the worse time shift is 0.3
    CHECK(skorohod_distance(steps({0, 1, 2}, {0, 1, 2}), steps({0, 1.05, 2.3}, {0, 1, 2}), 3) ==
          doctest::Approx(0.3));
    // leaving a small jump unmatched beats a long time shift
    CHECK(skorohod_distance(steps({0, 1}, {0, 0.05}), steps({0, 1.5}, {0, 0.05}), 3) == doctest::Approx(0.05));
    CHECK(skorohod_distance(steps({0, 1}, {0, 0.05}), steps({0}, {0}), 3) == doctest::Approx(0.05));
    // two jumps cannot collapse onto one
    CHECK(skorohod_distance(steps({0, 1, 1.01}, {0, 1, 0}), steps({0}, {0}), 3) == doctest::Approx(1));
}

TEST_CASE("sup distance trivial cases") {
    const LimitEvolution L = build_limit(example_11());
    const double T = stage_horizon(1, 1).get_d();
    ScaledTrajectory X = copy_of(L, T);
    CHECK(sup_distance(X, L, T) < 1e-15);
    const int c = X.index(ball_c(1));
    for (double& v : X.values[c]) v += 0.125;
    CHECK(sup_distance(X, L, T) == doctest::Approx(0.125));
    X.ids.pop_back();
    CHECK_THROWS_AS(sup_distance(X, L, T), Error);
}

TEST_CASE("realized system starts at Z(0)") {
    const GapInit g = example_32();
    const double eps = 1e-3;
    const auto s = realize<double>(g, eps);
    auto rep = run(s, {}, [] {
        auto c = SimConfig<double>::defaults();
        c.stop_time = 0.0;
        return c;
    }());
    const ScaledTrajectory X = extract_scaled(rep, s, eps);
    const LimitEvolution L = build_limit(g);
    for (size_t c = 0; c < L.ids.size(); ++c) {
        CAPTURE(L.ids[c].str());
        CHECK(X.eval(c, 0) == doctest::Approx(L.components[c].eval(0)).epsilon(1e-9));
    }
    CHECK(X.sum_defect() < 1e-9);
}

TEST_CASE("scaled dynamics approach the limit") {
    const GapInit g = example_11();
    const auto rows = convergence_experiment(g, {1e-2, 1e-3}, SimConfig<double>::defaults());
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].sup_dist < rows[0].sup_dist);
    CHECK(rows[1].proper_count == 2);
    CHECK(rows[1].expected_count == 2);
    for (const auto& r : rows) {
        CHECK(r.gaps.ok);
        CHECK(r.transfer.within());
    }
    CHECK_THROWS_AS(convergence_experiment(g, {1e-3, 1e-2}, SimConfig<double>::defaults()), Error);
    CHECK_THROWS_AS(convergence_experiment(g, {0.5}, SimConfig<double>::defaults()), Error);
    const std::string csv = convergence_csv(rows);
    CHECK(csv.rfind("eps,sup_dist,skorohod_dist,proper_count,expected_count\n", 0) == 0);
}
