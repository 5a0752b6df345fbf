#include "doctest.h"

#include "billiards/pinned.hpp"
#include "billiards/scene_io.hpp"

#include <cmath>
#include <sstream>

using namespace billiards;

namespace {

template <class F>
F energy(const PinnedConfig<F>& c) {
    F e(0);
    for (const auto& v : c.velocities) e = e + dot(v, v);
    return e;
}

template <class F>
Vec2<F> momentum(const PinnedConfig<F>& c) {
    Vec2<F> p{};
    for (const auto& v : c.velocities) p = p + v;
    return p;
}

// A1 velocities after each A1B1 and A1C1 contact, in schedule order.
template <class F>
std::vector<Vec2<F>> a1_posts(const PinnedHistory<F>& h, const BallId& other) {
    std::vector<Vec2<F>> out;
    for (const auto& s : h.steps)
        if (s.first == ball_a(1) && s.second == other) out.push_back(s.post_first);
    return out;
}

} // namespace

TEST_CASE("first two A1 contacts by hand") {
    const auto f = frame<QS3>();
    const auto h = run_main_schedule<QS3>(3);
    // w0 minus its w1 component (1/2) gives (sqrt3/4, 3/4)
    const Vec2<QS3> after_b{QS3(0, mpq_class(1, 4)), QS3(mpq_class(3, 4))};
    CHECK(a1_posts(h, ball_b(1)).at(0) == after_b);
    // then the w2 component is 3/4, leaving (-sqrt3/8, 3/8)
    const Vec2<QS3> after_c{QS3(0, mpq_class(-1, 8)), QS3(mpq_class(3, 8))};
    CHECK(a1_posts(h, ball_c(1)).at(0) == after_c);
    CHECK(after_b == f.u1 * (QS3::root3() / QS3(2)));
    CHECK(after_c == f.u2 * (QS3::root3() / QS3(4)));
}

TEST_CASE("exact schedule matches the closed form") {
    for (int n1 = 1; n1 <= 10; ++n1) {
        CAPTURE(n1);
        const auto h = run_main_schedule<QS3>(n1);
        const auto towards_c = a1_posts(h, ball_b(1));
        const auto towards_b = a1_posts(h, ball_c(1));
        REQUIRE(towards_c.size() == static_cast<size_t>(n1));
        REQUIRE(towards_b.size() == static_cast<size_t>(n1));
        for (int k = 1; k <= n1; ++k) {
            CAPTURE(k);
            CHECK(towards_c[k - 1] == closed_form_a1<QS3>(k, Phase::TowardC));
            CHECK(towards_b[k - 1] == closed_form_a1<QS3>(k, Phase::TowardB));
        }
        CHECK(static_cast<int>(h.steps.size()) == n1 * (n1 + 1));
        CHECK(energy(h.final) == QS3(1));
        CHECK(energy(h.initial) == QS3(1));
    }
}

TEST_CASE("double schedule tracks the closed form") {
    for (int n1 = 1; n1 <= 10; ++n1) {
        const auto h = run_main_schedule<double>(n1);
        const auto towards_c = a1_posts(h, ball_b(1));
        const auto towards_b = a1_posts(h, ball_c(1));
        for (int k = 1; k <= n1; ++k) {
            const auto ec = closed_form_a1<double>(k, Phase::TowardC);
            const auto eb = closed_form_a1<double>(k, Phase::TowardB);
            CHECK(norm(towards_c[k - 1] - ec) < 1e-12);
            CHECK(norm(towards_b[k - 1] - eb) < 1e-12);
        }
        CHECK(std::fabs(energy(h.final) - 1) < 1e-12);
    }
}

TEST_CASE("pseudo-collision conserves momentum and energy exactly") {
    auto c = pinned_arms<QS3>(2);
    c.velocities[c.index(ball_b(1))] = {QS3(mpq_class(1, 3)), QS3(0, mpq_class(-2, 5))};
    const Vec2<QS3> p0 = momentum(c);
    const QS3 e0 = energy(c);
    for (int i = 0; i < static_cast<int>(c.contacts.size()); ++i) {
        c = pseudo_collide(c, i);
        CHECK(momentum(c) == p0);
        CHECK(energy(c) == e0);
    }
}

TEST_CASE("pseudo-collision only along the declared contacts") {
    const auto c = pinned_arms<QS3>(2);
    CHECK(c.contacts.size() == 4);
    try {
        c.contact(ball_b(1), ball_c(1));
        FAIL("expected NotInContact");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotInContact);
    }
    CHECK_THROWS_AS(pseudo_collide(c, 4), Error);
    CHECK_THROWS_AS(pseudo_collide(c, -1), Error);
    CHECK_THROWS_AS(pinned_arms<double>(0), Error);
    CHECK_THROWS_AS(closed_form_a1<double>(0, Phase::TowardB), Error);
}

TEST_CASE("history is one JSON object per contact") {
    const auto h = run_main_schedule<QS3>(2);
    std::ostringstream os;
    write_history_jsonl(os, h);
    std::istringstream is(os.str());
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) {
        const json j = json::parse(line);
        CHECK(j.at("step") == rows);
        CHECK(j.at("pair").size() == 2);
        CHECK(j.at("after").size() == 2);
        ++rows;
    }
    CHECK(rows == 6);
}
