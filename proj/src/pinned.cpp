#include "billiards/pinned.hpp"

#include "billiards/scene_io.hpp"

#include <charconv>
#include <ostream>

namespace billiards {

namespace {

std::string text(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}
std::string text(const QS3& x) { return x.str(); }

template <class F>
json vec_json(const Vec2<F>& v) {
    return json::array({text(v.x), text(v.y)});
}

template <class F>
F pow2(int e) {
    F r(1);
    for (int i = 0; i < e; ++i) r = r * F(2);
    return r;
}

template <class F>
F root3() {
    if constexpr (std::is_same_v<F, QS3>) return QS3::root3();
    else return std::sqrt(3.0);
}

} // namespace

template <class F>
int PinnedConfig<F>::index(const BallId& id) const {
    for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
    throw Error(ErrorKind::BadFamilies, "no disc " + id.str());
}

template <class F>
int PinnedConfig<F>::contact(const BallId& a, const BallId& b) const {
    const int i = index(a), j = index(b);
    for (size_t c = 0; c < contacts.size(); ++c)
        if ((contacts[c].first == i && contacts[c].second == j) || (contacts[c].first == j && contacts[c].second == i))
            return static_cast<int>(c);
    throw Error(ErrorKind::NotInContact, a.str() + " and " + b.str() + " are not a declared contact");
}

template <class F>
PinnedConfig<F> pseudo_collide(const PinnedConfig<F>& cfg, int contact) {
    if (contact < 0 || contact >= static_cast<int>(cfg.contacts.size()))
        throw Error(ErrorKind::NotInContact, "unknown contact " + std::to_string(contact));
    const auto [i, j] = cfg.contacts[contact];
    const Vec2<F> x = cfg.centers[i] - cfg.centers[j];
    PinnedConfig<F> out = cfg;
    // Normal component of the relative pseudo-velocity, exchanged along x.
    const Vec2<F> t = x * (dot(cfg.velocities[i] - cfg.velocities[j], x) / dot(x, x));
    out.velocities[i] -= t;
    out.velocities[j] += t;
    return out;
}

template <class F>
PinnedConfig<F> pinned_arms(int n1) {
    if (n1 < 1) throw Error(ErrorKind::BadN, "n1 must be at least 1");
    const auto f = frame<F>();
    PinnedConfig<F> c;
    c.ids.push_back(ball_a(1));
    c.centers.push_back({});
    c.velocities.push_back(f.w0);
    for (int j = 1; j <= n1; ++j) {
        c.ids.push_back(ball_b(j));
        c.centers.push_back(f.w1 * F(2 * j));
        c.velocities.push_back({});
        c.contacts.push_back({c.index(j == 1 ? ball_a(1) : ball_b(j - 1)), c.index(ball_b(j))});
    }
    for (int j = 1; j <= n1; ++j) {
        c.ids.push_back(ball_c(j));
        c.centers.push_back(f.w2 * F(2 * j));
        c.velocities.push_back({});
        c.contacts.push_back({c.index(j == 1 ? ball_a(1) : ball_c(j - 1)), c.index(ball_c(j))});
    }
    return c;
}

template <class F>
PinnedHistory<F> run_main_schedule(int n1) {
    PinnedHistory<F> h;
    h.initial = pinned_arms<F>(n1);
    PinnedConfig<F> cur = h.initial;
    auto hit = [&](const BallId& a, const BallId& b) {
        const int c = cur.contact(a, b);
        PinnedStep<F> s{static_cast<int>(h.steps.size()), a, b, cur.velocity(a), cur.velocity(b), {}, {}};
        cur = pseudo_collide(cur, c);
        s.post_first = cur.velocity(a);
        s.post_second = cur.velocity(b);
        h.steps.push_back(s);
    };
    for (int k = 1; k <= n1; ++k) {
        hit(ball_a(1), ball_b(1));
        for (int j = 1; j <= n1 - k; ++j) hit(ball_b(j), ball_b(j + 1));
        hit(ball_a(1), ball_c(1));
        for (int j = 1; j <= n1 - k; ++j) hit(ball_c(j), ball_c(j + 1));
    }
    h.final = cur;
    return h;
}

template <class F>
Vec2<F> closed_form_a1(int k, Phase phase) {
    if (k < 1) throw Error(ErrorKind::BadParams, "k must be at least 1");
    const auto f = frame<F>();
    if (phase == Phase::TowardC) return f.u1 * (root3<F>() / pow2<F>(2 * k - 1));
    return f.u2 * (root3<F>() / pow2<F>(2 * k));
}

template <class F>
void write_history_jsonl(std::ostream& os, const PinnedHistory<F>& h) {
    for (const auto& s : h.steps)
        os << json{{"step", s.step},
                   {"pair", json::array({s.first.str(), s.second.str()})},
                   {"before", json::array({vec_json(s.pre_first), vec_json(s.pre_second)})},
                   {"after", json::array({vec_json(s.post_first), vec_json(s.post_second)})}}
                  .dump()
           << "\n";
}

#define BILLIARDS_PINNED(F)                                                 \
    template struct PinnedConfig<F>;                                        \
    template PinnedConfig<F> pseudo_collide(const PinnedConfig<F>&, int);   \
    template PinnedConfig<F> pinned_arms(int);                              \
    template PinnedHistory<F> run_main_schedule(int);                       \
    template Vec2<F> closed_form_a1(int, Phase);                            \
    template void write_history_jsonl(std::ostream&, const PinnedHistory<F>&);

BILLIARDS_PINNED(double)
BILLIARDS_PINNED(QS3)

} // namespace billiards
