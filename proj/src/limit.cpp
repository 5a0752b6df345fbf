#include "billiards/limit.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace billiards {

Q parse_rational(const std::string& s) {
    try {
        Q q(s);
        if (q.get_den() == 0) throw std::invalid_argument(s);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw Error(ErrorKind::Parse, "not a rational: " + s);
    }
}

namespace {

Q pow2(int e) {
    Q r(1);
    if (e >= 0) mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), e);
    else mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), -e);
    return r;
}

std::vector<Q> rationals(const json& j) {
    std::vector<Q> v;
    for (const auto& x : j) v.push_back(parse_rational(x.get<std::string>()));
    return v;
}

json texts(const std::vector<Q>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
}

Q abs_q(const Q& x) { return x < 0 ? Q(-x) : x; }

struct Segment {
    Q start, value, slope;
};

PiecewiseLinear simplify(const PiecewiseLinear& f) {
    PiecewiseLinear g;
    for (size_t i = 0; i < f.breakpoints.size(); ++i) {
        if (!g.slopes.empty() && g.slopes.back() == f.slopes[i] && g(f.breakpoints[i]) == f.values[i]) continue;
        g.breakpoints.push_back(f.breakpoints[i]);
        g.values.push_back(f.values[i]);
        g.slopes.push_back(f.slopes[i]);
    }
    return g;
}

// Builds from segments, accumulating the largest mismatch between a segment's
// stated start value and the previous segment extended to that point.
PiecewiseLinear from_segments(std::vector<Segment> segs, Q& defect) {
    std::vector<Segment> kept;
    for (auto& s : segs) {
        if (!kept.empty() && kept.back().start == s.start) kept.pop_back();
        kept.push_back(std::move(s));
    }
    PiecewiseLinear f;
    for (size_t i = 0; i < kept.size(); ++i) {
        if (i > 0) {
            const Segment& p = kept[i - 1];
            Q reach = p.value + p.slope * (kept[i].start - p.start);
            defect = std::max(defect, abs_q(reach - kept[i].value));
        }
        f.breakpoints.push_back(kept[i].start);
        f.values.push_back(kept[i].value);
        f.slopes.push_back(kept[i].slope);
    }
    return simplify(f);
}

PiecewiseLinear sum(const PiecewiseLinear& f, const PiecewiseLinear& g) {
    std::set<Q> ts(f.breakpoints.begin(), f.breakpoints.end());
    ts.insert(g.breakpoints.begin(), g.breakpoints.end());
    PiecewiseLinear h;
    for (const auto& t : ts) {
        h.breakpoints.push_back(t);
        h.values.push_back(f(t) + g(t));
        h.slopes.push_back(f.slope_at(t) + g.slope_at(t));
    }
    return simplify(h);
}

// Pointwise increasing ordering of a family of piecewise-linear functions.
std::vector<PiecewiseLinear> ordered(const std::vector<PiecewiseLinear>& ys) {
    std::set<Q> ts{Q(0)};
    for (const auto& y : ys) ts.insert(y.breakpoints.begin(), y.breakpoints.end());
    std::vector<Q> base(ts.begin(), ts.end());
    for (size_t s = 0; s < base.size(); ++s) {
        const Q& a = base[s];
        const bool last = s + 1 == base.size();
        for (size_t i = 0; i < ys.size(); ++i)
            for (size_t j = i + 1; j < ys.size(); ++j) {
                Q si = ys[i].slope_at(a), sj = ys[j].slope_at(a);
                if (si == sj) continue;
                Q t = a + (ys[j](a) - ys[i](a)) / (si - sj);
                if (a < t && (last || t < base[s + 1])) ts.insert(t);
            }
    }
    std::vector<PiecewiseLinear> out(ys.size());
    for (const auto& t : ts) {
        std::vector<std::pair<Q, Q>> vs;
        for (const auto& y : ys) vs.emplace_back(y(t), y.slope_at(t));
        std::sort(vs.begin(), vs.end());
        for (size_t i = 0; i < ys.size(); ++i) {
            out[i].breakpoints.push_back(t);
            out[i].values.push_back(vs[i].first);
            out[i].slopes.push_back(vs[i].second);
        }
    }
    for (auto& f : out) f = simplify(f);
    return out;
}

PiecewiseLinear line(const Q& v0, const Q& t0, const Q& slope) {
    PiecewiseLinear f;
    f.breakpoints.push_back(0);
    f.values.push_back(v0);
    f.slopes.push_back(0);
    if (t0 == 0) {
        f.slopes[0] = slope;
    } else {
        f.breakpoints.push_back(t0);
        f.values.push_back(v0);
        f.slopes.push_back(slope);
    }
    return f;
}

} // namespace

GapInit GapInit::from_json(const json& j) {
    GapInit g;
    try {
        g.ZB0 = parse_rational(j.at("ZB0").get<std::string>());
        g.ZC0 = parse_rational(j.at("ZC0").get<std::string>());
        if (j.contains("GA")) g.GA = rationals(j.at("GA"));
        g.GB = rationals(j.at("GB"));
        g.GC = rationals(j.at("GC"));
        g.rho = parse_rational(j.at("rho").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("bad gap file: ") + e.what());
    }
    return g;
}

json GapInit::to_json() const {
    return json{{"ZB0", ZB0.get_str()}, {"ZC0", ZC0.get_str()}, {"GA", texts(GA)},
                {"GB", texts(GB)},      {"GC", texts(GC)},      {"rho", rho.get_str()}};
}

void validate(const GapInit& g) {
    auto fail = [](const std::string& why) { throw Error(ErrorKind::BadGaps, why); };
    if (g.GB.empty() || g.GB.size() != g.GC.size()) fail("GB and GC must have the same positive length");
    if (!(g.rho > 1)) fail("rho must exceed 1");
    if (g.ZB0 < 0 || g.ZC0 < 0) fail("ZB0 and ZC0 must be non-negative");
    if (g.ZB0 + g.ZC0 > 1) fail("ZB0 + ZC0 exceeds 1");
    if (3 * g.GB[0] > 2 * g.GC[0]) fail("GB_1 exceeds (2/3) GC_1");
    const Q lo = 1 / g.rho;
    for (const auto* v : {&g.GA, &g.GB, &g.GC})
        for (const auto& x : *v)
            if (x < lo || x > 1) fail("gap " + x.get_str() + " outside [1/rho, 1]");
}

GapInit random_gaps(int m, int n1, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(0, 1000);
    auto pick = [&](const Q& lo, const Q& hi) {
        Q q = lo + (hi - lo) * Q(d(rng), 1000);
        q.canonicalize();
        return q;
    };
    GapInit g;
    g.rho = 3;
    const Q lo(1, 3);
    g.ZB0 = pick(0, Q(1, 2));
    g.ZC0 = pick(0, Q(1, 2));
    for (int k = 2; k <= m; ++k) g.GA.push_back(pick(lo, 1));
    g.GC.push_back(pick(Q(3, 4), 1));
    g.GB.push_back(pick(lo, Q(2, 3) * g.GC[0]));
    for (int j = 2; j <= n1; ++j) {
        g.GB.push_back(pick(lo, 1));
        g.GC.push_back(pick(lo, 1));
    }
    return g;
}

Q PiecewiseLinear::operator()(const Q& t) const {
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    size_t i = it == breakpoints.begin() ? 0 : static_cast<size_t>(it - breakpoints.begin()) - 1;
    return values[i] + slopes[i] * (t - breakpoints[i]);
}

Q PiecewiseLinear::slope_at(const Q& t) const {
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    size_t i = it == breakpoints.begin() ? 0 : static_cast<size_t>(it - breakpoints.begin()) - 1;
    return slopes[i];
}

Q PiecewiseLinear::slope_before(const Q& t) const {
    auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
    size_t i = it == breakpoints.begin() ? 0 : static_cast<size_t>(it - breakpoints.begin()) - 1;
    return slopes[i];
}

double PiecewiseLinear::eval(double t) const {
    size_t i = 0;
    while (i + 1 < breakpoints.size() && breakpoints[i + 1].get_d() <= t) ++i;
    return values[i].get_d() + slopes[i].get_d() * (t - breakpoints[i].get_d());
}

const PiecewiseLinear& LimitEvolution::z(const BallId& id) const { return components[index(id)]; }

int LimitEvolution::index(const BallId& id) const {
    for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
    throw Error(ErrorKind::ShapeMismatch, "no component " + id.str());
}

LimitEvolution build_limit(const GapInit& g) {
    validate(g);
    LimitEvolution L;
    L.gaps = g;
    const int m = L.m = g.m();
    const int n1 = L.n1 = g.n1();

    // Initial positions.
    std::vector<Q> ZA(m + 1), ZB(n1 + 1), ZC(n1 + 1);
    ZA[1] = g.ZB0 + g.ZC0;
    for (int k = 2; k <= m; ++k) ZA[k] = ZA[k - 1] - g.GA[k - 2];
    ZB[0] = g.ZB0;
    ZC[0] = g.ZC0;
    for (int j = 1; j <= n1; ++j) {
        ZB[j] = ZB[j - 1] + g.GB[j - 1];
        ZC[j] = ZC[j - 1] + g.GC[j - 1];
    }

    // Collision times.
    L.tA.assign(m, Q(0));
    for (int k = m; k >= 2; --k) L.tA[k - 2] = L.tA[k - 1] + g.GA[k - 2];
    L.tB.resize(n1);
    L.tC.resize(n1);
    L.tB[0] = L.tA[0] + 2 * g.GB[0];
    L.tC[0] = L.tB[0] + Q(4, 3) * (g.GC[0] - g.GB[0]);
    for (int j = 2; j <= n1; ++j) {
        L.tB[j - 1] = L.tC[j - 2] + pow2(2 * j - 1) / 3 * g.GB[j - 1];
        L.tC[j - 1] = L.tB[j - 1] + pow2(2 * j) / 3 * g.GC[j - 1];
    }
    L.VB.resize(n1);
    L.VC.resize(n1);
    for (int j = 1; j <= n1; ++j) {
        L.VB[j - 1] = j == 1 ? Q(1, 2) : 3 / pow2(2 * j - 1);
        L.VC[j - 1] = j == 1 ? Q(3, 4) : 3 / pow2(2 * j);
    }

    // Reflecting points as orderings of straight lines.
    std::vector<PiecewiseLinear> YA, YB, YC;
    for (int k = m; k >= 1; --k) YA.push_back(k == m ? line(ZA[m], 0, 1) : line(ZA[k], 0, 0));
    for (int j = 1; j <= n1; ++j) {
        YB.push_back(line(ZB[j], L.tB[j - 1], L.VB[j - 1]));
        YC.push_back(line(ZC[j], L.tC[j - 1], L.VC[j - 1]));
    }
    std::vector<PiecewiseLinear> A = ordered(YA);  // Z^A_m .. Z^A_1
    std::vector<PiecewiseLinear> B = ordered(YB);  // Z^B_1 .. Z^B_n1
    std::vector<PiecewiseLinear> C = ordered(YC);

    const Q& tA1 = L.tA[0];
    Q defect(0);
    std::vector<Segment> sb{{0, ZB[0], 0}, {tA1, ZB[0], L.VB[0]}};
    for (int j = 1; j <= n1; ++j) {
        const Q hit = B[0](L.tB[j - 1]);
        sb.push_back({L.tB[j - 1], hit, 0});
        sb.push_back({L.tC[j - 1], hit, j < n1 ? L.VB[j] : 3 / pow2(2 * n1 + 1)});
    }
    std::vector<Segment> sc{{0, ZC[0], 0}, {tA1, ZC[0], L.VB[0]}};
    sc.push_back({L.tB[0], ZC[0] + L.VB[0] * (L.tB[0] - tA1), L.VC[0]});
    for (int j = 1; j <= n1; ++j) {
        const Q hit = C[0](L.tC[j - 1]);
        sc.push_back({L.tC[j - 1], hit, 0});
        if (j < n1) sc.push_back({L.tB[j], hit, L.VC[j]});
    }
    PiecewiseLinear ZB0 = from_segments(sb, defect);
    PiecewiseLinear ZC0 = from_segments(sc, defect);
    A.back() = sum(ZB0, ZC0);
    L.continuity_defect = defect;

    for (int k = m; k >= 1; --k) L.ids.push_back(ball_a(k));
    for (int j = 0; j <= n1; ++j) L.ids.push_back(ball_b(j));
    for (int j = 0; j <= n1; ++j) L.ids.push_back(ball_c(j));
    L.components = A;
    L.components.push_back(ZB0);
    L.components.insert(L.components.end(), B.begin(), B.end());
    L.components.push_back(ZC0);
    L.components.insert(L.components.end(), C.begin(), C.end());
    return L;
}

const char* jump_kind_name(JumpKind k) {
    switch (k) {
    case JumpKind::ArmA: return "arm-a";
    case JumpKind::HitB: return "hit-b";
    case JumpKind::HitC: return "hit-c";
    case JumpKind::CrossB: return "cross-b";
    case JumpKind::CrossC: return "cross-c";
    }
    return "?";
}

std::vector<Discontinuity> discontinuities(const LimitEvolution& L, const Q& horizon) {
    std::map<Q, std::set<int>> jumps;
    for (size_t c = 0; c < L.components.size(); ++c) {
        const auto& f = L.components[c];
        for (size_t i = 1; i < f.breakpoints.size(); ++i) {
            const Q& t = f.breakpoints[i];
            if (0 < t && t <= horizon && f.slopes[i] != f.slopes[i - 1]) jumps[t].insert(static_cast<int>(c));
        }
    }
    const int a1 = L.index(ball_a(1)), b0 = L.index(ball_b(0)), c0 = L.index(ball_c(0));
    std::vector<Discontinuity> out;
    for (auto& [t, comps] : jumps) {
        auto take = [&](JumpKind kind, std::vector<int> wanted) {
            Discontinuity d{t, kind, {}};
            for (int c : wanted)
                if (comps.erase(c)) d.components.push_back(L.ids[c]);
            out.push_back(d);
        };
        for (int k = 1; k < L.m; ++k)
            if (t == L.tA[k - 1]) take(JumpKind::ArmA, {L.index(ball_a(k + 1)), L.index(ball_a(k)), b0, c0});
        for (int j = 1; j <= L.n1; ++j) {
            if (t == L.tB[j - 1]) take(JumpKind::HitB, {b0, L.index(ball_b(1)), c0});
            if (t == L.tC[j - 1]) take(JumpKind::HitC, {c0, L.index(ball_c(1)), b0});
        }
        comps.erase(a1);
        // What remains are order exchanges of adjacent reflecting points.
        for (auto fam : {Family::B, Family::C}) {
            std::vector<int> idx;
            for (int c : comps)
                if (L.ids[c].family == fam) idx.push_back(c);
            for (size_t i = 0; i < idx.size();) {
                Discontinuity d{t, fam == Family::B ? JumpKind::CrossB : JumpKind::CrossC, {L.ids[idx[i]]}};
                if (i + 1 < idx.size() && idx[i + 1] == idx[i] + 1) {
                    d.components.push_back(L.ids[idx[i + 1]]);
                    i += 2;
                } else {
                    ++i;
                }
                out.push_back(d);
            }
        }
    }
    return out;
}

ConservationResult conservation_check(const LimitEvolution& L, const Q& t) {
    bool at_b = std::find(L.tB.begin(), L.tB.end(), t) != L.tB.end();
    bool at_c = std::find(L.tC.begin(), L.tC.end(), t) != L.tC.end();
    if (!at_b && !at_c) throw Error(ErrorKind::NotABreakpoint, t.get_str() + " is not a t^B or t^C time");
    const auto f = frame<QS3>();
    const auto& ZB0 = L.z(ball_b(0));
    const auto& ZB1 = L.z(ball_b(1));
    const auto& ZC0 = L.z(ball_c(0));
    const auto& ZC1 = L.z(ball_c(1));
    const QS3 two_over_root3(Q(0), Q(2, 3));
    // Only A1 and the disc it meets take part; the other arm may cross simultaneously.
    auto state = [&](const Q& sb0, const Q& sc0, const Q& sb1, const Q& sc1, Vec2<QS3>& p, QS3& e) {
        Vec2<QS3> va = (f.u2 * QS3(sb0) + f.u1 * QS3(sc0)) * two_over_root3;
        Vec2<QS3> vo = at_b ? f.w1 * QS3(sb1) : f.w2 * QS3(sc1);
        p = va + vo;
        e = dot(va, va) + dot(vo, vo);
    };
    ConservationResult r;
    const Q b0m = ZB0.slope_before(t), b1m = ZB1.slope_before(t), c0m = ZC0.slope_before(t), c1m = ZC1.slope_before(t);
    const Q b0 = ZB0.slope_at(t), b1 = ZB1.slope_at(t), c0 = ZC0.slope_at(t), c1 = ZC1.slope_at(t);
    state(b0m, c0m, b1m, c1m, r.momentum_before, r.energy_before);
    state(b0, c0, b1, c1, r.momentum_after, r.energy_after);
    r.momentum = r.momentum_before == r.momentum_after;
    r.energy = r.energy_before == r.energy_after;
    if (at_b)
        r.transfer = b0 == b1m && b1 == b0m && c0 == c0m + b0m / 2 - b1m / 2;
    else
        r.transfer = c0 == c1m && c1 == c0m && b0 == b0m + c0m / 2 - c1m / 2;
    r.arm = true;
    for (int k = 1; k < L.m; ++k) {
        const Q& ta = L.tA[k - 1];
        const auto& zk = L.z(ball_a(k));
        const auto& zk1 = L.z(ball_a(k + 1));
        r.arm = r.arm && zk.slope_at(ta) == 1 && zk1.slope_before(ta) == 1 && zk1.slope_at(ta) == 0 &&
                zk.slope_before(ta) == 0;
    }
    return r;
}

Q stage_horizon(int n2, int n1) { return Q(n2) + pow2(2 * n1); }

TerminalChecks terminal_checks(const LimitEvolution& L, int n2) {
    if (n2 < L.m) throw Error(ErrorKind::BadParams, "n2 must be at least m");
    const int m = L.m, n1 = L.n1;
    const GapInit& g = L.gaps;
    TerminalChecks c;
    const Q T = c.T = stage_horizon(n2, n1);
    const Q& tCn = L.tC.back();

    Q s(0);
    for (const auto& x : g.GA) s += x;
    for (int k = 1; k <= n1; ++k) s += pow2(2 * k - 1) / 3 * g.GB[k - 1] + pow2(2 * k) / 3 * g.GC[k - 1];
    c.tC_formula = s;
    c.tC_matches = s == tCn;
    c.tC_bounds = (Q(m - 1) + (pow2(2 * n1 + 1) - 2) / 3) / g.rho < tCn && tCn < Q(m - 1) + pow2(2 * n1 + 1) / 3;

    c.arm_gaps = true;
    for (int j = 1; j <= n1; ++j)
        c.arm_gaps = c.arm_gaps && L.z(ball_b(j))(T) - L.z(ball_b(j - 1))(T) >= 1 &&
                     L.z(ball_c(j))(T) - L.z(ball_c(j - 1))(T) >= 1;
    c.a_gap = m < 2 || L.z(ball_a(1))(T) - L.z(ball_a(2))(T) >= Q(1, 2);
    const Q ratio = (L.z(ball_b(1))(T) - L.z(ball_b(0))(T)) / (L.z(ball_c(1))(T) - L.z(ball_c(0))(T));
    c.ratio = ratio >= Q(3, 2) + pow2(2 * n1 + 1) / (3 * T * g.rho);

    std::set<Q> ts{T};
    for (const auto& f : L.components) ts.insert(f.breakpoints.begin(), f.breakpoints.end());
    const int n = m + 2 * n1;
    c.ordering = c.lipschitz = c.speed = true;
    for (const auto& t : ts) {
        for (int k = m; k >= 2; --k) c.ordering = c.ordering && L.z(ball_a(k))(t) <= L.z(ball_a(k - 1))(t);
        for (int j = 1; j < n1; ++j)
            c.ordering = c.ordering && L.z(ball_b(j))(t) <= L.z(ball_b(j + 1))(t) &&
                         L.z(ball_c(j))(t) <= L.z(ball_c(j + 1))(t);
        Q sq(0);
        for (const auto& f : L.components) {
            const Q v = f.slope_at(t);
            c.lipschitz = c.lipschitz && v >= 0 && v <= 1;
            sq += v * v;
        }
        c.speed = c.speed && sq <= Q((n + 2) * (n + 2));
    }

    c.reversal = true;
    for (const Q& t : {tCn, T})
        for (int j = 1; j <= n1; ++j) {
            const int i = n1 - j + 1;
            const Q y = g.ZB0 + [&] {
                Q acc(0);
                for (int q = 0; q < i; ++q) acc += g.GB[q];
                return acc;
            }() + L.VB[i - 1] * (t - L.tB[i - 1]);
            c.reversal = c.reversal && L.z(ball_b(j))(t) == y && L.z(ball_b(j)).slope_at(t) == L.VB[i - 1];
        }
    return c;
}

} // namespace billiards
