#include "billiards/scaled.hpp"
#include "billiards/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace billiards {

namespace {

template <class R>
R from_q(const Q& q) {
    return Num<R>::parse(q.get_num().get_str()) / Num<R>::parse(q.get_den().get_str());
}

size_t knot(const std::vector<double>& times, double t) {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    return it == times.begin() ? 0 : static_cast<size_t>(it - times.begin()) - 1;
}

struct Layout {
    int m = 0, n1 = 0;
    std::vector<BallId> ids;
};

template <class R>
Layout layout(const SystemState<R>& s) {
    std::set<int> A, B, C;
    for (const auto& b : s.balls) {
        switch (b.id.family) {
        case Family::A: A.insert(b.id.index); break;
        case Family::B: B.insert(b.id.index); break;
        case Family::C: C.insert(b.id.index); break;
        default: throw Error(ErrorKind::BadFamilies, "unexpected disc " + b.id.str());
        }
    }
    auto contiguous = [](const std::set<int>& f) {
        return !f.empty() && *f.begin() == 1 && *f.rbegin() == static_cast<int>(f.size());
    };
    if (!contiguous(A) || !contiguous(B) || B != C)
        throw Error(ErrorKind::BadFamilies, "need A_1..A_m, B_1..B_n1 and C_1..C_n1");
    Layout l;
    l.m = static_cast<int>(A.size());
    l.n1 = static_cast<int>(B.size());
    for (int k = l.m; k >= 1; --k) l.ids.push_back(ball_a(k));
    for (int j = 0; j <= l.n1; ++j) l.ids.push_back(ball_b(j));
    for (int j = 0; j <= l.n1; ++j) l.ids.push_back(ball_c(j));
    return l;
}

// Scaled coordinate of one component from a disc's physical state.
template <class R>
std::pair<R, R> coordinate(const BallId& id, const BallState<R>& s, const R& eps, const ReferenceFrame<R>& f) {
    const Vec2<R>* w = &f.w0;
    R shift(0);
    switch (id.family) {
    case Family::A: shift = R(2 * (id.index - 1)); break;
    case Family::B: w = &f.w1; shift = R(-2 * id.index); break;
    case Family::C: w = &f.w2; shift = R(-2 * id.index); break;
    default: break;
    }
    return {(dot(*w, s.center) + shift) / eps, dot(*w, s.velocity)};
}

BallId physical(const BallId& id) { return id.index == 0 ? ball_a(1) : id; }

} // namespace

double ScaledTrajectory::eval(size_t c, double t) const {
    size_t i = knot(times, t);
    return values[c][i] + slopes[c][i] * (t - times[i]);
}

double ScaledTrajectory::slope_at(size_t c, double t) const { return slopes[c][knot(times, t)]; }

int ScaledTrajectory::index(const BallId& id) const {
    for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
    throw Error(ErrorKind::ShapeMismatch, "no component " + id.str());
}

double ScaledTrajectory::sum_defect() const {
    const int a1 = index(ball_a(1)), b0 = index(ball_b(0)), c0 = index(ball_c(0));
    double worst = 0;
    for (size_t i = 0; i < times.size(); ++i)
        worst = std::max(worst, std::fabs(values[b0][i] + values[c0][i] - values[a1][i]));
    return worst;
}

template <class R>
SystemState<R> realize(const GapInit& g, const R& eps) {
    validate(g);
    const auto f = frame<R>();
    const int m = g.m(), n1 = g.n1();
    SystemState<R> s;
    const R zb0 = from_q<R>(g.ZB0), zc0 = from_q<R>(g.ZC0);
    Q za = g.ZB0 + g.ZC0;
    const Vec2<R> a1{eps * (zc0 - zb0) / sqrt(R(3)), eps * (zb0 + zc0)};
    s.balls.push_back(BallState<R>{ball_a(1), a1, m == 1 ? f.w0 : Vec2<R>{}});
    for (int k = 2; k <= m; ++k) {
        za -= g.GA[k - 2];
        Vec2<R> c{R(0), eps * from_q<R>(za) - R(2 * (k - 1))};
        s.balls.push_back(BallState<R>{ball_a(k), c, k == m ? f.w0 : Vec2<R>{}});
    }
    Q zb = g.ZB0, zc = g.ZC0;
    for (int j = 1; j <= n1; ++j) {
        zb += g.GB[j - 1];
        s.balls.push_back(BallState<R>{ball_b(j), f.w1 * (R(2 * j) + eps * from_q<R>(zb)), {}});
    }
    for (int j = 1; j <= n1; ++j) {
        zc += g.GC[j - 1];
        s.balls.push_back(BallState<R>{ball_c(j), f.w2 * (R(2 * j) + eps * from_q<R>(zc)), {}});
    }
    return s;
}

template <class R>
ScaledTrajectory extract_scaled(const SimulationReport<R>& report, const SystemState<R>& initial, const R& eps) {
    const Layout l = layout(initial);
    const auto f = frame<R>();
    TrajectoryBook<R> book(initial, {}, report.events);
    std::vector<R> knots{initial.time};
    for (const auto& e : report.events)
        if (e.kind == CollisionKind::Proper && knots.back() < e.time) knots.push_back(e.time);

    ScaledTrajectory X;
    X.eps = Num<R>::to_double(eps);
    X.ids = l.ids;
    X.values.assign(l.ids.size(), {});
    X.slopes.assign(l.ids.size(), {});
    for (const auto& t : knots) {
        X.times.push_back(Num<R>::to_double((t - initial.time) / eps));
        for (size_t c = 0; c < l.ids.size(); ++c) {
            auto [x, v] = coordinate(l.ids[c], book.at(physical(l.ids[c]), t), eps, f);
            X.values[c].push_back(Num<R>::to_double(x));
            X.slopes[c].push_back(Num<R>::to_double(v));
        }
    }
    return X;
}

double sup_distance(const ScaledTrajectory& X, const LimitEvolution& L, double horizon) {
    if (X.ids != L.ids) throw Error(ErrorKind::ShapeMismatch, "scaled and limit components differ");
    std::set<double> ts{0.0, horizon};
    for (double t : X.times)
        if (t <= horizon) ts.insert(t);
    for (const auto& z : L.components)
        for (const auto& b : z.breakpoints)
            if (b.get_d() <= horizon) ts.insert(b.get_d());
    std::vector<double> grid(ts.begin(), ts.end());
    const size_t knots = grid.size();
    for (size_t i = 0; i + 1 < knots; ++i) grid.push_back(0.5 * (grid[i] + grid[i + 1]));
    double worst = 0;
    for (size_t c = 0; c < X.ids.size(); ++c)
        for (double t : grid) worst = std::max(worst, std::fabs(X.eval(c, t) - L.components[c].eval(t)));
    return worst;
}

const std::vector<double>& PiecewiseConstant::operator()(double t) const { return values[knot(times, t)]; }

PiecewiseConstant velocity_path(const ScaledTrajectory& X) {
    PiecewiseConstant p;
    for (size_t i = 0; i < X.times.size(); ++i) {
        std::vector<double> v;
        for (const auto& s : X.slopes) v.push_back(s[i]);
        if (!p.values.empty() && p.values.back() == v) continue;
        p.times.push_back(X.times[i]);
        p.values.push_back(std::move(v));
    }
    return p;
}

PiecewiseConstant velocity_path(const LimitEvolution& L) {
    std::set<Q> ts{Q(0)};
    for (const auto& z : L.components) ts.insert(z.breakpoints.begin(), z.breakpoints.end());
    PiecewiseConstant p;
    for (const auto& t : ts) {
        std::vector<double> v;
        for (const auto& z : L.components) v.push_back(z.slope_at(t).get_d());
        if (!p.values.empty() && p.values.back() == v) continue;
        p.times.push_back(t.get_d());
        p.values.push_back(std::move(v));
    }
    return p;
}

GapBoundResult gap_lower_bound_check(const ScaledTrajectory& X) {
    GapBoundResult r;
    r.worst_margin = INFINITY;
    std::vector<std::pair<int, int>> pairs;  // (upper, lower) components
    int m = 0, n1 = 0;
    for (const auto& id : X.ids) {
        if (id.family == Family::A) m = std::max(m, id.index);
        if (id.family == Family::B) n1 = std::max(n1, id.index);
    }
    for (int i = 1; i < m; ++i) pairs.emplace_back(X.index(ball_a(i)), X.index(ball_a(i + 1)));
    for (int j = 1; j <= n1; ++j) {
        pairs.emplace_back(X.index(ball_b(j)), X.index(ball_b(j - 1)));
        pairs.emplace_back(X.index(ball_c(j)), X.index(ball_c(j - 1)));
    }
    std::vector<double> grid = X.times;
    for (size_t i = 0; i + 1 < X.times.size(); ++i) grid.push_back(0.5 * (X.times[i] + X.times[i + 1]));
    for (double t : grid)
        for (auto [hi, lo] : pairs) {
            const double margin = X.eval(hi, t) - X.eval(lo, t) + 2 * X.eps * (1 + t) * (1 + t);
            if (margin < r.worst_margin) {
                r.worst_margin = margin;
                r.worst_time = t;
                r.worst_pair = X.ids[hi].str() + "-" + X.ids[lo].str();
            }
        }
    r.ok = !(r.worst_margin < 0);
    return r;
}

template <class R>
TransferResult velocity_transfer_check(const SimulationReport<R>& report, const R& eps) {
    const auto f = frame<R>();
    TransferResult r;
    auto check = [&](R residual, const R& t) {
        const double raw = Num<R>::to_double(abs(residual));
        r.max_raw = std::max(r.max_raw, raw);
        r.max_normalized = std::max(r.max_normalized, Num<R>::to_double(abs(residual) / (eps * (R(1) + t))));
    };
    for (const auto& e : report.events) {
        if (e.kind != CollisionKind::Proper) continue;
        for (const BallId* id : {&e.first, &e.second})
            if (id->family == Family::P) throw Error(ErrorKind::BadFamilies, "unexpected disc " + id->str());
        // Order so that lo precedes hi along its chain; A_1 stands in for B_0 and C_0.
        bool swap = e.first.family == e.second.family ? e.first.index > e.second.index : e.second.family == Family::A;
        const BallId& lo = swap ? e.second : e.first;
        const BallId& hi = swap ? e.first : e.second;
        const Vec2<R>& lo_pre = swap ? e.pre_second : e.pre_first;
        const Vec2<R>& lo_post = swap ? e.post_second : e.post_first;
        const Vec2<R>& hi_pre = swap ? e.pre_first : e.pre_second;
        const Vec2<R>& hi_post = swap ? e.post_first : e.post_second;
        const R t = (e.time - report.start_time) / eps;
        const Vec2<R>& w = hi.family == Family::A ? f.w0 : hi.family == Family::B ? f.w1 : f.w2;
        if (lo.family != hi.family && (lo != ball_a(1) || hi.index != 1)) continue;
        if (lo.family == hi.family && hi.index != lo.index + 1) continue;
        check(dot(w, lo_post) - dot(w, hi_pre), t);
        check(dot(w, hi_post) - dot(w, lo_pre), t);
        ++r.checked;
        if (lo.family == Family::A && hi.family != Family::A) {
            // The other arm's coordinate of A_1 picks up half the exchanged velocity.
            const Vec2<R>& o = hi.family == Family::B ? f.w2 : f.w1;
            check(dot(o, lo_post) - (dot(o, lo_pre) - (dot(w, hi_pre) - dot(w, lo_pre)) / R(2)), t);
        }
    }
    return r;
}

std::vector<ConvergenceRow> convergence_experiment(const GapInit& g, const std::vector<double>& eps_list,
                                                   const SimConfig<double>& cfg) {
    for (size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0 && eps_list[i] < 0.25))
            throw Error(ErrorKind::BadParams, "every eps must lie in (0, 1/4)");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw Error(ErrorKind::BadParams, "eps list must be strictly decreasing");
    }
    const LimitEvolution L = build_limit(g);
    const Q T = stage_horizon(L.m, L.n1);
    const double horizon = T.get_d();
    const long expected = static_cast<long>(discontinuities(L, T).size());
    const PiecewiseConstant dz = velocity_path(L);
    std::vector<ConvergenceRow> rows;
    for (double eps : eps_list) {
        const SystemState<double> init = realize(g, eps);
        Simulator<double> sim(init, cfg);
        sim.advance_until(eps * horizon);
        const SimulationReport<double> rep = sim.report();
        const ScaledTrajectory X = extract_scaled(rep, init, eps);
        ConvergenceRow row;
        row.eps = eps;
        row.sup_dist = sup_distance(X, L, horizon);
        row.skorohod_dist = skorohod_distance(velocity_path(X), dz, horizon);
        row.proper_count = rep.proper_count;
        row.expected_count = expected;
        row.gaps = gap_lower_bound_check(X);
        row.transfer = velocity_transfer_check(rep, eps);
        row.sum_defect = X.sum_defect();
        rows.push_back(row);
    }
    return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "eps,sup_dist,skorohod_dist,proper_count,expected_count\n";
    for (const auto& r : rows)
        os << r.eps << ',' << r.sup_dist << ',' << r.skorohod_dist << ',' << r.proper_count << ',' << r.expected_count
           << '\n';
    return os.str();
}

template SystemState<double> realize(const GapInit&, const double&);
template SystemState<BigFloat> realize(const GapInit&, const BigFloat&);
template ScaledTrajectory extract_scaled(const SimulationReport<double>&, const SystemState<double>&, const double&);
template ScaledTrajectory extract_scaled(const SimulationReport<BigFloat>&, const SystemState<BigFloat>&,
                                         const BigFloat&);
template TransferResult velocity_transfer_check(const SimulationReport<double>&, const double&);
template TransferResult velocity_transfer_check(const SimulationReport<BigFloat>&, const BigFloat&);

} // namespace billiards
