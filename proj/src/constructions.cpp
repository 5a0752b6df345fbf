#include "billiards/constructions.hpp"

#include <map>
#include <sstream>

namespace billiards {

CollisionBudget budget(int n) {
    if (n < 3) throw Error(ErrorKind::BadN, "budget needs n >= 3, got " + std::to_string(n));
    CollisionBudget b;
    b.n = n;
    b.n1 = n / 3;
    b.n2 = n - 2 * b.n1;
    long long n1 = b.n1, n2 = b.n2;
    b.f = n1 * (n1 + 1) * n2 + n2 * (n2 - 1) / 2 + n1 * (n1 - 1);
    b.naive = static_cast<long long>(n) * (n - 1) / 2;
    return b;
}

template <class R>
StageSchedule<R> schedule(int n, const R& rho0, const R& eps0) {
    CollisionBudget b = budget(n);
    if (!(R(2) < rho0)) throw Error(ErrorKind::BadParams, "rho0 must exceed 2");
    if (!(R(0) < eps0)) throw Error(ErrorKind::BadParams, "eps0 must be positive");
    StageSchedule<R> s;
    s.n1 = b.n1;
    s.n2 = b.n2;
    s.T = R(static_cast<long>(b.n2) + (1L << (2 * b.n1)));
    s.rho0 = rho0;
    s.eps0 = eps0;
    R e = eps0, r = rho0;
    for (int m = 1; m <= s.n2; ++m) {
        e = e * (R(1) + R(2) * s.T);
        r = r * (R(1) + R(3) * s.T);
        s.eps.push_back(e);
        s.rho.push_back(r);
    }
    if (!(s.eps.back() < R(1) / R(2)))
        throw Error(ErrorKind::Eps0TooLarge, "eps_n2 = " + Num<R>::str(s.eps.back()) + " is not below 1/2");
    s.lambda.push_back(R(1));
    s.Tm.push_back(R(0));
    for (int m = 1; m <= s.n2; ++m) {
        if (m < s.n2) s.lambda.push_back(s.lambda[m - 1] / sqrt(s.eps[m]));
        s.Tm.push_back(s.Tm[m - 1] + s.eps[m - 1] * s.T / s.lambda[m - 1]);
    }
    s.expected_stage_counts.push_back(static_cast<long>(b.n1) * (b.n1 - 1));
    for (int m = 1; m <= s.n2; ++m) s.expected_stage_counts.push_back(m - 1 + static_cast<long>(b.n1) * (b.n1 + 1));
    return s;
}

template <class R>
std::string ICReport<R>::describe() const {
    std::ostringstream os;
    os << "i=" << clause[0] << " ii=" << clause[1] << " iii=" << clause[2] << " iv=" << clause[3]
       << " rho-=" << Num<R>::to_double(rho_minus) << " rho+=" << Num<R>::to_double(rho_plus)
       << " ratio=" << Num<R>::to_double(min_of(ratio_bc, ratio_cb));
    return os.str();
}

template <class R>
ICReport<R> check_ic(const SystemState<R>& s, const R& eps, const R& rho) {
    if (!(R(1) < rho)) throw Error(ErrorKind::BadParams, "rho must exceed 1");
    std::map<int, Vec2<R>> A, B, C;
    R big(0);
    for (const auto& b : s.balls) {
        switch (b.id.family) {
        case Family::A: A[b.id.index] = b.center; break;
        case Family::B: B[b.id.index] = b.center; break;
        case Family::C: C[b.id.index] = b.center; break;
        default: throw Error(ErrorKind::BadFamilies, "unexpected disc " + b.id.str());
        }
        big = max_of(big, max_of(abs(b.center.x), abs(b.center.y)));
    }
    auto contiguous = [](const std::map<int, Vec2<R>>& f) {
        int k = 1;
        for (const auto& [i, c] : f)
            if (i != k++) return false;
        return !f.empty();
    };
    if (!contiguous(A) || !contiguous(B) || !contiguous(C) || B.size() != C.size())
        throw Error(ErrorKind::BadFamilies, "need A_1..A_m, B_1..B_n1 and C_1..C_n1");

    const auto f = frame<R>();
    const R slack = R(64) * Num<R>::machine_eps() * (R(1) + big);
    const R e = eps + slack;
    const int m = static_cast<int>(A.size());
    const int n1 = static_cast<int>(B.size());
    B[0] = A[1];
    C[0] = A[1];
    const Vec2<R>& a1 = A[1];

    ICReport<R> r;
    r.clause[0] = !(dot(f.w1, a1) < -slack) && !(dot(f.w2, a1) < -slack) && !(e < dot(f.w0, a1));

    bool ii = true;
    for (int k = 2; k <= m; ++k) ii = ii && !(e < abs(dot(f.u0, A[k])));
    for (int j = 0; j <= n1; ++j) ii = ii && !(e < abs(dot(f.u1, B[j]))) && !(e < abs(dot(f.u2, C[j])));
    r.clause[1] = ii;

    std::vector<R> gaps;
    for (int k = 2; k <= m; ++k) gaps.push_back(dot(f.w0, A[k - 1] - A[k]) - R(2));
    for (int j = 1; j <= n1; ++j) {
        gaps.push_back(dot(f.w1, B[j] - B[j - 1]) - R(2));
        gaps.push_back(dot(f.w2, C[j] - C[j - 1]) - R(2));
    }
    r.rho_minus = gaps.front();
    r.rho_plus = gaps.front();
    for (const auto& g : gaps) {
        r.rho_minus = min_of(r.rho_minus, g);
        r.rho_plus = max_of(r.rho_plus, g);
    }
    r.clause[2] = !(r.rho_minus < eps / rho - slack) && !(e < r.rho_plus);

    const R gb = dot(f.w1, B[1] - a1) - R(2);
    const R gc = dot(f.w2, C[1] - a1) - R(2);
    r.ratio_bc = gb / gc;
    r.ratio_cb = gc / gb;
    // Cross-multiplied so that the exact 2/3 boundary survives rounding in the gaps.
    const R tol = R(5) * slack;
    r.clause[3] = !(R(2) * gc + tol < R(3) * gb) || !(R(2) * gb + tol < R(3) * gc);
    return r;
}

template <class R>
Scene<R> to_scene(const Scenario<R>& sc, int precision_bits) {
    Scene<R> s;
    s.initial = sc.initial;
    s.injections = sc.injections;
    s.precision_bits = precision_bits;
    s.meta = json{{"kind", sc.kind}, {"expected_total", sc.expected_total}};
    if (sc.expected_stage_counts) s.meta["expected_stage_counts"] = *sc.expected_stage_counts;
    if (sc.stage_boundaries) {
        json b = json::array();
        for (const auto& t : *sc.stage_boundaries) b.push_back(Num<R>::str(t));
        s.meta["stage_boundaries"] = b;
    }
    if (!sc.parameters.empty()) s.meta["parameters"] = sc.parameters;
    return s;
}

template <class R>
Scenario<R> build_1d_max(int n) {
    if (n < 2) throw Error(ErrorKind::BadN, "build_1d_max needs n >= 2");
    if (n > 60) throw Error(ErrorKind::BadN, "build_1d_max supports n <= 60");
    Scenario<R> sc;
    sc.kind = "1d-max";
    for (int k = 1; k <= n; ++k) {
        R v = -R(static_cast<double>((1ULL << (k - 1)) - 1));
        sc.initial.balls.push_back(BallState<R>{ball_p(k), {R(5) * R(k - 1) / R(2), R(0)}, {v, R(0)}});
    }
    sc.expected_total = static_cast<long>(n) * (n - 1) / 2;
    return sc;
}

template <class R>
Scenario<R> build_foch_like() {
    auto P = [](const char* s) { return Num<R>::parse(s); };
    Scenario<R> sc;
    sc.kind = "foch";
    sc.initial.balls = {
        BallState<R>{ball_p(1), {R(0), R(0)}, {R(0), R(0)}},
        BallState<R>{ball_p(2), {P("1.9961"), P("0.5")}, {P("0.2"), P("-0.05")}},
        BallState<R>{ball_p(3), {P("-0.0086"), R(-3)}, {P("0.6622"), R(77)}},
    };
    sc.expected_total = 3;
    return sc;
}

template <class R>
Scenario<R> build_near_triple(const R& eps, Side side) {
    if (!(R(0) < eps)) throw Error(ErrorKind::BadParams, "eps must be positive");
    const R s3 = sqrt(R(3));
    const R sign = side == Side::Left ? R(1) : R(-1);
    Scenario<R> sc;
    sc.kind = side == Side::Left ? "near-triple-left" : "near-triple-right";
    sc.initial.balls = {
        BallState<R>{ball_a(1), {-sign * R(2) * eps, -s3 - R(4) * eps}, {R(0), s3}},
        BallState<R>{ball_b(1), {-sign * (R(1) + eps), R(0)}, {sign, R(0)}},
        BallState<R>{ball_c(1), {sign * (R(1) + eps), R(0)}, {-sign, R(0)}},
    };
    sc.expected_total = 3;
    return sc;
}

template <class R>
SystemState<R> build_preparation(int n1, const R& eps, const R& rho) {
    if (n1 < 1) throw Error(ErrorKind::BadN, "n1 must be at least 1");
    if (!(R(0) < eps && eps < R(1))) throw Error(ErrorKind::BadParams, "eps must lie in (0,1)");
    if (!(R(3) / R(2) < rho)) throw Error(ErrorKind::BadParams, "rho must exceed 3/2");
    const auto f = frame<R>();
    SystemState<R> s;
    s.balls.push_back(BallState<R>{ball_a(1), {}, f.w0 * (R(1) - eps)});

    // Speeds 2^(n1-j) - 1 keep every crossing of the arm's half-lines distinct.
    std::vector<R> speed(n1 + 1);
    R sum(0);
    for (int j = 1; j <= n1; ++j) {
        speed[j] = R(static_cast<double>((1ULL << (n1 - j)) - 1));
        sum += speed[j] * speed[j];
    }
    const R one_m = R(1) - eps;
    const R kappa = sum == R(0) ? R(0) : sqrt((R(1) - one_m * one_m) / (R(2) * sum));

    Vec2<R> b = f.w1 * (R(2) + R(2) * eps / R(3));
    Vec2<R> c = f.w2 * (R(2) + eps);
    const R step = R(2) + eps;
    for (int j = 1; j <= n1; ++j) {
        s.balls.push_back(BallState<R>{ball_b(j), b, f.w1 * (-kappa * speed[j])});
        b += f.w1 * step;
    }
    for (int j = 1; j <= n1; ++j) {
        s.balls.push_back(BallState<R>{ball_c(j), c, f.w2 * (-kappa * speed[j])});
        c += f.w2 * step;
    }
    if (sum == R(0)) {
        const R scale = R(1) / sqrt(kinetic_energy(s));
        for (auto& x : s.balls) x.velocity = x.velocity * scale;
    }
    return s;
}

#define BILLIARDS_CONSTRUCTIONS(R)                                                  \
    template StageSchedule<R> schedule(int, const R&, const R&);                    \
    template struct ICReport<R>;                                                    \
    template ICReport<R> check_ic(const SystemState<R>&, const R&, const R&);       \
    template Scene<R> to_scene(const Scenario<R>&, int);                            \
    template Scenario<R> build_1d_max(int);                                         \
    template Scenario<R> build_foch_like();                                         \
    template Scenario<R> build_near_triple(const R&, Side);                         \
    template SystemState<R> build_preparation(int, const R&, const R&);

BILLIARDS_CONSTRUCTIONS(double)
BILLIARDS_CONSTRUCTIONS(BigFloat)

} // namespace billiards
