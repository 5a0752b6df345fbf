#include "billiards/constructions.hpp"

#include <charconv>
#include <cmath>

namespace billiards {

namespace {

struct Shortfall {
    int stage = -1;
    long got = 0, want = 0;
};

// Preparation state moved back to before its collisions.
template <class R>
SystemState<R> rewind_preparation(int n1, const R& eps, const R& rho, const SimConfig<R>& cfg) {
    const SystemState<R> rev = reverse_time(build_preparation(n1, eps, rho));
    Simulator<R> rsim(rev, cfg);
    R t_last(0);
    for (long i = 0; i < static_cast<long>(n1) * (n1 - 1); ++i) {
        if (!rsim.step()) break;
        t_last = rsim.now();
    }
    const R back = t_last + R(1);
    rsim.advance_until(back);
    SystemState<R> init = reverse_time(rsim.state_at(back));
    init.time = -back;
    return init;
}

template <class R>
Scenario<R> run_main_once(int n, const R& rho0, const R& eps0, Shortfall& shortfall) {
    const StageSchedule<R> sch = schedule(n, rho0, eps0);
    const int n1 = sch.n1, n2 = sch.n2;
    const auto f = frame<R>();
    const SimConfig<R> cfg = SimConfig<R>::defaults();

    const SystemState<R> init = rewind_preparation(n1, sch.eps[0], sch.rho[0], cfg);

    Scenario<R> sc;
    sc.kind = "main";
    sc.initial = init;
    sc.expected_total = budget(n).f;
    sc.expected_stage_counts = sch.expected_stage_counts;
    std::vector<R> bounds{init.time};
    bounds.insert(bounds.end(), sch.Tm.begin(), sch.Tm.end());
    sc.stage_boundaries = bounds;

    Simulator<R> sim(init, cfg);
    sim.advance_until(sch.Tm[0]);
    sc.observed_stage_counts.push_back(sim.proper_count());
    sc.stage_ic.push_back(check_ic(sim.state_at(sch.Tm[0]), sch.eps[0], sch.rho[0]));
    for (int m = 1; m <= n2; ++m) {
        const long before = sim.proper_count();
        sim.advance_until(sch.Tm[m]);
        sc.observed_stage_counts.push_back(sim.proper_count() - before);
        if (m == n2) break;
        const R& e = sch.eps[m];
        const Vec2<R> am = sim.ball_at(ball_a(m), sch.Tm[m]).center;
        BallState<R> next{ball_a(m + 1), am - f.w0 * (R(2) + e), f.w0 * (sch.lambda[m] * sqrt(R(1) - e))};
        sim.inject(next, sch.Tm[m]);
        sc.injections.push_back(Injection<R>{sch.Tm[m], next});
        sc.stage_ic.push_back(check_ic(sim.state_at(sch.Tm[m]), e, sch.rho[m]));
    }
    sim.run();
    sc.observed_total = sim.proper_count();

    long staged = 0;
    for (long c : sc.observed_stage_counts) staged += c;
    json eps = json::array();
    for (const auto& e : sch.eps) eps.push_back(Num<R>::str(e));
    sc.parameters = json{{"eps0", Num<R>::str(eps0)},
                         {"rho0", Num<R>::str(rho0)},
                         {"eps", eps},
                         {"T", Num<R>::str(sch.T)},
                         {"tail_count", sc.observed_total - staged}};

    const auto& want = sch.expected_stage_counts;
    for (size_t i = 0; i < want.size(); ++i)
        if (sc.observed_stage_counts[i] < want[i]) {
            shortfall = Shortfall{static_cast<int>(i), sc.observed_stage_counts[i], want[i]};
            break;
        }
    return sc;
}

bool retryable(ErrorKind k) { return k == ErrorKind::SimultaneousCollision || k == ErrorKind::PersistentContact; }

} // namespace

template <class R>
Scenario<R> build_main(int n, const R& rho0, const R& eps0, bool adaptive) {
    R e = eps0;
    Shortfall last;
    for (int halvings = 0;; ++halvings) {
        try {
            Shortfall s;
            Scenario<R> sc = run_main_once(n, rho0, e, s);
            if (s.stage < 0) {
                sc.parameters["halvings"] = halvings;
                return sc;
            }
            last = s;
            if (!adaptive)
                throw Error(ErrorKind::StageCountShortfall,
                            "stage " + std::to_string(s.stage) + " has " + std::to_string(s.got) + " collisions, expected " +
                                std::to_string(s.want),
                            s.stage);
        } catch (const Error& err) {
            if (!adaptive || !retryable(err.kind())) throw;
        }
        if (halvings == 60)
            throw Error(ErrorKind::StageCountShortfall, "no admissible eps0 after 60 halvings", last.stage);
        e = e / R(2);
    }
}

double default_eps0(int n) {
    const CollisionBudget b = budget(n);
    const double T = b.n2 + std::ldexp(1.0, 2 * b.n1);
    return 0.4 / std::pow(1 + 2 * T, b.n2);
}

namespace {

template <class R>
void fill(MainBuild& out, Scenario<R> sc, int bits) {
    out.precision_bits = bits;
    out.scene = scene_to_json(to_scene(sc, bits));
    out.total = sc.observed_total;
    out.stage_counts = sc.observed_stage_counts;
    out.expected_stage_counts = *sc.expected_stage_counts;
    out.scenario = std::move(sc);
}

} // namespace

MainBuild build_main_adaptive(int n, const std::string& rho0, const std::optional<std::string>& eps0, int start_bits,
                              int max_bits) {
    std::string eps_text;
    if (eps0) {
        eps_text = *eps0;
    } else {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, default_eps0(n));
        eps_text.assign(buf, res.ptr);
    }
    MainBuild out;
    int bits = start_bits;
    for (;;) {
        ++out.attempts;
        try {
            if (bits == 0) {
                fill(out, build_main<double>(n, Num<double>::parse(rho0), Num<double>::parse(eps_text), true), 0);
            } else {
                PrecisionScope scope(bits);
                fill(out, build_main<BigFloat>(n, BigFloat(rho0), BigFloat(eps_text), true), bits);
            }
            return out;
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::PrecisionExhausted || bits >= max_bits) throw;
            bits = bits == 0 ? 128 : bits * 2;
        }
    }
}

template <class R>
Scenario<R> build_prep_scenario(int n1, const R& eps, const R& rho) {
    Scenario<R> sc;
    sc.kind = "prep";
    sc.initial = rewind_preparation(n1, eps, rho, SimConfig<R>::defaults());
    // Left alone after time 0 the configuration plays out the first stage as well.
    const long prep = static_cast<long>(n1) * (n1 - 1), stage = static_cast<long>(n1) * (n1 + 1);
    sc.expected_total = prep + stage;
    sc.expected_stage_counts = std::vector<long>{prep, stage};
    sc.stage_boundaries = std::vector<R>{sc.initial.time, R(0)};
    return sc;
}

template Scenario<double> build_prep_scenario(int, const double&, const double&);
template Scenario<BigFloat> build_prep_scenario(int, const BigFloat&, const BigFloat&);
template Scenario<double> build_main(int, const double&, const double&, bool);
template Scenario<BigFloat> build_main(int, const BigFloat&, const BigFloat&, bool);

} // namespace billiards
