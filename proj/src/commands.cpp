#include "billiards/commands.hpp"
#include "billiards/constructions.hpp"
#include "billiards/limit.hpp"
#include "billiards/scaled.hpp"
#include "billiards/svg.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace billiards::cli {

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::SimultaneousCollision:
    case ErrorKind::PersistentContact: return Simultaneity;
    case ErrorKind::PrecisionExhausted: return Precision;
    case ErrorKind::StageCountShortfall: return Shortfall;
    case ErrorKind::TuningFailed:
    case ErrorKind::AlignmentNotFound: return Tuning;
    default: return Input;
    }
}

json RunManifest::to_json() const {
    json j{{"command", command}, {"config", config},           {"inputs", inputs},
           {"outputs", outputs}, {"exit_status", exit_status}, {"counts", counts}};
    if (!error.empty()) j["error"] = error;
    return j;
}

int resolve_precision(std::optional<int> flag, int fallback) {
    if (const char* env = std::getenv("BILLIARD_PRECISION_BITS"); env && *env) {
        try {
            size_t used = 0;
            int bits = std::stoi(env, &used);
            if (used == std::string(env).size() && bits >= 0) return bits;
        } catch (const std::exception&) {
        }
        throw Error(ErrorKind::BadParams, std::string("BILLIARD_PRECISION_BITS is not a bit count: ") + env);
    }
    return flag.value_or(fallback);
}

int run_guarded(RunManifest& man, const std::string& manifest_path, std::ostream& err,
                const std::function<int()>& body) {
    try {
        man.exit_status = body();
    } catch (const Error& e) {
        man.exit_status = exit_code(e.kind());
        // a scene that cannot be built is a tuning failure; verify reports it as a shortfall
        if (man.command == "construct" && e.kind() == ErrorKind::StageCountShortfall) man.exit_status = Tuning;
        man.error = e.what();
        if (e.stage() >= 0) man.counts["failing_stage"] = e.stage();
        err << "error: " << e.what() << "\n";
    }
    if (!manifest_path.empty()) {
        try {
            write_json_file(manifest_path, man.to_json());
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            if (man.exit_status == Ok) man.exit_status = Input;
        }
    }
    return man.exit_status;
}

namespace {

template <class F>
int with_precision(int bits, F&& body) {
    if (bits == 0) return body.template operator()<double>();
    if (bits < 2) throw Error(ErrorKind::BadParams, "precision must be 0 (double) or at least 2 bits");
    PrecisionScope scope(bits);
    return body.template operator()<BigFloat>();
}

std::string big(const mpz_class& z) {
    std::string s = z.get_str();
    if (s.size() <= 60) return s;
    return "(" + std::to_string(s.size()) + " digits)";
}

template <class R>
std::string vec_str(const Vec2<R>& v) {
    std::ostringstream os;
    os << std::setprecision(6) << "(" << Num<R>::to_double(v.x) << ", " << Num<R>::to_double(v.y) << ")";
    return os.str();
}

template <class R>
std::vector<long> stage_counts(const Scenario<R>& sc, const SimulationReport<R>& rep) {
    std::vector<long> counts;
    if (!sc.stage_boundaries || !sc.expected_stage_counts) return counts;
    const auto& b = *sc.stage_boundaries;
    const size_t windows = sc.expected_stage_counts->size();
    counts.assign(windows, 0);
    for (const auto& e : rep.events) {
        if (e.kind != CollisionKind::Proper) continue;
        for (size_t i = 0; i < windows && i < b.size(); ++i) {
            const bool after_start = i == 0 ? !(e.time < b[0]) : b[i] < e.time;
            const bool before_end = i + 1 >= b.size() || !(b[i + 1] < e.time);
            if (after_start && before_end) {
                ++counts[i];
                break;
            }
        }
    }
    return counts;
}

struct Outcome {
    long total = 0, expected = 0;
    bool exact = false;
    std::vector<long> stages, expected_stages;
    std::vector<std::string> notes;
    bool extra_ok = true;
    int precision_bits = 0;
};

template <class R>
Outcome check_scenario(const Scenario<R>& sc, bool exact) {
    const SimulationReport<R> rep = run(sc.initial, sc.injections, SimConfig<R>::defaults());
    Outcome o;
    o.total = rep.proper_count;
    o.expected = sc.expected_total;
    o.exact = exact;
    o.stages = stage_counts(sc, rep);
    if (sc.expected_stage_counts) o.expected_stages = *sc.expected_stage_counts;
    std::ostringstream d;
    d << std::setprecision(3) << "energy drift " << Num<R>::to_double(rep.energy_drift) << ", min gap "
      << Num<R>::to_double(rep.min_gap);
    o.notes.push_back(d.str());
    return o;
}

template <class R>
Scenario<R> build_kind(const BuildOptions& b) {
    const std::string& k = b.kind;
    if (k == "oned") return build_1d_max<R>(b.n);
    if (k == "foch") return build_foch_like<R>();
    if (k == "near-triple") {
        if (b.side != "left" && b.side != "right") throw Error(ErrorKind::BadParams, "side must be left or right");
        return build_near_triple<R>(Num<R>::parse(b.eps), b.side == "left" ? Side::Left : Side::Right);
    }
    if (k == "prep") return build_prep_scenario<R>(b.n1, Num<R>::parse(b.eps), Num<R>::parse(b.rho));
    if (k == "small") return build_small_family<R>(b.n);
    if (k == "main") {
        const R eps0 = b.eps0 ? Num<R>::parse(*b.eps0) : Num<R>::parse(Num<double>::str(default_eps0(b.n)));
        return build_main<R>(b.n, Num<R>::parse(b.rho0), eps0, false);
    }
    throw Error(ErrorKind::BadParams, "unknown kind " + k);
}

int default_bits(const std::string& kind) { return kind == "small" ? 128 : 0; }

json expectations(const Outcome& o) {
    json j{{"expected_total", o.expected}, {"observed_total", o.total}, {"exact", o.exact}};
    if (!o.expected_stages.empty()) j["expected_stage_counts"] = o.expected_stages;
    if (!o.stages.empty()) j["stage_counts"] = o.stages;
    j["precision_bits"] = o.precision_bits;
    return j;
}

json build_config(const BuildOptions& b, int bits) {
    json c{{"kind", b.kind}, {"precision_bits", bits}};
    if (b.kind == "oned" || b.kind == "small" || b.kind == "main") c["n"] = b.n;
    if (b.kind == "main") {
        c["adaptive"] = b.adaptive;
        c["rho0"] = b.rho0;
        if (b.eps0) c["eps0"] = *b.eps0;
    }
    if (b.kind == "near-triple") {
        c["eps"] = b.eps;
        c["side"] = b.side;
    }
    if (b.kind == "prep") {
        c["n1"] = b.n1;
        c["eps"] = b.eps;
        c["rho"] = b.rho;
    }
    return c;
}

// Builds the scenario, re-simulates it from the scene data and compares counts.
Outcome build_and_check(const BuildOptions& b, json& scene, RunManifest& man) {
    if (b.kind == "main" && b.adaptive) {
        const int start = resolve_precision(b.precision, 0);
        MainBuild mb = build_main_adaptive(b.n, b.rho0, b.eps0, start);
        scene = mb.scene;
        man.config["precision_bits"] = mb.precision_bits;
        man.config["attempts"] = mb.attempts;
        Outcome o = std::visit(
            [&](const auto& sc) {
                if (mb.precision_bits == 0) return check_scenario(sc, false);
                PrecisionScope scope(mb.precision_bits);
                return check_scenario(sc, false);
            },
            mb.scenario);
        o.precision_bits = mb.precision_bits;
        return o;
    }
    const int bits = resolve_precision(b.precision, default_bits(b.kind));
    Outcome out;
    with_precision(bits, [&]<class R>() {
        const Scenario<R> sc = build_kind<R>(b);
        scene = scene_to_json(to_scene(sc, bits));
        out = check_scenario(sc, b.kind == "oned");
        if (b.kind == "foch") {
            const SimulationReport<R> rev = run(reverse_time(sc.initial), {}, SimConfig<R>::defaults());
            out.notes.push_back("time-reversed proper=" + std::to_string(rev.proper_count));
            out.extra_ok = rev.proper_count == 1;
        }
        if (b.kind == "near-triple") {
            const SimulationReport<R> rep = run(sc.initial, {}, SimConfig<R>::defaults());
            for (const auto& ball : rep.final_state.balls)
                out.notes.push_back("final velocity " + ball.id.str() + " " + vec_str(ball.velocity));
        }
        return 0;
    });
    out.precision_bits = bits;
    return out;
}

void print_outcome(std::ostream& os, const Outcome& o) {
    os << "proper=" << o.total << " expected" << (o.exact ? "=" : ">=") << o.expected << "\n";
    if (!o.stages.empty()) {
        os << "stage  observed  expected\n";
        for (size_t i = 0; i < o.stages.size(); ++i)
            os << std::setw(5) << (i == 0 ? std::string("prep") : std::to_string(i)) << std::setw(10) << o.stages[i]
               << std::setw(10) << o.expected_stages[i] << (o.stages[i] < o.expected_stages[i] ? "  SHORT" : "")
               << "\n";
    }
    for (const auto& n : o.notes) os << n << "\n";
}

std::string q_list(const std::vector<Q>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i].get_str();
    return s;
}

} // namespace

int cmd_bounds(int n, std::ostream& os, RunManifest& man) {
    man.command = "bounds";
    man.config = json{{"n", n}};
    const CollisionBudget b = budget(n);
    const auto [u1, u2] = upper_bounds(n);
    const char* flag = b.f == b.naive ? "equal" : (b.f > b.naive ? "greater" : "less");
    const double cube = std::pow(static_cast<double>(n), 3) / 27.0;
    os << "n=" << n << " n1=" << b.n1 << " n2=" << b.n2 << "\n";
    os << "f=" << b.f << "\n";
    os << "naive=" << b.naive << " (f " << flag << ")\n";
    os << std::fixed << std::setprecision(3) << "n^3/27=" << cube << " f/(n^3/27)=" << static_cast<double>(b.f) / cube
       << "\n";
    os.unsetf(std::ios::floatfield);
    os << "upper1=" << big(u1) << "\n";
    os << "upper2=" << big(u2) << "\n";
    if (n == 3) os << "note: K(3,2)=4 (Foch)\n";
    man.counts = json{{"f", b.f}, {"naive", b.naive}, {"flag", flag}};
    return Ok;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& os, RunManifest& man) {
    man.command = "simulate";
    man.inputs = {o.scene};
    const json doc = read_json_file(o.scene);
    const int bits = resolve_precision(o.precision, scene_precision_bits(doc));
    man.config = json{{"precision_bits", bits}, {"max_events", o.max_events}};
    if (o.stop_time) man.config["stop_time"] = *o.stop_time;
    return with_precision(bits, [&]<class R>() {
        const Scene<R> scene = scene_from_json<R>(doc);
        SimConfig<R> cfg = SimConfig<R>::defaults();
        cfg.max_events = o.max_events;
        if (o.stop_time) cfg.stop_time = Num<R>::parse(*o.stop_time);
        const SimulationReport<R> rep = run(scene.initial, scene.injections, cfg);
        long grazing = 0;
        for (const auto& e : rep.events) grazing += e.kind == CollisionKind::Grazing;
        os << "proper=" << rep.proper_count << "\n";
        os << "grazing=" << grazing << "\n";
        os << std::setprecision(6) << "energy_drift=" << Num<R>::to_double(rep.energy_drift) << "\n";
        os << "momentum_drift=" << vec_str(rep.momentum_drift) << "\n";
        os << "min_gap=" << Num<R>::to_double(rep.min_gap) << "\n";
        os << "final_time=" << Num<R>::str(rep.final_state.time) << "\n";
        for (const auto& e : rep.events)
            if (e.kind == CollisionKind::Proper)
                os << "  t=" << Num<R>::str(e.time) << " " << e.first.str() << "-" << e.second.str() << "\n";
        if (!o.out.empty()) {
            std::ofstream f(o.out);
            if (!f) throw Error(ErrorKind::Parse, "cannot write " + o.out);
            write_events_jsonl(f, rep.events);
            man.outputs.push_back(o.out);
        }
        if (!o.csv.empty()) {
            std::ofstream f(o.csv);
            if (!f) throw Error(ErrorKind::Parse, "cannot write " + o.csv);
            write_trajectory_csv(f, scene.initial, scene.injections, rep);
            man.outputs.push_back(o.csv);
        }
        if (!o.svg.empty()) {
            std::ofstream f(o.svg);
            if (!f) throw Error(ErrorKind::Parse, "cannot write " + o.svg);
            f << trajectory_svg(scene.initial, scene.injections, rep);
            man.outputs.push_back(o.svg);
        }
        man.counts = json{{"proper", rep.proper_count}, {"grazing", grazing}};
        return Ok;
    });
}

int cmd_construct(const BuildOptions& b, std::ostream& os, RunManifest& man) {
    man.command = "construct";
    if (b.out.empty()) throw Error(ErrorKind::BadParams, "--out is required");
    man.config = build_config(b, resolve_precision(b.precision, default_bits(b.kind)));
    json scene;
    const Outcome o = build_and_check(b, scene, man);
    write_json_file(b.out, scene);
    man.outputs.push_back(b.out);
    man.counts = expectations(o);
    os << "wrote " << b.out << "\n";
    print_outcome(os, o);
    return Ok;
}

int cmd_verify(const BuildOptions& b, std::ostream& os, RunManifest& man) {
    man.command = "verify";
    man.config = build_config(b, resolve_precision(b.precision, default_bits(b.kind)));
    json scene;
    const Outcome o = build_and_check(b, scene, man);
    if (!b.out.empty()) {
        write_json_file(b.out, scene);
        man.outputs.push_back(b.out);
    }
    man.counts = expectations(o);
    print_outcome(os, o);
    bool ok = (o.exact ? o.total == o.expected : o.total >= o.expected) && o.extra_ok;
    for (size_t i = 0; i < o.stages.size(); ++i)
        if (o.stages[i] < o.expected_stages[i]) {
            if (ok) os << "shortfall in stage " << i << "\n";
            man.counts["failing_stage"] = i;
            ok = false;
        }
    os << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? Ok : Shortfall;
}

int cmd_limit(const LimitOptions& o, std::ostream& os, RunManifest& man) {
    man.command = "limit";
    man.inputs = {o.gaps};
    const GapInit g = GapInit::from_json(read_json_file(o.gaps));
    if ((o.m && *o.m != g.m()) || (o.n1 && *o.n1 != g.n1()))
        throw Error(ErrorKind::BadGaps, "gap file describes m=" + std::to_string(g.m()) +
                                            ", n1=" + std::to_string(g.n1()));
    const LimitEvolution L = build_limit(g);
    const int n2 = o.n2.value_or(L.m);
    const TerminalChecks term = terminal_checks(L, n2);
    const auto jumps = discontinuities(L, term.T);
    const long expected = L.m - 1 + static_cast<long>(L.n1) * (L.n1 + 1);
    man.config = json{{"m", L.m}, {"n1", L.n1}, {"n2", n2}};

    os << "m=" << L.m << " n1=" << L.n1 << " T=" << term.T.get_str() << "\n";
    os << "tA: " << q_list(L.tA) << "\ntB: " << q_list(L.tB) << "\ntC: " << q_list(L.tC) << "\n";
    os << "continuity_defect=" << L.continuity_defect.get_str() << "\n";
    json report{{"tA", json::array()}, {"tB", json::array()}, {"tC", json::array()}, {"discontinuities", json::array()}};
    for (const auto& t : L.tA) report["tA"].push_back(t.get_str());
    for (const auto& t : L.tB) report["tB"].push_back(t.get_str());
    for (const auto& t : L.tC) report["tC"].push_back(t.get_str());
    for (const auto& d : jumps) {
        json ids = json::array();
        std::string names;
        for (const auto& c : d.components) {
            ids.push_back(c.str());
            names += " " + c.str();
        }
        os << "  jump t=" << d.time.get_str() << " " << jump_kind_name(d.kind) << names << "\n";
        report["discontinuities"].push_back(json{{"time", d.time.get_str()}, {"kind", jump_kind_name(d.kind)}, {"components", ids}});
    }
    os << "discontinuities=" << jumps.size() << " expected=" << expected << "\n";

    bool conserved = true;
    json cons = json::array();
    for (const auto* ts : {&L.tB, &L.tC})
        for (const auto& t : *ts) {
            const ConservationResult r = conservation_check(L, t);
            conserved = conserved && r.ok();
            os << "  conservation t=" << t.get_str() << " momentum=" << r.momentum << " energy=" << r.energy
               << " transfer=" << r.transfer << " arm=" << r.arm << "\n";
            cons.push_back(json{{"time", t.get_str()}, {"ok", r.ok()}, {"energy", r.energy_after.str()}});
        }
    os << "conservation=" << (conserved ? "pass" : "fail") << "\n";
    os << "terminal: tC_formula=" << term.tC_formula.get_str() << " matches=" << term.tC_matches
       << " tC_bounds=" << term.tC_bounds << " arm_gaps=" << term.arm_gaps << " a_gap=" << term.a_gap
       << " ratio=" << term.ratio << " ordering=" << term.ordering << " lipschitz=" << term.lipschitz
       << " speed=" << term.speed << " reversal=" << term.reversal << "\n";

    report["conservation"] = cons;
    report["terminal"] = json{{"T", term.T.get_str()},          {"tC_matches", term.tC_matches},
                              {"tC_bounds", term.tC_bounds},    {"arm_gaps", term.arm_gaps},
                              {"a_gap", term.a_gap},            {"ratio", term.ratio},
                              {"ordering", term.ordering},      {"lipschitz", term.lipschitz},
                              {"speed", term.speed},            {"reversal", term.reversal}};
    report["gaps"] = g.to_json();
    if (!o.report.empty()) {
        write_json_file(o.report, report);
        man.outputs.push_back(o.report);
    }
    man.counts = json{{"discontinuities", jumps.size()}, {"expected", expected}, {"conservation", conserved}};
    const bool ok = static_cast<long>(jumps.size()) == expected && conserved && L.continuity_defect == 0;
    return ok ? Ok : Shortfall;
}

int cmd_converge(const ConvergeOptions& o, std::ostream& os, RunManifest& man) {
    man.command = "converge";
    man.inputs = {o.gaps};
    man.config = json{{"eps", o.eps}};
    const GapInit g = GapInit::from_json(read_json_file(o.gaps));
    const auto rows = convergence_experiment(g, o.eps, SimConfig<double>::defaults());
    const std::string csv = convergence_csv(rows);
    if (o.out.empty()) {
        os << csv;
    } else {
        std::ofstream f(o.out);
        if (!f) throw Error(ErrorKind::Parse, "cannot write " + o.out);
        f << csv;
        man.outputs.push_back(o.out);
        os << "wrote " << o.out << "\n";
    }
    bool monotone = true;
    for (size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].sup_dist <= 2 * rows[i - 1].sup_dist;
    bool gaps = true;
    for (const auto& r : rows) gaps = gaps && r.gaps.ok;
    const ConvergenceRow& last = rows.back();
    const bool count = last.proper_count == last.expected_count;
    os << "decreasing=" << (monotone ? "yes" : "no") << " gap_bound=" << (gaps ? "holds" : "violated")
       << " count_at_smallest_eps=" << last.proper_count << "/" << last.expected_count << "\n";
    man.counts = json{{"proper_count", last.proper_count}, {"expected_count", last.expected_count}};
    return count ? Ok : Shortfall;
}

} // namespace billiards::cli
