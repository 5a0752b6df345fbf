#include "billiards/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace billiards;
using namespace billiards::cli;

namespace {

std::vector<double> parse_eps_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, "bad eps value '" + item + "'");
        }
    }
    return out;
}

void build_flags(CLI::App* cmd, BuildOptions& b, bool need_out) {
    cmd->add_option("--kind", b.kind, "oned, foch, small, main, near-triple or prep")
        ->required()
        ->check(CLI::IsMember({"oned", "foch", "small", "main", "near-triple", "prep"}));
    cmd->add_option("--n", b.n, "number of discs (oned, small, main)");
    cmd->add_option("--n1", b.n1, "arm length (prep)");
    cmd->add_flag("--adaptive", b.adaptive, "main: halve eps0 and raise precision until the stage counts are met");
    cmd->add_option("--precision", b.precision, "MPFR bits, 0 for double (BILLIARD_PRECISION_BITS overrides)");
    cmd->add_option("--rho0", b.rho0, "main: initial rho");
    cmd->add_option("--eps0", b.eps0, "main: initial eps (default 0.4/(1+2T)^n2)");
    cmd->add_option("--eps", b.eps, "near-triple and prep: eps");
    cmd->add_option("--rho", b.rho, "prep: rho");
    cmd->add_option("--side", b.side, "near-triple: left or right");
    auto* out = cmd->add_option("--out", b.out, "scene file to write");
    if (need_out) out->required();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collision counting for elastic unit discs in the plane"};
    app.require_subcommand(1);
    std::string manifest;
    app.add_option("--manifest", manifest, "write a run manifest (JSON) to this path");

    int bounds_n = 0;
    auto* bounds = app.add_subcommand("bounds", "print f(n), n(n-1)/2 and the upper bounds");
    bounds->add_option("--n", bounds_n, "number of discs")->required();

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "run a scene file");
    simulate->add_option("scene", sim.scene, "scene JSON")->required();
    simulate->add_option("--precision", sim.precision, "MPFR bits, 0 for double");
    simulate->add_option("--stop-time", sim.stop_time, "stop at this time");
    simulate->add_option("--max-events", sim.max_events, "event cap");
    simulate->add_option("--out", sim.out, "events as JSON lines");
    simulate->add_option("--svg", sim.svg, "trajectory plot");
    simulate->add_option("--csv", sim.csv, "trajectory table with columns time,id,cx,cy,vx,vy");

    BuildOptions construct_opts, verify_opts;
    auto* construct = app.add_subcommand("construct", "write a scene for one of the constructions");
    build_flags(construct, construct_opts, true);
    auto* verify = app.add_subcommand("verify", "build, simulate and compare against the expected counts");
    build_flags(verify, verify_opts, false);

    LimitOptions lim;
    auto* limit = app.add_subcommand("limit", "exact limiting evolution for a gap file");
    limit->add_option("gaps", lim.gaps, "gap JSON")->required();
    limit->add_option("--m", lim.m, "expected m");
    limit->add_option("--n1", lim.n1, "expected n1");
    limit->add_option("--n2", lim.n2, "horizon parameter (default m)");
    limit->add_option("--report", lim.report, "JSON report path");

    ConvergeOptions conv;
    std::string eps_list;
    auto* converge = app.add_subcommand(
        "converge", "eps sweep against the limit; CSV columns eps,sup_dist,skorohod_dist,proper_count,expected_count");
    converge->add_option("gaps", conv.gaps, "gap JSON")->required();
    converge->add_option("--eps", eps_list, "comma-separated, decreasing (default 1e-2,1e-3,1e-4)");
    converge->add_option("--out", conv.out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : billiards::cli::Input;
    }

    RunManifest man;
    std::string man_path = manifest;
    std::function<int()> body;
    if (*bounds) {
        body = [&] { return cmd_bounds(bounds_n, std::cout, man); };
    } else if (*simulate) {
        body = [&] { return cmd_simulate(sim, std::cout, man); };
    } else if (*construct) {
        if (man_path.empty()) man_path = construct_opts.out + ".manifest.json";
        body = [&] { return cmd_construct(construct_opts, std::cout, man); };
    } else if (*verify) {
        if (man_path.empty()) man_path = "verify-" + verify_opts.kind + ".manifest.json";
        body = [&] { return cmd_verify(verify_opts, std::cout, man); };
    } else if (*limit) {
        body = [&] { return cmd_limit(lim, std::cout, man); };
    } else {
        body = [&] {
            if (!eps_list.empty()) conv.eps = parse_eps_list(eps_list);
            return cmd_converge(conv, std::cout, man);
        };
    }
    return run_guarded(man, man_path, std::cerr, body);
}
