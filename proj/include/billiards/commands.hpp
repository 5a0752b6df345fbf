#pragma once

#include "billiards/errors.hpp"
#include "billiards/scene_io.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace billiards::cli {

enum Exit { Ok = 0, Shortfall = 1, Input = 2, Simultaneity = 3, Precision = 4, Tuning = 5 };

int exit_code(ErrorKind k);

struct RunManifest {
    std::string command;
    json config = json::object();
    std::vector<std::string> inputs, outputs;
    int exit_status = 0;
    json counts = json::object();
    std::string error;

    json to_json() const;
};

// Precision in bits from BILLIARD_PRECISION_BITS, else the flag, else the fallback (0 = double).
int resolve_precision(std::optional<int> flag, int fallback);

struct SimulateOptions {
    std::string scene;
    std::optional<int> precision;
    std::optional<std::string> stop_time;
    long max_events = 1000000;
    std::string out, svg, csv;
};

struct BuildOptions {
    std::string kind;
    int n = 0;
    int n1 = 0;
    bool adaptive = false;
    std::optional<int> precision;
    std::string rho0 = "3";
    std::optional<std::string> eps0;
    std::string eps = "0.001";  // near-triple and prep
    std::string rho = "3";      // prep
    std::string side = "left";
    std::string out;
};

struct LimitOptions {
    std::string gaps;
    std::optional<int> m, n1, n2;
    std::string report;
};

struct ConvergeOptions {
    std::string gaps;
    std::vector<double> eps{1e-2, 1e-3, 1e-4};
    std::string out;
};

int cmd_bounds(int n, std::ostream& os, RunManifest& man);
int cmd_simulate(const SimulateOptions& o, std::ostream& os, RunManifest& man);
int cmd_construct(const BuildOptions& o, std::ostream& os, RunManifest& man);
int cmd_verify(const BuildOptions& o, std::ostream& os, RunManifest& man);
int cmd_limit(const LimitOptions& o, std::ostream& os, RunManifest& man);
int cmd_converge(const ConvergeOptions& o, std::ostream& os, RunManifest& man);

// Runs a command, mapping errors to exit codes and writing the manifest (if a
// path is given) once the command has finished, successfully or not.
int run_guarded(RunManifest& man, const std::string& manifest_path, std::ostream& err,
                const std::function<int()>& body);

} // namespace billiards::cli
