#pragma once

#include "billiards/scene_io.hpp"
#include "billiards/simulator.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace billiards {

struct CollisionBudget {
    int n = 0, n1 = 0, n2 = 0;
    long long f = 0;
    long long naive = 0;
};

CollisionBudget budget(int n);

// Exact ceilings of (32 n^{3/2})^{n^2} and (400 n^2)^{2 n^4}.
std::pair<mpz_class, mpz_class> upper_bounds(int n);

template <class R>
struct StageSchedule {
    int n1 = 0, n2 = 0;
    R T, rho0, eps0;
    // Index m-1 holds stage m, m = 1..n2.
    std::vector<R> eps, rho, lambda;
    // Index m-1 holds T_m, m = 1..n2+1.
    std::vector<R> Tm;
    std::vector<long> expected_stage_counts;
};

template <class R>
StageSchedule<R> schedule(int n, const R& rho0, const R& eps0);

template <class R>
struct ICReport {
    bool clause[4] = {false, false, false, false};
    R rho_minus, rho_plus;
    // Gap ratios B1:C1 and C1:B1 from clause (iv).
    R ratio_bc, ratio_cb;
    bool ok() const { return clause[0] && clause[1] && clause[2] && clause[3]; }
    std::string describe() const;
};

// Evaluates the four (eps, rho) initial-condition clauses on a state made of
// families A_1..A_m, B_1..B_n1 and C_1..C_n1.
template <class R>
ICReport<R> check_ic(const SystemState<R>& s, const R& eps, const R& rho);

template <class R>
struct Scenario {
    std::string kind;
    SystemState<R> initial;
    InjectionSchedule<R> injections;
    long expected_total = 0;
    std::optional<std::vector<long>> expected_stage_counts;
    std::optional<std::vector<R>> stage_boundaries;
    // Filled by the builders that simulate while building.
    std::vector<long> observed_stage_counts;
    long observed_total = 0;
    std::vector<ICReport<R>> stage_ic;
    json parameters = json::object();
};

template <class R>
Scene<R> to_scene(const Scenario<R>& sc, int precision_bits);

template <class R>
Scenario<R> build_1d_max(int n);

template <class R>
Scenario<R> build_foch_like();

enum class Side { Left, Right };

template <class R>
Scenario<R> build_near_triple(const R& eps, Side side);

template <class R>
SystemState<R> build_preparation(int n1, const R& eps, const R& rho);

// Preparation configuration started one time unit before its first collision;
// it is reached at time 0.
template <class R>
Scenario<R> build_prep_scenario(int n1, const R& eps, const R& rho);

template <class R>
Scenario<R> build_main(int n, const R& rho0, const R& eps0, bool adaptive);

// Adaptive main construction that also raises precision: native double first,
// then 128, 256, ... up to max_bits of MPFR.
struct MainBuild {
    int precision_bits = 0;  // 0 for double
    std::variant<Scenario<double>, Scenario<BigFloat>> scenario;
    json scene;
    long total = 0;
    std::vector<long> stage_counts;
    std::vector<long> expected_stage_counts;
    int attempts = 0;
};

// 0.4 / (1+2T)^{n2}, so that the last stage starts at eps = 0.4.
double default_eps0(int n);

MainBuild build_main_adaptive(int n, const std::string& rho0, const std::optional<std::string>& eps0,
                              int start_bits = 0, int max_bits = 4096);

struct SmallFamilyTuning {
    double delta = 0.0039;
    double speed_factor = 1e4;
    double gap = 0.5;
    bool far_end = true;
    bool search = true;
};

template <class R>
Scenario<R> build_small_family(int n, const SmallFamilyTuning& tuning = {});

} // namespace billiards
