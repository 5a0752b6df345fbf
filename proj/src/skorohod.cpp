#include "billiards/scaled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace billiards {

namespace {

double gap(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        const double d = (i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0);
        s += d * d;
    }
    return std::sqrt(s);
}

// Jump times strictly inside (0, horizon) and the values between them.
struct Steps {
    std::vector<double> jumps;
    std::vector<std::vector<double>> values;
};

Steps steps(const PiecewiseConstant& f, double horizon) {
    Steps s;
    s.values.push_back(f(0));
    for (size_t i = 0; i < f.times.size(); ++i) {
        const double t = f.times[i];
        if (t <= 0 || t >= horizon) continue;
        if (f.values[i] == s.values.back()) continue;
        s.jumps.push_back(t);
        s.values.push_back(f.values[i]);
    }
    return s;
}

// Whether some time change within d matches f to g within d. State (i, j)
// means f is on its i-th piece while g o lambda is on its j-th; best[i][j] is
// the earliest time at which that pairing can start.
bool feasible(const Steps& f, const Steps& g, double d) {
    const size_t p = f.jumps.size(), q = g.jumps.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best(p + 1, std::vector<double>(q + 1, inf));
    if (gap(f.values[0], g.values[0]) > d) return false;
    best[0][0] = 0;
    for (size_t i = 0; i <= p; ++i)
        for (size_t j = 0; j <= q; ++j) {
            const double cur = best[i][j];
            if (cur == inf) continue;
            const double r = i < p ? f.jumps[i] : inf;
            const double s = j < q ? g.jumps[j] : inf;
            auto relax = [&](size_t a, size_t b, double t) {
                if (gap(f.values[a], g.values[b]) <= d) best[a][b] = std::min(best[a][b], t);
            };
            if (i < p && r >= cur && r <= s + d) relax(i + 1, j, r);
            if (j < q) {
                const double x = std::max(s - d, cur);
                if (x <= s + d && x <= r) relax(i, j + 1, x);
            }
            if (i < p && j < q && r >= cur && std::fabs(r - s) <= d) relax(i + 1, j + 1, r);
        }
    return best[p][q] < inf;
}

} // namespace

double skorohod_distance(const PiecewiseConstant& f, const PiecewiseConstant& g, double horizon) {
    const Steps a = steps(f, horizon), b = steps(g, horizon);
    std::vector<double> cand{0};
    for (const auto& x : a.values)
        for (const auto& y : b.values) cand.push_back(gap(x, y));
    for (double r : a.jumps)
        for (double s : b.jumps) cand.push_back(std::fabs(r - s));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    size_t lo = 0, hi = cand.size() - 1;
    if (!feasible(a, b, cand[hi])) return cand[hi];
    while (lo < hi) {
        const size_t mid = (lo + hi) / 2;
        if (feasible(a, b, cand[mid])) hi = mid;
        else lo = mid + 1;
    }
    return cand[lo];
}

} // namespace billiards
