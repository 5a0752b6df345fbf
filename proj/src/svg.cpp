#include "billiards/svg.hpp"
#include "billiards/trajectory.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace billiards {

namespace {

std::string fmt(double x, int digits = 2) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
    return std::string(buf, r.ptr);
}

struct Box {
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    void add(double x, double y) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
    }
    bool empty() const { return !(x0 <= x1); }
    bool contains(double x, double y) const { return x0 <= x && x <= x1 && y0 <= y && y <= y1; }
};

const std::array<const char*, 8> palette{"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                         "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

} // namespace

template <class R>
std::string trajectory_svg(const SystemState<R>& initial, const InjectionSchedule<R>& injections,
                           const SimulationReport<R>& report) {
    TrajectoryBook<R> book(initial, injections, report.events);
    const R end = report.final_state.time;
    using P = std::pair<double, double>;
    auto pt = [](const Vec2<R>& c) { return P{Num<R>::to_double(c.x), Num<R>::to_double(c.y)}; };

    // The view covers every knot up to the last collision; flight afterwards
    // only counts if it stays near that region.
    Box core;
    std::vector<std::vector<P>> paths;
    std::vector<P> finals;
    for (const auto& id : book.ids()) {
        std::vector<P> path;
        for (const auto& k : book.knots(id)) {
            path.push_back(pt(k.c));
            core.add(path.back().first, path.back().second);
        }
        finals.push_back(pt(book.at(id, end).center));
        paths.push_back(std::move(path));
    }
    if (core.empty()) core.add(0, 0);
    const double span = std::max({core.x1 - core.x0, core.y1 - core.y0, 4.0});
    Box view{core.x0 - span, core.y0 - span, core.x1 + span, core.y1 + span};
    Box fit = core;
    for (const auto& [x, y] : finals)
        if (view.contains(x, y)) fit.add(x, y);
    const double side = std::max(fit.x1 - fit.x0, fit.y1 - fit.y0) + 4;
    const double cx = 0.5 * (fit.x0 + fit.x1), cy = 0.5 * (fit.y0 + fit.y1);
    const double scale = 1000 / (side * 1.1);
    auto X = [&](double x) { return fmt(500 + (x - cx) * scale); };
    auto Y = [&](double y) { return fmt(500 - (y - cy) * scale); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n";
    os << "<defs><clipPath id=\"view\"><rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\"/></clipPath></defs>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
    os << "<g clip-path=\"url(#view)\">\n";
    std::vector<std::string> clipped;
    for (size_t i = 0; i < paths.size(); ++i) {
        const char* colour = palette[i % palette.size()];
        const std::string name = book.ids()[i].str();
        std::vector<P> path = paths[i];
        path.push_back(finals[i]);
        os << "<polyline id=\"" << name << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (size_t k = 0; k < path.size(); ++k) os << (k ? " " : "") << X(path[k].first) << ',' << Y(path[k].second);
        os << "\"/>\n";
        const P& a = paths[i].front();
        os << "<circle cx=\"" << X(a.first) << "\" cy=\"" << Y(a.second) << "\" r=\"" << fmt(scale)
           << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-dasharray=\"4 3\"/>\n";
        const P& b = finals[i];
        if (fit.contains(b.first, b.second))
            os << "<circle cx=\"" << X(b.first) << "\" cy=\"" << Y(b.second) << "\" r=\"" << fmt(scale)
               << "\" fill=\"none\" stroke=\"" << colour << "\"/>\n";
        else
            clipped.push_back(name + " ends at (" + fmt(b.first, 3) + ", " + fmt(b.second, 3) + ")");
        os << "<text x=\"" << X(a.first) << "\" y=\"" << Y(a.second) << "\" font-size=\"16\" fill=\"" << colour
           << "\">" << name << "</text>\n";
    }
    for (const auto& e : report.events) {
        if (e.kind != CollisionKind::Proper) continue;
        for (const auto* c : {&e.center_first, &e.center_second}) {
            const P p = pt(*c);
            os << "<circle cx=\"" << X(p.first) << "\" cy=\"" << Y(p.second) << "\" r=\"4\" fill=\"black\"/>\n";
        }
    }
    os << "</g>\n";
    if (!clipped.empty()) {
        const double h = 24.0 * static_cast<double>(clipped.size()) + 16;
        os << "<g id=\"inset\"><rect x=\"600\" y=\"10\" width=\"390\" height=\"" << fmt(h)
           << "\" fill=\"#f4f4f4\" stroke=\"#888\"/>\n";
        for (size_t i = 0; i < clipped.size(); ++i)
            os << "<text x=\"610\" y=\"" << fmt(34 + 24.0 * static_cast<double>(i)) << "\" font-size=\"16\">"
               << clipped[i] << " (outside view)</text>\n";
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

template std::string trajectory_svg(const SystemState<double>&, const InjectionSchedule<double>&,
                                    const SimulationReport<double>&);
template std::string trajectory_svg(const SystemState<BigFloat>&, const InjectionSchedule<BigFloat>&,
                                    const SimulationReport<BigFloat>&);

} // namespace billiards
