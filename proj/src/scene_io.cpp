#include "billiards/scene_io.hpp"

#include "billiards/trajectory.hpp"

#include <fstream>
#include <ostream>
#include <set>

namespace billiards {

namespace {

template <class R>
json vec_to_json(const Vec2<R>& v) {
    return json::array({Num<R>::str(v.x), Num<R>::str(v.y)});
}

template <class R>
R num_from_json(const json& j) {
    if (j.is_string()) return Num<R>::parse(j.get<std::string>());
    if (j.is_number()) return R(j.get<double>());
    throw Error(ErrorKind::Parse, "expected a decimal string, got " + j.dump());
}

template <class R>
Vec2<R> vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Parse, "expected a 2-vector, got " + j.dump());
    return {num_from_json<R>(j[0]), num_from_json<R>(j[1])};
}

const char* kind_str(CollisionKind k) { return k == CollisionKind::Proper ? "proper" : "grazing"; }

} // namespace

template <class R>
json ball_to_json(const BallState<R>& b) {
    return json{{"id", b.id.str()}, {"center", vec_to_json(b.center)}, {"velocity", vec_to_json(b.velocity)}};
}

template <class R>
BallState<R> ball_from_json(const json& j) {
    try {
        return BallState<R>{BallId::parse(j.at("id").get<std::string>()), vec_from_json<R>(j.at("center")),
                            vec_from_json<R>(j.at("velocity"))};
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("bad ball entry: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorKind::Parse, e.what());
    }
}

template <class R>
json scene_to_json(const Scene<R>& s) {
    json j;
    j["time"] = Num<R>::str(s.initial.time);
    j["precision_bits"] = s.precision_bits;
    j["balls"] = json::array();
    for (const auto& b : s.initial.balls) j["balls"].push_back(ball_to_json(b));
    j["injections"] = json::array();
    for (const auto& inj : s.injections)
        j["injections"].push_back(json{{"time", Num<R>::str(inj.time)}, {"ball", ball_to_json(inj.ball)}});
    if (!s.meta.empty()) j["meta"] = s.meta;
    return j;
}

template <class R>
Scene<R> scene_from_json(const json& j) {
    Scene<R> s;
    try {
        s.initial.time = j.contains("time") ? num_from_json<R>(j.at("time")) : R(0);
        for (const auto& b : j.at("balls")) s.initial.balls.push_back(ball_from_json<R>(b));
        if (j.contains("injections"))
            for (const auto& inj : j.at("injections"))
                s.injections.push_back(Injection<R>{num_from_json<R>(inj.at("time")), ball_from_json<R>(inj.at("ball"))});
        s.precision_bits = scene_precision_bits(j);
        if (j.contains("meta")) s.meta = j.at("meta");
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("bad scene: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorKind::Parse, e.what());
    }
    std::set<BallId> seen;
    for (const auto& b : s.initial.balls)
        if (!seen.insert(b.id).second) throw Error(ErrorKind::Parse, "duplicate id " + b.id.str());
    for (const auto& inj : s.injections)
        if (!seen.insert(inj.ball.id).second) throw Error(ErrorKind::Parse, "duplicate id " + inj.ball.id.str());
    return s;
}

int scene_precision_bits(const json& j) {
    if (!j.contains("precision_bits")) return 0;
    const json& p = j.at("precision_bits");
    if (!p.is_number_integer()) throw Error(ErrorKind::Parse, "precision_bits must be an integer");
    return p.get<int>();
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Parse, "cannot write " + path);
    out << j.dump(2) << "\n";
}

template <class R>
json event_to_json(const CollisionEvent<R>& e) {
    return json{{"time", Num<R>::str(e.time)},
                {"pair", json::array({e.first.str(), e.second.str()})},
                {"kind", kind_str(e.kind)},
                {"normal", vec_to_json(e.normal)},
                {"centers", json::array({vec_to_json(e.center_first), vec_to_json(e.center_second)})},
                {"pre_velocities", json::array({vec_to_json(e.pre_first), vec_to_json(e.pre_second)})},
                {"post_velocities", json::array({vec_to_json(e.post_first), vec_to_json(e.post_second)})}};
}

template <class R>
void write_events_jsonl(std::ostream& os, const std::vector<CollisionEvent<R>>& events) {
    for (const auto& e : events) os << event_to_json(e).dump() << "\n";
}

template <class R>
void write_trajectory_csv(std::ostream& os, const SystemState<R>& initial, const InjectionSchedule<R>& injections,
                          const SimulationReport<R>& report) {
    TrajectoryBook<R> book(initial, injections, report.events);
    std::vector<R> times{initial.time};
    for (const auto& inj : injections)
        if (!(report.final_state.time < inj.time)) times.push_back(inj.time);
    for (const auto& e : report.events) times.push_back(e.time);
    times.push_back(report.final_state.time);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    os << "time,id,cx,cy,vx,vy\n";
    for (const auto& t : times)
        for (const auto& id : book.ids()) {
            if (!book.exists(id, t)) continue;
            BallState<R> b = book.at(id, t);
            os << Num<R>::str(t) << ',' << id.str() << ',' << Num<R>::str(b.center.x) << ',' << Num<R>::str(b.center.y)
               << ',' << Num<R>::str(b.velocity.x) << ',' << Num<R>::str(b.velocity.y) << '\n';
        }
}

#define BILLIARDS_IO(R)                                                                                     \
    template json ball_to_json(const BallState<R>&);                                                         \
    template BallState<R> ball_from_json(const json&);                                                       \
    template json scene_to_json(const Scene<R>&);                                                            \
    template Scene<R> scene_from_json(const json&);                                                          \
    template json event_to_json(const CollisionEvent<R>&);                                                   \
    template void write_events_jsonl(std::ostream&, const std::vector<CollisionEvent<R>>&);                 \
    template void write_trajectory_csv(std::ostream&, const SystemState<R>&, const InjectionSchedule<R>&, \
                                       const SimulationReport<R>&);

BILLIARDS_IO(double)
BILLIARDS_IO(BigFloat)

} // namespace billiards
