#pragma once

#include "billiards/vec2.hpp"

#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace billiards {

enum class Family { A, B, C, P };

struct BallId {
    Family family = Family::P;
    int index = 0;

    std::string str() const;
    static BallId parse(const std::string& s);
    friend bool operator==(const BallId&, const BallId&) = default;
    friend auto operator<=>(const BallId&, const BallId&) = default;
};

inline BallId ball_a(int k) { return {Family::A, k}; }
inline BallId ball_b(int k) { return {Family::B, k}; }
inline BallId ball_c(int k) { return {Family::C, k}; }
inline BallId ball_p(int k) { return {Family::P, k}; }

template <class R>
struct BallState {
    BallId id;
    Vec2<R> center;
    Vec2<R> velocity;
};

template <class R>
struct SystemState {
    R time{0};
    std::vector<BallState<R>> balls;

    const BallState<R>* find(const BallId& id) const;
    BallState<R>* find(const BallId& id);
    const BallState<R>& at(const BallId& id) const;
};

enum class CollisionKind { Proper, Grazing };

template <class R>
struct CollisionEvent {
    R time;
    BallId first, second;
    Vec2<R> normal;  // unit vector from second's center to first's center
    CollisionKind kind = CollisionKind::Proper;
    Vec2<R> pre_first, pre_second;
    Vec2<R> post_first, post_second;
    Vec2<R> center_first, center_second;
};

template <class R>
struct SimConfig {
    std::optional<R> stop_time;
    long max_events = 1000000;
    R overlap_tol;
    R grazing_tol;
    // A third disc within this distance of contact with a participant, and
    // approaching it, makes the event a simultaneous collision.
    R simultaneity_tol;

    static SimConfig defaults();
};

template <class R>
struct Injection {
    R time;
    BallState<R> ball;
};

template <class R>
using InjectionSchedule = std::vector<Injection<R>>;

template <class R>
struct SimulationReport {
    std::vector<CollisionEvent<R>> events;
    SystemState<R> final_state;
    R start_time{0};
    long proper_count = 0;
    R energy_drift{0};       // relative
    Vec2<R> momentum_drift;  // absolute, per component
    R min_gap{0};            // smallest |c_i - c_j| - 2 seen at events and at the end
    bool quiescent = false;
};

template <class R>
std::optional<R> time_to_collision(const BallState<R>& b1, const BallState<R>& b2, const R& overlap_tol);

template <class R>
std::pair<Vec2<R>, Vec2<R>> resolve_collision(const BallState<R>& b1, const BallState<R>& b2,
                                              const R& contact_tol, const R& grazing_tol);

template <class R>
SystemState<R> reverse_time(const SystemState<R>& s);

template <class R>
R kinetic_energy(const SystemState<R>& s);

template <class R>
Vec2<R> momentum(const SystemState<R>& s);

// Incremental event-driven simulator. Each ball keeps its center at its own
// last-update time; positions at other times are extrapolated on demand.
template <class R>
class Simulator {
public:
    Simulator(const SystemState<R>& initial, SimConfig<R> cfg);

    void schedule(const Injection<R>& inj);
    // Adds a ball at time t (>= now), applying the same checks as a scheduled injection.
    void inject(const BallState<R>& ball, const R& t);

    // Processes every event and injection with time <= t, then sets now = t.
    void advance_until(const R& t);
    // Runs until stop_time, max_events, or quiescence.
    void run();
    // Processes the next collision, together with any injections due before it.
    // Returns false if no collision is pending.
    bool step();

    const R& now() const { return now_; }
    SystemState<R> state_at(const R& t) const;
    BallState<R> ball_at(const BallId& id, const R& t) const;
    const std::vector<CollisionEvent<R>>& events() const { return events_; }
    long proper_count() const { return proper_; }
    bool quiescent() const;
    SimulationReport<R> report() const;

private:
    struct Ball {
        BallState<R> s;
        R t;  // time at which s.center is valid
        long version = 0;
    };
    struct Pending {
        R time;
        int i, j;
        long vi, vj;
    };
    struct Later {
        bool operator()(const Pending& a, const Pending& b) const {
            if (a.time != b.time) return b.time < a.time;
            if (a.i != b.i) return a.i > b.i;
            return a.j > b.j;
        }
    };

    enum class Step { Event, Injection, None };

    Vec2<R> center_at(const Ball& b, const R& t) const;
    void predict(int i, int j);
    void predict_all(int i, int skip);
    bool valid(const Pending& p) const;
    void drop_stale();
    Step next_step(const std::optional<R>& limit);
    void do_event();
    void do_injection();
    void add_ball(const BallState<R>& ball, const R& t);
    void check_simultaneous(int i, int j, bool post) const;
    void track_gaps(int i);

    SimConfig<R> cfg_;
    R now_;
    R start_;
    std::vector<Ball> balls_;
    std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
    std::vector<Injection<R>> pending_injections_;
    size_t next_injection_ = 0;
    std::vector<CollisionEvent<R>> events_;
    long proper_ = 0;
    R energy_in_;
    Vec2<R> momentum_in_;
    R min_gap_;
};

template <class R>
SimulationReport<R> run(const SystemState<R>& initial, const InjectionSchedule<R>& injections,
                        const SimConfig<R>& cfg);

} // namespace billiards
