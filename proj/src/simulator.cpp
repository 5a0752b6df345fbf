#include "billiards/simulator.hpp"

#include <algorithm>
#include <cctype>

namespace billiards {

std::string BallId::str() const {
    static const char letters[] = {'A', 'B', 'C', 'P'};
    return std::string(1, letters[static_cast<int>(family)]) + std::to_string(index);
}

BallId BallId::parse(const std::string& s) {
    if (s.size() < 2) throw Error(ErrorKind::Parse, "bad ball id '" + s + "'");
    BallId id;
    switch (s[0]) {
    case 'A': id.family = Family::A; break;
    case 'B': id.family = Family::B; break;
    case 'C': id.family = Family::C; break;
    case 'P': id.family = Family::P; break;
    default: throw Error(ErrorKind::Parse, "bad ball family in '" + s + "'");
    }
    for (size_t k = 1; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k]))) throw Error(ErrorKind::Parse, "bad ball index in '" + s + "'");
    id.index = std::stoi(s.substr(1));
    return id;
}

template <class R>
const BallState<R>* SystemState<R>::find(const BallId& id) const {
    for (const auto& b : balls)
        if (b.id == id) return &b;
    return nullptr;
}

template <class R>
BallState<R>* SystemState<R>::find(const BallId& id) {
    for (auto& b : balls)
        if (b.id == id) return &b;
    return nullptr;
}

template <class R>
const BallState<R>& SystemState<R>::at(const BallId& id) const {
    const BallState<R>* b = find(id);
    if (!b) throw Error(ErrorKind::BadFamilies, "no ball " + id.str());
    return *b;
}

template <>
SimConfig<double> SimConfig<double>::defaults() {
    SimConfig<double> c;
    c.overlap_tol = 1e-10;
    c.grazing_tol = 1e-12;
    c.simultaneity_tol = 1e-10;
    return c;
}

template <>
SimConfig<BigFloat> SimConfig<BigFloat>::defaults() {
    SimConfig<BigFloat> c;
    c.overlap_tol = BigFloat(1e-10);
    BigFloat g(1);
    mpfr_mul_2si(g.get(), g.get(), 16 - static_cast<long>(BigFloat::working_precision()), MPFR_RNDN);
    c.grazing_tol = g;
    c.simultaneity_tol = BigFloat(1e-10);
    return c;
}

template <class R>
std::optional<R> time_to_collision(const BallState<R>& b1, const BallState<R>& b2, const R& overlap_tol) {
    Vec2<R> dc = b1.center - b2.center;
    R lim = R(2) - overlap_tol;
    if (norm2(dc) < lim * lim)
        throw Error(ErrorKind::OverlapInput, b1.id.str() + " and " + b2.id.str() + " overlap");
    Vec2<R> dv = b1.velocity - b2.velocity;
    R b = dot(dc, dv);
    if (!(b < R(0))) return std::nullopt;
    R a = norm2(dv);
    R c = norm2(dc) - R(4);
    R disc = b * b - a * c;
    if (disc < R(0)) return std::nullopt;
    R t = c / (sqrt(disc) - b);
    if (t < R(0)) t = R(0);
    return t;
}

template <class R>
std::pair<Vec2<R>, Vec2<R>> resolve_collision(const BallState<R>& b1, const BallState<R>& b2,
                                              const R& contact_tol, const R& grazing_tol) {
    Vec2<R> x = b1.center - b2.center;
    R d = norm(x);
    if (abs(d - R(2)) > contact_tol)
        throw Error(ErrorKind::NotInContact, b1.id.str() + " and " + b2.id.str() + " are not touching");
    Vec2<R> rel = b1.velocity - b2.velocity;
    R approach = dot(rel, x);
    if (approach > grazing_tol)
        throw Error(ErrorKind::Receding, b1.id.str() + " and " + b2.id.str() + " are separating");
    Vec2<R> p = x * (approach / norm2(x));
    return {b1.velocity - p, b2.velocity + p};
}

template <class R>
SystemState<R> reverse_time(const SystemState<R>& s) {
    SystemState<R> r = s;
    for (auto& b : r.balls) b.velocity = -b.velocity;
    return r;
}

template <class R>
R kinetic_energy(const SystemState<R>& s) {
    R e(0);
    for (const auto& b : s.balls) e += norm2(b.velocity);
    return e;
}

template <class R>
Vec2<R> momentum(const SystemState<R>& s) {
    Vec2<R> p;
    for (const auto& b : s.balls) p += b.velocity;
    return p;
}

template <class R>
Simulator<R>::Simulator(const SystemState<R>& initial, SimConfig<R> cfg)
    : cfg_(std::move(cfg)), now_(initial.time), start_(initial.time), energy_in_(0), min_gap_(1e300) {
    for (size_t i = 0; i < initial.balls.size(); ++i)
        for (size_t j = 0; j < i; ++j) {
            if (initial.balls[i].id == initial.balls[j].id)
                throw Error(ErrorKind::BadParams, "duplicate ball id " + initial.balls[i].id.str());
            R gap = norm(initial.balls[i].center - initial.balls[j].center) - R(2);
            if (gap < -cfg_.overlap_tol)
                throw Error(ErrorKind::OverlapInput,
                            initial.balls[i].id.str() + " and " + initial.balls[j].id.str() + " overlap");
            if (gap < min_gap_) min_gap_ = gap;
        }
    for (const auto& b : initial.balls) {
        balls_.push_back(Ball{b, initial.time, 0});
        energy_in_ += norm2(b.velocity);
        momentum_in_ += b.velocity;
    }
    for (int i = 0; i < static_cast<int>(balls_.size()); ++i)
        for (int j = i + 1; j < static_cast<int>(balls_.size()); ++j) predict(i, j);
}

template <class R>
Vec2<R> Simulator<R>::center_at(const Ball& b, const R& t) const {
    return b.s.center + b.s.velocity * (t - b.t);
}

template <class R>
void Simulator<R>::predict(int i, int j) {
    const Ball& a = balls_[i];
    const Ball& b = balls_[j];
    Vec2<R> dc = center_at(a, now_) - center_at(b, now_);
    Vec2<R> dv = a.s.velocity - b.s.velocity;
    R bb = dot(dc, dv);
    if (!(bb < R(0))) return;
    R aa = norm2(dv);
    R cc = norm2(dc) - R(4);
    R disc = bb * bb - aa * cc;
    if (disc < R(0)) return;
    R dt = cc / (sqrt(disc) - bb);
    if (dt < R(0)) dt = R(0);
    queue_.push(Pending{now_ + dt, i, j, a.version, b.version});
}

template <class R>
void Simulator<R>::predict_all(int i, int skip) {
    for (int k = 0; k < static_cast<int>(balls_.size()); ++k) {
        if (k == i || k == skip) continue;
        if (k < i) predict(k, i);
        else predict(i, k);
    }
}

template <class R>
bool Simulator<R>::valid(const Pending& p) const {
    return balls_[p.i].version == p.vi && balls_[p.j].version == p.vj;
}

template <class R>
void Simulator<R>::drop_stale() {
    while (!queue_.empty() && !valid(queue_.top())) queue_.pop();
}

template <class R>
typename Simulator<R>::Step Simulator<R>::next_step(const std::optional<R>& limit) {
    drop_stale();
    bool have_event = !queue_.empty();
    bool have_inj = next_injection_ < pending_injections_.size();
    if (have_event && (!have_inj || !(pending_injections_[next_injection_].time < queue_.top().time))) {
        if (!limit || !(*limit < queue_.top().time)) return Step::Event;
        return Step::None;
    }
    if (have_inj) {
        if (!limit || !(*limit < pending_injections_[next_injection_].time)) return Step::Injection;
    }
    return Step::None;
}

template <class R>
void Simulator<R>::check_simultaneous(int i, int j, bool post) const {
    for (int p : {i, j}) {
        Vec2<R> cp = balls_[p].s.center + balls_[p].s.velocity * (now_ - balls_[p].t);
        for (int k = 0; k < static_cast<int>(balls_.size()); ++k) {
            if (k == i || k == j) continue;
            Vec2<R> x = cp - center_at(balls_[k], now_);
            R d = norm(x);
            if (d - R(2) > cfg_.simultaneity_tol) continue;
            R closing = -dot(balls_[p].s.velocity - balls_[k].s.velocity, x) / d;
            if (closing > cfg_.grazing_tol)
                throw Error(ErrorKind::SimultaneousCollision,
                            balls_[i].s.id.str() + "-" + balls_[j].s.id.str() + " with " + balls_[k].s.id.str() +
                                (post ? " (after resolution)" : "") + " at t=" + Num<R>::str(now_));
        }
    }
}

template <class R>
void Simulator<R>::track_gaps(int i) {
    Vec2<R> ci = center_at(balls_[i], now_);
    for (int k = 0; k < static_cast<int>(balls_.size()); ++k) {
        if (k == i) continue;
        R gap = norm(ci - center_at(balls_[k], now_)) - R(2);
        if (gap < min_gap_) min_gap_ = gap;
        if (gap < -cfg_.overlap_tol * R(1000))
            throw Error(ErrorKind::PrecisionExhausted, balls_[i].s.id.str() + " and " + balls_[k].s.id.str() +
                                                           " overlap at t=" + Num<R>::str(now_));
    }
}

template <class R>
void Simulator<R>::do_event() {
    Pending p = queue_.top();
    queue_.pop();
    Ball& a = balls_[p.i];
    Ball& b = balls_[p.j];
    if (p.time < now_) p.time = now_;
    now_ = p.time;
    Vec2<R> ca = center_at(a, now_);
    Vec2<R> cb = center_at(b, now_);
    Vec2<R> x = ca - cb;
    R d = norm(x);

    R scale = norm(ca) + norm(cb) + (norm(a.s.velocity) + norm(b.s.velocity)) * abs(now_);
    R contact_tol = cfg_.overlap_tol + R(256) * Num<R>::machine_eps() * scale;
    if (abs(d - R(2)) > contact_tol)
        throw Error(ErrorKind::PrecisionExhausted, "contact of " + a.s.id.str() + " and " + b.s.id.str() +
                                                       " is not resolvable at t=" + Num<R>::str(now_));

    check_simultaneous(p.i, p.j, false);

    Vec2<R> n = x / d;
    Vec2<R> rel = a.s.velocity - b.s.velocity;
    R closing = -dot(rel, n);

    CollisionEvent<R> ev{now_, a.s.id, b.s.id, n, CollisionKind::Proper, a.s.velocity, b.s.velocity,
                         a.s.velocity, b.s.velocity, ca, cb};
    if (!(closing > cfg_.grazing_tol)) {
        if (!(norm(rel) > cfg_.grazing_tol))
            throw Error(ErrorKind::PersistentContact, a.s.id.str() + " and " + b.s.id.str() + " travel together");
        ev.kind = CollisionKind::Grazing;
    } else {
        Vec2<R> impulse = n * closing;
        a.s.velocity += impulse;
        b.s.velocity -= impulse;
        ev.post_first = a.s.velocity;
        ev.post_second = b.s.velocity;
        if (dot(a.s.velocity - b.s.velocity, n) < -cfg_.grazing_tol)
            throw Error(ErrorKind::PrecisionExhausted, "pair still approaching after resolution at t=" + Num<R>::str(now_));
        ++proper_;
    }
    a.s.center = ca;
    a.t = now_;
    ++a.version;
    b.s.center = cb;
    b.t = now_;
    ++b.version;
    events_.push_back(ev);

    if (ev.kind == CollisionKind::Proper) check_simultaneous(p.i, p.j, true);
    track_gaps(p.i);
    track_gaps(p.j);
    predict_all(p.i, p.j);
    predict_all(p.j, p.i);
}

template <class R>
void Simulator<R>::add_ball(const BallState<R>& ball, const R& t) {
    for (const auto& b : balls_)
        if (b.s.id == ball.id) throw Error(ErrorKind::InvalidInjection, "duplicate ball id " + ball.id.str());
    if (t < now_) throw Error(ErrorKind::InvalidInjection, "injection of " + ball.id.str() + " lies in the past");
    now_ = t;
    for (const auto& b : balls_) {
        R gap = norm(ball.center - center_at(b, now_)) - R(2);
        if (gap < -cfg_.overlap_tol)
            throw Error(ErrorKind::InvalidInjection, ball.id.str() + " overlaps " + b.s.id.str() + " when injected");
    }
    balls_.push_back(Ball{ball, t, 0});
    energy_in_ += norm2(ball.velocity);
    momentum_in_ += ball.velocity;
    int i = static_cast<int>(balls_.size()) - 1;
    track_gaps(i);
    predict_all(i, -1);
}

template <class R>
void Simulator<R>::do_injection() {
    const Injection<R> inj = pending_injections_[next_injection_++];
    add_ball(inj.ball, inj.time);
}

template <class R>
void Simulator<R>::schedule(const Injection<R>& inj) {
    if (inj.time < now_) throw Error(ErrorKind::InvalidInjection, "injection time precedes the current time");
    if (!pending_injections_.empty() && !(pending_injections_.back().time < inj.time))
        throw Error(ErrorKind::InvalidInjection, "injection times must be strictly increasing");
    pending_injections_.push_back(inj);
}

template <class R>
void Simulator<R>::inject(const BallState<R>& ball, const R& t) {
    advance_until(t);
    add_ball(ball, t);
}

template <class R>
void Simulator<R>::advance_until(const R& t) {
    while (static_cast<long>(events_.size()) < cfg_.max_events) {
        Step s = next_step(t);
        if (s == Step::None) break;
        if (s == Step::Event) do_event();
        else do_injection();
    }
    if (now_ < t) now_ = t;
}

template <class R>
void Simulator<R>::run() {
    while (static_cast<long>(events_.size()) < cfg_.max_events) {
        Step s = next_step(cfg_.stop_time);
        if (s == Step::None) break;
        if (s == Step::Event) do_event();
        else do_injection();
    }
    if (cfg_.stop_time && now_ < *cfg_.stop_time) now_ = *cfg_.stop_time;
}

template <class R>
bool Simulator<R>::step() {
    for (;;) {
        Step s = next_step(std::nullopt);
        if (s == Step::None) return false;
        if (s == Step::Injection) {
            do_injection();
            continue;
        }
        do_event();
        return true;
    }
}

template <class R>
bool Simulator<R>::quiescent() const {
    auto q = queue_;
    while (!q.empty() && !valid(q.top())) q.pop();
    return q.empty() && next_injection_ >= pending_injections_.size();
}

template <class R>
SystemState<R> Simulator<R>::state_at(const R& t) const {
    SystemState<R> s;
    s.time = t;
    for (const auto& b : balls_) s.balls.push_back(BallState<R>{b.s.id, center_at(b, t), b.s.velocity});
    return s;
}

template <class R>
BallState<R> Simulator<R>::ball_at(const BallId& id, const R& t) const {
    for (const auto& b : balls_)
        if (b.s.id == id) return BallState<R>{id, center_at(b, t), b.s.velocity};
    throw Error(ErrorKind::BadFamilies, "no ball " + id.str());
}

template <class R>
SimulationReport<R> Simulator<R>::report() const {
    SimulationReport<R> r;
    r.events = events_;
    r.final_state = state_at(now_);
    r.start_time = start_;
    r.proper_count = proper_;
    R e = kinetic_energy(r.final_state);
    r.energy_drift = energy_in_ == R(0) ? abs(e) : abs(e - energy_in_) / energy_in_;
    r.momentum_drift = momentum(r.final_state) - momentum_in_;
    r.min_gap = min_gap_;
    for (size_t i = 0; i < r.final_state.balls.size(); ++i)
        for (size_t j = 0; j < i; ++j) {
            R gap = norm(r.final_state.balls[i].center - r.final_state.balls[j].center) - R(2);
            if (gap < r.min_gap) r.min_gap = gap;
        }
    r.quiescent = quiescent();
    return r;
}

template <class R>
SimulationReport<R> run(const SystemState<R>& initial, const InjectionSchedule<R>& injections,
                        const SimConfig<R>& cfg) {
    Simulator<R> sim(initial, cfg);
    for (const auto& inj : injections) sim.schedule(inj);
    sim.run();
    return sim.report();
}

#define BILLIARDS_INSTANTIATE(R)                                                                              \
    template struct SystemState<R>;                                                                            \
    template std::optional<R> time_to_collision(const BallState<R>&, const BallState<R>&, const R&);          \
    template std::pair<Vec2<R>, Vec2<R>> resolve_collision(const BallState<R>&, const BallState<R>&, const R&, \
                                                           const R&);                                          \
    template SystemState<R> reverse_time(const SystemState<R>&);                                               \
    template R kinetic_energy(const SystemState<R>&);                                                          \
    template Vec2<R> momentum(const SystemState<R>&);                                                          \
    template class Simulator<R>;                                                                               \
    template SimulationReport<R> run(const SystemState<R>&, const InjectionSchedule<R>&, const SimConfig<R>&);

BILLIARDS_INSTANTIATE(double)
BILLIARDS_INSTANTIATE(BigFloat)

} // namespace billiards
