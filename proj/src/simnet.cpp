#include "sctsn/simnet.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "sctsn/dpce.hpp"
#include "sctsn/rng.hpp"
#include "sctsn/tsor.hpp"

namespace sctsn::simnet {

std::uint64_t path_hash(const Path& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (LinkId e : p.links) {
        for (int i = 0; i < 4; ++i) {
            h ^= (e >> (8 * i)) & 0xFFu;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::size_t rule_updates(const Topology& topo, const Path* old, int old_tag, const Path& next, int tag) {
    if (!old) return next.links.size() + 1;
    std::map<NodeId, LinkId> previous;
    for (LinkId e : old->links) previous[topo.link(e).src] = e;
    std::size_t n = 0;
    for (std::size_t i = 0; i < next.links.size(); ++i) {
        auto it = previous.find(topo.link(next.links[i]).src);
        const bool same = it != previous.end() && it->second == next.links[i] && (i > 0 || old_tag == tag);
        if (!same) ++n;
    }
    return n;
}

std::vector<StreamInfo> generate_streams(const Scenario& s) {
    const auto& topo = s.topology;
    std::vector<StreamInfo> out;
    Rng rng(Rng::derive(s.seed, 0));
    std::size_t tt_n = 0, be_n = 0;
    auto name = [&](StreamKind k) { return k == StreamKind::tt ? "tt" + std::to_string(tt_n++) : "be" + std::to_string(be_n++); };
    auto finish = [&](StreamInfo& st) {
        st.src_switch = topo.hosts()[st.src_host].attached;
        st.dst_switch = topo.hosts()[st.dst_host].attached;
    };
    for (const auto& spec : s.streams) {
        StreamInfo st;
        st.kind = spec.kind;
        st.id = name(spec.kind);
        st.src_host = *topo.find_host(spec.src_host);
        st.dst_host = *topo.find_host(spec.dst_host);
        st.frame_bytes = spec.frame_bytes;
        if (spec.kind == StreamKind::tt) {
            st.period_s = spec.period_s;
            st.start_s = spec.start_s ? *spec.start_s : rng.uniform(0.0, spec.period_s);
        } else {
            st.mean_interarrival_s = spec.mean_interarrival_s;
            st.start_s = spec.start_s.value_or(0.0);
        }
        finish(st);
        out.push_back(std::move(st));
    }
    const auto hosts = topo.hosts();
    auto pick_pair = [&](StreamInfo& st) {
        st.src_host = rng.index(hosts.size());
        do {
            st.dst_host = rng.index(hosts.size());
        } while (hosts[st.dst_host].attached == hosts[st.src_host].attached);
        finish(st);
    };
    for (std::size_t i = 0; i < s.tt.count; ++i) {
        StreamInfo st;
        st.kind = StreamKind::tt;
        st.id = name(st.kind);
        pick_pair(st);
        st.period_s = rng.uniform(s.tt.period_min_s, s.tt.period_max_s);
        st.start_s = rng.uniform(0.0, st.period_s);
        st.frame_bytes = s.tt.frame_bytes;
        out.push_back(std::move(st));
    }
    for (std::size_t i = 0; i < s.be.count; ++i) {
        StreamInfo st;
        st.kind = StreamKind::be;
        st.id = name(st.kind);
        pick_pair(st);
        st.mean_interarrival_s = s.be.mean_interarrival_s;
        st.frame_bytes = s.be.frame_bytes;
        out.push_back(std::move(st));
    }
    return out;
}

namespace {

enum class EventType : std::uint8_t { emit, ready, tx_done, install_done, stats_tick };

struct Event {
    double t;
    std::uint64_t seq;
    EventType type;
    std::uint64_t a;
    std::uint64_t b;
};

struct Later {
    bool operator()(const Event& x, const Event& y) const { return x.t > y.t || (x.t == y.t && x.seq > y.seq); }
};

struct FrameState {
    std::uint32_t path = 0;
    std::uint32_t hop = 0;
    bool at_ingress = true;
};

struct PendingRule {
    std::uint32_t path;
    int tag;
    bool default_routed;
    std::uint64_t ticket;
};

struct StreamState {
    learner::StreamObservation obs;
    std::optional<std::uint32_t> path; // installed rule
    int tag = 0;
    bool default_routed = true;
    std::optional<PendingRule> pending;
    std::uint64_t ticket = 0;
    std::vector<std::uint64_t> buffered; // frames held at the controller
    std::optional<Path> placement;
    double placed_load_bps = 0.0;
    double placed_period_s = 0.0;
    Rng rng{0};
};

class World {
public:
    explicit World(const Scenario& s) : sc_(s), topo_(s.topology), weights_(s.topology.link_count(), s.dpce) {
        validate_scenario(s);
        res_.scenario = s.name;
        res_.mode = s.mode;
        res_.seed = s.seed;
        res_.duration_s = s.duration_s;
        res_.stats_period_s = s.stats_period_s;
        const std::size_t nl = topo_.link_count(), nh = topo_.hosts().size();
        for (LinkId e = 0; e < nl; ++e) {
            const auto& l = topo_.link(e);
            res_.link_names.push_back(topo_.node_name(l.src) + "-" + topo_.node_name(l.dst));
            ports_.emplace_back(l.params.capacity_bps, s.switches.queue_bytes);
            prop_.push_back(l.params.propagation_s);
        }
        for (std::size_t i = 0; i < 2 * nh; ++i) {
            ports_.emplace_back(topo_.host_link.capacity_bps, s.switches.queue_bytes);
            prop_.push_back(topo_.host_link.propagation_s);
        }
        last_tx_.assign(nl, 0);
        edges_ = topo_.edge_switches();
        table_ = dpce::recompute_default_paths(topo_, weights_.active(), edges_).table;

        res_.streams = generate_streams(s);
        res_.outcomes.resize(res_.streams.size());
        streams_.resize(res_.streams.size());
        for (std::size_t i = 0; i < streams_.size(); ++i) {
            streams_[i].obs = learner::StreamObservation(i, s.learner.window);
            streams_[i].rng = Rng(Rng::derive(s.seed, 1000 + i));
        }
    }

    RunResult run() {
        if (sc_.mode == Mode::srp) preplace();
        for (std::size_t i = 0; i < streams_.size(); ++i) {
            const auto& st = res_.streams[i];
            double t0 = st.start_s;
            if (st.kind == StreamKind::be) t0 += streams_[i].rng.exponential(st.mean_interarrival_s);
            if (t0 <= sc_.duration_s) push(t0, EventType::emit, i);
        }
        push(sc_.stats_period_s, EventType::stats_tick, 0);
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            if (ev.t > sc_.duration_s) break;
            queue_.pop();
            now_ = ev.t;
            if (++res_.counters.events > sc_.max_events) throw std::runtime_error("event budget exhausted");
            switch (ev.type) {
            case EventType::emit: on_emit(ev.a); break;
            case EventType::ready: on_ready(ev.a); break;
            case EventType::tx_done: on_tx_done(ev.a); break;
            case EventType::install_done: on_install_done(ev.a, ev.b); break;
            case EventType::stats_tick: on_stats_tick(); break;
            }
        }
        for (std::size_t i = 0; i < streams_.size(); ++i) {
            auto& out = res_.outcomes[i];
            const auto& st = streams_[i];
            out.placed = st.placement.has_value();
            if (sc_.mode == Mode::sctsn) {
                out.verdict = st.obs.verdict;
            } else {
                out.verdict = res_.streams[i].kind == StreamKind::tt ? learner::Verdict::tt : learner::Verdict::be;
            }
            out.learned_period_s = st.placed_period_s;
        }
        for (const auto& p : ports_) res_.counters.drops += p.drops();
        return std::move(res_);
    }

private:
    std::size_t uplink(std::size_t host) const { return topo_.link_count() + host; }
    std::size_t downlink(std::size_t host) const { return topo_.link_count() + topo_.hosts().size() + host; }

    void push(double t, EventType type, std::uint64_t a, std::uint64_t b = 0) { queue_.push({t, seq_++, type, a, b}); }

    std::uint32_t intern(const Path& p) {
        auto [it, inserted] = path_ids_.try_emplace(p.links, static_cast<std::uint32_t>(paths_.size()));
        if (inserted) {
            paths_.push_back(p);
            hashes_.push_back(path_hash(p));
        }
        return it->second;
    }

    std::uint32_t default_path(std::size_t s) {
        const auto& st = res_.streams[s];
        auto it = table_.routes.find({st.src_switch, st.dst_switch});
        if (it == table_.routes.end()) throw std::runtime_error("no default path for stream " + st.id);
        return intern(it->second);
    }

    void send(std::size_t port, std::uint64_t f, int priority) {
        auto& fr = res_.frames[f];
        if (!ports_[port].enqueue({f, fr.bytes, priority})) {
            fr.dropped = true;
            return;
        }
        start(port);
    }

    void start(std::size_t port) {
        if (auto dt = ports_[port].start_next()) push(now_ + *dt, EventType::tx_done, port);
    }

    void on_emit(std::size_t s) {
        const auto& st = res_.streams[s];
        const std::uint64_t f = res_.frames.size();
        res_.frames.push_back({static_cast<std::uint32_t>(s), untagged, now_, std::nullopt, false, 0, st.frame_bytes});
        state_.push_back({});
        // Hosts are unaware of the configuration except for SRP talkers.
        const int host_prio = (sc_.mode == Mode::srp && st.kind == StreamKind::tt) ? tsor::tt_class : tsor::best_effort_class;
        send(uplink(st.src_host), f, host_prio);
        const double next = st.kind == StreamKind::tt ? now_ + st.period_s : now_ + streams_[s].rng.exponential(st.mean_interarrival_s);
        if (next <= sc_.duration_s) push(next, EventType::emit, s);
    }

    void on_tx_done(std::size_t port) {
        const auto qf = ports_[port].complete();
        start(port);
        const std::size_t nl = topo_.link_count(), nh = topo_.hosts().size();
        if (port < nl) {
            ++state_[qf.frame].hop;
            push(now_ + prop_[port] + sc_.switches.processing_delay_s, EventType::ready, qf.frame);
        } else if (port < nl + nh) {
            push(now_ + prop_[port] + sc_.switches.processing_delay_s, EventType::ready, qf.frame);
        } else {
            const double t = now_ + prop_[port];
            if (t <= sc_.duration_s) res_.frames[qf.frame].delivered = t;
        }
    }

    void on_ready(std::uint64_t f) {
        auto& fs = state_[f];
        if (fs.at_ingress) {
            fs.at_ingress = false;
            ingress(f);
        } else {
            forward(f);
        }
    }

    void forward(std::uint64_t f) {
        const auto& fs = state_[f];
        const auto& fr = res_.frames[f];
        const auto& p = paths_[fs.path];
        if (fs.hop < p.links.size()) {
            send(p.links[fs.hop], f, fr.tag);
        } else {
            send(downlink(res_.streams[fr.stream].dst_host), f, fr.tag);
        }
    }

    void release(std::uint64_t f) {
        auto& fr = res_.frames[f];
        const auto& st = streams_[fr.stream];
        fr.tag = st.tag;
        state_[f].path = *st.path;
        fr.path_hash = hashes_[*st.path];
        forward(f);
    }

    void ingress(std::uint64_t f) {
        const std::size_t s = res_.frames[f].stream;
        auto& st = streams_[s];
        if (sc_.mode == Mode::sctsn) learn(s);
        if (!st.path) {
            ++res_.counters.packet_ins;
            if (!st.pending) request(s, default_path(s), st.tag, true, 0.0);
            st.buffered.push_back(f);
            return;
        }
        release(f);
    }

    void learn(std::size_t s) {
        auto& st = streams_[s];
        switch (learner::observe_arrival(st.obs, now_, sc_.learner)) {
        case learner::LearningEvent::classified_tt:
            if (!res_.outcomes[s].first_tt_time) res_.outcomes[s].first_tt_time = now_;
            place(s, st.obs.estimate->period_s);
            break;
        case learner::LearningEvent::deviation:
            ++res_.counters.deviations;
            st.placement.reset();
            request(s, default_path(s), tsor::best_effort_class, true, 0.0);
            break;
        case learner::LearningEvent::classified_be:
        case learner::LearningEvent::none:
            break;
        }
    }

    std::size_t rule_changes(const StreamState& st, std::uint32_t path, int tag) const {
        if (!st.path) return rule_updates(topo_, nullptr, st.tag, paths_[path], tag);
        return rule_updates(topo_, &paths_[*st.path], st.tag, paths_[path], tag);
    }

    // Ordered update: new-path switches first, the ingress repoints last,
    // all after `extra_delay` plus one install delay per changed switch.
    void request(std::size_t s, std::uint32_t path, int tag, bool default_routed, double extra_delay) {
        auto& st = streams_[s];
        const std::size_t n = rule_changes(st, path, tag);
        res_.counters.rule_installs += n;
        st.pending = PendingRule{path, tag, default_routed, ++st.ticket};
        push(now_ + extra_delay + sc_.controller.rule_install_delay_s * static_cast<double>(n), EventType::install_done, s, st.ticket);
    }

    void install_now(std::size_t s, std::uint32_t path, int tag, bool default_routed) {
        auto& st = streams_[s];
        res_.counters.rule_installs += rule_changes(st, path, tag);
        st.path = path;
        st.tag = tag;
        st.default_routed = default_routed;
    }

    void on_install_done(std::size_t s, std::uint64_t ticket) {
        auto& st = streams_[s];
        if (!st.pending || st.pending->ticket != ticket) return;
        if (st.path && (*st.path != st.pending->path || st.tag != st.pending->tag)) ++res_.outcomes[s].migrations;
        st.path = st.pending->path;
        st.tag = st.pending->tag;
        st.default_routed = st.pending->default_routed;
        st.pending.reset();
        auto held = std::move(st.buffered);
        st.buffered.clear();
        for (auto f : held) release(f);
    }

    tsor::SolveResult optimise(std::size_t s, double period_s, std::vector<std::size_t>& order, tsor::TsorInstance& inst) {
        std::vector<Demand> demands;
        std::map<std::string, Path> existing;
        order.clear();
        for (std::size_t i = 0; i < streams_.size(); ++i) {
            if (i != s && streams_[i].placement) order.push_back(i);
        }
        order.push_back(s);
        for (std::size_t i : order) {
            const auto& info = res_.streams[i];
            Demand d;
            d.id = info.id;
            d.cls = tsor::tt_class;
            d.period_s = i == s ? period_s : streams_[i].placed_period_s;
            d.frame_bytes = info.frame_bytes;
            d.load_bps = periodic_load(d.frame_bytes, *d.period_s);
            d.src_switch = info.src_switch;
            d.dst_switch = info.dst_switch;
            demands.push_back(std::move(d));
            if (i != s && !sc_.controller.full_reopt) existing.emplace(info.id, *streams_[i].placement);
        }
        ++res_.counters.tsor_solves;
        inst = tsor::build_instance(topo_, std::move(demands), existing, sc_.controller.k_paths);
        return tsor::solve(inst);
    }

    // Optimal path for a newly classified TT stream. With `immediate` the
    // rules are in place before traffic starts.
    void place(std::size_t s, double period_s, bool immediate = false) {
        auto& st = streams_[s];
        std::vector<std::size_t> order;
        tsor::TsorInstance inst;
        const auto res = optimise(s, period_s, order, inst);
        if (!res.feasible()) {
            ++res_.counters.tsor_infeasible;
            res_.outcomes[s].unplaced = true;
            st.placement.reset();
            if (immediate) install_now(s, default_path(s), tsor::tt_class, true);
            else request(s, default_path(s), tsor::tt_class, true, sc_.controller.solve_delay_s);
            return;
        }
        const auto& sol = *res.solution;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const std::size_t i = order[k];
            const auto& inst_path = inst.paths[k][sol.chosen(k)];
            if (i != s && streams_[i].placement && *streams_[i].placement == inst_path) continue;
            auto& si = streams_[i];
            si.placement = inst_path;
            if (i == s) {
                si.placed_period_s = period_s;
                si.placed_load_bps = periodic_load(res_.streams[i].frame_bytes, period_s);
            }
            const auto pid = intern(inst_path);
            if (immediate) install_now(i, pid, tsor::tt_class, false);
            else request(i, pid, tsor::tt_class, false, sc_.controller.solve_delay_s);
        }
    }

    void preplace() {
        for (std::size_t i = 0; i < streams_.size(); ++i) {
            if (res_.streams[i].kind != StreamKind::tt) continue;
            res_.outcomes[i].first_tt_time = 0.0;
            place(i, res_.streams[i].period_s, true);
        }
    }

    void on_stats_tick() {
        const std::size_t nl = topo_.link_count();
        std::vector<double> util(nl);
        for (std::size_t e = 0; e < nl; ++e) {
            const auto tx = ports_[e].transmitted_bytes();
            util[e] = std::min(1.0, static_cast<double>(tx - last_tx_[e]) * 8.0 / (ports_[e].rate_bps() * sc_.stats_period_s));
            last_tx_[e] = tx;
        }
        res_.utilization.push_back(util);
        const auto changed = weights_.observe(util);
        res_.counters.weight_updates += changed.size();
        if (!changed.empty()) {
            auto r = dpce::recompute_default_paths(topo_, weights_.active(), edges_, &table_);
            table_ = std::move(r.table);
            res_.counters.routing_changes += r.changed.size();
            std::set<dpce::SwitchPair> moved(r.changed.begin(), r.changed.end());
            for (std::size_t s = 0; s < streams_.size(); ++s) {
                auto& st = streams_[s];
                const bool follows_default = st.pending ? st.pending->default_routed : (st.path && st.default_routed);
                if (!follows_default) continue;
                const auto& info = res_.streams[s];
                if (!moved.contains({info.src_switch, info.dst_switch})) continue;
                request(s, default_path(s), st.pending ? st.pending->tag : st.tag, true, 0.0);
            }
        }
        push(now_ + sc_.stats_period_s, EventType::stats_tick, 0);
    }

    const Scenario& sc_;
    const Topology& topo_;
    RunResult res_;
    std::vector<StreamState> streams_;
    std::vector<FrameState> state_;
    std::vector<EgressPort> ports_;
    std::vector<double> prop_;
    std::vector<std::uint64_t> last_tx_;
    std::vector<NodeId> edges_;
    dpce::LinkWeightState weights_;
    dpce::RoutingTable table_;
    std::vector<Path> paths_;
    std::vector<std::uint64_t> hashes_;
    std::map<std::vector<LinkId>, std::uint32_t> path_ids_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t seq_ = 0;
    double now_ = 0.0;
};

} // namespace

RunResult simulate(const Scenario& s) { return World(s).run(); }

} // namespace sctsn::simnet
