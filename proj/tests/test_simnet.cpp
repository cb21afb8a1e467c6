#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "sctsn/metrics.hpp"
#include "sctsn/port.hpp"
#include "sctsn/rng.hpp"
#include "sctsn/scenario.hpp"
#include "sctsn/simnet.hpp"
#include "test_support.hpp"

using namespace sctsn;
using namespace sctsn::simnet;

namespace {

Scenario mini_scenario(Mode mode, double duration = 2.0) {
    Scenario s;
    s.name = "mini";
    s.topology_path = test_support::data_path("topologies/mini.topo");
    s.topology = prepare_topology_file(s.topology_path);
    s.mode = mode;
    s.duration_s = duration;
    s.stats_period_s = 0.5;
    s.dpce.period_s = 0.5;
    return s;
}

StreamSpec tt_stream(const std::string& src, const std::string& dst, double period, double start) {
    StreamSpec st;
    st.kind = StreamKind::tt;
    st.src_host = src;
    st.dst_host = dst;
    st.period_s = period;
    st.start_s = start;
    return st;
}

StreamSpec be_stream(const std::string& src, const std::string& dst, double mean) {
    StreamSpec st;
    st.kind = StreamKind::be;
    st.src_host = src;
    st.dst_host = dst;
    st.mean_interarrival_s = mean;
    return st;
}

std::string csv(const MetricsReport& r) {
    std::ostringstream os;
    write_metrics_csv(os, r);
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// Egress port

TEST(Port, EmptyPortTransmitsImmediately) {
    EgressPort port(100e6);
    ASSERT_TRUE(port.enqueue({1, 1522, 0}));
    const auto dt = port.start_next();
    ASSERT_TRUE(dt.has_value());
    EXPECT_DOUBLE_EQ(*dt, 1522 * 8 / 100e6);
    EXPECT_TRUE(port.busy());
    EXPECT_EQ(port.complete().frame, 1u);
    EXPECT_FALSE(port.busy());
    EXPECT_EQ(port.transmitted_bytes(), 1522u);
}

TEST(Port, HighPriorityWaitsForFrameInService) {
    EgressPort port;
    port.enqueue({1, 1522, 0});
    port.start_next();
    port.enqueue({2, 100, 0});
    port.enqueue({3, 1522, 7});
    EXPECT_FALSE(port.start_next().has_value()); // non-preemptive
    EXPECT_EQ(port.complete().frame, 1u);
    port.start_next();
    EXPECT_EQ(port.complete().frame, 3u);
    port.start_next();
    EXPECT_EQ(port.complete().frame, 2u);
}

TEST(Port, FifoWithinClass) {
    EgressPort port;
    for (std::uint64_t f = 0; f < 5; ++f) port.enqueue({f, 64, 7});
    for (std::uint64_t f = 0; f < 5; ++f) {
        port.start_next();
        EXPECT_EQ(port.complete().frame, f);
    }
}

TEST(Port, DropsBeyondQueueBound) {
    EgressPort port(100e6, 3000);
    EXPECT_TRUE(port.enqueue({0, 1500, 3}));
    EXPECT_TRUE(port.enqueue({1, 1500, 3}));
    EXPECT_FALSE(port.enqueue({2, 1500, 3}));
    EXPECT_TRUE(port.enqueue({3, 1500, 4})); // separate queue
    EXPECT_EQ(port.drops(), 1u);
    EXPECT_EQ(port.queued_bytes(3), 3000u);
}

TEST(Port, NeverStartsLowerClassWhileHigherQueued) {
    Rng rng(7);
    EgressPort port(100e6, 1 << 20);
    std::uint64_t next = 0;
    for (int step = 0; step < 5000; ++step) {
        if (rng.index(3) != 0) {
            port.enqueue({next++, 64, static_cast<int>(rng.index(8))});
        } else if (port.busy()) {
            port.complete();
        } else if (port.start_next()) {
            const int started = port.in_service()->priority;
            for (int p = started + 1; p < priority_levels; ++p) EXPECT_EQ(port.queued_frames(p), 0u);
        }
    }
}

// ---------------------------------------------------------------------------
// Scenario files

TEST(Scenario, ParsesAndResolvesTopologyPath) {
    const auto s = parse_scenario(R"(
version: 1
name: t
topology: topologies/mini.topo
mode: srp
seed: 9
duration_s: 5
stats_period_s: 1
tt: {count: 2}
be: {count: 1, mean_interarrival_s: 0.05}
streams:
  - {kind: tt, src: h_A_0, dst: h_B_1, period_s: 0.004, start_s: 0.001}
controller: {k_paths: 3, rule_install_delay_s: 0.002}
)",
                                  SCTSN_DATA_DIR);
    EXPECT_EQ(s.mode, Mode::srp);
    EXPECT_EQ(s.seed, 9u);
    EXPECT_EQ(s.tt.count, 2u);
    EXPECT_DOUBLE_EQ(s.be.mean_interarrival_s, 0.05);
    ASSERT_EQ(s.streams.size(), 1u);
    EXPECT_DOUBLE_EQ(*s.streams[0].start_s, 0.001);
    EXPECT_EQ(s.controller.k_paths, 3u);
    EXPECT_DOUBLE_EQ(s.dpce.period_s, 1.0);
    EXPECT_EQ(s.topology.edge_switches().size(), 2u);
    EXPECT_EQ(generate_streams(s).size(), 4u);
}

TEST(Scenario, RejectsBadDocuments) {
    const std::string dir = SCTSN_DATA_DIR;
    EXPECT_THROW(parse_scenario("version: 1\ntopology: topologies/mini.topo\nbogus: 1\n", dir), ParseError);
    EXPECT_THROW(parse_scenario("topology: topologies/mini.topo\n", dir), ParseError);
    EXPECT_THROW(parse_scenario("version: 1\ntopology: topologies/mini.topo\nmode: cuc\n", dir), ValidationError);
    EXPECT_THROW(parse_scenario("version: 1\ntopology: topologies/mini.topo\nduration_s: 1\nstats_period_s: 2\n", dir),
                 ValidationError);
    EXPECT_THROW(parse_scenario("version: 1\ntopology: topologies/mini.topo\nstreams:\n  - {kind: ct, src: h_A_0, dst: h_B_1}\n", dir),
                 ParseError);
    EXPECT_THROW(parse_scenario("version: 1\ntopology: topologies/mini.topo\nstreams:\n  - {src: h_A_0, dst: h_A_1}\n", dir),
                 ValidationError);
    EXPECT_THROW(parse_scenario("version: 1\ntopology: topologies/mini.topo\nbe: {mean_interarrival_s: 0}\n", dir),
                 ValidationError);
    try {
        parse_scenario("version: 1\ntopology: topologies/mini.topo\ntt:\n  count: 1\n  colour: red\n", dir);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 5u);
    }
}

TEST(Scenario, GeneratedSourcesCrossEdgeSwitches) {
    auto s = mini_scenario(Mode::sctsn);
    s.tt.count = 20;
    s.be.count = 10;
    const auto streams = generate_streams(s);
    ASSERT_EQ(streams.size(), 30u);
    for (const auto& st : streams) {
        EXPECT_NE(st.src_switch, st.dst_switch);
        if (st.kind == StreamKind::tt) {
            EXPECT_GE(st.period_s, s.tt.period_min_s);
            EXPECT_LE(st.period_s, s.tt.period_max_s);
            EXPECT_GE(st.start_s, 0.0);
            EXPECT_LT(st.start_s, st.period_s);
        }
    }
    EXPECT_EQ(streams[0].id, "tt0");
    EXPECT_EQ(streams[20].id, "be0");
}

// ---------------------------------------------------------------------------
// Rule updates

TEST(Simnet, RuleUpdatesReuseSharedTail) {
    Topology topo;
    const auto a = topo.add_node("A"), x = topo.add_node("X"), y = topo.add_node("Y"), z = topo.add_node("Z"),
               b = topo.add_node("B");
    for (auto [u, v] : {std::pair{a, x}, {a, y}, {x, z}, {y, z}, {z, b}}) topo.add_link(u, v, {});
    const Path upper{{*topo.find_link(a, x), *topo.find_link(x, z), *topo.find_link(z, b)}};
    const Path lower{{*topo.find_link(a, y), *topo.find_link(y, z), *topo.find_link(z, b)}};
    EXPECT_EQ(rule_updates(topo, nullptr, 0, upper, 0), 4u); // A, X, Z and the egress switch B
    EXPECT_EQ(rule_updates(topo, &upper, 0, lower, 0), 2u);  // A repoints, Y is new, Z and B reused
    EXPECT_EQ(rule_updates(topo, &upper, 0, upper, 7), 1u);  // retag at the ingress only
    EXPECT_EQ(rule_updates(topo, &upper, 7, upper, 7), 0u);
}

// ---------------------------------------------------------------------------
// Simulation

TEST(Simnet, IdleSrpLatencyIsConstantAndAnalytic) {
    auto s = mini_scenario(Mode::srp);
    s.streams = {tt_stream("h_A_0", "h_B_0", 0.004, 0.001)};
    const auto res = simulate(s);
    const auto& hl = s.topology.host_link;
    const auto& ll = s.topology.link(0).params;
    const double ser_host = 1522 * 8 / hl.capacity_bps, ser_link = 1522 * 8 / ll.capacity_bps;
    // Uplink, two switch-to-switch hops, downlink; processing at three switches.
    const double expected = 2 * (ser_host + hl.propagation_s) + 2 * (ser_link + ll.propagation_s) +
                            3 * s.switches.processing_delay_s;
    ASSERT_FALSE(res.frames.empty());
    std::size_t delivered = 0;
    for (const auto& f : res.frames) {
        if (!f.delivered) continue;
        ++delivered;
        EXPECT_NEAR(*f.delivered - f.created, expected, 1e-12);
        EXPECT_EQ(f.tag, 7);
    }
    EXPECT_GE(delivered, res.frames.size() - 1);
    EXPECT_EQ(res.counters.packet_ins, 0u);
}

TEST(Simnet, SelfConfigurationLearnsThenMigrates) {
    auto s = mini_scenario(Mode::sctsn);
    s.streams = {tt_stream("h_A_0", "h_B_0", 0.004, 0.001)};
    const auto res = simulate(s);
    const auto r = compute_metrics(res);
    ASSERT_TRUE(res.outcomes[0].first_tt_time.has_value());
    EXPECT_TRUE(res.outcomes[0].placed);
    EXPECT_EQ(res.outcomes[0].verdict, learner::Verdict::tt);
    EXPECT_NEAR(res.outcomes[0].learned_period_s, 0.004, 0.004 / 100);

    // Low-priority frames only until the switchover, then high priority.
    std::size_t low = 0;
    bool switched = false;
    for (const auto& f : res.frames) {
        if (f.tag == untagged) continue;
        if (f.tag == 7) switched = true;
        else {
            EXPECT_FALSE(switched) << "tag fell back after migration";
            ++low;
        }
    }
    EXPECT_TRUE(switched);
    EXPECT_GE(low, s.learner.n_min);
    EXPECT_LE(low, s.learner.window);
    EXPECT_LE(r.delayed_tt, s.learner.window);
    EXPECT_EQ(r.counters.tsor_solves, 1u);

    // Migration on an idle network: no loss, no reordering.
    EXPECT_EQ(r.dropped, 0u);
    double last = -1.0;
    for (const auto& f : res.frames) {
        if (!f.delivered) continue;
        EXPECT_GT(*f.delivered, last);
        last = *f.delivered;
    }
}

TEST(Simnet, ConservationPerStream) {
    auto s = mini_scenario(Mode::sctsn, 3.0);
    s.streams = {tt_stream("h_A_0", "h_B_0", 0.002, 0.0005), tt_stream("h_B_1", "h_A_1", 0.0031, 0.002),
                 be_stream("h_A_2", "h_B_2", 0.001), be_stream("h_A_2", "h_B_3", 0.0005)};
    const auto res = simulate(s);
    std::map<std::uint32_t, std::array<std::size_t, 3>> by_stream;
    for (const auto& f : res.frames) {
        EXPECT_FALSE(f.delivered && f.dropped);
        if (f.delivered) {
            EXPECT_GE(*f.delivered, f.created);
        }
        auto& c = by_stream[f.stream];
        ++c[f.delivered ? 0 : f.dropped ? 1 : 2];
    }
    for (std::uint32_t i = 0; i < 2; ++i) {
        const auto& st = res.streams[i];
        const auto expected = static_cast<std::size_t>(std::floor((s.duration_s - st.start_s) / st.period_s + 1e-9)) + 1;
        const auto& c = by_stream[i];
        EXPECT_EQ(c[0] + c[1] + c[2], expected) << st.id;
        EXPECT_LE(c[2], 3u) << st.id; // only the last few frames are in flight at the horizon
    }
    const auto r = compute_metrics(res);
    EXPECT_EQ(r.frames, r.delivered + r.dropped + r.in_flight);
}

TEST(Simnet, DeterministicForSameSeed) {
    auto s = mini_scenario(Mode::sctsn, 3.0);
    s.tt.count = 6;
    s.be.count = 3;
    s.be.mean_interarrival_s = 0.002;
    const auto a = simulate(s), b = simulate(s);
    std::ostringstream ta, tb;
    write_frame_trace(ta, a);
    write_frame_trace(tb, b);
    EXPECT_EQ(ta.str(), tb.str());
    EXPECT_EQ(csv(compute_metrics(a)), csv(compute_metrics(b)));
    s.seed = 2;
    EXPECT_NE(csv(run(s)), csv(compute_metrics(a)));
}

TEST(Simnet, InfeasiblePlacementLeavesStreamUnplaced) {
    // Inter-switch links of 10 Mbit/s cannot carry a 1522-byte frame every ms.
    Scenario s = mini_scenario(Mode::sctsn);
    s.topology = prepare_topology(R"(version 1
defaults capacity=100M lo=1.0 lq=0.5 prop=1e-6
nodes A B X Y
edge A X capacity=10M
edge A Y capacity=10M
edge X Y
edge X B capacity=10M
edge Y B capacity=10M
hosts_per_edge 2
)");
    s.streams = {tt_stream("h_A_0", "h_B_0", 0.001, 0.0)};
    s.switches.queue_bytes = 1 << 24;
    const auto res = simulate(s);
    const auto r = compute_metrics(res);
    EXPECT_TRUE(res.outcomes[0].unplaced);
    EXPECT_FALSE(res.outcomes[0].placed);
    EXPECT_EQ(r.unplaced, 1u);
    EXPECT_GE(r.counters.tsor_infeasible, 1u);
}

TEST(Simnet, SrpDominatesOnSmallMix) {
    auto sc = mini_scenario(Mode::sctsn, 5.0);
    sc.tt.count = 6;
    sc.be.count = 3;
    sc.be.mean_interarrival_s = 0.01;
    auto sr = sc;
    sr.mode = Mode::srp;
    const auto a = run(sc), b = run(sr);
    EXPECT_LE(b.tt.mean_s, a.tt.mean_s);
    EXPECT_GE(a.tt.max_s, b.tt.max_s);
    EXPECT_GE(a.delayed_tt, b.delayed_tt);
    EXPECT_EQ(b.cr, 1.0);
    EXPECT_GE(a.cr, 0.9);
}

TEST(Simnet, HeavyLoadMovesDefaultPaths) {
    auto s = mini_scenario(Mode::sctsn, 4.0);
    // Four BE sources pushing about 60 % of a link between the edge switches.
    for (int i = 0; i < 4; ++i) s.streams.push_back(be_stream("h_A_" + std::to_string(i), "h_B_" + std::to_string(i), 0.0008));
    const auto r = run(s);
    EXPECT_GT(r.counters.weight_updates, 0u);
    EXPECT_GT(r.counters.routing_changes, 0u);
    ASSERT_FALSE(r.utilization.empty());
    EXPECT_EQ(r.utilization.size(), 8u); // ticks at 0.5 .. 4.0 s
}

// ---------------------------------------------------------------------------
// Metrics

TEST(Metrics, RatesAndDelayedFrames) {
    RunResult run;
    run.streams.resize(2);
    run.streams[0].kind = StreamKind::tt;
    run.streams[0].period_s = 0.002;
    run.streams[1].kind = StreamKind::be;
    run.outcomes.resize(2);
    auto frame = [&](std::uint32_t s, int tag, double created, std::optional<double> delivered, bool dropped = false) {
        run.frames.push_back({s, tag, created, delivered, dropped, 0, 1522});
    };
    frame(0, 0, 0.0, 0.0030);  // misclassified, delayed
    frame(0, 7, 0.0, 0.0010);
    frame(0, 7, 0.0, std::nullopt, true); // dropped counts as delayed
    frame(0, untagged, 0.0, std::nullopt); // never left the host
    frame(1, 0, 0.0, 0.0005);
    frame(1, 7, 0.0, 0.0007);
    frame(1, 0, 0.0, 0.0009);
    frame(1, 0, 0.0, 0.0011);
    const auto r = compute_metrics(run);
    EXPECT_EQ(r.frames, 8u);
    EXPECT_EQ(r.delivered, 6u);
    EXPECT_EQ(r.dropped, 1u);
    EXPECT_EQ(r.in_flight, 1u);
    EXPECT_EQ(r.tt_frames, 3u);
    EXPECT_EQ(r.delayed_tt, 2u);
    EXPECT_DOUBLE_EQ(r.delayed_tt_fraction, 2.0 / 3.0);
    EXPECT_EQ(r.tagged_frames, 7u);
    EXPECT_DOUBLE_EQ(r.cr, 5.0 / 7.0);
    EXPECT_DOUBLE_EQ(r.tnr, 3.0 / 4.0);
    EXPECT_EQ(r.tt.count, 2u);
    EXPECT_DOUBLE_EQ(r.tt.mean_s, 0.002);
    EXPECT_DOUBLE_EQ(r.tt.max_s, 0.003);
    EXPECT_DOUBLE_EQ(r.be.min_s, 0.0005);
    EXPECT_DOUBLE_EQ(r.be.p50_s, 0.0007);
}

TEST(Metrics, PerfectClassificationGivesUnitRates) {
    RunResult run;
    run.streams.resize(2);
    run.streams[0].kind = StreamKind::tt;
    run.streams[0].period_s = 1.0;
    run.streams[1].kind = StreamKind::be;
    run.outcomes.resize(2);
    for (int i = 0; i < 10; ++i) {
        run.frames.push_back({0, 7, 0.0, 0.001, false, 0, 1522});
        run.frames.push_back({1, 0, 0.0, 0.001, false, 0, 1522});
    }
    const auto r = compute_metrics(run);
    EXPECT_EQ(r.cr, 1.0);
    EXPECT_EQ(r.tnr, 1.0);
    EXPECT_EQ(r.delayed_tt, 0u);
}

TEST(Metrics, CsvHeaderMatchesRow) {
    auto s = mini_scenario(Mode::srp, 1.0);
    s.tt.count = 2;
    const auto r = run(s);
    std::ostringstream os;
    write_metrics_csv(os, r);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, metrics_header());
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
    EXPECT_EQ(row.rfind("mini,srp,1,", 0), 0u);
}

TEST(Metrics, HistogramBins) {
    Histogram h;
    h.add(5e-7);
    h.add(1e-6);
    h.add(1.2e-3);
    h.add(100.0);
    EXPECT_EQ(h.counts.front(), 1u);
    EXPECT_EQ(h.counts[1], 1u);
    EXPECT_EQ(h.counts.back(), 1u);
    std::size_t sum = 0;
    for (auto c : h.counts) sum += c;
    EXPECT_EQ(sum, 4u);
    EXPECT_DOUBLE_EQ(Histogram::lower_edge(1), 1e-6);
    EXPECT_NEAR(Histogram::lower_edge(21), 1e-5, 1e-18);
}
