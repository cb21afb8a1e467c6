#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "sctsn/model.hpp"
#include "sctsn/rng.hpp"
#include "test_support.hpp"

using namespace sctsn;

namespace {

const char* triangle = R"(
version 1
defaults capacity=100M
nodes A B C
edge A B
edge B C
edge A C
)";

std::vector<std::string> names(const Topology& t, const Path& p) {
    std::vector<std::string> out;
    for (auto n : path_nodes(t, p)) out.push_back(t.node_name(n));
    return out;
}

// All simple paths by exhaustive DFS, ordered by (hops, node-id sequence).
void enumerate(const Topology& t, NodeId v, NodeId dst, std::vector<char>& seen, Path& cur, std::vector<Path>& out) {
    if (v == dst) {
        out.push_back(cur);
        return;
    }
    for (LinkId id = 0; id < t.link_count(); ++id) {
        const auto& l = t.link(id);
        if (l.src != v || seen[l.dst]) continue;
        seen[l.dst] = 1;
        cur.links.push_back(id);
        enumerate(t, l.dst, dst, seen, cur, out);
        cur.links.pop_back();
        seen[l.dst] = 0;
    }
}

std::vector<Path> all_simple_paths(const Topology& t, NodeId src, NodeId dst) {
    std::vector<char> seen(t.node_count(), 0);
    seen[src] = 1;
    Path cur;
    std::vector<Path> out;
    enumerate(t, src, dst, seen, cur, out);
    std::sort(out.begin(), out.end(), [&](const Path& a, const Path& b) {
        if (a.hops() != b.hops()) return a.hops() < b.hops();
        return path_nodes(t, a) < path_nodes(t, b);
    });
    return out;
}

} // namespace

TEST(Topology, TriangleExpandsToDirectedLinks) {
    auto t = load_topology(triangle);
    EXPECT_EQ(t.node_count(), 3u);
    EXPECT_EQ(t.link_count(), 6u);
    for (const auto& l : t.links()) {
        EXPECT_DOUBLE_EQ(l.params.capacity_bps, 100e6);
        EXPECT_DOUBLE_EQ(l.params.base_delay, 1.0);
        EXPECT_DOUBLE_EQ(l.params.queue_factor, 0.5);
    }
    EXPECT_FALSE(t.roles_assigned());
}

TEST(Topology, UndeclaredNodeIsNamed) {
    try {
        load_topology("nodes A B\nedge A Z\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("'Z'"), std::string::npos);
    }
}

TEST(Topology, RejectsBadParameters) {
    EXPECT_THROW(load_topology("nodes A B\nedge A B capacity=0\n"), ParseError);
    EXPECT_THROW(load_topology("nodes A B\nedge A B lo=-1\n"), ParseError);
    EXPECT_THROW(load_topology("nodes A B\nedge A B\nedge B A\n"), ParseError);
    EXPECT_THROW(load_topology("nodes A\nedge A A\n"), ParseError);
    EXPECT_THROW(load_topology("nodes A B\nbogus\n"), ParseError);
    EXPECT_THROW(load_topology("# empty\n"), ValidationError);
}

TEST(Topology, PerEdgeOverrides) {
    auto t = load_topology("nodes A B\nedge A B capacity=1G lo=2 lq=0.25 prop=5e-6\n");
    const auto& l = t.link(0);
    EXPECT_DOUBLE_EQ(l.params.capacity_bps, 1e9);
    EXPECT_DOUBLE_EQ(l.params.base_delay, 2.0);
    EXPECT_DOUBLE_EQ(l.params.queue_factor, 0.25);
    EXPECT_DOUBLE_EQ(l.params.propagation_s, 5e-6);
}

TEST(Roles, StarLeavesAreEdge) {
    auto t = classify_switch_roles(load_topology("nodes C L1 L2 L3\nedge C L1\nedge C L2\nedge C L3\n"));
    EXPECT_EQ(t.role(*t.find_node("C")), SwitchRole::backbone);
    for (auto n : {"L1", "L2", "L3"}) EXPECT_EQ(t.role(*t.find_node(n)), SwitchRole::edge);
}

TEST(Roles, RingIsAllBackbone) {
    auto t = classify_switch_roles(load_topology("nodes A B C D\nedge A B\nedge B C\nedge C D\nedge D A\n"));
    EXPECT_TRUE(t.edge_switches().empty());
}

TEST(Roles, HostsOnlyOnEdgeSwitches) {
    EXPECT_THROW(prepare_topology("nodes C L1 L2 L3\nedge C L1\nedge C L2\nedge C L3\nhost h C\n"), ValidationError);
    auto t = prepare_topology("nodes C L1 L2 L3\nedge C L1\nedge C L2\nedge C L3\nhost h L2\nhosts_per_edge 2\n");
    EXPECT_EQ(t.hosts().size(), 7u);
    for (const auto& h : t.hosts()) EXPECT_EQ(t.role(h.attached), SwitchRole::edge);
}

TEST(Roles, InvariantUnderRelabeling) {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 6 + rng.index(5);
        std::vector<std::pair<int, int>> edges;
        for (std::size_t i = 1; i < n; ++i) edges.emplace_back(static_cast<int>(rng.index(i)), static_cast<int>(i));
        for (int extra = 0; extra < 3; ++extra) {
            int a = static_cast<int>(rng.index(n)), b = static_cast<int>(rng.index(n));
            if (a == b) continue;
            if (std::find(edges.begin(), edges.end(), std::pair{a, b}) != edges.end() ||
                std::find(edges.begin(), edges.end(), std::pair{b, a}) != edges.end()) continue;
            edges.emplace_back(a, b);
        }
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);

        auto build = [&](bool relabel) {
            std::string text = "nodes";
            for (std::size_t i = 0; i < n; ++i) text += " n" + std::to_string(relabel ? perm[i] : static_cast<int>(i));
            text += "\n";
            // Same graph, different declaration order, so internal ids differ.
            for (auto [a, b] : edges) text += "edge n" + std::to_string(a) + " n" + std::to_string(b) + "\n";
            return classify_switch_roles(load_topology(text));
        };
        auto plain = build(false);
        auto shuffled = build(true);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(plain.role(*plain.find_node("n" + std::to_string(i))),
                      shuffled.role(*shuffled.find_node("n" + std::to_string(i))));
        }
    }
}

TEST(Roles, BundledTopologiesMatchTableI) {
    struct Row {
        const char* file;
        std::size_t edge, backbone, undirected, hosts, total;
    };
    for (const Row& r : {Row{"getnet.topo", 4, 3, 8, 40, 47}, Row{"integra.topo", 16, 11, 36, 80, 107},
                         Row{"garr201001.topo", 38, 16, 68, 76, 130}}) {
        SCOPED_TRACE(r.file);
        auto t = prepare_topology_file(test_support::data_path(std::string("topologies/") + r.file));
        EXPECT_EQ(t.edge_switches().size(), r.edge);
        EXPECT_EQ(t.node_count() - t.edge_switches().size(), r.backbone);
        EXPECT_EQ(t.link_count(), 2 * r.undirected);
        EXPECT_EQ(t.hosts().size(), r.hosts);
        EXPECT_EQ(t.node_count() + t.hosts().size(), r.total);
    }
}

TEST(Paths, TriangleTwoPaths) {
    auto t = load_topology(triangle);
    auto paths = k_shortest_paths(t, 0, 1, 2);
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_EQ(names(t, paths[0]), (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(names(t, paths[1]), (std::vector<std::string>{"A", "C", "B"}));
}

TEST(Paths, DisconnectedIsEmpty) {
    auto t = load_topology("nodes A B C D\nedge A B\nedge C D\n");
    EXPECT_TRUE(k_shortest_paths(t, 0, 3, 4).empty());
}

TEST(Paths, DiamondHasTwoPaths) {
    auto t = load_topology("nodes S X Y T\nedge S X\nedge S Y\nedge X T\nedge Y T\n");
    auto paths = k_shortest_paths(t, 0, 3, 3);
    EXPECT_EQ(paths.size(), all_simple_paths(t, 0, 3).size());
    EXPECT_EQ(paths.size(), 2u);
}

TEST(Paths, PreconditionsEnforced) {
    auto t = load_topology(triangle);
    EXPECT_THROW(k_shortest_paths(t, 0, 0, 2), std::invalid_argument);
    EXPECT_THROW(k_shortest_paths(t, 0, 1, 0), std::invalid_argument);
}

TEST(Paths, AgreesWithExhaustiveEnumeration) {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 3 + rng.index(6); // <= 8 nodes
        std::string text = "nodes";
        for (std::size_t i = 0; i < n; ++i) text += " v" + std::to_string(i);
        text += "\n";
        std::set<std::pair<std::size_t, std::size_t>> used;
        const std::size_t m = n - 1 + rng.index(n + 2);
        for (std::size_t e = 0; e < m; ++e) {
            auto a = rng.index(n), b = rng.index(n);
            if (a == b || used.contains({std::min(a, b), std::max(a, b)})) continue;
            used.insert({std::min(a, b), std::max(a, b)});
            text += "edge v" + std::to_string(a) + " v" + std::to_string(b) + "\n";
        }
        auto t = load_topology(text);
        const NodeId s = static_cast<NodeId>(rng.index(n));
        NodeId d = static_cast<NodeId>(rng.index(n));
        if (s == d) d = static_cast<NodeId>((d + 1) % n);
        const auto oracle = all_simple_paths(t, s, d);
        const auto got = k_shortest_paths(t, s, d, oracle.size() + 3);
        ASSERT_EQ(got.size(), oracle.size()) << text;
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i], oracle[i]);
            EXPECT_TRUE(is_valid_path(t, got[i]));
        }
        // Prefix stability.
        for (std::size_t k = 1; k <= oracle.size(); ++k) {
            const auto prefix = k_shortest_paths(t, s, d, k);
            ASSERT_EQ(prefix.size(), k);
            EXPECT_TRUE(std::equal(prefix.begin(), prefix.end(), got.begin()));
        }
    }
}

TEST(Demand, Validation) {
    Demand d{"s", 7, periodic_load(1522, 0.01), 6.0, 0.01, 1522, 0, 1};
    EXPECT_NO_THROW(validate_demand(d));
    auto bad = d;
    bad.cls = 8;
    EXPECT_THROW(validate_demand(bad), ValidationError);
    bad = d;
    bad.load_bps = 1.0;
    EXPECT_THROW(validate_demand(bad), ValidationError);
    bad = d;
    bad.latency_bound = 0.0;
    EXPECT_THROW(validate_demand(bad), ValidationError);
}
