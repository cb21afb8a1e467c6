#include "sctsn/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include "sctsn/text.hpp"

namespace sctsn {

NodeId Topology::add_node(std::string name) {
    if (index_.contains(name)) throw ValidationError("duplicate node '" + name + "'");
    const auto id = static_cast<NodeId>(names_.size());
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    out_.emplace_back();
    roles_.push_back(SwitchRole::unassigned);
    return id;
}

LinkId Topology::add_link(NodeId src, NodeId dst, const LinkParams& params) {
    if (src >= names_.size() || dst >= names_.size()) throw ValidationError("link endpoint out of range");
    if (src == dst) throw ValidationError("self-loop on node '" + names_[src] + "'");
    if (find_link(src, dst)) {
        throw ValidationError("duplicate link " + names_[src] + "->" + names_[dst]);
    }
    if (!(params.capacity_bps > 0.0)) {
        throw ValidationError("link " + names_[src] + "->" + names_[dst] + ": capacity must be > 0");
    }
    if (params.base_delay < 0.0 || params.queue_factor < 0.0 || params.propagation_s < 0.0) {
        throw ValidationError("link " + names_[src] + "->" + names_[dst] + ": delays must be >= 0");
    }
    const auto id = static_cast<LinkId>(links_.size());
    links_.push_back({src, dst, params});
    auto& out = out_[src];
    out.push_back(id);
    std::sort(out.begin(), out.end(), [&](LinkId a, LinkId b) { return links_[a].dst < links_[b].dst; });
    return id;
}

void Topology::add_host(std::string name, NodeId attached) {
    if (attached >= names_.size()) throw ValidationError("host '" + name + "' attaches to unknown switch");
    if (index_.contains(name) || host_index_.contains(name)) {
        throw ValidationError("duplicate name '" + name + "'");
    }
    host_index_.emplace(name, hosts_.size());
    hosts_.push_back({std::move(name), attached});
}

std::optional<NodeId> Topology::find_node(std::string_view name) const {
    if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
    return std::nullopt;
}

std::optional<LinkId> Topology::find_link(NodeId src, NodeId dst) const {
    if (src >= out_.size()) return std::nullopt;
    for (LinkId id : out_[src]) {
        if (links_[id].dst == dst) return id;
    }
    return std::nullopt;
}

std::optional<std::size_t> Topology::find_host(std::string_view name) const {
    if (auto it = host_index_.find(std::string(name)); it != host_index_.end()) return it->second;
    return std::nullopt;
}

void Topology::set_roles(std::vector<SwitchRole> roles) {
    if (roles.size() != names_.size()) throw ValidationError("role vector size mismatch");
    roles_ = std::move(roles);
    roles_assigned_ = true;
}

std::vector<NodeId> Topology::edge_switches() const {
    std::vector<NodeId> out;
    for (NodeId n = 0; n < names_.size(); ++n) {
        if (roles_[n] == SwitchRole::edge) out.push_back(n);
    }
    return out;
}

std::size_t Topology::degree(NodeId n) const {
    // Undirected degree: neighbours reachable by an out- or in-link.
    std::vector<NodeId> nbrs;
    for (const auto& l : links_) {
        if (l.src == n) nbrs.push_back(l.dst);
        if (l.dst == n) nbrs.push_back(l.src);
    }
    std::sort(nbrs.begin(), nbrs.end());
    return static_cast<std::size_t>(std::unique(nbrs.begin(), nbrs.end()) - nbrs.begin());
}

namespace {

void apply_link_option(LinkParams& p, std::string_view key, std::string_view value, std::size_t line) {
    if (key == "capacity") {
        p.capacity_bps = parse_si(value, line);
    } else if (key == "lo") {
        p.base_delay = parse_number(value, line);
    } else if (key == "lq") {
        p.queue_factor = parse_number(value, line);
    } else if (key == "prop") {
        p.propagation_s = parse_number(value, line);
    } else {
        throw ParseError(line, "unknown link option '" + std::string(key) + "'");
    }
}

NodeId require_node(const Topology& topo, std::string_view name, std::size_t line) {
    auto n = topo.find_node(name);
    if (!n) throw ParseError(line, "undeclared node '" + std::string(name) + "'");
    return *n;
}

} // namespace

Topology load_topology(std::string_view text) {
    Topology topo;
    LinkParams defaults;
    std::vector<std::pair<std::string, std::string>> pending_hosts;
    std::vector<std::size_t> pending_host_lines;

    for_each_line(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
        const auto kw = tok[0];
        if (kw == "version") {
            if (tok.size() != 2 || parse_number(tok[1], line) != 1.0) {
                throw ParseError(line, "unsupported topology version");
            }
        } else if (kw == "defaults") {
            for (std::size_t i = 1; i < tok.size(); ++i) {
                auto [k, v] = split_option(tok[i], line);
                apply_link_option(defaults, k, v, line);
            }
        } else if (kw == "node" || kw == "nodes") {
            if (tok.size() < 2) throw ParseError(line, "'nodes' needs at least one name");
            for (std::size_t i = 1; i < tok.size(); ++i) {
                try {
                    topo.add_node(std::string(tok[i]));
                } catch (const ValidationError& e) {
                    throw ParseError(line, e.what());
                }
            }
        } else if (kw == "edge") {
            if (tok.size() < 3) throw ParseError(line, "'edge' needs two endpoints");
            const NodeId a = require_node(topo, tok[1], line);
            const NodeId b = require_node(topo, tok[2], line);
            LinkParams p = defaults;
            for (std::size_t i = 3; i < tok.size(); ++i) {
                auto [k, v] = split_option(tok[i], line);
                apply_link_option(p, k, v, line);
            }
            try {
                topo.add_link(a, b, p);
                topo.add_link(b, a, p);
            } catch (const ValidationError& e) {
                throw ParseError(line, e.what());
            }
        } else if (kw == "hosts_per_edge") {
            if (tok.size() != 2) throw ParseError(line, "'hosts_per_edge' takes one count");
            const double n = parse_number(tok[1], line);
            if (n < 0 || n != static_cast<double>(static_cast<std::size_t>(n))) {
                throw ParseError(line, "host count must be a non-negative integer");
            }
            topo.hosts_per_edge = static_cast<std::size_t>(n);
        } else if (kw == "host") {
            if (tok.size() != 3) throw ParseError(line, "'host' takes a name and a switch");
            require_node(topo, tok[2], line);
            pending_hosts.emplace_back(std::string(tok[1]), std::string(tok[2]));
            pending_host_lines.push_back(line);
        } else {
            throw ParseError(line, "unknown directive '" + std::string(kw) + "'");
        }
    });

    if (topo.node_count() == 0) throw ValidationError("topology declares no nodes");
    topo.host_link = defaults;
    for (std::size_t i = 0; i < pending_hosts.size(); ++i) {
        try {
            topo.add_host(pending_hosts[i].first, *topo.find_node(pending_hosts[i].second));
        } catch (const ValidationError& e) {
            throw ParseError(pending_host_lines[i], e.what());
        }
    }
    return topo;
}

Topology load_topology_file(const std::string& path) {
    return load_topology(read_file(path));
}

Topology classify_switch_roles(Topology topo) {
    const std::size_t n = topo.node_count();
    std::vector<std::size_t> deg(n);
    std::size_t total = 0;
    for (NodeId i = 0; i < n; ++i) {
        deg[i] = topo.degree(i);
        total += deg[i];
    }
    // deg < total / n, kept in integers: deg * n < total.
    std::vector<SwitchRole> roles(n);
    for (NodeId i = 0; i < n; ++i) {
        roles[i] = deg[i] * n < total ? SwitchRole::edge : SwitchRole::backbone;
    }
    topo.set_roles(std::move(roles));
    if (topo.hosts_per_edge > 0) {
        for (NodeId sw : topo.edge_switches()) {
            for (std::size_t h = 0; h < topo.hosts_per_edge; ++h) {
                std::string name = "h_" + topo.node_name(sw) + "_" + std::to_string(h);
                if (!topo.find_host(name)) topo.add_host(std::move(name), sw);
            }
        }
    }
    return topo;
}

void validate_host_attachments(const Topology& topo) {
    if (!topo.roles_assigned()) throw ValidationError("switch roles not assigned");
    for (const auto& h : topo.hosts()) {
        if (topo.role(h.attached) != SwitchRole::edge) {
            throw ValidationError("host '" + h.name + "' attaches to backbone switch '" +
                                  topo.node_name(h.attached) + "'");
        }
    }
}

Topology prepare_topology(std::string_view text) {
    auto topo = classify_switch_roles(load_topology(text));
    validate_host_attachments(topo);
    return topo;
}

Topology prepare_topology_file(const std::string& path) {
    return prepare_topology(read_file(path));
}

std::vector<NodeId> path_nodes(const Topology& topo, const Path& path) {
    std::vector<NodeId> nodes;
    if (path.empty()) return nodes;
    nodes.push_back(topo.link(path.links.front()).src);
    for (LinkId l : path.links) nodes.push_back(topo.link(l).dst);
    return nodes;
}

bool is_valid_path(const Topology& topo, const Path& path) {
    if (path.empty()) return false;
    for (std::size_t i = 0; i < path.links.size(); ++i) {
        if (path.links[i] >= topo.link_count()) return false;
        if (i > 0 && topo.link(path.links[i - 1]).dst != topo.link(path.links[i]).src) return false;
    }
    auto nodes = path_nodes(topo, path);
    std::sort(nodes.begin(), nodes.end());
    return std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end();
}

std::string format_path(const Topology& topo, const Path& path) {
    std::string out;
    for (NodeId n : path_nodes(topo, path)) {
        if (!out.empty()) out += "->";
        out += topo.node_name(n);
    }
    return out;
}

namespace {

std::vector<std::size_t> hop_distance_to(const Topology& topo, NodeId dst) {
    constexpr auto inf = std::numeric_limits<std::size_t>::max();
    std::vector<std::vector<NodeId>> in(topo.node_count());
    for (const auto& l : topo.links()) in[l.dst].push_back(l.src);
    std::vector<std::size_t> dist(topo.node_count(), inf);
    std::queue<NodeId> q;
    dist[dst] = 0;
    q.push(dst);
    while (!q.empty()) {
        const NodeId v = q.front();
        q.pop();
        for (NodeId u : in[v]) {
            if (dist[u] == inf) {
                dist[u] = dist[v] + 1;
                q.push(u);
            }
        }
    }
    return dist;
}

struct ExactLengthSearch {
    const Topology& topo;
    const std::vector<std::size_t>& dist;
    NodeId dst;
    std::size_t k;
    std::vector<Path>& out;
    std::vector<char> on_path;
    Path current;

    // Enumerates simple paths of exactly `remaining` more hops in node-id order.
    void dfs(NodeId v, std::size_t remaining) {
        if (out.size() >= k) return;
        if (remaining == 0) {
            if (v == dst) out.push_back(current);
            return;
        }
        for (LinkId l : topo.out_links(v)) {
            const NodeId w = topo.link(l).dst;
            if (on_path[w] || dist[w] > remaining - 1) continue;
            if (w == dst && remaining != 1) continue;
            on_path[w] = 1;
            current.links.push_back(l);
            dfs(w, remaining - 1);
            current.links.pop_back();
            on_path[w] = 0;
            if (out.size() >= k) return;
        }
    }
};

} // namespace

std::vector<Path> k_shortest_paths(const Topology& topo, NodeId src, NodeId dst, std::size_t k) {
    if (src == dst) throw std::invalid_argument("k_shortest_paths: src == dst");
    if (k == 0) throw std::invalid_argument("k_shortest_paths: k must be >= 1");
    std::vector<Path> out;
    const auto dist = hop_distance_to(topo, dst);
    if (dist[src] == std::numeric_limits<std::size_t>::max()) return out;
    ExactLengthSearch search{topo, dist, dst, k, out, std::vector<char>(topo.node_count(), 0), {}};
    search.on_path[src] = 1;
    for (std::size_t len = dist[src]; len < topo.node_count() && out.size() < k; ++len) {
        search.dfs(src, len);
    }
    return out;
}

void validate_demand(const Demand& d) {
    if (d.cls < 0 || d.cls > 7) throw ValidationError("demand '" + d.id + "': class must be in 0..7");
    if (!(d.load_bps > 0.0)) throw ValidationError("demand '" + d.id + "': load must be > 0");
    if (!(d.latency_bound > 0.0)) throw ValidationError("demand '" + d.id + "': latency bound must be > 0");
    if (d.period_s) {
        if (!(*d.period_s > 0.0)) throw ValidationError("demand '" + d.id + "': period must be > 0");
        const double expected = periodic_load(d.frame_bytes, *d.period_s);
        if (std::abs(expected - d.load_bps) > 1e-9 * expected) {
            throw ValidationError("demand '" + d.id + "': load inconsistent with frame size / period");
        }
    }
    if (d.src_switch == d.dst_switch) throw ValidationError("demand '" + d.id + "': source equals destination");
}

} // namespace sctsn
