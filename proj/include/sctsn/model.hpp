#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sctsn {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

/// Raised for malformed input documents. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Raised when a structurally valid document violates a model invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SwitchRole : std::uint8_t { unassigned, edge, backbone };

struct LinkParams {
    double capacity_bps = 100e6;
    double base_delay = 1.0;   // l_e^o, abstract latency units
    double queue_factor = 0.5; // l_e^q, abstract latency units
    double propagation_s = 1e-6;
};

struct Link {
    NodeId src = 0;
    NodeId dst = 0;
    LinkParams params;
};

struct Host {
    std::string name;
    NodeId attached = 0;
};

/// Switch fabric with host attachments. Links are directed; an undirected
/// edge in the topology file becomes two links.
class Topology {
public:
    NodeId add_node(std::string name);
    LinkId add_link(NodeId src, NodeId dst, const LinkParams& params);
    void add_host(std::string name, NodeId attached);

    std::size_t node_count() const noexcept { return names_.size(); }
    std::size_t link_count() const noexcept { return links_.size(); }
    const std::string& node_name(NodeId n) const { return names_.at(n); }
    std::optional<NodeId> find_node(std::string_view name) const;

    const Link& link(LinkId id) const { return links_.at(id); }
    std::span<const Link> links() const noexcept { return links_; }
    /// Outgoing links of `n`, ordered by destination node id.
    std::span<const LinkId> out_links(NodeId n) const { return out_.at(n); }
    std::optional<LinkId> find_link(NodeId src, NodeId dst) const;

    std::span<const Host> hosts() const noexcept { return hosts_; }
    std::optional<std::size_t> find_host(std::string_view name) const;

    SwitchRole role(NodeId n) const { return roles_.at(n); }
    bool roles_assigned() const noexcept { return roles_assigned_; }
    void set_roles(std::vector<SwitchRole> roles);
    std::vector<NodeId> edge_switches() const;

    /// Number of distinct neighbouring switches (undirected inter-switch degree).
    std::size_t degree(NodeId n) const;

    /// Hosts requested per edge switch, materialised once roles are known.
    std::size_t hosts_per_edge = 0;
    LinkParams host_link;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<Link> links_;
    std::vector<std::vector<LinkId>> out_;
    std::vector<Host> hosts_;
    std::unordered_map<std::string, std::size_t> host_index_;
    std::vector<SwitchRole> roles_;
    bool roles_assigned_ = false;
};

/// Parses the topology text format (see docs/formats.md). Roles are not assigned.
Topology load_topology(std::string_view text);
Topology load_topology_file(const std::string& path);

/// Edge iff inter-switch degree is strictly below the average switch degree.
/// Also materialises `hosts_per_edge` hosts on every edge switch.
Topology classify_switch_roles(Topology topo);

/// Throws ValidationError if any host hangs off a non-edge switch.
void validate_host_attachments(const Topology& topo);

/// load + classify + validate.
Topology prepare_topology(std::string_view text);
Topology prepare_topology_file(const std::string& path);

/// Directed links from a source edge switch to a destination edge switch.
struct Path {
    std::vector<LinkId> links;

    std::size_t hops() const noexcept { return links.size(); }
    bool empty() const noexcept { return links.empty(); }
    friend bool operator==(const Path&, const Path&) = default;
};

std::vector<NodeId> path_nodes(const Topology& topo, const Path& path);
/// Contiguous and simple.
bool is_valid_path(const Topology& topo, const Path& path);
std::string format_path(const Topology& topo, const Path& path);

/// Up to k simple paths ordered by (hop count, node-id sequence).
std::vector<Path> k_shortest_paths(const Topology& topo, NodeId src, NodeId dst, std::size_t k);

enum class TrafficClass : std::uint8_t { best_effort = 0, time_triggered = 7 };

/// Routing-relevant profile of a stream.
struct Demand {
    std::string id;
    int cls = 7;              // 0..7, 7 highest
    double load_bps = 0.0;    // h_d
    double latency_bound = 0; // l_d, abstract units
    std::optional<double> period_s;
    std::uint32_t frame_bytes = 1522;
    NodeId src_switch = 0;
    NodeId dst_switch = 0;
};

/// h_d for a periodic stream.
inline double periodic_load(std::uint32_t frame_bytes, double period_s) {
    return static_cast<double>(frame_bytes) * 8.0 / period_s;
}

void validate_demand(const Demand& d);

} // namespace sctsn
