#pragma once

// Run metrics: per-class latency statistics, delayed TT frames
// (latency above the stream period), classification rates and CSV output.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sctsn/simnet.hpp"

namespace sctsn::simnet {

struct LatencyStats {
    std::uint64_t count = 0;
    double mean_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
    double p50_s = 0.0;
    double p99_s = 0.0;
};

/// Log-spaced latency histogram: 20 bins per decade from 1 us to 10 s,
/// plus underflow (index 0) and overflow (last index).
struct Histogram {
    static constexpr int bins_per_decade = 20;
    static constexpr double floor_s = 1e-6;
    static constexpr int decades = 7;
    std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(bins_per_decade * decades + 2, 0);

    void add(double latency_s);
    /// Lower edge of bin `i` (0 for the underflow bin).
    static double lower_edge(std::size_t i);
};

struct MetricsReport {
    std::string scenario;
    Mode mode = Mode::sctsn;
    std::uint64_t seed = 0;
    double duration_s = 0.0;
    double stats_period_s = 0.0;

    std::uint64_t frames = 0;    // generated
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t in_flight = 0; // at the horizon

    LatencyStats tt;             // by ground-truth kind, delivered frames
    LatencyStats be;
    Histogram tt_hist;
    Histogram be_hist;
    std::uint64_t tt_frames = 0; // delivered or dropped
    std::uint64_t delayed_tt = 0;
    double delayed_tt_fraction = 0.0;

    std::uint64_t tagged_frames = 0; // left the ingress edge switch
    double cr = 1.0;
    double tnr = 1.0;

    std::size_t tt_streams = 0;
    std::size_t be_streams = 0;
    std::size_t unplaced = 0;         // TT-classified streams whose placement failed
    std::size_t be_as_tt_streams = 0; // BE streams holding a TT verdict at the horizon
    std::uint64_t migrations = 0;
    Counters counters;

    std::vector<std::string> link_names;
    std::vector<std::vector<double>> utilization;
};

MetricsReport compute_metrics(const RunResult& run);

/// simulate + compute_metrics.
MetricsReport run(const Scenario& s);

/// Column names of `write_metrics_row`, comma separated.
std::string metrics_header();
void write_metrics_row(std::ostream& os, const MetricsReport& r);
/// Header plus one row.
void write_metrics_csv(std::ostream& os, const MetricsReport& r);
void write_summary(std::ostream& os, const MetricsReport& r);
/// Columns: period,t_end_s,link,utilization.
void write_utilization_csv(std::ostream& os, const MetricsReport& r);
/// Columns: class,lower_s,count (nonzero bins only).
void write_histogram_csv(std::ostream& os, const MetricsReport& r);
/// Columns: stream,kind,tag,created_s,delivered_s,dropped,path_hash.
void write_frame_trace(std::ostream& os, const RunResult& run);

} // namespace sctsn::simnet
