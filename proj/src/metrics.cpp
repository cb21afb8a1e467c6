#include "sctsn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "sctsn/text.hpp"

namespace sctsn::simnet {

void Histogram::add(double latency_s) {
    std::size_t i;
    if (latency_s < floor_s) {
        i = 0;
    } else {
        const double pos = std::floor(std::log10(latency_s / floor_s) * bins_per_decade);
        i = std::min(counts.size() - 1, static_cast<std::size_t>(pos) + 1);
    }
    ++counts[i];
}

double Histogram::lower_edge(std::size_t i) {
    if (i == 0) return 0.0;
    return floor_s * std::pow(10.0, static_cast<double>(i - 1) / bins_per_decade);
}

namespace {

LatencyStats summarize(std::vector<double>& v) {
    LatencyStats s;
    s.count = v.size();
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean_s = sum / static_cast<double>(v.size());
    s.min_s = v.front();
    s.max_s = v.back();
    // Nearest-rank quantiles.
    auto q = [&](double p) { return v[static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size()))) - 1]; };
    s.p50_s = q(0.5);
    s.p99_s = q(0.99);
    return s;
}

} // namespace

MetricsReport compute_metrics(const RunResult& run) {
    MetricsReport r;
    r.scenario = run.scenario;
    r.mode = run.mode;
    r.seed = run.seed;
    r.duration_s = run.duration_s;
    r.stats_period_s = run.stats_period_s;
    r.counters = run.counters;
    r.link_names = run.link_names;
    r.utilization = run.utilization;

    std::vector<double> tt_lat, be_lat;
    std::uint64_t correct = 0, be_tagged = 0, be_correct = 0;
    for (const auto& f : run.frames) {
        const auto& st = run.streams[f.stream];
        const bool is_tt = st.kind == StreamKind::tt;
        ++r.frames;
        if (f.delivered) {
            ++r.delivered;
            const double lat = *f.delivered - f.created;
            if (is_tt) {
                tt_lat.push_back(lat);
                r.tt_hist.add(lat);
                ++r.tt_frames;
                if (lat > st.period_s) ++r.delayed_tt;
            } else {
                be_lat.push_back(lat);
                r.be_hist.add(lat);
            }
        } else if (f.dropped) {
            ++r.dropped;
            if (is_tt) {
                ++r.tt_frames;
                ++r.delayed_tt;
            }
        } else {
            ++r.in_flight;
        }
        if (f.tag != untagged) {
            ++r.tagged_frames;
            const bool tagged_tt = f.tag == 7;
            if (tagged_tt == is_tt) ++correct;
            if (!is_tt) {
                ++be_tagged;
                if (!tagged_tt) ++be_correct;
            }
        }
    }
    r.tt = summarize(tt_lat);
    r.be = summarize(be_lat);
    r.delayed_tt_fraction = r.tt_frames ? static_cast<double>(r.delayed_tt) / static_cast<double>(r.tt_frames) : 0.0;
    r.cr = r.tagged_frames ? static_cast<double>(correct) / static_cast<double>(r.tagged_frames) : 1.0;
    r.tnr = be_tagged ? static_cast<double>(be_correct) / static_cast<double>(be_tagged) : 1.0;
    for (std::size_t i = 0; i < run.streams.size(); ++i) {
        const auto& o = run.outcomes[i];
        if (run.streams[i].kind == StreamKind::tt) ++r.tt_streams;
        else ++r.be_streams;
        if (o.unplaced) ++r.unplaced;
        if (run.streams[i].kind == StreamKind::be && o.verdict == learner::Verdict::tt) ++r.be_as_tt_streams;
        r.migrations += o.migrations;
    }
    return r;
}

MetricsReport run(const Scenario& s) { return compute_metrics(simulate(s)); }

std::string metrics_header() {
    return "scenario,mode,seed,duration_s,frames,delivered,dropped,in_flight,"
           "tt_count,tt_mean_s,tt_min_s,tt_max_s,tt_p50_s,tt_p99_s,tt_frames,delayed_tt,delayed_tt_fraction,"
           "be_count,be_mean_s,be_min_s,be_max_s,be_p50_s,be_p99_s,"
           "tagged_frames,cr,tnr,tt_streams,be_streams,unplaced,be_as_tt_streams,migrations,"
           "packet_ins,rule_installs,tsor_solves,tsor_infeasible,weight_updates,routing_changes,deviations,events";
}

void write_metrics_row(std::ostream& os, const MetricsReport& r) {
    const auto f = [](double v) { return format_double(v); };
    const auto& c = r.counters;
    os << r.scenario << ',' << to_string(r.mode) << ',' << r.seed << ',' << f(r.duration_s) << ',' << r.frames << ','
       << r.delivered << ',' << r.dropped << ',' << r.in_flight << ',' << r.tt.count << ',' << f(r.tt.mean_s) << ','
       << f(r.tt.min_s) << ',' << f(r.tt.max_s) << ',' << f(r.tt.p50_s) << ',' << f(r.tt.p99_s) << ',' << r.tt_frames << ','
       << r.delayed_tt << ',' << f(r.delayed_tt_fraction) << ',' << r.be.count << ',' << f(r.be.mean_s) << ',' << f(r.be.min_s)
       << ',' << f(r.be.max_s) << ',' << f(r.be.p50_s) << ',' << f(r.be.p99_s) << ',' << r.tagged_frames << ',' << f(r.cr)
       << ',' << f(r.tnr) << ',' << r.tt_streams << ',' << r.be_streams << ',' << r.unplaced << ',' << r.be_as_tt_streams
       << ',' << r.migrations << ',' << c.packet_ins << ',' << c.rule_installs << ',' << c.tsor_solves << ','
       << c.tsor_infeasible << ',' << c.weight_updates << ',' << c.routing_changes << ',' << c.deviations << ',' << c.events
       << '\n';
}

void write_metrics_csv(std::ostream& os, const MetricsReport& r) {
    os << metrics_header() << '\n';
    write_metrics_row(os, r);
}

void write_summary(std::ostream& os, const MetricsReport& r) {
    const auto ms = [](double s) {
        std::ostringstream o;
        o << std::fixed << std::setprecision(3) << s * 1e3;
        return o.str();
    };
    os << "scenario " << r.scenario << "  mode " << to_string(r.mode) << "  seed " << r.seed << "  duration " << r.duration_s
       << " s\n";
    os << "frames " << r.frames << "  delivered " << r.delivered << "  dropped " << r.dropped << "  in flight " << r.in_flight
       << "\n\n";
    os << "class      frames     mean[ms]   min[ms]    p99[ms]    max[ms]\n";
    auto row = [&](const char* name, const LatencyStats& s) {
        os << std::left << std::setw(10) << name << ' ' << std::right << std::setw(9) << s.count << "  " << std::setw(9)
           << ms(s.mean_s) << "  " << std::setw(9) << ms(s.min_s) << "  " << std::setw(9) << ms(s.p99_s) << "  "
           << std::setw(9) << ms(s.max_s) << '\n';
    };
    row("TT (7)", r.tt);
    row("BE (0)", r.be);
    os << '\n';
    os << "delayed TT frames " << r.delayed_tt << " of " << r.tt_frames << " (" << std::setprecision(4)
       << 100.0 * r.delayed_tt_fraction << " %)\n";
    os << "CR " << std::fixed << std::setprecision(4) << r.cr << "  TNR " << r.tnr << std::defaultfloat << '\n';
    os << "streams: " << r.tt_streams << " TT, " << r.be_streams << " BE; unplaced " << r.unplaced << "; BE held as TT "
       << r.be_as_tt_streams << "; migrations " << r.migrations << '\n';
    os << "controller: packet-ins " << r.counters.packet_ins << ", rule installs " << r.counters.rule_installs
       << ", optimisations " << r.counters.tsor_solves << " (" << r.counters.tsor_infeasible << " infeasible), weight updates "
       << r.counters.weight_updates << ", default-path changes " << r.counters.routing_changes << '\n';
}

void write_utilization_csv(std::ostream& os, const MetricsReport& r) {
    os << "period,t_end_s,link,utilization\n";
    for (std::size_t k = 0; k < r.utilization.size(); ++k) {
        const auto t_end = format_double(static_cast<double>(k + 1) * r.stats_period_s);
        for (std::size_t e = 0; e < r.utilization[k].size(); ++e) {
            os << k << ',' << t_end << ',' << r.link_names[e] << ',' << format_double(r.utilization[k][e]) << '\n';
        }
    }
}

void write_histogram_csv(std::ostream& os, const MetricsReport& r) {
    os << "class,lower_s,count\n";
    auto dump = [&](const char* cls, const Histogram& h) {
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            if (h.counts[i]) os << cls << ',' << format_double(Histogram::lower_edge(i)) << ',' << h.counts[i] << '\n';
        }
    };
    dump("tt", r.tt_hist);
    dump("be", r.be_hist);
}

void write_frame_trace(std::ostream& os, const RunResult& run) {
    os << "stream,kind,tag,created_s,delivered_s,dropped,path_hash\n";
    for (const auto& f : run.frames) {
        const auto& st = run.streams[f.stream];
        os << st.id << ',' << (st.kind == StreamKind::tt ? "tt" : "be") << ',' << f.tag << ',' << format_double(f.created) << ','
           << (f.delivered ? format_double(*f.delivered) : std::string()) << ',' << (f.dropped ? 1 : 0) << ',' << std::hex
           << f.path_hash << std::dec << '\n';
    }
}

} // namespace sctsn::simnet
