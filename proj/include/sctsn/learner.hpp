#pragma once

// Edge-switch period learning: arrival timestamps are binned into a 0/1
// sequence, dominant frequencies are taken from the periodogram (with a
// permutation significance threshold) and each candidate is accepted only
// if it sits on a hill of the autocorrelation function.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace sctsn::learner {

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    double min_bin_width_s = 10e-6;
    double bin_divisor = 4.0;           // Δ = max(min_bin_width, min interarrival / divisor)
    std::size_t max_bins = 16384;       // widens Δ for sparse, bursty windows
    std::optional<double> fixed_bin_width_s;
    std::size_t max_candidates = 10;
    std::size_t permutations = 100;
    double significance_quantile = 0.99;
    std::uint64_t permutation_seed = 0x5C75E11ULL;
    double hill_half_width = 0.25;      // fraction of the candidate lag
    std::size_t min_period_bins = 4;    // shorter lags let the grid test accept noise
    std::size_t n_min = 16;
    std::size_t window = 64;
    std::size_t reestimate_every = 16;  // arrivals between attempts while undecided
    double jitter_fraction = 0.1;       // tolerance = max(Δ, p * jitter_fraction)
    double confidence_threshold = 0.8;
    double deviation_threshold = 0.3;
};

struct TimeSeq {
    double bin_width = 0.0;
    double origin = 0.0;
    std::vector<std::uint8_t> bins;
};

/// Throws InsufficientData for fewer than two timestamps and
/// std::invalid_argument for non-increasing input or Δ <= 0.
TimeSeq build_time_sequence(std::span<const double> timestamps, double bin_width);

/// Power |X_k|^2 / N for k = 0..N/2 (index 0 is DC).
std::vector<double> periodogram(const TimeSeq& seq);

struct Candidate {
    std::size_t frequency = 0; // k
    double period_bins = 0.0;  // N / k
    double power = 0.0;
};

/// Bins ranked by descending power (DC excluded), ties to lower frequency.
std::vector<Candidate> ranked_frequencies(const TimeSeq& seq, std::size_t limit);

/// Maximum non-DC power quantile over random permutations of the bins.
double permutation_threshold(const TimeSeq& seq, const Config& cfg = {});

/// Candidates whose power exceeds the permutation threshold.
std::vector<Candidate> periodogram_candidates(const TimeSeq& seq, std::size_t max_candidates,
                                              const Config& cfg = {});

/// ACF(l) / ACF(0) for l = 0..N/2.
std::vector<double> autocorrelation(const TimeSeq& seq);

/// Lag of the hill maximum near `candidate_lag`, or nullopt for a valley.
std::optional<std::size_t> validate_period(double candidate_lag, std::span<const double> acf,
                                           double half_width = 0.25);

struct PeriodEstimate {
    double period_s = 0.0;      // refined ACF lag times Δ
    bool valid = false;
    double p_max_s = 0.0;       // largest raw interarrival
    double confidence = 0.0;    // fraction of arrivals on the periodic grid
    double grid_period_s = 0.0; // least-squares grid spacing used for jitter checks
    double grid_origin_s = 0.0;
    double bin_width_s = 0.0;
};

double adaptive_bin_width(std::span<const double> timestamps, const Config& cfg = {});

/// Full pipeline on a raw timestamp vector; no minimum-arrival guard.
PeriodEstimate estimate_from_timestamps(std::span<const double> timestamps, const Config& cfg = {});

/// Mean interarrival time. Reference baseline only, never used for decisions.
double mean_interarrival(std::span<const double> timestamps);

enum class Verdict : std::uint8_t { undecided, tt, be };

const char* to_string(Verdict v);

/// Sliding window of the most recent arrivals of one stream.
class StreamObservation {
public:
    explicit StreamObservation(std::uint64_t stream_id = 0, std::size_t window = 64)
        : id_(stream_id), window_(window) {}

    /// Throws std::invalid_argument unless `t` is later than the previous arrival.
    void record(double t);
    /// Drops the buffered arrivals (fresh learning window).
    void reset_window();

    std::uint64_t id() const noexcept { return id_; }
    std::size_t capacity() const noexcept { return window_; }
    std::size_t size() const noexcept { return buffer_.size(); }
    bool full() const noexcept { return buffer_.size() >= window_; }
    std::vector<double> timestamps() const { return {buffer_.begin(), buffer_.end()}; }
    std::size_t arrivals_since_reset() const noexcept { return since_reset_; }

    Verdict verdict = Verdict::undecided;
    std::optional<PeriodEstimate> estimate;

private:
    std::uint64_t id_;
    std::size_t window_;
    std::deque<double> buffer_;
    std::optional<double> last_;
    std::size_t since_reset_ = 0;
};

/// Throws InsufficientData below cfg.n_min buffered arrivals.
PeriodEstimate estimate_period(const StreamObservation& obs, const Config& cfg = {});

/// Uses the estimate stored on `obs`.
Verdict classify_stream(const StreamObservation& obs, const Config& cfg = {});

/// True when too many of the last n_min arrivals are off the grid of `current`.
bool detect_deviation(const StreamObservation& obs, const PeriodEstimate& current, const Config& cfg = {});

enum class LearningEvent : std::uint8_t { none, classified_tt, classified_be, deviation };

/// Per-arrival learning policy for one stream: estimate every
/// `reestimate_every` arrivals while undecided, re-examine BE streams on
/// every window refill, watch TT streams for deviation.
LearningEvent observe_arrival(StreamObservation& obs, double t, const Config& cfg = {});

/// Trace replay format: one arrival timestamp (seconds) per line, `#`
/// comments allowed. Throws ParseError (with line) on malformed or
/// non-increasing input.
std::vector<double> parse_trace(std::string_view text);

} // namespace sctsn::learner
