#include "sctsn/learner.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numeric>

#include "sctsn/model.hpp"
#include "sctsn/rng.hpp"
#include "sctsn/text.hpp"

namespace sctsn::learner {

namespace {

constexpr double bin_epsilon = 1e-9;

// Real-to-complex transform of a fixed length with reusable buffers.
class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n),
          in_(fftw_alloc_real(n)),
          out_(fftw_alloc_complex(n / 2 + 1)),
          plan_(fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE)) {}
    ~RealFft() {
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const noexcept { return n_; }
    double* input() noexcept { return in_; }

    /// |X_k|^2 for k = 0..n/2 of the current input.
    void power(std::vector<double>& out) {
        fftw_execute(plan_);
        out.resize(n_ / 2 + 1);
        for (std::size_t k = 0; k <= n_ / 2; ++k) out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }

private:
    std::size_t n_;
    double* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

RealFft& fft_for(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
    auto& slot = cache[n];
    if (!slot) {
        if (cache.size() > 64) {
            cache.clear();
            return *(cache[n] = std::make_unique<RealFft>(n));
        }
        slot = std::make_unique<RealFft>(n);
    }
    return *slot;
}

std::vector<double> power_spectrum(std::span<const std::uint8_t> bins) {
    auto& fft = fft_for(bins.size());
    std::copy(bins.begin(), bins.end(), fft.input());
    std::vector<double> p;
    fft.power(p);
    const double n = static_cast<double>(bins.size());
    for (auto& v : p) v /= n;
    return p;
}

double max_nondc(const std::vector<double>& p) {
    return p.size() > 1 ? *std::max_element(p.begin() + 1, p.end()) : 0.0;
}

// Noise floor for "power exceeds threshold" comparisons.
double power_tolerance(const TimeSeq& seq) { return 1e-9 * static_cast<double>(seq.bins.size()); }

struct GridFit {
    std::size_t inliers = 0;
    double period = 0.0;
    double origin = 0.0;
};

std::size_t count_inliers(std::span<const double> ts, double origin, double period, double tol) {
    std::size_t n = 0;
    for (double t : ts) {
        const double k = std::round((t - origin) / period);
        if (std::abs(t - (origin + k * period)) <= tol) ++n;
    }
    return n;
}

// Best-anchored grid with spacing `period`, then least-squares refinement of
// spacing and phase over the inliers.
GridFit fit_grid(std::span<const double> ts, double period, double tol, bool refine) {
    GridFit best{0, period, ts.empty() ? 0.0 : ts.front()};
    for (double anchor : ts) {
        const auto n = count_inliers(ts, anchor, period, tol);
        if (n > best.inliers) best = {n, period, anchor};
    }
    if (!refine) return best;
    for (int iter = 0; iter < 3 && best.inliers >= 2; ++iter) {
        double sk = 0, st = 0, skk = 0, skt = 0, m = 0;
        for (double t : ts) {
            const double k = std::round((t - best.origin) / best.period);
            if (std::abs(t - (best.origin + k * best.period)) > tol) continue;
            sk += k;
            st += t;
            skk += k * k;
            skt += k * t;
            m += 1;
        }
        const double den = m * skk - sk * sk;
        if (m < 2 || std::abs(den) < 1e-12) break;
        const double slope = (m * skt - sk * st) / den;
        if (!(slope > 0.0)) break;
        const double origin = (st - slope * sk) / m;
        const auto n = count_inliers(ts, origin, slope, tol);
        if (n < best.inliers) break;
        best = {n, slope, origin};
    }
    return best;
}

double tolerance_for(double period, double bin_width, const Config& cfg) {
    return std::max(bin_width, period * cfg.jitter_fraction);
}

} // namespace

TimeSeq build_time_sequence(std::span<const double> timestamps, double bin_width) {
    if (timestamps.size() < 2) throw InsufficientData("time sequence needs at least two timestamps");
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (!(timestamps[i] > timestamps[i - 1])) throw std::invalid_argument("timestamps must be strictly increasing");
    }
    TimeSeq seq;
    seq.bin_width = bin_width;
    seq.origin = timestamps.front();
    const double span = (timestamps.back() - seq.origin) / bin_width;
    const auto length = static_cast<std::size_t>(std::ceil(span - bin_epsilon)) + 1;
    seq.bins.assign(length, 0);
    for (double t : timestamps) {
        auto idx = static_cast<std::size_t>(std::floor((t - seq.origin) / bin_width + bin_epsilon));
        seq.bins[std::min(idx, length - 1)] = 1;
    }
    return seq;
}

std::vector<double> periodogram(const TimeSeq& seq) { return power_spectrum(seq.bins); }

std::vector<Candidate> ranked_frequencies(const TimeSeq& seq, std::size_t limit) {
    const auto p = periodogram(seq);
    const double n = static_cast<double>(seq.bins.size());
    const double top = max_nondc(p);
    // Quantised keys make near-equal harmonics tie exactly, so the lower
    // frequency (longer period) ranks first.
    const double quantum = std::max(top * 1e-9, 1e-300);
    std::vector<Candidate> all;
    for (std::size_t k = 1; k < p.size(); ++k) all.push_back({k, n / static_cast<double>(k), p[k]});
    auto key = [&](const Candidate& c) { return std::llround(c.power / quantum); };
    const auto cut = std::min(limit, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cut), all.end(),
                      [&](const Candidate& a, const Candidate& b) {
                          const auto ka = key(a), kb = key(b);
                          return ka != kb ? ka > kb : a.frequency < b.frequency;
                      });
    all.resize(cut);
    return all;
}

double permutation_threshold(const TimeSeq& seq, const Config& cfg) {
    if (cfg.permutations == 0) return 0.0;
    Rng rng(cfg.permutation_seed);
    std::vector<std::uint8_t> shuffled = seq.bins;
    std::vector<double> maxima;
    maxima.reserve(cfg.permutations);
    for (std::size_t r = 0; r < cfg.permutations; ++r) {
        for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
            std::swap(shuffled[i], shuffled[rng.index(i + 1)]);
        }
        maxima.push_back(max_nondc(power_spectrum(shuffled)));
    }
    std::sort(maxima.begin(), maxima.end());
    // Nearest-rank quantile.
    const auto rank = static_cast<std::size_t>(std::ceil(cfg.significance_quantile * static_cast<double>(maxima.size())));
    return maxima[std::clamp<std::size_t>(rank, 1, maxima.size()) - 1];
}

namespace {

// Same verdict as `power > permutation_threshold(seq, cfg)`, but stops as
// soon as enough permutation maxima reach `power` to rule it out.
bool above_permutation_threshold(const TimeSeq& seq, double power, const Config& cfg) {
    if (cfg.permutations == 0) return power > 0.0;
    const auto rank = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(cfg.significance_quantile * static_cast<double>(cfg.permutations))), 1,
        cfg.permutations);
    const std::size_t allowed = cfg.permutations - rank; // maxima that may reach `power`
    Rng rng(cfg.permutation_seed);
    std::vector<std::uint8_t> shuffled = seq.bins;
    std::size_t reached = 0;
    for (std::size_t r = 0; r < cfg.permutations; ++r) {
        for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
            std::swap(shuffled[i], shuffled[rng.index(i + 1)]);
        }
        if (max_nondc(power_spectrum(shuffled)) >= power && ++reached > allowed) return false;
    }
    return true;
}

} // namespace

std::vector<Candidate> periodogram_candidates(const TimeSeq& seq, std::size_t max_candidates, const Config& cfg) {
    if (seq.bins.size() < 8) throw InsufficientData("periodogram needs at least 8 bins");
    auto ranked = ranked_frequencies(seq, max_candidates);
    const double threshold = permutation_threshold(seq, cfg) + power_tolerance(seq);
    std::erase_if(ranked, [&](const Candidate& c) { return !(c.power > threshold); });
    return ranked;
}

std::vector<double> autocorrelation(const TimeSeq& seq) {
    const std::size_t n = seq.bins.size();
    if (n < 4) throw InsufficientData("autocorrelation needs at least 4 bins");
    const std::size_t max_lag = n / 2;
    std::vector<double> acf(max_lag + 1, 0.0);
    const auto ones = std::count(seq.bins.begin(), seq.bins.end(), std::uint8_t{1});
    if (ones == 0) return acf;

    // Wiener-Khinchin on a zero-padded copy; correlations of a 0/1 sequence
    // are integers, so rounding recovers them exactly.
    std::size_t m = 1;
    while (m < 2 * n) m <<= 1;
    std::vector<std::complex<double>> spec(m / 2 + 1);
    {
        std::vector<double> in(m, 0.0);
        std::copy(seq.bins.begin(), seq.bins.end(), in.begin());
        fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(),
                                             reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
        fftw_execute(fwd);
        fftw_destroy_plan(fwd);
        for (auto& c : spec) c = std::norm(c);
        fftw_plan inv = fftw_plan_dft_c2r_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(spec.data()),
                                             in.data(), FFTW_ESTIMATE);
        fftw_execute(inv);
        fftw_destroy_plan(inv);
        const double zero = std::round(in[0] / static_cast<double>(m));
        for (std::size_t l = 0; l <= max_lag; ++l) acf[l] = std::round(in[l] / static_cast<double>(m)) / zero;
    }
    return acf;
}

std::optional<std::size_t> validate_period(double candidate_lag, std::span<const double> acf, double half_width) {
    if (acf.size() < 3) return std::nullopt;
    const std::size_t max_lag = acf.size() - 1;
    const auto lag = static_cast<std::size_t>(std::llround(candidate_lag));
    if (lag < 1 || lag > max_lag) return std::nullopt;
    const double reach = half_width * static_cast<double>(lag);
    std::size_t lo = static_cast<std::size_t>(std::max(1.0, std::floor(static_cast<double>(lag) - reach)));
    std::size_t hi = static_cast<std::size_t>(std::ceil(static_cast<double>(lag) + reach));
    lo = std::min(lo, lag - 1 == 0 ? std::size_t{1} : lag - 1);
    hi = std::min(std::max(hi, lag + 1), max_lag);
    if (hi <= lo + 1) return std::nullopt;

    std::size_t best = lo;
    for (std::size_t j = lo; j <= hi; ++j) {
        const auto dj = j > lag ? j - lag : lag - j;
        const auto db = best > lag ? best - lag : lag - best;
        if (acf[j] > acf[best] || (acf[j] == acf[best] && dj < db)) best = j;
    }
    if (best == lo || best == hi) return std::nullopt;
    if (!(acf[best] > acf[lo] && acf[best] > acf[hi])) return std::nullopt;

    const double mean = std::accumulate(acf.begin() + 1, acf.end(), 0.0) / static_cast<double>(max_lag);
    if (!(acf[best] > mean)) return std::nullopt;
    return best;
}

double adaptive_bin_width(std::span<const double> timestamps, const Config& cfg) {
    if (cfg.fixed_bin_width_s) return *cfg.fixed_bin_width_s;
    if (timestamps.size() < 2) throw InsufficientData("bin width needs at least two timestamps");
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < timestamps.size(); ++i) min_gap = std::min(min_gap, timestamps[i] - timestamps[i - 1]);
    const double span = timestamps.back() - timestamps.front();
    const double cap = span / static_cast<double>(cfg.max_bins - 1);
    return std::max({cfg.min_bin_width_s, min_gap / cfg.bin_divisor, cap});
}

double mean_interarrival(std::span<const double> timestamps) {
    if (timestamps.size() < 2) throw InsufficientData("mean interarrival needs at least two timestamps");
    return (timestamps.back() - timestamps.front()) / static_cast<double>(timestamps.size() - 1);
}

PeriodEstimate estimate_from_timestamps(std::span<const double> timestamps, const Config& cfg) {
    PeriodEstimate est;
    est.bin_width_s = adaptive_bin_width(timestamps, cfg);
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        est.p_max_s = std::max(est.p_max_s, timestamps[i] - timestamps[i - 1]);
    }
    const auto seq = build_time_sequence(timestamps, est.bin_width_s);
    if (seq.bins.size() < 8) return est;
    const auto acf = autocorrelation(seq);
    const auto ranked = ranked_frequencies(seq, cfg.max_candidates);

    // Candidates above the threshold form a prefix of the ranking, so only
    // the strongest candidate on a hill is tested against the permutations.
    for (const auto& c : ranked) {
        const auto lag = validate_period(c.period_bins, acf, cfg.hill_half_width);
        if (!lag || *lag < cfg.min_period_bins) continue;
        if (!above_permutation_threshold(seq, c.power - power_tolerance(seq), cfg)) break;
        est.valid = true;
        est.period_s = static_cast<double>(*lag) * est.bin_width_s;
        break;
    }
    if (est.valid) {
        const double tol = tolerance_for(est.period_s, est.bin_width_s, cfg);
        const auto grid = fit_grid(timestamps, est.period_s, tol, true);
        est.confidence = static_cast<double>(grid.inliers) / static_cast<double>(timestamps.size());
        est.grid_period_s = grid.period;
        est.grid_origin_s = grid.origin;
    }
    return est;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::tt: return "TT";
    case Verdict::be: return "BE";
    case Verdict::undecided: break;
    }
    return "undecided";
}

void StreamObservation::record(double t) {
    if (last_ && !(t > *last_)) throw std::invalid_argument("arrival timestamps must be strictly increasing");
    last_ = t;
    buffer_.push_back(t);
    if (buffer_.size() > window_) buffer_.pop_front();
    ++since_reset_;
}

void StreamObservation::reset_window() {
    buffer_.clear();
    since_reset_ = 0;
}

PeriodEstimate estimate_period(const StreamObservation& obs, const Config& cfg) {
    if (obs.size() < cfg.n_min) {
        throw InsufficientData("need " + std::to_string(cfg.n_min) + " arrivals, have " + std::to_string(obs.size()));
    }
    const auto ts = obs.timestamps();
    return estimate_from_timestamps(ts, cfg);
}

Verdict classify_stream(const StreamObservation& obs, const Config& cfg) {
    if (obs.size() < cfg.n_min || !obs.estimate) return Verdict::undecided;
    const auto& e = *obs.estimate;
    if (e.valid && e.confidence >= cfg.confidence_threshold) return Verdict::tt;
    return obs.full() ? Verdict::be : Verdict::undecided;
}

bool detect_deviation(const StreamObservation& obs, const PeriodEstimate& current, const Config& cfg) {
    if (!current.valid) return false;
    auto ts = obs.timestamps();
    if (ts.size() > cfg.n_min) ts.erase(ts.begin(), ts.end() - static_cast<std::ptrdiff_t>(cfg.n_min));
    if (ts.size() < 2) return false;
    const double period = current.grid_period_s > 0 ? current.grid_period_s : current.period_s;
    const double tol = tolerance_for(period, current.bin_width_s, cfg);
    const auto grid = fit_grid(ts, period, tol, false);
    const double off = 1.0 - static_cast<double>(grid.inliers) / static_cast<double>(ts.size());
    return off > cfg.deviation_threshold;
}

LearningEvent observe_arrival(StreamObservation& obs, double t, const Config& cfg) {
    obs.record(t);
    const auto n = obs.arrivals_since_reset();
    switch (obs.verdict) {
    case Verdict::undecided:
        if (obs.size() >= cfg.n_min && (n - cfg.n_min) % cfg.reestimate_every == 0) {
            obs.estimate = estimate_period(obs, cfg);
            obs.verdict = classify_stream(obs, cfg);
            if (obs.verdict == Verdict::tt) return LearningEvent::classified_tt;
            if (obs.verdict == Verdict::be) return LearningEvent::classified_be;
        }
        break;
    case Verdict::be:
        if (n % obs.capacity() == 0) {
            obs.estimate = estimate_period(obs, cfg);
            if (classify_stream(obs, cfg) == Verdict::tt) {
                obs.verdict = Verdict::tt;
                return LearningEvent::classified_tt;
            }
        }
        break;
    case Verdict::tt:
        if (n % cfg.reestimate_every == 0 && obs.estimate && detect_deviation(obs, *obs.estimate, cfg)) {
            obs.reset_window();
            obs.verdict = Verdict::undecided;
            obs.estimate.reset();
            return LearningEvent::deviation;
        }
        break;
    }
    return LearningEvent::none;
}

std::vector<double> parse_trace(std::string_view text) {
    std::vector<double> ts;
    for_each_line(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
        if (tok.size() != 1) throw ParseError(line, "expected one timestamp per line");
        const double t = parse_number(tok[0], line);
        if (!ts.empty() && !(t > ts.back())) throw ParseError(line, "timestamps must be strictly increasing");
        ts.push_back(t);
    });
    return ts;
}

} // namespace sctsn::learner
