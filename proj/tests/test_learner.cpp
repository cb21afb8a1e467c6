#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sctsn/learner.hpp"
#include "sctsn/model.hpp"
#include "sctsn/rng.hpp"
#include "sctsn/text.hpp"
#include "test_support.hpp"

using namespace sctsn;
using namespace sctsn::learner;

namespace {

constexpr double us = 1e-6;

TimeSeq seq_of(std::vector<std::uint8_t> bins) {
    TimeSeq s;
    s.bin_width = 1.0;
    s.bins = std::move(bins);
    return s;
}

// Direct O(N^2) DFT power, independent of the FFT path.
std::vector<double> dft_power(const std::vector<std::uint8_t>& x) {
    const std::size_t n = x.size();
    std::vector<double> p(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        double re = 0, im = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const double a = -2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(n);
            re += x[t] * std::cos(a);
            im += x[t] * std::sin(a);
        }
        p[k] = (re * re + im * im) / static_cast<double>(n);
    }
    return p;
}

// Direct lagged dot products normalised by lag 0.
std::vector<double> direct_acf(const std::vector<std::uint8_t>& x) {
    const std::size_t n = x.size();
    std::vector<double> r(n / 2 + 1);
    for (std::size_t l = 0; l <= n / 2; ++l) {
        double s = 0;
        for (std::size_t t = 0; t + l < n; ++t) s += x[t] * x[t + l];
        r[l] = s;
    }
    for (std::size_t l = 1; l < r.size(); ++l) r[l] /= r[0];
    r[0] = 1.0;
    return r;
}

std::vector<std::uint8_t> impulse_train(std::size_t period, std::size_t length) {
    std::vector<std::uint8_t> x(length, 0);
    for (std::size_t t = 0; t < length; t += period) x[t] = 1;
    return x;
}

std::vector<double> trace(const std::string& name) {
    return parse_trace(read_file(test_support::data_path("traces/" + name)));
}

StreamObservation observe(const std::vector<double>& ts, std::size_t window = 64) {
    StreamObservation obs(1, window);
    for (double t : ts) obs.record(t);
    return obs;
}

} // namespace

TEST(TimeSequence, BinsExample) {
    const std::vector<double> ts{0, 50 * us, 100 * us};
    const auto seq = build_time_sequence(ts, 25 * us);
    EXPECT_EQ(seq.bins, (std::vector<std::uint8_t>{1, 0, 1, 0, 1}));
    EXPECT_DOUBLE_EQ(seq.origin, 0.0);
}

TEST(TimeSequence, CollisionCollapsesToOneBin) {
    const std::vector<double> ts{0, 10 * us};
    const auto seq = build_time_sequence(ts, 25 * us);
    // ceil(10/25) + 1 = 2 bins; both arrivals land in bin 0.
    EXPECT_EQ(seq.bins, (std::vector<std::uint8_t>{1, 0}));
}

TEST(TimeSequence, ImpulseTrainPeriod50) {
    std::vector<double> ts;
    for (int i = 0; i < 100; ++i) ts.push_back(i * 50 * us);
    const auto seq = build_time_sequence(ts, 10 * us);
    ASSERT_EQ(seq.bins.size(), 99u * 5 + 1);
    for (std::size_t i = 0; i < seq.bins.size(); ++i) EXPECT_EQ(seq.bins[i], i % 5 == 0 ? 1 : 0);
}

TEST(TimeSequence, Errors) {
    const std::vector<double> one{1.0};
    EXPECT_THROW(build_time_sequence(one, 1.0), InsufficientData);
    const std::vector<double> dup{1.0, 1.0};
    EXPECT_THROW(build_time_sequence(dup, 1.0), std::invalid_argument);
    const std::vector<double> ok{1.0, 2.0};
    EXPECT_THROW(build_time_sequence(ok, 0.0), std::invalid_argument);
}

TEST(Periodogram, MatchesDirectDft) {
    Rng rng(3);
    for (std::size_t n : {8u, 13u, 64u, 77u, 250u}) {
        std::vector<std::uint8_t> x(n);
        for (auto& v : x) v = rng.uniform01() < 0.3;
        x[0] = 1;
        const auto fast = periodogram(seq_of(x));
        const auto slow = dft_power(x);
        ASSERT_EQ(fast.size(), slow.size());
        for (std::size_t k = 0; k < fast.size(); ++k) EXPECT_NEAR(fast[k], slow[k], 1e-9);
    }
}

TEST(Periodogram, ImpulseTrainTopCandidate) {
    const auto seq = seq_of(impulse_train(50, 5000));
    const auto cands = periodogram_candidates(seq, 5);
    ASSERT_FALSE(cands.empty());
    EXPECT_NEAR(cands.front().period_bins, 50.0, 1.0);
}

TEST(Periodogram, AllOnesHasNoCandidate) {
    const auto seq = seq_of(std::vector<std::uint8_t>(64, 1));
    EXPECT_TRUE(periodogram_candidates(seq, 5).empty());
}

TEST(Periodogram, NoiseRarelyPassesPermutationThreshold) {
    int empty = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(1000 + seed);
        std::vector<std::uint8_t> x(256);
        for (auto& v : x) v = rng.index(2);
        Config cfg;
        cfg.permutation_seed = 77 + seed;
        if (periodogram_candidates(seq_of(x), 10, cfg).empty()) ++empty;
    }
    EXPECT_GE(empty, 95);
}

TEST(Periodogram, TooShort) { EXPECT_THROW(periodogram_candidates(seq_of({1, 0, 1}), 3), InsufficientData); }

TEST(Autocorrelation, MatchesDirectDotProducts) {
    Rng rng(11);
    for (std::size_t n : {4u, 9u, 100u, 333u}) {
        std::vector<std::uint8_t> x(n);
        for (auto& v : x) v = rng.uniform01() < 0.4;
        x[1] = 1;
        const auto fast = autocorrelation(seq_of(x));
        const auto slow = direct_acf(x);
        ASSERT_EQ(fast.size(), slow.size());
        for (std::size_t l = 0; l < fast.size(); ++l) EXPECT_DOUBLE_EQ(fast[l], slow[l]);
    }
}

TEST(Autocorrelation, AlternatingPeaksAtLagTwo) {
    // Hand computation: lags 0..4 give dot products 4, 0, 3, 0, 2.
    const auto acf = autocorrelation(seq_of({1, 0, 1, 0, 1, 0, 1, 0}));
    const std::vector<double> expected{1.0, 0.0, 0.75, 0.0, 0.5};
    ASSERT_EQ(acf.size(), expected.size());
    for (std::size_t i = 0; i < acf.size(); ++i) EXPECT_DOUBLE_EQ(acf[i], expected[i]);
}

TEST(Autocorrelation, AllOnesIsMonotone) {
    const std::size_t n = 40;
    const auto acf = autocorrelation(seq_of(std::vector<std::uint8_t>(n, 1)));
    for (std::size_t l = 0; l < acf.size(); ++l) {
        EXPECT_DOUBLE_EQ(acf[l], static_cast<double>(n - l) / static_cast<double>(n));
    }
    for (double cand : {4.0, 8.0, 12.0}) EXPECT_FALSE(validate_period(cand, acf));
}

TEST(Autocorrelation, ImpulseTrainMaximaAtMultiples) {
    const auto acf = autocorrelation(seq_of(impulse_train(50, 1000)));
    for (std::size_t l = 1; l < acf.size(); ++l) {
        if (l % 50 == 0) {
            EXPECT_GT(acf[l], acf[l - 1]);
            if (l + 1 < acf.size()) {
                EXPECT_GT(acf[l], acf[l + 1]);
            }
        } else {
            EXPECT_EQ(acf[l], 0.0);
        }
    }
}

TEST(Validate, ImpulseTrainRefinesToExactLag) {
    const auto acf = autocorrelation(seq_of(impulse_train(50, 1000)));
    EXPECT_EQ(validate_period(47.6, acf), 50u);
    EXPECT_EQ(validate_period(52.0, acf), 50u);
    // Harmonic: lag 25 lies in a valley.
    EXPECT_FALSE(validate_period(25.0, acf));
}

TEST(Validate, AlternatingAcceptsLagTwo) {
    const std::vector<double> acf{1.0, 0.0, 0.75, 0.0, 0.5};
    EXPECT_EQ(validate_period(2.0, acf), 2u);
}

TEST(Validate, RejectsValleyOfRandomSequence) {
    Rng rng(5);
    std::vector<std::uint8_t> x(400);
    for (auto& v : x) v = rng.uniform01() < 0.5;
    const auto acf = autocorrelation(seq_of(x));
    // Find a strict local minimum below the mean and check it is rejected.
    double mean = 0;
    for (std::size_t l = 1; l < acf.size(); ++l) mean += acf[l];
    mean /= static_cast<double>(acf.size() - 1);
    int checked = 0;
    for (std::size_t l = 10; l + 10 < acf.size() && checked < 5; ++l) {
        bool valley = acf[l] < mean;
        for (std::size_t j = l - 2; j <= l + 2; ++j) valley = valley && acf[l] <= acf[j];
        if (!valley) continue;
        const auto got = validate_period(static_cast<double>(l), acf);
        if (got) {
            EXPECT_NE(*got, l);
        }
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(Estimate, MissingFrame) {
    const auto ts = trace("missing_frame.trace");
    const auto obs = observe(ts);
    const auto est = estimate_period(obs);
    ASSERT_TRUE(est.valid);
    EXPECT_NEAR(est.period_s, 200 * us, est.bin_width_s);
    EXPECT_NEAR(est.period_s, 200 * us, 1e-12);
    EXPECT_NEAR(est.p_max_s, 400 * us, 1e-12);
    EXPECT_GE(est.p_max_s, est.period_s);
    // Mean interarrival is pulled off by the gap.
    EXPECT_GT(std::abs(mean_interarrival(ts) - 200 * us), 5 * us);
}

TEST(Estimate, LateFrame) {
    const auto ts = trace("late_frame.trace");
    const auto est = estimate_period(observe(ts));
    ASSERT_TRUE(est.valid);
    EXPECT_NEAR(est.period_s, 50 * us, 1e-12);
    EXPECT_GE(est.confidence, 0.9);
}

TEST(Estimate, RegimeChange) {
    const auto full = trace("regime_change.trace");
    EXPECT_NEAR(mean_interarrival(full), 62 * us, 0.5 * us);

    Config cfg;
    cfg.fixed_bin_width_s = 5 * us;
    const auto recent = trace("regime_change_recent.trace");
    const auto est = estimate_period(observe(recent), cfg);
    ASSERT_TRUE(est.valid);
    EXPECT_NEAR(est.period_s, 25 * us, 1e-12);
    EXPECT_GT(std::abs(mean_interarrival(full) - est.period_s), 30 * us);
}

TEST(Estimate, RequiresMinimumArrivals) {
    std::vector<double> ts;
    for (int i = 0; i < 15; ++i) ts.push_back(i * 1e-3);
    EXPECT_THROW(estimate_period(observe(ts)), InsufficientData);
}

TEST(Estimate, AdaptiveBinWidth) {
    const std::vector<double> ts{0.0, 8e-3, 18e-3};
    EXPECT_DOUBLE_EQ(adaptive_bin_width(ts), 2e-3);
    const std::vector<double> fine{0.0, 20e-6, 60e-6};
    EXPECT_DOUBLE_EQ(adaptive_bin_width(fine), 10e-6);
}

TEST(Classify, PeriodicStreamBecomesTT) {
    StreamObservation obs(1);
    LearningEvent last = LearningEvent::none;
    for (int i = 0; i < 16; ++i) last = observe_arrival(obs, 0.5 + i * 10e-3);
    EXPECT_EQ(last, LearningEvent::classified_tt);
    EXPECT_EQ(classify_stream(obs), Verdict::tt);
    ASSERT_TRUE(obs.estimate);
    EXPECT_NEAR(obs.estimate->period_s, 10e-3, 1e-12);
}

TEST(Classify, FewFramesUndecided) {
    StreamObservation obs(1);
    for (int i = 0; i < 3; ++i) observe_arrival(obs, i * 10e-3);
    EXPECT_EQ(classify_stream(obs), Verdict::undecided);
    EXPECT_EQ(obs.verdict, Verdict::undecided);
}

TEST(Classify, ExponentialStreamsAreBE) {
    int be = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        StreamObservation obs(seed);
        double t = 0;
        for (int i = 0; i < 64; ++i) {
            t += rng.exponential(0.1);
            observe_arrival(obs, t);
        }
        if (obs.verdict == Verdict::be) ++be;
    }
    EXPECT_GE(be, 90);
}

// Windows long enough to hit the bin-count cap give a coarse grid; a lag of
// one or two bins would let the grid test accept any arrival.
TEST(Classify, CoarseBinnedExponentialStreamsNeverBecomeTT) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Rng rng(seed);
        StreamObservation obs(seed);
        double t = 0;
        for (int i = 0; i < 320; ++i) {
            t += rng.exponential(0.02);
            observe_arrival(obs, t);
            ASSERT_NE(obs.verdict, Verdict::tt) << "seed " << seed << " arrival " << i;
        }
    }
}

TEST(Deviation, JitterWithinToleranceIsIgnored) {
    Rng rng(9);
    StreamObservation obs(1);
    const double p = 5e-3;
    for (int i = 0; i < 16; ++i) observe_arrival(obs, i * p);
    ASSERT_EQ(obs.verdict, Verdict::tt);
    const double delta = obs.estimate->bin_width_s;
    for (int i = 16; i < 200; ++i) {
        EXPECT_NE(observe_arrival(obs, i * p + rng.uniform(-delta, delta)), LearningEvent::deviation);
    }
    EXPECT_FALSE(detect_deviation(obs, *obs.estimate));
}

TEST(Deviation, HalvedPeriodDetectedWithinOneWindow) {
    StreamObservation obs(1);
    for (int i = 0; i < 16; ++i) observe_arrival(obs, i * 50 * us);
    ASSERT_EQ(obs.verdict, Verdict::tt);
    const double start = 16 * 50 * us + 178 * us;
    bool detected = false;
    for (int i = 0; i < 64 && !detected; ++i) {
        detected = observe_arrival(obs, start + i * 25 * us) == LearningEvent::deviation;
    }
    EXPECT_TRUE(detected);
    EXPECT_EQ(obs.verdict, Verdict::undecided);
    EXPECT_EQ(obs.size(), 0u);
}

TEST(Deviation, SingleMissingFrameTolerated) {
    StreamObservation obs(1);
    const auto est_period = 200 * us;
    for (int i = 0; i < 16; ++i) observe_arrival(obs, i * est_period);
    ASSERT_EQ(obs.verdict, Verdict::tt);
    for (int i = 16; i < 64; ++i) {
        if (i == 40) continue;
        EXPECT_NE(observe_arrival(obs, i * est_period), LearningEvent::deviation);
    }
    EXPECT_FALSE(detect_deviation(obs, *obs.estimate));
}

TEST(Properties, DeterministicShiftInvariantScaleCovariant) {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const double p = 0.2e-3 + rng.uniform01() * 2e-3;
        std::vector<double> ts;
        double t = rng.uniform01() * p;
        for (int i = 0; i < 40; ++i, t += p) {
            if (i > 0 && rng.uniform01() < 0.05) continue;
            ts.push_back(t);
        }
        Config cfg;
        cfg.fixed_bin_width_s = p / 7.0;
        const auto a = estimate_from_timestamps(ts, cfg);
        const auto b = estimate_from_timestamps(ts, cfg);
        EXPECT_EQ(a.period_s, b.period_s);
        EXPECT_EQ(a.valid, b.valid);

        auto shifted = ts;
        for (auto& v : shifted) v += 0.375;
        const auto c = estimate_from_timestamps(shifted, cfg);
        EXPECT_EQ(c.valid, a.valid);
        EXPECT_NEAR(c.period_s, a.period_s, 1e-12);

        auto scaled = ts;
        for (auto& v : scaled) v *= 4.0;
        Config scfg = cfg;
        scfg.fixed_bin_width_s = *cfg.fixed_bin_width_s * 4.0;
        const auto d = estimate_from_timestamps(scaled, scfg);
        EXPECT_EQ(d.valid, a.valid);
        EXPECT_NEAR(d.period_s, 4.0 * a.period_s, 1e-12);
    }
}

TEST(Properties, RobustToMissingFramesAndJitter) {
    Rng rng(99);
    int trials = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const double delta = 10 * us;
        // Period between the minimum lag and N/4 bins of a 64-arrival window.
        const std::size_t period_bins = Config{}.min_period_bins + rng.index(28);
        const double p = static_cast<double>(period_bins) * delta;
        std::vector<double> ts;
        for (int i = 0; i < 64; ++i) {
            if (i > 0 && i < 63 && rng.uniform01() < 0.05) continue;
            const double jitter = (i == 0 || i == 63) ? 0.0 : rng.uniform(0.0, 0.5) * delta;
            ts.push_back(i * p + jitter);
        }
        Config cfg;
        cfg.fixed_bin_width_s = delta;
        const auto est = estimate_from_timestamps(ts, cfg);
        ++trials;
        ASSERT_TRUE(est.valid) << "period " << period_bins << " bins";
        EXPECT_NEAR(est.period_s, p, delta * 1.0001) << "period " << period_bins << " bins";
    }
    EXPECT_EQ(trials, 60);
}

TEST(Properties, LagsBelowMinimumAreRejected) {
    Config cfg;
    cfg.fixed_bin_width_s = 10 * us;
    std::vector<double> ts;
    for (int i = 0; i < 64; ++i) ts.push_back(i * 30 * us);
    EXPECT_FALSE(estimate_from_timestamps(ts, cfg).valid);
    cfg.min_period_bins = 3;
    const auto est = estimate_from_timestamps(ts, cfg);
    ASSERT_TRUE(est.valid);
    EXPECT_NEAR(est.period_s, 30 * us, 1e-12);
}

TEST(Properties, MeanBaselineDisagreesOnRegimeChange) {
    // 50 us regime, silent gap, then 25 us regime filling the window.
    std::vector<double> ts;
    for (int i = 0; i < 5; ++i) ts.push_back((22 + 50 * i) * us);
    for (int i = 0; i < 40; ++i) ts.push_back((406 + 25 * i) * us);
    Config cfg;
    cfg.fixed_bin_width_s = 5 * us;
    StreamObservation obs(1, 32);
    for (double t : ts) obs.record(t);
    const auto est = estimate_period(obs, cfg);
    ASSERT_TRUE(est.valid);
    EXPECT_NEAR(est.period_s, 25 * us, 1e-12);
    EXPECT_GT(std::abs(mean_interarrival(ts) - est.period_s), 2 * us);
}

TEST(Trace, ParseErrorsCarryLineNumbers) {
    try {
        parse_trace("0.1\n0.2\nabc\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_trace("0.2\n0.1\n"), ParseError);
    EXPECT_EQ(parse_trace("# c\n1e-3\n\n2e-3 # x\n").size(), 2u);
}
