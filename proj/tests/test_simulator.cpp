#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "asyfreq/asymptotics.hpp"
#include "asyfreq/simulator.hpp"
#include "oracles.hpp"

using namespace asyfreq;
using simulator::run;
using simulator::run_replicates;

TEST(Simulator, CrpExponentialDeactivationInvariance) {
    for (double cd : {0.1, 1.0, 10.0}) {
        SimConfig cfg{crp_model(DensitySpec::exponential_rate(1.0), DensitySpec::exponential_rate(cd),
                                DensitySpec::exponential_rate(1.0)),
                      100'000, 99};
        const auto res = run(cfg);
        EXPECT_EQ(res.total(), 100'000u);
        const double se = simulator::binomial_ratio_se(res.counts[2], res.counts[0]);
        EXPECT_LT(std::abs(res.ratios.at({2, 0}) - 0.25), 3.0 * se) << "cd=" << cd;
    }
}

TEST(Simulator, SingleConstraintFiveSeedsScatterAroundQuarter) {
    const auto model = single_constraint_model(DensitySpec::exponential_rate(1.0), DensitySpec::exponential_rate(1.0), 3);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto res = run(SimConfig{model, 10'000, seed});
        const double se = simulator::binomial_ratio_se(res.counts[1], res.counts[0]);
        EXPECT_LT(std::abs(res.ratios.at({1, 0}) - 0.25), 4.0 * se) << "seed " << seed;
    }
}

TEST(Simulator, SingleOutcomeFiresEveryEvent) {
    const EventModel model{{"only"}, {{0}}, {DensitySpec::linexp(1.0, 1.0)}, {}};
    const auto res = run(SimConfig{model, 1234, 3});
    ASSERT_EQ(res.counts.size(), 1u);
    EXPECT_EQ(res.counts[0], 1234u);
}

TEST(Simulator, RejectsInvalidConfig) {
    const auto e = DensitySpec::exponential(1.0);
    EXPECT_THROW(run(SimConfig{crp_model(e, e, e), 0, 1}), ValidationError);
    SimConfig no_reps{crp_model(e, e, e), 10, 1, 0};
    EXPECT_THROW(run_replicates(no_reps), ValidationError);
    EventModel locked{{"a", "b"}, {{0, 1}, {1, 0}}, {e, e}, {}};
    EXPECT_THROW(run(SimConfig{locked, 10, 1}), ValidationError);
}

TEST(Simulator, GenericEngineReproducesCrpLoopBitwise) {
    const auto prop = DensitySpec::linexp(0.174, 0.91);
    const auto deact = DensitySpec::linexp(0.5, 0.3);
    const auto back = DensitySpec::linexp(1.2, 1.31);
    for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
        const auto res = run(SimConfig{crp_model(prop, deact, back, 3), 50'000, seed});
        const auto ref = oracle::crp_loop(prop, deact, back, 50'000, 3, seed);
        EXPECT_EQ(res.counts[0], ref.p);
        EXPECT_EQ(res.counts[1], ref.d);
        EXPECT_EQ(res.counts[2], ref.r);
    }
}

TEST(Simulator, EventLogRespectsConstraints) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::uint32_t> cnt(0, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 4;
        EventModel model;
        model.clocks = oracle::random_mixed_clocks(rng, n);
        model.constraints.assign(n, std::vector<std::uint32_t>(n, 0));
        for (std::size_t i = 0; i < n; ++i) {
            model.outcomes.push_back("o" + std::to_string(i));
            if (i == 0) continue;  // outcome 0 stays free
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) model.constraints[i][j] = cnt(rng);
        }
        SimConfig cfg{model, 10'000, 100u + trial};
        cfg.log_events = true;
        const auto res = run(cfg);
        ASSERT_EQ(res.event_log.size(), 10'000u);
        EXPECT_FALSE(simulator::first_constraint_violation(model, res.event_log).has_value()) << trial;
    }
}

TEST(Simulator, ReplayDetectsViolation) {
    const auto e = DensitySpec::exponential(1.0);
    const auto model = crp_model(e, e, e, 3);
    const std::vector<std::uint32_t> bad{0, 0, 2};
    EXPECT_EQ(simulator::first_constraint_violation(model, bad), 2u);
    const std::vector<std::uint32_t> good{0, 1, 0, 0, 2, 1};
    EXPECT_FALSE(simulator::first_constraint_violation(model, good).has_value());
}

TEST(Simulator, Deterministic) {
    const auto model = crp_model(DensitySpec::linexp(0.3, 1.0), DensitySpec::exponential(0.5), DensitySpec::linexp(2.0, 1.0));
    const auto a = run(SimConfig{model, 20'000, 7});
    const auto b = run(SimConfig{model, 20'000, 7});
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.ratios, b.ratios);
    const auto c = run(SimConfig{model, 20'000, 8});
    EXPECT_NE(a.counts, c.counts);
}

TEST(Replicates, BitwiseReproducibleAndWorkerIndependent) {
    const auto model = crp_model(DensitySpec::linexp(0.3, 1.0), DensitySpec::exponential(0.5), DensitySpec::linexp(2.0, 1.0));
    SimConfig cfg{model, 5'000, 123, 5};
    cfg.workers = 1;
    const auto serial = run_replicates(cfg);
    const auto again = run_replicates(cfg);
    cfg.workers = 4;
    const auto parallel = run_replicates(cfg);
    ASSERT_EQ(serial.runs.size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(serial.runs[k].counts, again.runs[k].counts);
        EXPECT_EQ(serial.runs[k].counts, parallel.runs[k].counts);
        EXPECT_EQ(serial.runs[k].seed, simulator::substream_seed(123, k));
    }
    EXPECT_EQ(serial.ratios.at({2, 0}).mean, parallel.ratios.at({2, 0}).mean);
    EXPECT_NE(serial.runs[0].counts, serial.runs[1].counts);
}

TEST(Replicates, SingleReplicateHasNoStandardError) {
    const auto e = DensitySpec::exponential(1.0);
    SimConfig cfg{crp_model(e, e, e), 2'000, 5, 1};
    const auto s = run_replicates(cfg);
    ASSERT_EQ(s.runs.size(), 1u);
    EXPECT_EQ(s.ratios.at({2, 0}).mean, s.runs[0].ratios.at({2, 0}));
    EXPECT_FALSE(s.ratios.at({2, 0}).standard_error.has_value());
}

TEST(Replicates, HundredRunsAverageToClosedForm) {
    const auto e = DensitySpec::exponential(1.0);
    SimConfig cfg{crp_model(e, e, e), 10'000, 31, 100};
    const auto s = run_replicates(cfg).ratios.at({2, 0});
    EXPECT_LT(std::abs(s.mean - 0.25), 4.0 * *s.standard_error);
}

TEST(Simulator, ErrorDecaysAsInverseRootG) {
    const auto prop = DensitySpec::linexp(0.3, 0.9), deact = DensitySpec::linexp(0.2, 0.5);
    const auto back = DensitySpec::linexp(1.0, 1.3);
    const double exact = asymptotics::branching_fraction(asymptotics::solve_crp(prop, deact, back));
    std::vector<double> scaled;
    for (std::uint64_t g : {1'000ull, 10'000ull, 100'000ull}) {
        SimConfig cfg{crp_model(prop, deact, back), g, 55, 40};
        const auto s = run_replicates(cfg);
        double sq = 0.0;
        for (const auto& r : s.runs) sq += std::pow(r.ratios.at({2, 0}) - exact, 2);
        const double rms = std::sqrt(sq / static_cast<double>(s.runs.size()));
        scaled.push_back(rms * std::sqrt(static_cast<double>(g)));
    }
    // rms * sqrt(G) stays flat within a factor of 2 across two decades.
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    EXPECT_LT(*hi / *lo, 2.0) << scaled[0] << " " << scaled[1] << " " << scaled[2];
}
