#include <oddbench/fixsim.hpp>

#include <oddbench/dataset_io.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace oddbench;

namespace {

double min_pairwise(const FixationTrace& t) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.fixations.size(); ++i)
        for (std::size_t j = i + 1; j < t.fixations.size(); ++j)
            best = std::min(best, std::hypot(t.fixations[i].x - t.fixations[j].x, t.fixations[i].y - t.fixations[j].y));
    return best;
}

FixationTrace found_at(int n) {
    FixationTrace t;
    t.found = true;
    t.count = n;
    return t;
}

FixationTrace missed(int n) {
    FixationTrace t;
    t.count = n;
    return t;
}

} // namespace

TEST(HitRadius, Rules) {
    const FixSimConfig cfg;
    EXPECT_EQ(hit_radius_for(Feature::color, std::nullopt, cfg), 35.0);
    EXPECT_EQ(hit_radius_for(Feature::orientation, std::nullopt, cfg), 35.0);
    EXPECT_EQ(hit_radius_for(Feature::size, 140.0, cfg), 70.0);
    EXPECT_EQ(hit_radius_for(Feature::size, 18.0, cfg), 35.0);
    EXPECT_EQ(hit_radius_for(Feature::size, 100.0, cfg), 50.0);
    EXPECT_EQ(hit_radius_for(std::nullopt, std::nullopt, cfg), 35.0);

    SampleRecord r;
    r.meta.feature = Feature::size;
    r.meta.target_size_px = 140.0;
    EXPECT_EQ(hit_radius_for(r, cfg), 70.0);
}

TEST(Simulate, ImmediateHit) {
    cv::Mat1d map(64, 64, 0.2);
    map(40, 20) = 1.0;
    const FixationTrace t = simulate_fixations(map, {20, 40}, FixSimConfig{}, 35);
    EXPECT_TRUE(t.found);
    EXPECT_EQ(t.count, 1);
    ASSERT_EQ(t.fixations.size(), 1u);
    EXPECT_EQ(t.fixations[0], cv::Point(20, 40));
}

TEST(Simulate, ThreePeaks) {
    cv::Mat1d map = cv::Mat1d::zeros(1024, 1024);
    map(100, 100) = 1.0;
    map(300, 500) = 0.8;
    map(512, 512) = 0.6;
    const FixSimConfig cfg;
    const FixationTrace t = simulate_fixations(map, {512, 512}, cfg, 35);
    const FixationTrace want = oracle::fixations(map, {512, 512}, cfg, 35);
    EXPECT_EQ(t, want);
    EXPECT_TRUE(t.found);
    EXPECT_EQ(t.count, 3);
    ASSERT_EQ(t.fixations.size(), 3u);
    EXPECT_EQ(t.fixations[0], cv::Point(100, 100));
    EXPECT_EQ(t.fixations[1], cv::Point(500, 300));
    EXPECT_EQ(t.fixations[2], cv::Point(512, 512));
}

TEST(Simulate, ConstantMapCrawl) {
    const cv::Mat1d map(200, 200, 0.5);
    FixSimConfig cfg;
    cfg.max_fixations = 12;
    const FixationTrace t = simulate_fixations(map, {190, 190}, cfg, 35);
    EXPECT_FALSE(t.found);
    EXPECT_EQ(t.count, 12);
    EXPECT_EQ(t.fixations.front(), cv::Point(0, 0));
    // next unsuppressed pixel of row 0 is just past the disk of radius 35
    EXPECT_EQ(t.fixations[1], cv::Point(36, 0));
    EXPECT_GT(min_pairwise(t), 35.0);
    EXPECT_EQ(t, oracle::fixations(map, {190, 190}, cfg, 35));
    EXPECT_EQ(t, simulate_fixations(map, {190, 190}, cfg, 35));
}

TEST(Simulate, EarlyStopOnZeroMap) {
    const FixationTrace t = simulate_fixations(cv::Mat1d::zeros(32, 32), {5, 5}, FixSimConfig{}, 35);
    EXPECT_FALSE(t.found);
    EXPECT_EQ(t.count, 0);
    EXPECT_TRUE(t.fixations.empty());
}

TEST(Simulate, EarlyStopAfterSuppression) {
    cv::Mat1d map = cv::Mat1d::zeros(300, 300);
    map(10, 10) = 1.0;
    map(12, 20) = 0.5; // inside the first suppression disk
    const FixationTrace t = simulate_fixations(map, {250, 250}, FixSimConfig{}, 35);
    EXPECT_FALSE(t.found);
    EXPECT_EQ(t.count, 1);
}

TEST(Simulate, BudgetRespected) {
    std::mt19937_64 rng(1);
    const cv::Mat1d map = oracle::random_map(rng, 400, 400);
    FixSimConfig cfg;
    cfg.max_fixations = 7;
    const FixationTrace t = simulate_fixations(map, {0, 0}, cfg, 1);
    EXPECT_LE(t.count, 7);
    EXPECT_EQ(static_cast<int>(t.fixations.size()), t.count);
}

TEST(Simulate, Preconditions) {
    const cv::Mat1d map(10, 10, 0.1);
    EXPECT_THROW(simulate_fixations(map, {10.5, 2}, FixSimConfig{}, 35), PreconditionError);
    EXPECT_THROW(simulate_fixations(map, {-1, 2}, FixSimConfig{}, 35), PreconditionError);
    FixSimConfig bad;
    bad.max_fixations = 0;
    EXPECT_THROW(simulate_fixations(map, {1, 2}, bad, 35), ConfigError);
}

TEST(Simulate, OracleEquivalence) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(0.0, 63.0);
    for (int i = 0; i < 120; ++i) {
        const cv::Mat1d map = oracle::random_map(rng, 64, 64, 1.0, i % 2 ? 16 : 0);
        FixSimConfig cfg;
        cfg.suppression_radius = (i % 3 == 0) ? 35.0 : (i % 3 == 1 ? 6.0 : 2.5);
        const cv::Point2d target(coord(rng), coord(rng));
        const double hit = (i % 4 == 0) ? 3.0 : 0.7;
        const FixationTrace got = simulate_fixations(map, target, cfg, hit);
        EXPECT_EQ(got, oracle::fixations(map, target, cfg, hit)) << "map " << i;
        EXPECT_GT(min_pairwise(got), cfg.suppression_radius);
    }
}

TEST(Simulate, MonotoneTransformInvariance) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const cv::Mat1d map = oracle::random_map(rng, 64, 64);
        FixSimConfig cfg;
        cfg.suppression_radius = 5;
        const cv::Point2d target(40, 20);
        const FixationTrace a = simulate_fixations(map, target, cfg, 1.0);
        EXPECT_EQ(simulate_fixations(cv::Mat1d(map.mul(map)), target, cfg, 1.0), a);
        cv::Mat1d root;
        cv::sqrt(map, root);
        EXPECT_EQ(simulate_fixations(root, target, cfg, 1.0), a);
        EXPECT_EQ(simulate_fixations(cv::Mat1d(map * 3.0), target, cfg, 1.0), a);
    }
}

TEST(DetectionCurve, Example) {
    const std::vector<FixationTrace> traces{found_at(3), found_at(10), missed(100)};
    const DetectionCurve c = detection_curve(traces, std::vector<int>{5, 10, 100});
    ASSERT_EQ(c.fraction_found.size(), 3u);
    EXPECT_DOUBLE_EQ(c.fraction_found[0], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.fraction_found[1], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.fraction_found[2], 2.0 / 3.0);
}

TEST(DetectionCurve, AllFoundImmediately) {
    const std::vector<FixationTrace> traces(5, found_at(1));
    const auto budgets = default_budgets();
    const DetectionCurve c = detection_curve(traces, budgets);
    for (double f : c.fraction_found) EXPECT_EQ(f, 1.0);
    EXPECT_EQ(c.budgets, budgets);
}

TEST(DetectionCurve, DefaultBudgetsIncludeOperatingPoints) {
    const auto b = default_budgets();
    EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
    EXPECT_NE(std::find(b.begin(), b.end(), 25), b.end());
    EXPECT_NE(std::find(b.begin(), b.end(), 100), b.end());
}

TEST(DetectionCurve, Monotone) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> count(1, 100);
    std::bernoulli_distribution hit(0.6);
    std::vector<int> budgets(100);
    for (int i = 0; i < 100; ++i) budgets[i] = i + 1;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<FixationTrace> traces;
        for (int i = 0; i < 50; ++i) traces.push_back(hit(rng) ? found_at(count(rng)) : missed(100));
        const DetectionCurve c = detection_curve(traces, budgets);
        for (std::size_t i = 1; i < c.fraction_found.size(); ++i) EXPECT_GE(c.fraction_found[i], c.fraction_found[i - 1]);
    }
}

TEST(DetectionCurve, Errors) {
    EXPECT_THROW(detection_curve(std::vector<FixationTrace>{}, default_budgets()), PreconditionError);
    EXPECT_THROW(detection_curve(std::vector<FixationTrace>{found_at(1)}, std::vector<int>{10, 5}), PreconditionError);
}
