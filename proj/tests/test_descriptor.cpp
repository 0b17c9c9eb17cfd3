#include <gtest/gtest.h>

#include <cstring>

#include "icd3/descriptor.hpp"
#include "test_util.hpp"

using namespace icd3;

namespace {

std::vector<std::vector<double>> unit_circle(int n) {
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        xs.push_back({std::cos(t), std::sin(t)});
    }
    return xs;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST(SoftBall, UnitCircleFit) {
    DescriptorConfig cfg;
    cfg.nu = 0.05;
    Descriptor d = fit_descriptor(unit_circle(100), cfg, 0);
    EXPECT_NEAR(d.center[0], 0.0, 0.05);
    EXPECT_NEAR(d.center[1], 0.0, 0.05);
    EXPECT_GE(d.radius, 0.99);
    EXPECT_LE(d.radius, 1.01);
    EXPECT_EQ(d.training_size, 100);
}

TEST(SoftBall, SingleSampleGetsRadiusFloor) {
    DescriptorConfig cfg;
    Descriptor d = fit_descriptor({{2.0, -1.0}}, cfg);
    EXPECT_EQ(d.center, (std::vector<double>{2.0, -1.0}));
    EXPECT_DOUBLE_EQ(d.radius, kMinRadius);
}

TEST(SoftBall, ConfigValidation) {
    const std::vector<std::vector<double>> one = {{0.0}};
    DescriptorConfig cfg;
    cfg.nu = 0.0;
    EXPECT_THROW(fit_descriptor(one, cfg), std::invalid_argument);
    cfg.nu = 1.0;
    EXPECT_THROW(fit_descriptor(one, cfg), std::invalid_argument);
    DescriptorConfig ok;
    EXPECT_THROW(fit_descriptor(std::vector<std::vector<double>>{}, ok), std::invalid_argument);
}

TEST(SoftBall, ClassifyBoundaryConvention) {
    Descriptor d;
    d.kind = DescriptorKind::soft_ball;
    d.center = {0.0, 0.0};
    d.radius = 1.0;
    EXPECT_EQ(classify(d, {0.0, 0.0}), 0);
    EXPECT_EQ(classify(d, {2.0, 0.0}), 1);   // distance 2*radius
    EXPECT_EQ(classify(d, {1.0, 0.0}), 0);   // exactly on the boundary: closed ball
    EXPECT_DOUBLE_EQ(score(d, {0.0, 0.0}), -1.0);
    EXPECT_DOUBLE_EQ(score(d, {1.0, 0.0}), 0.0);
}

TEST(SoftBall, ScoreMonotoneAlongRay) {
    Descriptor d;
    d.kind = DescriptorKind::soft_ball;
    d.center = {1.0, 1.0};
    d.radius = 0.7;
    double prev = -1e9;
    for (double t = 0.0; t < 3.0; t += 0.1) {
        const double s = score(d, {1.0 + t, 1.0});
        EXPECT_GT(s, prev);
        prev = s;
    }
}

TEST(Descriptors, ContainmentBoundOnRandomClusters) {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> pick_nu(0.02, 0.3);
    std::uniform_int_distribution<int> size(2, 120);
    for (int t = 0; t < 50; ++t) {
        const int n = size(rng);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<std::vector<double>> xs;
        for (int i = 0; i < n; ++i) xs.push_back({normal(rng), normal(rng)});
        DescriptorConfig cfg;
        cfg.nu = pick_nu(rng);
        Descriptor d = fit_descriptor(xs, cfg);
        long out = 0;
        for (const auto& x : xs) out += classify(d, x);
        EXPECT_LE(out, static_cast<long>(std::ceil(cfg.nu * n)) + 1);
    }
}

TEST(Descriptors, ClassifyScoreConsistency) {
    std::mt19937_64 rng(89);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < 60; ++i) xs.push_back({normal(rng), normal(rng)});
    for (DescriptorKind kind : {DescriptorKind::soft_ball, DescriptorKind::kernel_svdd}) {
        DescriptorConfig cfg;
        cfg.kind = kind;
        cfg.nu = 0.1;
        cfg.lambda = 1.0 / (0.1 * 60);
        Descriptor d = fit_descriptor(xs, cfg);
        for (int i = 0; i < 300; ++i) {
            const std::vector<double> x = {3.0 * normal(rng), 3.0 * normal(rng)};
            EXPECT_EQ(classify(d, x) == 1, score(d, x) > 0.0);
        }
    }
}

TEST(Descriptors, FitIsIndependentPerCluster) {
    // fitting cluster i never reads samples of cluster j: same input, same
    // descriptor, regardless of what else exists
    std::vector<std::vector<double>> xs = unit_circle(40);
    DescriptorConfig cfg;
    Descriptor a = fit_descriptor(xs, cfg, 0);
    Descriptor b = fit_descriptor(xs, cfg, 0);
    EXPECT_EQ(a.center, b.center);
    EXPECT_TRUE(bit_equal(a.radius, b.radius));
}

TEST(SoftBall, TranslationInvariance) {
    std::mt19937_64 rng(97);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> xs, xs_moved;
    const std::vector<double> shift = {3.5, -2.0};
    for (int i = 0; i < 80; ++i) {
        const double a = normal(rng), b = normal(rng);
        xs.push_back({a, b});
        xs_moved.push_back({a + shift[0], b + shift[1]});
    }
    DescriptorConfig cfg;
    Descriptor d0 = fit_descriptor(xs, cfg);
    Descriptor d1 = fit_descriptor(xs_moved, cfg);
    EXPECT_NEAR(d1.radius, d0.radius, 1e-9);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> x = {normal(rng), normal(rng)};
        const std::vector<double> xm = {x[0] + shift[0], x[1] + shift[1]};
        EXPECT_NEAR(score(d0, x), score(d1, xm), 1e-9);
    }
}

TEST(KernelSvdd, RingFitRejectsCenterAndFarPoints) {
    std::mt19937_64 rng(313);
    std::normal_distribution<double> jitter(0.0, 0.03);
    std::vector<std::vector<double>> ring = unit_circle(100);
    for (auto& x : ring) {
        x[0] += jitter(rng);
        x[1] += jitter(rng);
    }
    DescriptorConfig cfg;
    cfg.kind = DescriptorKind::kernel_svdd;
    cfg.bandwidth = 0.5;
    cfg.lambda = 1.0 / (0.1 * 100);
    Descriptor d = fit_descriptor(ring, cfg, 1);
    long out = 0;
    for (const auto& x : ring) out += classify(d, x);
    EXPECT_LE(out, 16);                         // most training points inside
    EXPECT_EQ(classify(d, {5.0, 5.0}), 1);      // far outside
    EXPECT_EQ(classify(d, {0.0, 0.0}), 1);      // the hole in the ring
}

TEST(KernelSvdd, TrainingContainment) {
    std::mt19937_64 rng(101);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < 150; ++i) xs.push_back({normal(rng), normal(rng)});
    DescriptorConfig cfg;
    cfg.kind = DescriptorKind::kernel_svdd;
    cfg.bandwidth = 1.5;
    cfg.lambda = 1.0 / (0.1 * 150);  // ~10% slack budget
    Descriptor d = fit_descriptor(xs, cfg);
    long out = 0;
    for (const auto& x : xs) out += classify(d, x);
    EXPECT_LE(out, 20);
    EXPECT_GT(d.support_points.size(), 0u);
}

TEST(Serialization, SoftBallRoundTripIsBitStable) {
    std::mt19937_64 rng(103);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < 37; ++i) xs.push_back({normal(rng), normal(rng), normal(rng)});
    DescriptorConfig cfg;
    cfg.nu = 0.07;
    Descriptor d = fit_descriptor(xs, cfg, 3);
    Descriptor back = descriptor_from_json(nlohmann::json::parse(descriptor_to_json(d).dump()));
    EXPECT_EQ(back.kind, d.kind);
    EXPECT_EQ(back.cluster, 3);
    EXPECT_EQ(back.training_size, 37);
    ASSERT_EQ(back.center.size(), d.center.size());
    for (std::size_t f = 0; f < d.center.size(); ++f)
        EXPECT_TRUE(bit_equal(back.center[f], d.center[f]));
    EXPECT_TRUE(bit_equal(back.radius, d.radius));
}

TEST(Serialization, KernelSvddRoundTripIsBitStable) {
    DescriptorConfig cfg;
    cfg.kind = DescriptorKind::kernel_svdd;
    cfg.bandwidth = 0.8;
    cfg.lambda = 0.05;
    Descriptor d = fit_descriptor(unit_circle(50), cfg, 2);
    Descriptor back = descriptor_from_json(nlohmann::json::parse(descriptor_to_json(d).dump()));
    ASSERT_EQ(back.alpha.size(), d.alpha.size());
    for (std::size_t i = 0; i < d.alpha.size(); ++i) EXPECT_TRUE(bit_equal(back.alpha[i], d.alpha[i]));
    EXPECT_TRUE(bit_equal(back.rho_offset, d.rho_offset));
    EXPECT_EQ(back.support_points, d.support_points);
    // behaviour identical after round trip
    for (const auto& x : unit_circle(16)) EXPECT_TRUE(bit_equal(score(back, x), score(d, x)));
}
