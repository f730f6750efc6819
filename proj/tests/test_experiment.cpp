#include "sgl/data_io.hpp"
#include "sgl/errors.hpp"
#include "sgl/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sgl;

TEST(Strategies, Formulas) {
    const LambdaPair s1 = strategy_lambdas(LambdaStrategy::S1, 0.1, 10.0);
    EXPECT_DOUBLE_EQ(s1.lambda1, 1.0);
    EXPECT_DOUBLE_EQ(s1.lambda2, 1.0);
    const LambdaPair s2 = strategy_lambdas(LambdaStrategy::S2, 0.1, 10.0);
    EXPECT_DOUBLE_EQ(s2.lambda1, 0.5);
    EXPECT_DOUBLE_EQ(s2.lambda2, 9.5);
    const LambdaPair big = strategy_lambdas(LambdaStrategy::S3, 0.5, 10.0);
    EXPECT_DOUBLE_EQ(big.lambda1, 5.0);
    EXPECT_DOUBLE_EQ(big.lambda2, std::sqrt(5.0));
    const LambdaPair small = strategy_lambdas(LambdaStrategy::S3, 0.05, 10.0);
    EXPECT_DOUBLE_EQ(small.lambda1, 0.5);
    EXPECT_DOUBLE_EQ(small.lambda2, 0.25);
    const LambdaPair edge = strategy_lambdas(LambdaStrategy::S3, 0.1, 10.0);
    EXPECT_DOUBLE_EQ(edge.lambda2, 1.0);
    EXPECT_THROW(strategy_lambdas(LambdaStrategy::S1, -1.0, 1.0), ArgumentError);
}

TEST(Strategies, Names) {
    for (auto s : {LambdaStrategy::S1, LambdaStrategy::S2, LambdaStrategy::S3})
        EXPECT_EQ(parse_lambda_strategy(to_string(s)), s);
    EXPECT_EQ(parse_lambda_strategy("S2"), LambdaStrategy::S2);
    EXPECT_THROW(parse_lambda_strategy("s4"), ArgumentError);
}

TEST(PerformanceProfile, TwoSolversOneProblem) {
    const auto prof = performance_profile({{"p", "ssnal", 1.0, true}, {"p", "admm", 2.5, true}});
    ASSERT_EQ(prof.at("ssnal").size(), 1u);
    EXPECT_EQ(prof.at("ssnal")[0].ratio, 1.0);
    EXPECT_EQ(prof.at("ssnal")[0].fraction, 1.0);
    const auto& admm = prof.at("admm");
    ASSERT_EQ(admm.size(), 2u);
    EXPECT_EQ(admm[0].ratio, 1.0);
    EXPECT_EQ(admm[0].fraction, 0.0);
    EXPECT_DOUBLE_EQ(admm[1].ratio, 2.5);
    EXPECT_EQ(admm[1].fraction, 1.0);
}

TEST(PerformanceProfile, UnsolvedNeverCounts) {
    const auto prof = performance_profile({{"p1", "a", 1.0, true},
                                           {"p1", "b", 0.5, false},
                                           {"p2", "a", 3.0, true},
                                           {"p2", "b", 1.0, true},
                                           {"p3", "a", 1.0, false},
                                           {"p3", "b", 1.0, false}});
    // a: wins p1 (ratio 1), p2 at ratio 3; b: wins p2 only.
    const auto& a = prof.at("a");
    ASSERT_EQ(a.size(), 2u);
    EXPECT_DOUBLE_EQ(a[0].fraction, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(a[1].ratio, 3.0);
    EXPECT_DOUBLE_EQ(a[1].fraction, 2.0 / 3.0);
    const auto& b = prof.at("b");
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].ratio, 1.0);
    EXPECT_DOUBLE_EQ(b[0].fraction, 1.0 / 3.0);
    for (const auto& [name, curve] : prof) {
        EXPECT_EQ(curve.front().ratio, 1.0);
        for (std::size_t i = 1; i < curve.size(); ++i) {
            EXPECT_GT(curve[i].ratio, curve[i - 1].ratio);
            EXPECT_GE(curve[i].fraction, curve[i - 1].fraction);
        }
    }
}

TEST(GammaScan, FindsTargetWindow) {
    const SyntheticInstance inst = gen_synthetic(100, 1000, 50, 5);
    auto A = std::make_shared<const DesignMatrix>(inst.A);
    auto part = std::make_shared<const GroupPartition>(GroupPartition::contiguous(inst.group_sizes));
    const std::vector<double> gammas{0.5, 0.3, 0.2, 0.1, 0.05};
    const GammaScanResult res = gamma_scan(A, inst.b, part, LambdaStrategy::S1, gammas, 80, 150, 100, AlmParams{});
    ASSERT_TRUE(res.selected.has_value());
    EXPECT_GE(res.selected->nnz, 80);
    EXPECT_LE(res.selected->nnz, 150);
    EXPECT_TRUE(res.selected->converged);
    EXPECT_EQ(nnz_estimate(res.solution.x), res.selected->nnz);
    // Points are recorded in evaluation order and the grid walk stops after overshooting.
    for (const auto& p : res.points) EXPECT_GT(p.gamma, 0.0);
    EXPECT_LE(res.points.size(), gammas.size() + 20);
}

TEST(GammaScan, BisectsWhenGridSkipsWindow) {
    const SyntheticInstance inst = gen_synthetic(100, 1000, 50, 5);
    auto A = std::make_shared<const DesignMatrix>(inst.A);
    auto part = std::make_shared<const GroupPartition>(GroupPartition::contiguous(inst.group_sizes));
    // A coarse grid that jumps from too sparse straight to too dense.
    const std::vector<double> gammas{0.9, 0.01};
    const GammaScanResult res = gamma_scan(A, inst.b, part, LambdaStrategy::S1, gammas, 90, 110, 100, AlmParams{});
    ASSERT_TRUE(res.selected.has_value());
    EXPECT_GT(res.points.size(), 2u);
    EXPECT_LT(res.selected->gamma, 0.9);
    EXPECT_GT(res.selected->gamma, 0.01);
    EXPECT_THROW(gamma_scan(A, inst.b, part, LambdaStrategy::S1, {}, 1, 2, 1, AlmParams{}), ArgumentError);
}
