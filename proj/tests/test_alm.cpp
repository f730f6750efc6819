#include "oracles.hpp"

#include "sgl/alm.hpp"
#include "sgl/errors.hpp"
#include "sgl/prox.hpp"

#include <gtest/gtest.h>

using namespace sgl;

namespace {

struct Random {
    Matrix A;
    Vector b;
    std::vector<Index> sizes;
};

Random random_instance(Index m, Index n, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Random r;
    r.A = oracle::gaussian_matrix(m, n, rng);
    r.b = oracle::gaussian_vector(m, rng);
    r.sizes = oracle::random_sizes(n, 10, rng);
    return r;
}

SglProblem s1_problem(const Random& r, double gamma, bool sparse = false) {
    auto A = std::make_shared<const DesignMatrix>(DesignMatrix(r.A).with_storage(sparse));
    const double lam = gamma * lambda_max(*A, r.b);
    return SglProblem(A, r.b, std::make_shared<const GroupPartition>(GroupPartition::contiguous(r.sizes)), lam, lam);
}

} // namespace

TEST(AlmParams, DefaultsAndValidation) {
    AlmParams p;
    EXPECT_NO_THROW(p.validate());
    EXPECT_DOUBLE_EQ(p.epsilon(0), 1e-2);
    EXPECT_DOUBLE_EQ(p.epsilon(3), 1e-2 * 0.125);
    EXPECT_DOUBLE_EQ(p.delta(0), 0.5);
    EXPECT_DOUBLE_EQ(p.delta(1), 0.25);
    EXPECT_DOUBLE_EQ(p.delta(3), 1.0 / 16.0);
    p.sigma_growth = 1.0;
    EXPECT_THROW(p.validate(), ArgumentError);
    p = AlmParams{};
    p.delta_cap = 1.0;
    EXPECT_THROW(p.validate(), ArgumentError);
    p = AlmParams{};
    p.eps_rate = 1.0;
    EXPECT_THROW(p.validate(), ArgumentError);
}

TEST(SigmaUpdate, GrowthAndCap) {
    AlmParams p;
    double s = 1.0;
    for (int k = 0; k < 3; ++k) s = sigma_update(s, p);
    EXPECT_EQ(s, 27.0);
    p.sigma_max = 50.0;
    for (int k = 0; k < 5; ++k) {
        const double next = sigma_update(s, p);
        EXPECT_GE(next, std::min(s, p.sigma_max));
        EXPECT_LE(next, 50.0);
        s = next;
    }
    EXPECT_EQ(s, 50.0);
    p.sigma_max = std::numeric_limits<double>::infinity();
    EXPECT_EQ(sigma_update(1e300, p), 3e300);
}

TEST(DefaultSigma0, ScaleAware) {
    auto A = std::make_shared<const DesignMatrix>(Matrix::Identity(4, 4));
    auto part = std::make_shared<const GroupPartition>(GroupPartition::contiguous(std::vector<Index>{4}));
    EXPECT_EQ(default_sigma0(SglProblem(A, Vector::Constant(4, 0.1), part, 1, 1)), 1.0);
    EXPECT_DOUBLE_EQ(default_sigma0(SglProblem(A, Vector::Constant(4, 10.0), part, 1, 1)), 10.0);
}

TEST(Alm, ZeroResponseGivesZeroSolution) {
    const Random r = random_instance(10, 40, 60);
    auto A = std::make_shared<const DesignMatrix>(r.A);
    const SglProblem prob(A, Vector::Zero(10), std::make_shared<const GroupPartition>(GroupPartition::contiguous(r.sizes)),
                          0.5, 0.5);
    const AlmResult res = alm_solve(prob, AlmParams{});
    EXPECT_TRUE(res.report.converged);
    EXPECT_LE(res.report.outer_iters, 2);
    EXPECT_EQ(res.point.x, Vector::Zero(40));
    EXPECT_EQ(res.point.y, Vector::Zero(10));
}

class AlmRandom : public ::testing::TestWithParam<double> {};

TEST_P(AlmRandom, ConvergesToOracleSolution) {
    const Random r = random_instance(20, 100, 61);
    const SglProblem prob = s1_problem(r, GetParam());
    const AlmResult res = alm_solve(prob, AlmParams{});
    ASSERT_TRUE(res.report.converged);
    EXPECT_LT(res.report.eta_max(), 1e-6);
    EXPECT_LT(kkt_residual(prob, res.point.x), 1e-5);
    // y is only approximately dual feasible, so weak duality holds up to the tolerance.
    EXPECT_LE(res.report.dobj - res.report.pobj, 1e-6 * (1 + std::abs(res.report.pobj) + std::abs(res.report.dobj)));
    EXPECT_LE(std::abs(res.report.pobj - res.report.dobj), 1e-6 * (1 + std::abs(res.report.pobj) + std::abs(res.report.dobj)));

    const auto part = prob.partition();
    const Vector ref = oracle::fista(r.A, r.b, oracle::contiguous_groups(r.sizes), part.weights(), prob.lambda1(),
                                     prob.lambda2(), 50000);
    EXPECT_LE((res.point.x - ref).norm(), 1e-4 * (1 + ref.norm()));
}

INSTANTIATE_TEST_SUITE_P(Gammas, AlmRandom, ::testing::Values(1e-1, 1e-2));

TEST(Alm, IterationInvariants) {
    const Random r = random_instance(20, 100, 62);
    const SglProblem prob = s1_problem(r, 0.05);
    AlmParams params;
    params.tol = 1e-9;
    params.record_iterates = true;
    const AlmResult res = alm_solve(prob, params);
    ASSERT_TRUE(res.report.converged);
    ASSERT_GE(res.history.size(), 2u);
    double prev_sigma = 0.0;
    double prev_pobj = 0.5 * prob.b().squaredNorm();
    Vector prev_x = Vector::Zero(100);
    for (const auto& rec : res.history) {
        // x^{k+1} + sigma_k (A^T y^{k+1} + z^{k+1}) = x^k
        EXPECT_LE(rec.update_residual, 1e-12 * (1 + rec.x.norm()));
        EXPECT_LE(rec.dual_feasibility_gap, 1e-9);
        EXPECT_GE(rec.sigma, prev_sigma);
        EXPECT_LE(rec.sigma, params.sigma_max);
        // The outer loop is an inexact proximal point method on the primal, so pobj
        // descends up to the inner tolerance. dobj approaches its limit from above.
        EXPECT_LE(rec.pobj, prev_pobj + params.epsilon(rec.k));
        EXPECT_NEAR(rec.x_step, (rec.x - prev_x).norm(), 1e-12 * (1 + rec.x.norm()));
        EXPECT_FALSE(rec.ssn_grad_history.empty());
        // grad_norm is re-evaluated exactly at the returned point.
        EXPECT_NEAR(rec.grad_norm, rec.ssn_grad_history.back(), 1e-2 * rec.grad_norm + 1e-14);
        prev_sigma = rec.sigma;
        prev_pobj = rec.pobj;
        prev_x = rec.x;
    }
}

TEST(Alm, InnerCriteriaHoldOrAreReported) {
    const Random r = random_instance(20, 100, 63);
    const SglProblem prob = s1_problem(r, 0.05);
    AlmParams params;
    params.tol = 1e-10;
    const AlmResult res = alm_solve(prob, params);
    for (const auto& rec : res.history) {
        EXPECT_LE(rec.grad_tol, params.epsilon(rec.k) / std::sqrt(rec.sigma));
        if (rec.inner_converged) EXPECT_LE(rec.grad_norm, rec.grad_tol);
        if (rec.b_satisfied) {
            EXPECT_LE(rec.grad_norm, params.delta(rec.k) / std::sqrt(rec.sigma) * rec.x_step * (1 + 1e-12));
        }
        EXPECT_LE(rec.b_resumes, params.max_b_resumes);
        EXPECT_EQ(rec.ssn_restarts.size(), static_cast<std::size_t>(rec.b_resumes));
    }
}

TEST(Alm, OuterBudgetGivesNotConverged) {
    const Random r = random_instance(20, 100, 64);
    AlmParams params;
    params.max_outer = 1;
    params.tol = 1e-14;
    const AlmResult res = alm_solve(s1_problem(r, 0.05), params);
    EXPECT_FALSE(res.report.converged);
    EXPECT_EQ(res.report.outer_iters, 1);
    EXPECT_EQ(res.report.solver_name, "ssnal");
}

TEST(Alm, TraceReceivesEveryIteration) {
    const Random r = random_instance(20, 100, 65);
    std::vector<TraceRecord> seen;
    AlmParams params;
    params.trace = [&](const TraceRecord& t) { seen.push_back(t); };
    const AlmResult res = alm_solve(s1_problem(r, 0.1), params);
    ASSERT_EQ(seen.size(), res.history.size());
    for (std::size_t k = 0; k < seen.size(); ++k) {
        EXPECT_EQ(seen[k].k, static_cast<int>(k));
        EXPECT_EQ(seen[k].sigma, res.history[k].sigma);
        EXPECT_EQ(seen[k].eta_dual, res.history[k].eta_dual);
    }
}

TEST(Alm, WarmStartFromSolutionStopsImmediately) {
    const Random r = random_instance(20, 100, 66);
    const SglProblem prob = s1_problem(r, 0.1);
    const AlmResult first = alm_solve(prob, AlmParams{});
    ASSERT_TRUE(first.report.converged);
    const AlmResult again = alm_solve(prob, AlmParams{}, first.point);
    EXPECT_TRUE(again.report.converged);
    EXPECT_EQ(again.report.outer_iters, 1);
    EXPECT_THROW(alm_solve(prob, AlmParams{}, PrimalDualPoint{Vector::Zero(3), Vector::Zero(20), Vector::Zero(100)}),
                 ArgumentError);
}

TEST(Alm, DegenerateLambdasAndSparseStorage) {
    const Random r = random_instance(20, 100, 67);
    auto part = std::make_shared<const GroupPartition>(GroupPartition::contiguous(r.sizes));
    auto A = std::make_shared<const DesignMatrix>(r.A);
    const double lmax = lambda_max(*A, r.b);
    for (auto [l1, l2] : {std::pair{0.1 * lmax, 0.0}, std::pair{0.0, 0.1 * lmax}}) {
        const SglProblem prob(A, r.b, part, l1, l2);
        const AlmResult res = alm_solve(prob, AlmParams{});
        EXPECT_TRUE(res.report.converged);
        EXPECT_LT(kkt_residual(prob, res.point.x), 1e-5);
    }
    const AlmResult dense = alm_solve(s1_problem(r, 0.1), AlmParams{});
    const AlmResult sparse = alm_solve(s1_problem(r, 0.1, true), AlmParams{});
    EXPECT_LE(oracle::rel_err(sparse.point.x, dense.point.x), 1e-8);
}

TEST(Alm, PrimalRatiosNonincreasing) {
    const Random r = random_instance(20, 100, 68);
    const SglProblem prob = s1_problem(r, 0.05);
    AlmParams ref_params;
    ref_params.tol = 1e-10;
    const Vector xstar = alm_solve(prob, ref_params).point.x;
    AlmParams params;
    params.record_iterates = true;
    params.tol = 1e-9;
    const AlmResult res = alm_solve(prob, params);
    std::vector<double> err{xstar.norm()};
    for (const auto& rec : res.history) err.push_back((rec.x - xstar).norm());
    // Ratios are only meaningful while the error is above the reference accuracy.
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 2; k < err.size() && err[k] > 1e-8 * (1 + xstar.norm()); ++k) {
        const double ratio = err[k] / err[k - 1];
        EXPECT_LE(ratio, 1.1 * prev_ratio) << "k = " << k;
        prev_ratio = ratio;
    }
}
