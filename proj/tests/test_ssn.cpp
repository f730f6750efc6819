#include "oracles.hpp"

#include "sgl/alm.hpp"
#include "sgl/data_io.hpp"
#include "sgl/errors.hpp"
#include "sgl/prox.hpp"
#include "sgl/ssn.hpp"

#include <gtest/gtest.h>

using namespace sgl;

namespace {

SglProblem random_problem(Index m, Index n, double l1, double l2, Xoshiro256& rng) {
    auto A = std::make_shared<const DesignMatrix>(oracle::gaussian_matrix(m, n, rng));
    auto part = std::make_shared<const GroupPartition>(GroupPartition::contiguous(oracle::random_sizes(n, 10, rng)));
    return SglProblem(A, oracle::gaussian_vector(m, rng), part, l1, l2);
}

SsnParams tight(double grad_tol) {
    SsnParams p;
    p.grad_tol = grad_tol;
    return p;
}

} // namespace

TEST(SsnParams, Validation) {
    SsnParams p;
    EXPECT_NO_THROW(p.validate());
    p.mu = 0.5;
    EXPECT_THROW(p.validate(), ArgumentError);
    p = SsnParams{};
    p.eta_bar = 1.0;
    EXPECT_THROW(p.validate(), ArgumentError);
    p = SsnParams{};
    p.tau = 0.0;
    EXPECT_THROW(p.validate(), ArgumentError);
    p = SsnParams{};
    p.delta = 1.0;
    EXPECT_THROW(p.validate(), ArgumentError);
}

TEST(Psi, ZeroAtOrigin) {
    auto A = std::make_shared<const DesignMatrix>(Matrix::Identity(3, 3));
    auto part = std::make_shared<const GroupPartition>(GroupPartition::contiguous(std::vector<Index>{3}));
    const SglProblem prob(A, Vector::Zero(3), part, 1.0, 1.0);
    EXPECT_EQ(psi_value(prob, 2.0, Vector::Zero(3), Vector::Zero(3)), 0.0);
}

TEST(Psi, DeadZoneGradient) {
    Xoshiro256 rng(40);
    const SglProblem prob = random_problem(8, 20, 50.0, 50.0, rng);
    const Vector y = oracle::gaussian_vector(8, rng, 0.1);
    const Vector g = psi_grad(prob, 1.5, Vector::Zero(20), y);
    EXPECT_EQ(g, Vector(prob.b() + y));
}

TEST(Psi, ValueMatchesFormula) {
    Xoshiro256 rng(41);
    const SglProblem prob = random_problem(10, 40, 0.3, 0.2, rng);
    const Matrix A = prob.A().to_dense();
    const double sigma = 2.0;
    const Vector xt = oracle::gaussian_vector(40, rng);
    const Vector y = oracle::gaussian_vector(10, rng);
    std::vector<std::vector<Index>> groups;
    for (Index l = 0; l < prob.partition().num_groups(); ++l)
        groups.emplace_back(prob.partition().group(l).begin(), prob.partition().group(l).end());
    const Vector p = oracle::naive_prox(Vector(xt / sigma - A.transpose() * y), groups, prob.partition().weights(), 0.3, 0.2);
    const double ref = prob.b().dot(y) + 0.5 * y.squaredNorm() + 0.5 * sigma * p.squaredNorm() - xt.squaredNorm() / (2 * sigma);
    EXPECT_NEAR(psi_value(prob, sigma, xt, y), ref, 1e-12 * (1 + std::abs(ref)));
    // The z that minimizes the augmented Lagrangian lies in dom p*, so no p* term is missing.
    const Vector w = xt / sigma - A.transpose() * y;
    EXPECT_LE(dual_feasibility_gap(prob, prox_conjugate_residual(prob, w)), 1e-12);
}

TEST(Psi, GradientMatchesCentralDifferences) {
    Xoshiro256 rng(42);
    const SglProblem prob = random_problem(30, 200, 0.5, 0.5, rng);
    for (int trial = 0; trial < 20; ++trial) {
        const double sigma = std::exp(oracle::uniform(rng, std::log(0.1), std::log(100.0)));
        const Vector xt = oracle::gaussian_vector(200, rng, sigma);
        const Vector y = oracle::gaussian_vector(30, rng);
        const Vector g = psi_grad(prob, sigma, xt, y);
        const Vector fd = oracle::fd_gradient([&](const Vector& v) { return psi_value(prob, sigma, xt, v); }, y,
                                              1e-6 * (1 + y.norm()));
        EXPECT_LE((fd - g).norm(), 1e-5 * std::max(1.0, g.norm()));
    }
}

TEST(Ssn, AlreadyOptimalReturnsImmediately) {
    Xoshiro256 rng(43);
    const SglProblem prob = random_problem(10, 30, 0.5, 0.5, rng);
    const Vector xt = oracle::gaussian_vector(30, rng);
    const SsnResult first = ssn_minimize(prob, 1.0, xt, Vector::Zero(10), tight(1e-10));
    ASSERT_TRUE(first.converged);
    const SsnResult again = ssn_minimize(prob, 1.0, xt, first.point.y, tight(1e-8));
    EXPECT_TRUE(again.converged);
    EXPECT_EQ(again.iters, 0);
}

TEST(Ssn, QuadraticCaseConvergesInFewSteps) {
    Xoshiro256 rng(44);
    const Index m = 15, n = 40;
    auto A = std::make_shared<const DesignMatrix>(Matrix(0.1 * oracle::gaussian_matrix(m, n, rng)));
    auto part = std::make_shared<const GroupPartition>(GroupPartition::contiguous(std::vector<Index>{10, 10, 10, 10}));
    const SglProblem prob(A, oracle::gaussian_vector(m, rng), part, 0.1, 0.0);
    const double sigma = 1.0;
    // |x~/sigma| = 5 dominates A^T y along the whole path, so the prox is affine there.
    Vector xt(n);
    for (Index i = 0; i < n; ++i) xt[i] = (i % 2 ? 5.0 : -5.0) * sigma;
    SsnParams p = tight(1e-10);
    p.strategy = NewtonStrategy::DenseCholesky;
    const SsnResult res = ssn_minimize(prob, sigma, xt, Vector::Zero(m), p);
    EXPECT_TRUE(res.converged);
    EXPECT_LE(res.iters, 3);
    const Vector w = xt / sigma - A->adjoint_multiply(res.point.y);
    EXPECT_GT(w.cwiseAbs().minCoeff(), 0.1);
}

TEST(Ssn, StrongConvexityAtMinimizer) {
    Xoshiro256 rng(45);
    const SglProblem prob = random_problem(20, 80, 0.3, 0.3, rng);
    const double sigma = 3.0;
    const Vector xt = oracle::gaussian_vector(80, rng, 2.0);
    const SsnResult res = ssn_minimize(prob, sigma, xt, Vector::Zero(20), tight(1e-11));
    ASSERT_TRUE(res.converged);
    const double psi_bar = res.point.psi;
    for (int trial = 0; trial < 50; ++trial) {
        const Vector y = res.point.y + oracle::gaussian_vector(20, rng, oracle::uniform(rng, 1e-3, 3.0));
        const double gap = psi_value(prob, sigma, xt, y) - psi_bar;
        EXPECT_GE(gap, 0.5 * (y - res.point.y).squaredNorm() - 1e-9);
    }
}

TEST(Ssn, DescentAndConvergedGradient) {
    Xoshiro256 rng(46);
    const SglProblem prob = random_problem(40, 200, 0.2, 0.2, rng);
    const Vector xt = oracle::gaussian_vector(200, rng);
    const SsnResult res = ssn_minimize(prob, 5.0, xt, Vector::Zero(40), tight(1e-9));
    ASSERT_TRUE(res.converged);
    EXPECT_LE(res.point.grad_norm, 1e-9);
    EXPECT_LE(psi_grad(prob, 5.0, xt, res.point.y).norm(), 1e-9);
    ASSERT_EQ(res.psi_history.size(), static_cast<std::size_t>(res.iters + 1));
    // Strict decrease, except that steps taken once the change in psi is below
    // rounding level may leave the computed value unchanged.
    for (std::size_t j = 1; j < res.psi_history.size(); ++j) {
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(res.psi_history[j - 1]);
        EXPECT_LE(res.psi_history[j], res.psi_history[j - 1] + noise);
        if (res.grad_history[j - 1] > 1e-4) EXPECT_LT(res.psi_history[j], res.psi_history[j - 1]);
    }
}

TEST(Ssn, UniqueMinimizerFromDifferentStarts) {
    Xoshiro256 rng(47);
    const SglProblem prob = random_problem(25, 100, 0.4, 0.3, rng);
    const Vector xt = oracle::gaussian_vector(100, rng);
    const SsnResult a = ssn_minimize(prob, 2.0, xt, Vector::Zero(25), tight(1e-9));
    const SsnResult b = ssn_minimize(prob, 2.0, xt, oracle::gaussian_vector(25, rng, 10.0), tight(1e-9));
    ASSERT_TRUE(a.converged && b.converged);
    EXPECT_LE((a.point.y - b.point.y).norm(), 1e-6);
}

TEST(Ssn, Deterministic) {
    Xoshiro256 rng(48);
    const SglProblem prob = random_problem(25, 100, 0.4, 0.3, rng);
    const Vector xt = oracle::gaussian_vector(100, rng);
    const SsnResult a = ssn_minimize(prob, 2.0, xt, Vector::Zero(25), tight(1e-9));
    const SsnResult b = ssn_minimize(prob, 2.0, xt, Vector::Zero(25), tight(1e-9));
    EXPECT_EQ(a.grad_history, b.grad_history);
    EXPECT_EQ(a.psi_history, b.psi_history);
    EXPECT_EQ(a.point.y, b.point.y);
}

TEST(Ssn, StrategiesReachSameMinimizer) {
    Xoshiro256 rng(49);
    const SglProblem prob = random_problem(30, 150, 0.3, 0.3, rng);
    const Vector xt = oracle::gaussian_vector(150, rng);
    std::vector<Vector> ys;
    for (auto s : {NewtonStrategy::DenseCholesky, NewtonStrategy::Woodbury, NewtonStrategy::Pcg}) {
        SsnParams p = tight(1e-10);
        p.strategy = s;
        const SsnResult r = ssn_minimize(prob, 4.0, xt, Vector::Zero(30), p);
        ASSERT_TRUE(r.converged);
        for (auto used : r.strategies) EXPECT_EQ(used, s);
        ys.push_back(r.point.y);
    }
    EXPECT_LE((ys[0] - ys[1]).norm(), 1e-8);
    EXPECT_LE((ys[0] - ys[2]).norm(), 1e-8);
}

TEST(Ssn, IterationBudgetGivesNotConverged) {
    Xoshiro256 rng(50);
    const SglProblem prob = random_problem(30, 150, 0.3, 0.3, rng);
    SsnParams p = tight(1e-14);
    p.max_iters = 1;
    const SsnResult r = ssn_minimize(prob, 4.0, oracle::gaussian_vector(150, rng), Vector::Zero(30), p);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iters, 1);
}

TEST(Ssn, SuperlinearTailInsideAlm) {
    const SyntheticInstance inst = gen_synthetic(100, 1000, 50, 7);
    auto A = std::make_shared<const DesignMatrix>(inst.A);
    const double lmax = lambda_max(*A, inst.b);
    auto part = std::make_shared<const GroupPartition>(GroupPartition::contiguous(inst.group_sizes));
    const SglProblem prob(A, inst.b, part, 0.2 * lmax, 0.2 * lmax);
    const AlmResult res = alm_solve(prob, AlmParams{});
    ASSERT_TRUE(res.report.converged);
    int tails = 0;
    for (const auto& rec : res.history) {
        const auto& h = rec.ssn_grad_history;
        auto it = std::find_if(h.begin(), h.end(), [](double g) { return g < 1e-2; });
        for (; it != h.end() && it + 1 != h.end(); ++it) {
            EXPECT_LE(*(it + 1), 0.1 * *it) << "outer " << rec.k;
            ++tails;
        }
    }
    EXPECT_GT(tails, 0);
}
