#pragma once

#include "sgl/jacobian.hpp"
#include "sgl/model.hpp"

#include <string_view>

namespace sgl {

enum class NewtonStrategy { Auto, DenseCholesky, Woodbury, Pcg };

std::string_view to_string(NewtonStrategy s);
NewtonStrategy parse_newton_strategy(std::string_view name);

/**
 * Auto rule: Woodbury when r + r2 <= m/4 and r + r2 <= 4000, otherwise dense
 * Cholesky when m <= 4000, otherwise PCG.
 */
NewtonStrategy select_newton_strategy(Index m, Index rank);

struct NewtonSolveResult {
    Vector d;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = true;
};

/**
 * V = I + sigma A M A^T for one element M of the surrogate Jacobian.
 *
 * The gathered columns A_l (one m x |Xi_l| block per active group) and the
 * vectors A_l s_l are formed once at build time. Together they give the
 * low-rank factor D = [B, C] with V = I + D D^T, where
 *   B_l = sqrt(sigma (1 - lambda_{2,l}/||v_l||)) A_l,
 *   c_l = sqrt(sigma lambda_{2,l}/||v_l||^3) A_l s_l.
 * Every product with V costs O(m (r + r2)).
 */
class NewtonSystem {
public:
    static NewtonSystem build(const DesignMatrix& A, double sigma, const ProxDerivativeInfo& info,
                              NewtonStrategy strategy = NewtonStrategy::Auto);

    NewtonStrategy strategy() const noexcept { return strategy_; }
    Index dimension() const noexcept { return m_; }
    Index rank() const noexcept { return D_.cols(); }
    double sigma() const noexcept { return sigma_; }
    const Matrix& low_rank_factor() const noexcept { return D_; }

    // h + sigma A M A^T h
    void apply(const Vector& h, Vector& out) const;
    Vector apply(const Vector& h) const;

    // Solves V d = rhs. Direct strategies ignore tol/max_iters; PCG stops at
    // ||V d - rhs|| <= tol or after max_iters, reporting converged = false then.
    NewtonSolveResult solve(const Vector& rhs, double tol, int max_iters) const;

    // A M A^T summed group by group from A_l and A_l s_l (no sigma, no identity).
    Matrix structured_amat() const;
    // Dense V = I + D D^T.
    Matrix dense_operator() const;

private:
    NewtonSolveResult solve_pcg(const Vector& rhs, double tol, int max_iters) const;

    Index m_ = 0;
    double sigma_ = 1.0;
    NewtonStrategy strategy_ = NewtonStrategy::DenseCholesky;

    Matrix gathered_;           // [A_l] for l in active groups, m x r
    Matrix group_images_;       // [A_l s_l], m x r2
    std::vector<Index> offsets_; // column offsets of each A_l in gathered_
    Vector diag_coefs_;
    Vector rank_coefs_;

    Matrix D_;
    Eigen::LLT<Matrix> factor_; // of I + D D^T (dense) or I + D^T D (Woodbury)
    Vector diagonal_;           // diag(V), PCG preconditioner
};

} // namespace sgl
