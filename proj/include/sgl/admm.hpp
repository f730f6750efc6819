#pragma once

#include "sgl/model.hpp"
#include "sgl/trace.hpp"

#include <optional>
#include <vector>

namespace sgl {

struct AdmmParams {
    // Unset means admm_default_sigma0(A).
    std::optional<double> sigma0;
    double tol = 1e-6;
    int max_iters = 10000;
    double tau = 1.618;
    bool sigma_tuning = true;
    int tune_every = 50;
    double tune_ratio = 5.0;
    double tune_factor = 2.0;
    double sigma_min = 1e-6;
    double sigma_max = 1e6;
    bool record_history = false;
    TraceSink trace;

    void validate() const;
};

/**
 * Cholesky factor of sigma^{-1} I + A A^T. A A^T is formed once; the factor is
 * recomputed only when sigma changes.
 */
class AdmmFactorCache {
public:
    explicit AdmmFactorCache(const DesignMatrix& A);

    // Refactors iff sigma differs from the cached value.
    void refactorize_on_sigma_change(double sigma);

    double sigma() const noexcept { return sigma_; }
    bool valid() const noexcept { return valid_; }
    int factorizations() const noexcept { return factorizations_; }
    const Matrix& gram() const noexcept { return gram_; }

    Vector solve(const Vector& rhs) const;

private:
    Matrix gram_;
    Eigen::LLT<Matrix> factor_;
    double sigma_ = 0.0;
    bool valid_ = false;
    int factorizations_ = 0;
};

// m / ||A||_F^2, the reciprocal of the mean eigenvalue of A A^T, so that
// sigma^{-1} I and A A^T enter the y-step on the same scale. 1 when A = 0.
double admm_default_sigma0(const DesignMatrix& A);

/**
 * sigma tuning, applied every tune_every iterations: with
 *   primal = ||A^T y + z|| / (1 + ||z||),  dual = ||A x - y - b|| / (1 + ||b||),
 * double sigma when primal > ratio * dual, halve it when dual > ratio * primal,
 * then clamp to [sigma_min, sigma_max].
 */
double admm_tuned_sigma(double sigma, double primal_res, double dual_res, const AdmmParams& params);

struct AdmmIterationRecord {
    int k = 0;
    double sigma = 0.0;
    double eta_gap = 0.0;
    double eta_dual = 0.0;
    double pobj = 0.0;
    double dobj = 0.0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    double dual_feasibility_gap = 0.0;
    double y_residual = 0.0; // ||(sigma^{-1} I + A A^T) y - rhs|| / (1 + ||rhs||)
};

struct AdmmResult {
    PrimalDualPoint point;
    SolveReport report;
    std::vector<AdmmIterationRecord> history; // only with record_history
    int factorizations = 0;
    int sigma_changes = 0;
    double max_dual_feasibility_gap = 0.0;
    double max_y_residual = 0.0;
};

/**
 * Dual semi-proximal ADMM with zero proximal terms:
 *   y   <- (sigma^{-1} I + A A^T)^{-1} (-b/sigma - A(z - x/sigma))
 *   z   <- w - Prox_p(w),  w = x/sigma - A^T y
 *   x   <- x - tau sigma (A^T y + z)
 */
AdmmResult admm_solve(const SglProblem& prob, const AdmmParams& params,
                      const std::optional<PrimalDualPoint>& start = std::nullopt);

} // namespace sgl
