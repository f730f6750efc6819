#pragma once

#include "sgl/model.hpp"
#include "sgl/newton_system.hpp"

#include <vector>

namespace sgl {

struct SsnParams {
    double mu = 1e-4;      // Armijo constant, (0, 1/2)
    double eta_bar = 0.1;  // linear-solve accuracy cap, (0, 1)
    double tau = 0.5;      // forcing exponent, (0, 1]
    double delta = 0.5;    // backtracking factor, (0, 1)
    double grad_tol = 1e-6;
    int max_iters = 200;
    int max_backtracks = 50;
    int cg_max_iters = 500;
    NewtonStrategy strategy = NewtonStrategy::Auto;

    void validate() const;
};

/**
 * psi(y) = <b, y> + 1/2 ||y||^2 + sigma/2 ||Prox_p(x~/sigma - A^T y)||^2 - ||x~||^2 / (2 sigma),
 * the augmented Lagrangian minimized over z for fixed y. The p* term vanishes
 * because the minimizing z always lies in dom p*.
 */
class DualSubproblem {
public:
    struct Point {
        Vector y;
        Vector aty;  // A^T y
        Vector w;    // x~/sigma - A^T y
        Vector prox; // Prox_p(w)
        Vector grad; // b + y - sigma A prox
        double psi = 0.0;
        double grad_norm = 0.0;
    };

    DualSubproblem(const SglProblem& prob, double sigma, Vector x_tilde);

    const SglProblem& problem() const noexcept { return *prob_; }
    double sigma() const noexcept { return sigma_; }
    const Vector& x_tilde() const noexcept { return x_tilde_; }

    Point evaluate(const Vector& y) const;
    // Reuses a known A^T y.
    Point evaluate(const Vector& y, Vector aty) const;

private:
    void complete(Point& pt) const;

    const SglProblem* prob_;
    double sigma_;
    Vector x_tilde_;
    Vector x_scaled_; // x~ / sigma
    double x_term_;   // ||x~||^2 / (2 sigma)
};

double psi_value(const SglProblem& prob, double sigma, const Vector& x_tilde, const Vector& y);
Vector psi_grad(const SglProblem& prob, double sigma, const Vector& x_tilde, const Vector& y);

struct SsnResult {
    DualSubproblem::Point point; // final iterate with exact A^T y
    int iters = 0;
    bool converged = false;
    // Line search could not make progress because ||grad|| is at rounding level.
    bool stagnated = false;
    int backtracks = 0;
    int gradient_fallbacks = 0;
    int linear_solve_failures = 0;
    std::vector<double> grad_history; // ||grad psi(y_j)||, j = 0..iters
    std::vector<double> psi_history;  // psi(y_j)
    std::vector<NewtonStrategy> strategies;
};

/**
 * Semismooth Newton with Armijo backtracking on psi. Each iteration solves
 * (I + sigma A M A^T) d = -grad to accuracy min(eta_bar, ||grad||^{1+tau}).
 * Throws NumericError if neither the Newton direction nor -grad admits an
 * Armijo step while ||grad|| is above rounding level.
 */
SsnResult ssn_minimize(const SglProblem& prob, double sigma, const Vector& x_tilde, const Vector& y0,
                       const SsnParams& params);
SsnResult ssn_minimize(const DualSubproblem& sub, const Vector& y0, const SsnParams& params);

} // namespace sgl
