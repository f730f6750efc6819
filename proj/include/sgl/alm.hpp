#pragma once

#include "sgl/model.hpp"
#include "sgl/ssn.hpp"
#include "sgl/trace.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sgl {

struct AlmParams {
    // Unset means max(1, ||b|| / sqrt(m)).
    std::optional<double> sigma0;
    double sigma_growth = 3.0;
    double sigma_max = 1e6; // +inf allowed
    // eps_k = eps_scale * eps_rate^k, checked as ||grad psi_k|| <= eps_k / sqrt(sigma_k)
    double eps_scale = 1e-2;
    double eps_rate = 0.5;
    // delta_k = min(delta_cap, 1 / (k+1)^2), checked as
    // ||grad psi_k|| <= delta_k / sqrt(sigma_k) ||x^{k+1} - x^k||
    double delta_cap = 0.5;
    int max_b_resumes = 3;
    double tol = 1e-6;
    int max_outer = 200;
    int max_inner_total = 5000;
    SsnParams ssn;
    // Keep a copy of every primal iterate in the history.
    bool record_iterates = false;
    TraceSink trace;

    double epsilon(int k) const;
    double delta(int k) const;
    void validate() const;
};

double default_sigma0(const SglProblem& prob);

// sigma_{k+1} = min(sigma_max, sigma_growth * sigma_k)
double sigma_update(double sigma, const AlmParams& params);

struct AlmIterationRecord {
    int k = 0;
    double sigma = 0.0;
    double grad_norm = 0.0;
    double grad_tol = 0.0; // final inner tolerance after any resumes
    int inner_iters = 0;
    int b_resumes = 0;
    bool b_satisfied = true;
    bool inner_converged = true;
    double eta_gap = 0.0;
    double eta_dual = 0.0;
    double pobj = 0.0;
    double dobj = 0.0;
    double dual_feasibility_gap = 0.0;
    // ||x^{k+1} + sigma_k (A^T y^{k+1} + z^{k+1}) - x^k||
    double update_residual = 0.0;
    // ||x^{k+1} - x^k||
    double x_step = 0.0;
    // ||grad psi|| after every SSN iteration, concatenated over resumes (each
    // resume continues from the previous end point, which is stored once).
    std::vector<double> ssn_grad_history;
    std::vector<std::size_t> ssn_restarts; // offsets of the first entry produced by each resume
    Vector x;                                  // only with record_iterates
};

struct AlmResult {
    PrimalDualPoint point;
    SolveReport report;
    std::vector<AlmIterationRecord> history;
    std::vector<std::string> warnings;
};

/**
 * Inexact augmented Lagrangian method on the dual
 *   min <b, y> + 1/2 ||y||^2 + p*(z)  s.t.  A^T y + z = 0,
 * with each subproblem in y solved by ssn_minimize. Stops when
 * max(eta_gap, eta_dual) < tol or a budget runs out.
 */
AlmResult alm_solve(const SglProblem& prob, const AlmParams& params,
                    const std::optional<PrimalDualPoint>& start = std::nullopt);

} // namespace sgl
