#include "sgl/alm.hpp"

#include "sgl/errors.hpp"
#include "sgl/prox.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sgl {

double AlmParams::epsilon(int k) const { return eps_scale * std::pow(eps_rate, k); }

double AlmParams::delta(int k) const {
    const double kk = static_cast<double>(k) + 1.0;
    return std::min(delta_cap, 1.0 / (kk * kk));
}

void AlmParams::validate() const {
    if (sigma0 && !(*sigma0 > 0.0)) throw ArgumentError("AlmParams: sigma0 must be positive");
    if (!(sigma_growth > 1.0)) throw ArgumentError("AlmParams: sigma_growth must exceed 1");
    if (!(sigma_max > 0.0)) throw ArgumentError("AlmParams: sigma_max must be positive");
    if (!(eps_scale > 0.0) || !(eps_rate > 0.0 && eps_rate < 1.0)) {
        throw ArgumentError("AlmParams: eps_k must be a positive geometric (summable) sequence");
    }
    if (!(delta_cap >= 0.0 && delta_cap < 1.0)) throw ArgumentError("AlmParams: delta_k must stay below 1");
    if (!(tol > 0.0)) throw ArgumentError("AlmParams: tol must be positive");
    if (max_outer < 1 || max_inner_total < 1 || max_b_resumes < 0) {
        throw ArgumentError("AlmParams: budgets must be positive");
    }
    ssn.validate();
}

double default_sigma0(const SglProblem& prob) {
    return std::max(1.0, prob.b().norm() / std::sqrt(static_cast<double>(prob.m())));
}

double sigma_update(double sigma, const AlmParams& params) {
    return std::min(params.sigma_max, params.sigma_growth * sigma);
}

AlmResult alm_solve(const SglProblem& prob, const AlmParams& params, const std::optional<PrimalDualPoint>& start) {
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();

    AlmResult out;
    PrimalDualPoint& pt = out.point;
    pt = start ? *start : PrimalDualPoint::zeros(prob);
    if (pt.x.size() != prob.n() || pt.y.size() != prob.m() || pt.z.size() != prob.n()) {
        throw ArgumentError("alm_solve: starting point has wrong dimensions");
    }

    double sigma = params.sigma0.value_or(default_sigma0(prob));
    sigma = std::min(sigma, params.sigma_max);
    int inner_total = 0;
    SolveReport& report = out.report;
    report.solver_name = "ssnal";

    for (int k = 0; k < params.max_outer; ++k) {
        const double root_sigma = std::sqrt(sigma);
        const double delta_k = params.delta(k);
        const DualSubproblem sub(prob, sigma, pt.x);

        AlmIterationRecord rec;
        rec.k = k;
        rec.sigma = sigma;

        SsnParams inner = params.ssn;
        inner.grad_tol = params.epsilon(k) / root_sigma;
        SsnResult ssn = ssn_minimize(sub, pt.y, inner);
        rec.inner_iters += ssn.iters;
        rec.ssn_grad_history = ssn.grad_history;
        Vector x_next = sigma * ssn.point.prox;

        // The second criterion involves x^{k+1}, so it is checked after the
        // fact and the inner solve resumed with the tighter tolerance.
        auto b_tolerance = [&] { return delta_k / root_sigma * (x_next - pt.x).norm(); };
        while (ssn.point.grad_norm > b_tolerance() && rec.b_resumes < params.max_b_resumes && !ssn.stagnated) {
            const double tightened = b_tolerance();
            if (!(tightened > 0.0)) break;
            inner.grad_tol = std::min(inner.grad_tol, tightened);
            rec.ssn_restarts.push_back(rec.ssn_grad_history.size());
            ssn = ssn_minimize(sub, ssn.point.y, inner);
            rec.inner_iters += ssn.iters;
            // The resumed run starts where the last one stopped; skip its repeated first entry.
            rec.ssn_grad_history.insert(rec.ssn_grad_history.end(), ssn.grad_history.begin() + 1,
                                        ssn.grad_history.end());
            x_next = sigma * ssn.point.prox;
            ++rec.b_resumes;
        }
        rec.b_satisfied = ssn.point.grad_norm <= b_tolerance();
        if (!rec.b_satisfied && !ssn.stagnated) {
            out.warnings.push_back("outer iteration " + std::to_string(k) +
                                   ": accepted subproblem solution without meeting the relative criterion");
        }
        rec.inner_converged = ssn.converged;
        rec.grad_tol = inner.grad_tol;
        rec.grad_norm = ssn.point.grad_norm;
        inner_total += rec.inner_iters;

        const DualSubproblem::Point& sp = ssn.point;
        pt.y = sp.y;
        pt.z = sp.w - sp.prox;
        rec.update_residual = (x_next + sigma * (sp.aty + pt.z) - pt.x).norm();
        rec.x_step = (x_next - pt.x).norm();
        pt.x = std::move(x_next);

        const EtaMetrics eta = eta_metrics(prob, pt, sp.aty);
        rec.eta_gap = eta.eta_gap;
        rec.eta_dual = eta.eta_dual;
        rec.pobj = eta.pobj;
        rec.dobj = eta.dobj;
        rec.dual_feasibility_gap = dual_feasibility_gap(prob.penalty(), pt.z);
        if (params.record_iterates) rec.x = pt.x;

        report.pobj = eta.pobj;
        report.dobj = eta.dobj;
        report.eta_gap = eta.eta_gap;
        report.eta_dual = eta.eta_dual;
        report.outer_iters = k + 1;
        report.inner_iters = inner_total;

        if (params.trace) {
            params.trace(TraceRecord{k, sigma, rec.grad_norm, rec.inner_iters, eta.eta_gap, eta.eta_dual,
                                     eta.pobj, eta.dobj});
        }
        out.history.push_back(std::move(rec));

        if (std::max(eta.eta_gap, eta.eta_dual) < params.tol) {
            report.converged = true;
            break;
        }
        if (inner_total >= params.max_inner_total) break;
        sigma = sigma_update(sigma, params);
    }

    report.nnz = nnz_estimate(pt.x);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace sgl
