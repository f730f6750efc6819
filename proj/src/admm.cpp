#include "sgl/admm.hpp"

#include "sgl/errors.hpp"
#include "sgl/prox.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sgl {

void AdmmParams::validate() const {
    if (sigma0 && !(*sigma0 > 0.0)) throw ArgumentError("AdmmParams: sigma0 must be positive");
    if (!(tol > 0.0)) throw ArgumentError("AdmmParams: tol must be positive");
    if (max_iters < 1) throw ArgumentError("AdmmParams: max_iters must be positive");
    if (!(tau > 0.0 && tau < (1.0 + std::sqrt(5.0)) / 2.0)) {
        throw ArgumentError("AdmmParams: tau must lie in (0, (1 + sqrt 5) / 2)");
    }
    if (tune_every < 1 || !(tune_ratio > 1.0) || !(tune_factor > 1.0)) {
        throw ArgumentError("AdmmParams: invalid sigma tuning parameters");
    }
    if (!(sigma_min > 0.0) || !(sigma_max >= sigma_min)) throw ArgumentError("AdmmParams: invalid sigma bounds");
}

AdmmFactorCache::AdmmFactorCache(const DesignMatrix& A) : gram_(A.gram()) {}

void AdmmFactorCache::refactorize_on_sigma_change(double sigma) {
    if (valid_ && sigma == sigma_) return;
    Matrix K = gram_;
    K.diagonal().array() += 1.0 / sigma;
    factor_.compute(K);
    if (factor_.info() != Eigen::Success) {
        valid_ = false;
        throw NumericError("ADMM: Cholesky factorization of sigma^{-1} I + A A^T failed");
    }
    sigma_ = sigma;
    valid_ = true;
    ++factorizations_;
}

Vector AdmmFactorCache::solve(const Vector& rhs) const {
    if (!valid_) throw NumericError("ADMM: factor used before factorization");
    return factor_.solve(rhs);
}

double admm_tuned_sigma(double sigma, double primal_res, double dual_res, const AdmmParams& params) {
    if (primal_res > params.tune_ratio * dual_res) {
        sigma *= params.tune_factor;
    } else if (dual_res > params.tune_ratio * primal_res) {
        sigma /= params.tune_factor;
    }
    return std::clamp(sigma, params.sigma_min, params.sigma_max);
}

double admm_default_sigma0(const DesignMatrix& A) {
    const double fro2 = A.dense() ? A.dense()->squaredNorm() : A.sparse()->squaredNorm();
    if (!(fro2 > 0.0)) return 1.0;
    return static_cast<double>(A.rows()) / fro2;
}

AdmmResult admm_solve(const SglProblem& prob, const AdmmParams& params, const std::optional<PrimalDualPoint>& start) {
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const DesignMatrix& A = prob.A();
    const Vector& b = prob.b();
    const Penalty& penalty = prob.penalty();
    const double b_norm = b.norm();

    AdmmResult out;
    PrimalDualPoint& pt = out.point;
    pt = start ? *start : PrimalDualPoint::zeros(prob);
    if (pt.x.size() != prob.n() || pt.y.size() != prob.m() || pt.z.size() != prob.n()) {
        throw ArgumentError("admm_solve: starting point has wrong dimensions");
    }

    AdmmFactorCache cache(A);
    double sigma = std::clamp(params.sigma0.value_or(admm_default_sigma0(A)), params.sigma_min,
                              params.sigma_max);
    cache.refactorize_on_sigma_change(sigma);

    // A x and A z are carried along; A x is refreshed exactly at every tuning step.
    Vector Ax = A.multiply(pt.x);
    Vector Az = A.multiply(pt.z);
    Vector aty, w, prox, resid, rhs;
    SolveReport& report = out.report;
    report.solver_name = "admm";

    auto exact_metrics = [&]() {
        return eta_metrics(prob, pt, aty);
    };

    for (int k = 0; k < params.max_iters; ++k) {
        rhs = (Ax - b) / sigma - Az;
        pt.y = cache.solve(rhs);
        A.adjoint_multiply(pt.y, aty);
        w = pt.x / sigma - aty;
        prox_p(penalty, w, prox);
        pt.z = w - prox;
        resid = aty + pt.z;
        const Vector Gy = cache.gram() * pt.y;
        A.multiply(pt.z, Az);
        pt.x.noalias() -= (params.tau * sigma) * resid;
        Ax.noalias() -= (params.tau * sigma) * (Gy + Az);

        const double pobj = 0.5 * (Ax - b).squaredNorm() + penalty.value(pt.x);
        const double dobj = dual_objective(prob, pt.y);
        const double eta_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double z_norm = pt.z.norm();
        const double eta_dual = resid.norm() / (1.0 + z_norm);
        const double feas = dual_feasibility_gap(penalty, pt.z);
        out.max_dual_feasibility_gap = std::max(out.max_dual_feasibility_gap, feas);

        report.outer_iters = k + 1;
        if (params.record_history) {
            AdmmIterationRecord rec;
            rec.k = k;
            rec.sigma = sigma;
            rec.eta_gap = eta_gap;
            rec.eta_dual = eta_dual;
            rec.pobj = pobj;
            rec.dobj = dobj;
            rec.primal_res = eta_dual;
            rec.dual_res = (Ax - pt.y - b).norm() / (1.0 + b_norm);
            rec.dual_feasibility_gap = feas;
            const Vector lhs = pt.y / sigma + cache.gram() * pt.y;
            rec.y_residual = (lhs - rhs).norm() / (1.0 + rhs.norm());
            out.max_y_residual = std::max(out.max_y_residual, rec.y_residual);
            out.history.push_back(rec);
        }
        if (params.trace) params.trace(TraceRecord{k, sigma, 0.0, 0, eta_gap, eta_dual, pobj, dobj});

        if (std::max(eta_gap, eta_dual) < params.tol) {
            A.multiply(pt.x, Ax);
            const EtaMetrics exact = exact_metrics();
            if (std::max(exact.eta_gap, exact.eta_dual) < params.tol) {
                report.converged = true;
                break;
            }
        }

        if ((k + 1) % params.tune_every == 0) {
            A.multiply(pt.x, Ax);
            if (params.sigma_tuning) {
                const double dual_res = (Ax - pt.y - b).norm() / (1.0 + b_norm);
                const double next = admm_tuned_sigma(sigma, eta_dual, dual_res, params);
                if (next != sigma) {
                    sigma = next;
                    ++out.sigma_changes;
                    cache.refactorize_on_sigma_change(sigma);
                }
            }
        }
    }

    const EtaMetrics final_eta = exact_metrics();
    report.pobj = final_eta.pobj;
    report.dobj = final_eta.dobj;
    report.eta_gap = final_eta.eta_gap;
    report.eta_dual = final_eta.eta_dual;
    report.nnz = nnz_estimate(pt.x);
    out.factorizations = cache.factorizations();
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace sgl
