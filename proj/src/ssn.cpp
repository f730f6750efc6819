#include "sgl/ssn.hpp"

#include "sgl/errors.hpp"
#include "sgl/jacobian.hpp"
#include "sgl/prox.hpp"

#include <cmath>
#include <limits>

namespace sgl {

void SsnParams::validate() const {
    if (!(mu > 0.0 && mu < 0.5)) throw ArgumentError("SsnParams: mu must lie in (0, 1/2)");
    if (!(eta_bar > 0.0 && eta_bar < 1.0)) throw ArgumentError("SsnParams: eta_bar must lie in (0, 1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("SsnParams: tau must lie in (0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("SsnParams: delta must lie in (0, 1)");
    if (!(grad_tol > 0.0)) throw ArgumentError("SsnParams: grad_tol must be positive");
    if (max_iters < 0 || max_backtracks < 1 || cg_max_iters < 1) {
        throw ArgumentError("SsnParams: iteration limits must be positive");
    }
}

DualSubproblem::DualSubproblem(const SglProblem& prob, double sigma, Vector x_tilde)
    : prob_(&prob), sigma_(sigma), x_tilde_(std::move(x_tilde)) {
    if (!(sigma > 0.0)) throw ArgumentError("DualSubproblem: sigma must be positive");
    if (x_tilde_.size() != prob.n()) throw ArgumentError("DualSubproblem: x~ has wrong length");
    x_scaled_ = x_tilde_ / sigma_;
    x_term_ = x_tilde_.squaredNorm() / (2.0 * sigma_);
}

DualSubproblem::Point DualSubproblem::evaluate(const Vector& y) const {
    if (y.size() != prob_->m()) throw ArgumentError("DualSubproblem: y has wrong length");
    return evaluate(y, prob_->A().adjoint_multiply(y));
}

DualSubproblem::Point DualSubproblem::evaluate(const Vector& y, Vector aty) const {
    Point pt;
    pt.y = y;
    pt.aty = std::move(aty);
    pt.w = x_scaled_ - pt.aty;
    complete(pt);
    return pt;
}

void DualSubproblem::complete(Point& pt) const {
    prox_p(prob_->penalty(), pt.w, pt.prox);
    pt.psi = prob_->b().dot(pt.y) + 0.5 * pt.y.squaredNorm() + 0.5 * sigma_ * pt.prox.squaredNorm() - x_term_;
    pt.grad = prob_->b() + pt.y - sigma_ * prob_->A().multiply(pt.prox);
    pt.grad_norm = pt.grad.norm();
}

double psi_value(const SglProblem& prob, double sigma, const Vector& x_tilde, const Vector& y) {
    return DualSubproblem(prob, sigma, x_tilde).evaluate(y).psi;
}

Vector psi_grad(const SglProblem& prob, double sigma, const Vector& x_tilde, const Vector& y) {
    return DualSubproblem(prob, sigma, x_tilde).evaluate(y).grad;
}

namespace {

struct LineSearchOutcome {
    bool accepted = false;
    int backtracks = 0;
};

/**
 * Armijo backtracking along d. The decrease psi(y + a d) - psi(y) is formed
 * from differences of its terms, so that it stays accurate when the decrease
 * is far below the magnitude of psi itself. When even that difference is
 * dominated by rounding in the prox values, the test cannot tell a good step
 * from a bad one and the trial is judged by the gradient norm instead.
 */
LineSearchOutcome armijo(const DualSubproblem& sub, DualSubproblem::Point& pt, const Vector& d, double slope,
                         const SsnParams& params) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const SglProblem& prob = sub.problem();
    const double sigma = sub.sigma();
    const Vector atd = prob.A().adjoint_multiply(d);
    const Vector by = prob.b() + pt.y;
    const double lin = by.dot(d);
    const double dd = d.squaredNorm();

    LineSearchOutcome out;
    Vector w_trial(pt.w.size());
    Vector prox_trial(pt.w.size());
    Vector grad_trial;
    double alpha = 1.0;
    for (int k = 0; k <= params.max_backtracks; ++k) {
        w_trial = pt.w - alpha * atd;
        prox_p(prob.penalty(), w_trial, prox_trial);
        const double dpsi = alpha * lin + 0.5 * alpha * alpha * dd +
                            0.5 * sigma * (prox_trial - pt.prox).dot(prox_trial + pt.prox);
        // Prox values carry errors of order eps |w| on their support.
        const double noise =
            8.0 * eps *
            (std::abs(alpha * lin) + alpha * alpha * dd +
             sigma * ((pt.w.cwiseAbs() + w_trial.cwiseAbs()).cwiseProduct(pt.prox.cwiseAbs() + prox_trial.cwiseAbs()))
                         .sum());
        bool accept;
        bool have_grad = false;
        if (noise < params.mu * alpha * std::abs(slope)) {
            accept = dpsi <= params.mu * alpha * slope;
        } else {
            grad_trial = by + alpha * d - sigma * prob.A().multiply(prox_trial);
            have_grad = true;
            accept = grad_trial.norm() < pt.grad_norm;
        }
        if (accept) {
            pt.y.noalias() += alpha * d;
            pt.aty.noalias() += alpha * atd;
            pt.w.swap(w_trial);
            pt.prox.swap(prox_trial);
            pt.psi += dpsi;
            if (have_grad) {
                pt.grad.swap(grad_trial);
            } else {
                pt.grad = prob.b() + pt.y - sigma * prob.A().multiply(pt.prox);
            }
            pt.grad_norm = pt.grad.norm();
            out.accepted = true;
            out.backtracks = k;
            return out;
        }
        alpha *= params.delta;
    }
    out.backtracks = params.max_backtracks;
    return out;
}

// ||grad|| below which the Armijo test is dominated by rounding in its terms.
double rounding_floor(const SglProblem& prob, const DualSubproblem::Point& pt) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double scale = prob.b().norm() + pt.y.norm() + (prob.b() + pt.y - pt.grad).norm();
    return 1e3 * eps * (1.0 + scale);
}

} // namespace

SsnResult ssn_minimize(const SglProblem& prob, double sigma, const Vector& x_tilde, const Vector& y0,
                       const SsnParams& params) {
    const DualSubproblem sub(prob, sigma, x_tilde);
    return ssn_minimize(sub, y0, params);
}

SsnResult ssn_minimize(const DualSubproblem& sub, const Vector& y0, const SsnParams& params) {
    params.validate();
    const SglProblem& prob = sub.problem();
    const double sigma = sub.sigma();

    SsnResult res;
    DualSubproblem::Point pt = sub.evaluate(y0);
    res.grad_history.push_back(pt.grad_norm);
    res.psi_history.push_back(pt.psi);

    while (true) {
        if (pt.grad_norm <= params.grad_tol) {
            res.converged = true;
            break;
        }
        if (res.iters >= params.max_iters) break;

        const ProxDerivativeInfo info = derivative_info(prob.penalty(), pt.w);
        const NewtonSystem sys = NewtonSystem::build(prob.A(), sigma, info, params.strategy);
        res.strategies.push_back(sys.strategy());
        const double solve_tol = std::min(params.eta_bar, std::pow(pt.grad_norm, 1.0 + params.tau));
        const Vector rhs = -pt.grad;
        NewtonSolveResult step = sys.solve(rhs, solve_tol, params.cg_max_iters);

        Vector d = std::move(step.d);
        double slope = pt.grad.dot(d);
        bool newton = step.converged && slope < 0.0;
        if (!step.converged) ++res.linear_solve_failures;
        if (!newton) {
            d = rhs;
            slope = -pt.grad_norm * pt.grad_norm;
            ++res.gradient_fallbacks;
        }

        LineSearchOutcome ls = armijo(sub, pt, d, slope, params);
        res.backtracks += ls.backtracks;
        if (!ls.accepted && newton) {
            ++res.gradient_fallbacks;
            ls = armijo(sub, pt, rhs, -pt.grad_norm * pt.grad_norm, params);
            res.backtracks += ls.backtracks;
        }
        if (!ls.accepted) {
            if (pt.grad_norm <= rounding_floor(prob, pt)) {
                res.stagnated = true;
                break;
            }
            throw NumericError("ssn_minimize: line search failed along both the Newton and gradient directions");
        }
        ++res.iters;
        res.grad_history.push_back(pt.grad_norm);
        res.psi_history.push_back(pt.psi);
    }

    // Refresh A^T y and everything derived from it; the line search updates it incrementally.
    if (res.iters > 0) pt = sub.evaluate(pt.y);
    res.point = std::move(pt);
    return res;
}

} // namespace sgl
