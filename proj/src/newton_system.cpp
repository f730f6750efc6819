#include "sgl/newton_system.hpp"

#include "sgl/errors.hpp"

#include <cmath>

namespace sgl {

std::string_view to_string(NewtonStrategy s) {
    switch (s) {
    case NewtonStrategy::Auto: return "auto";
    case NewtonStrategy::DenseCholesky: return "dense";
    case NewtonStrategy::Woodbury: return "woodbury";
    case NewtonStrategy::Pcg: return "pcg";
    }
    return "auto";
}

NewtonStrategy parse_newton_strategy(std::string_view name) {
    if (name == "auto") return NewtonStrategy::Auto;
    if (name == "dense") return NewtonStrategy::DenseCholesky;
    if (name == "woodbury") return NewtonStrategy::Woodbury;
    if (name == "pcg") return NewtonStrategy::Pcg;
    throw ArgumentError("unknown Newton strategy '" + std::string(name) + "'");
}

NewtonStrategy select_newton_strategy(Index m, Index rank) {
    if (4 * rank <= m && rank <= 4000) return NewtonStrategy::Woodbury;
    if (m <= 4000) return NewtonStrategy::DenseCholesky;
    return NewtonStrategy::Pcg;
}

NewtonSystem NewtonSystem::build(const DesignMatrix& A, double sigma, const ProxDerivativeInfo& info,
                                 NewtonStrategy strategy) {
    if (!(sigma > 0.0)) throw ArgumentError("NewtonSystem: sigma must be positive");
    if (info.n != A.cols()) throw ArgumentError("NewtonSystem: derivative info does not match A");

    NewtonSystem sys;
    sys.m_ = A.rows();
    sys.sigma_ = sigma;

    std::vector<Index> columns;
    columns.reserve(static_cast<std::size_t>(info.r));
    sys.offsets_.reserve(info.active.size() + 1);
    sys.offsets_.push_back(0);
    for (const auto& a : info.active) {
        columns.insert(columns.end(), a.indices.begin(), a.indices.end());
        sys.offsets_.push_back(static_cast<Index>(columns.size()));
    }
    // One gather per Newton iteration; A_l and A_l s_l both come from it.
    sys.gathered_ = A.gather_columns(columns);

    const Index r = info.r;
    const Index r2 = info.r2;
    sys.group_images_.resize(sys.m_, r2);
    sys.diag_coefs_.resize(r2);
    sys.rank_coefs_.resize(r2);
    sys.D_.resize(sys.m_, r + r2);
    for (Index l = 0; l < r2; ++l) {
        const auto& a = info.active[l];
        const Index off = sys.offsets_[l];
        const Index len = sys.offsets_[l + 1] - off;
        const auto Al = sys.gathered_.middleCols(off, len);
        sys.group_images_.col(l).noalias() = Al * a.s;
        sys.diag_coefs_[l] = a.diag_coef;
        sys.rank_coefs_[l] = a.rank_coef;
        sys.D_.middleCols(off, len) = std::sqrt(sigma * a.diag_coef) * Al;
        sys.D_.col(r + l) = std::sqrt(sigma * a.rank_coef) * sys.group_images_.col(l);
    }
    if (!sys.D_.allFinite()) {
        throw NumericError("NewtonSystem: non-finite entries in the low-rank factor");
    }

    sys.strategy_ = strategy == NewtonStrategy::Auto ? select_newton_strategy(sys.m_, r + r2) : strategy;
    if (r + r2 == 0) return sys; // V = I

    switch (sys.strategy_) {
    case NewtonStrategy::DenseCholesky:
        sys.factor_.compute(sys.dense_operator());
        break;
    case NewtonStrategy::Woodbury: {
        Matrix K = Matrix::Identity(r + r2, r + r2);
        K.selfadjointView<Eigen::Lower>().rankUpdate(sys.D_.transpose());
        sys.factor_.compute(K);
        break;
    }
    case NewtonStrategy::Pcg:
        sys.diagonal_ = Vector::Ones(sys.m_) + sys.D_.rowwise().squaredNorm();
        break;
    case NewtonStrategy::Auto:
        break;
    }
    if (sys.strategy_ != NewtonStrategy::Pcg && sys.factor_.info() != Eigen::Success) {
        throw NumericError("NewtonSystem: Cholesky factorization failed");
    }
    return sys;
}

void NewtonSystem::apply(const Vector& h, Vector& out) const {
    if (h.size() != m_) throw ArgumentError("NewtonSystem::apply: vector has wrong length");
    out = h;
    if (D_.cols() == 0) return;
    const Vector t = D_.transpose() * h;
    out.noalias() += D_ * t;
}

Vector NewtonSystem::apply(const Vector& h) const {
    Vector out;
    apply(h, out);
    return out;
}

NewtonSolveResult NewtonSystem::solve(const Vector& rhs, double tol, int max_iters) const {
    if (rhs.size() != m_) throw ArgumentError("NewtonSystem::solve: right-hand side has wrong length");
    if (!(tol > 0.0)) throw ArgumentError("NewtonSystem::solve: tolerance must be positive");
    NewtonSolveResult res;
    if (D_.cols() == 0) {
        res.d = rhs;
        return res;
    }
    switch (strategy_) {
    case NewtonStrategy::Pcg:
        return solve_pcg(rhs, tol, max_iters);
    case NewtonStrategy::Woodbury: {
        // (I + D D^T)^{-1} = I - D (I + D^T D)^{-1} D^T
        const Vector t = factor_.solve(D_.transpose() * rhs);
        res.d = rhs - D_ * t;
        break;
    }
    default:
        res.d = factor_.solve(rhs);
        break;
    }
    res.residual_norm = (apply(res.d) - rhs).norm();
    return res;
}

NewtonSolveResult NewtonSystem::solve_pcg(const Vector& rhs, double tol, int max_iters) const {
    NewtonSolveResult res;
    res.d = Vector::Zero(m_);
    Vector resid = rhs;
    Vector z = resid.cwiseQuotient(diagonal_);
    Vector p = z;
    Vector Vp(m_);
    double rz = resid.dot(z);
    double rnorm = resid.norm();
    Vector best = res.d;
    double best_norm = rnorm;
    int it = 0;
    while (rnorm > tol && it < max_iters) {
        apply(p, Vp);
        const double alpha = rz / p.dot(Vp);
        res.d.noalias() += alpha * p;
        resid.noalias() -= alpha * Vp;
        rnorm = resid.norm();
        ++it;
        if (rnorm < best_norm) {
            best_norm = rnorm;
            best = res.d;
        }
        if (rnorm <= tol) break;
        z = resid.cwiseQuotient(diagonal_);
        const double rz_next = resid.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    res.d = std::move(best);
    res.iterations = it;
    res.residual_norm = (apply(res.d) - rhs).norm();
    res.converged = res.residual_norm <= tol;
    return res;
}

Matrix NewtonSystem::structured_amat() const {
    Matrix out = Matrix::Zero(m_, m_);
    for (Index l = 0; l < diag_coefs_.size(); ++l) {
        const Index off = offsets_[l];
        const auto Al = gathered_.middleCols(off, offsets_[l + 1] - off);
        out.noalias() += diag_coefs_[l] * (Al * Al.transpose());
        out.noalias() += rank_coefs_[l] * (group_images_.col(l) * group_images_.col(l).transpose());
    }
    return out;
}

Matrix NewtonSystem::dense_operator() const {
    Matrix V = Matrix::Identity(m_, m_);
    if (D_.cols() > 0) {
        V.selfadjointView<Eigen::Lower>().rankUpdate(D_);
        V.triangularView<Eigen::StrictlyUpper>() = V.transpose();
    }
    return V;
}

} // namespace sgl
