#include "sgl/jacobian.hpp"

#include "sgl/errors.hpp"

#include <cmath>

namespace sgl {

std::vector<Index> ProxDerivativeInfo::active_groups() const {
    std::vector<Index> out;
    out.reserve(active.size());
    for (const auto& a : active) out.push_back(a.group);
    return out;
}

ProxDerivativeInfo derivative_info(const Penalty& penalty, const Vector& u) {
    if (u.size() != penalty.dimension()) {
        throw ArgumentError("derivative_info: expected length " + std::to_string(penalty.dimension()));
    }
    const GroupPartition& part = penalty.partition();
    const double lambda1 = penalty.lambda1();
    const Index g = part.num_groups();

    ProxDerivativeInfo info;
    info.n = u.size();
    info.theta.assign(static_cast<std::size_t>(u.size()), 0);
    info.v_norms.resize(g);
    info.case_tag.resize(static_cast<std::size_t>(g));

    std::vector<Index> support;
    for (Index l = 0; l < g; ++l) {
        support.clear();
        double sq = 0.0;
        for (Index i : part.group(l)) {
            const double excess = std::abs(u[i]) - lambda1;
            if (excess > 0.0) {
                info.theta[i] = 1;
                support.push_back(i);
                sq += excess * excess;
            }
        }
        const double norm = std::sqrt(sq);
        const double radius = penalty.group_lambda2(l);
        info.v_norms[l] = norm;
        if (norm < radius) {
            info.case_tag[l] = GroupCase::Interior;
        } else if (norm == radius) {
            // Boundary: the t = 0 member of the ball-projection Jacobian gives a zero block.
            info.case_tag[l] = GroupCase::Boundary;
        } else {
            info.case_tag[l] = GroupCase::Exterior;
            ActiveGroup a;
            a.group = l;
            a.indices = support;
            a.s.resize(static_cast<Index>(support.size()));
            for (std::size_t k = 0; k < support.size(); ++k) {
                const Index i = support[k];
                a.s[static_cast<Index>(k)] = std::copysign(std::abs(u[i]) - lambda1, u[i]);
            }
            a.v_norm = norm;
            a.diag_coef = 1.0 - radius / norm;
            a.rank_coef = radius / (norm * norm * norm);
            info.r += static_cast<Index>(support.size());
            info.active.push_back(std::move(a));
        }
    }
    info.r2 = static_cast<Index>(info.active.size());
    return info;
}

ProxDerivativeInfo derivative_info(const SglProblem& prob, const Vector& u) {
    return derivative_info(prob.penalty(), u);
}

void apply_M(const ProxDerivativeInfo& info, const Vector& h, Vector& out) {
    if (h.size() != info.n) throw ArgumentError("apply_M: vector has wrong length");
    out.setZero(info.n);
    for (const auto& a : info.active) {
        double sh = 0.0;
        for (std::size_t k = 0; k < a.indices.size(); ++k) sh += a.s[static_cast<Index>(k)] * h[a.indices[k]];
        const double c = a.rank_coef * sh;
        for (std::size_t k = 0; k < a.indices.size(); ++k) {
            const Index i = a.indices[k];
            out[i] = a.diag_coef * h[i] + c * a.s[static_cast<Index>(k)];
        }
    }
}

Vector apply_M(const ProxDerivativeInfo& info, const Vector& h) {
    Vector out;
    apply_M(info, h, out);
    return out;
}

Matrix assemble_dense_M(const ProxDerivativeInfo& info, Index max_dim) {
    if (info.n > max_dim) {
        throw CapabilityError("assemble_dense_M: dimension " + std::to_string(info.n) +
                              " exceeds the dense bound " + std::to_string(max_dim));
    }
    Matrix M = Matrix::Zero(info.n, info.n);
    for (const auto& a : info.active) {
        const auto k = a.indices.size();
        for (std::size_t p = 0; p < k; ++p) {
            const Index i = a.indices[p];
            M(i, i) += a.diag_coef;
            for (std::size_t q = 0; q < k; ++q) {
                M(i, a.indices[q]) += a.rank_coef * a.s[static_cast<Index>(p)] * a.s[static_cast<Index>(q)];
            }
        }
    }
    return M;
}

} // namespace sgl
