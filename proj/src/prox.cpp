#include "sgl/prox.hpp"

#include "sgl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sgl {

namespace {

inline double soft(double u, double c) {
    const double a = std::abs(u) - c;
    return a > 0.0 ? std::copysign(a, u) : 0.0;
}

void check_dim(const Penalty& penalty, Index size, const char* what) {
    if (size != penalty.dimension()) {
        throw ArgumentError(std::string(what) + ": expected length " + std::to_string(penalty.dimension()) +
                            ", got " + std::to_string(size));
    }
}

} // namespace

void soft_threshold(const Eigen::Ref<const Vector>& u, double c, Eigen::Ref<Vector> out) {
    if (!(c >= 0.0)) throw ArgumentError("soft_threshold: threshold must be nonnegative");
    if (out.size() != u.size()) throw ArgumentError("soft_threshold: output has wrong length");
    for (Index i = 0; i < u.size(); ++i) out[i] = soft(u[i], c);
}

Vector soft_threshold(const Eigen::Ref<const Vector>& u, double c) {
    Vector out(u.size());
    soft_threshold(u, c, out);
    return out;
}

Vector group_shrink(const Eigen::Ref<const Vector>& u, double c) {
    if (!(c >= 0.0)) throw ArgumentError("group_shrink: threshold must be nonnegative");
    const double norm = u.norm();
    if (norm <= c) return Vector::Zero(u.size());
    return u * ((norm - c) / norm);
}

Vector project_l2_ball(const Eigen::Ref<const Vector>& v, double radius) {
    if (!(radius > 0.0)) throw ArgumentError("project_l2_ball: radius must be positive");
    const double norm = v.norm();
    if (norm <= radius) return v;
    return v * (radius / norm);
}

void prox_p(const Penalty& penalty, const Vector& u, Vector& out) {
    check_dim(penalty, u.size(), "prox_p");
    if (&out != &u) out.resize(u.size());
    const double lambda1 = penalty.lambda1();
    const GroupPartition& part = penalty.partition();
    for (Index l = 0; l < part.num_groups(); ++l) {
        const auto idx = part.group(l);
        double sq = 0.0;
        for (Index i : idx) {
            const double v = soft(u[i], lambda1);
            out[i] = v;
            sq += v * v;
        }
        const double c = penalty.group_lambda2(l);
        if (c == 0.0) continue;
        const double norm = std::sqrt(sq);
        if (norm <= c) {
            for (Index i : idx) out[i] = 0.0;
        } else {
            const double scale = (norm - c) / norm;
            for (Index i : idx) out[i] *= scale;
        }
    }
}

Vector prox_p(const Penalty& penalty, const Vector& u) {
    Vector out(u.size());
    prox_p(penalty, u, out);
    return out;
}

Vector prox_p(const SglProblem& prob, const Vector& u) { return prox_p(prob.penalty(), u); }

Vector prox_conjugate_residual(const Penalty& penalty, const Vector& w) {
    return w - prox_p(penalty, w);
}

Vector prox_conjugate_residual(const SglProblem& prob, const Vector& w) {
    return prox_conjugate_residual(prob.penalty(), w);
}

double dual_feasibility_gap(const Penalty& penalty, const Vector& z) {
    check_dim(penalty, z.size(), "dual_feasibility_gap");
    const double lambda1 = penalty.lambda1();
    const GroupPartition& part = penalty.partition();
    double gap = 0.0;
    for (Index l = 0; l < part.num_groups(); ++l) {
        double sq = 0.0;
        for (Index i : part.group(l)) {
            const double excess = std::max(std::abs(z[i]) - lambda1, 0.0);
            sq += excess * excess;
        }
        gap = std::max(gap, std::sqrt(sq) - penalty.group_lambda2(l));
    }
    return gap;
}

double dual_feasibility_gap(const SglProblem& prob, const Vector& z) {
    return dual_feasibility_gap(prob.penalty(), z);
}

} // namespace sgl
