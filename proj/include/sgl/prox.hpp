#pragma once

#include "sgl/model.hpp"

namespace sgl {

// sign(u) .* max(|u| - c, 0). out may alias u.
void soft_threshold(const Eigen::Ref<const Vector>& u, double c, Eigen::Ref<Vector> out);
Vector soft_threshold(const Eigen::Ref<const Vector>& u, double c);

// (u / ||u||) max(||u|| - c, 0), and 0 at u = 0.
Vector group_shrink(const Eigen::Ref<const Vector>& u, double c);

// Euclidean projection onto {v : ||v|| <= radius}.
Vector project_l2_ball(const Eigen::Ref<const Vector>& v, double radius);

/**
 * Exact proximal map of the sparse group Lasso penalty. Per group this is
 * group_shrink(soft_threshold(u_G, lambda1), lambda_{2,l}); the composition is
 * exact because the groups are disjoint. out may alias u.
 */
void prox_p(const Penalty& penalty, const Vector& u, Vector& out);
Vector prox_p(const Penalty& penalty, const Vector& u);
Vector prox_p(const SglProblem& prob, const Vector& u);

// w - Prox_p(w), i.e. Prox_{p*}(w). The result lies in dom p*, where p* = 0.
Vector prox_conjugate_residual(const Penalty& penalty, const Vector& w);
Vector prox_conjugate_residual(const SglProblem& prob, const Vector& w);

/**
 * Distance-like membership test for dom p* = prod_l (lambda1 B_inf + lambda_{2,l} B_2):
 * max_l ( ||max(|z_G| - lambda1, 0)|| - lambda_{2,l} ), clamped below at 0.
 */
double dual_feasibility_gap(const Penalty& penalty, const Vector& z);
double dual_feasibility_gap(const SglProblem& prob, const Vector& z);

} // namespace sgl
