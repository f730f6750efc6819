#pragma once

#include "sgl/model.hpp"

#include <cstdint>
#include <vector>

namespace sgl {

// Position of ||v_G|| relative to the ball radius lambda_{2,l}, v = soft_threshold(u, lambda1).
enum class GroupCase : std::uint8_t { Interior, Boundary, Exterior };

/**
 * A group with ||v_G|| > lambda_{2,l}. Its block of M, restricted to the
 * support indices, is diag_coef * I + rank_coef * s s^T.
 */
struct ActiveGroup {
    Index group = 0;
    std::vector<Index> indices; // G_l intersected with supp(v), ascending within the group order
    Vector s;                   // v restricted to indices
    double v_norm = 0.0;
    double diag_coef = 0.0;     // 1 - lambda_{2,l} / ||v_l||
    double rank_coef = 0.0;     // lambda_{2,l} / ||v_l||^3
};

/**
 * One element M of the surrogate generalized Jacobian of Prox_p at u, in the
 * structured form needed by the Newton system. Interior and Boundary groups
 * contribute zero blocks; only Exterior groups are stored.
 */
struct ProxDerivativeInfo {
    Index n = 0;
    std::vector<std::uint8_t> theta; // 1 iff |u_i| > lambda1
    Vector v_norms;                  // ||v_{G_l}|| for every group
    std::vector<GroupCase> case_tag;
    std::vector<ActiveGroup> active;
    Index r = 0;  // sum of |indices| over active groups
    Index r2 = 0; // number of active groups

    std::vector<Index> active_groups() const;
};

ProxDerivativeInfo derivative_info(const Penalty& penalty, const Vector& u);
ProxDerivativeInfo derivative_info(const SglProblem& prob, const Vector& u);

// M h without forming M; O(r) work beyond zeroing the output.
void apply_M(const ProxDerivativeInfo& info, const Vector& h, Vector& out);
Vector apply_M(const ProxDerivativeInfo& info, const Vector& h);

// Dense n x n M. Throws CapabilityError when n > max_dim.
Matrix assemble_dense_M(const ProxDerivativeInfo& info, Index max_dim = 200);

} // namespace sgl
