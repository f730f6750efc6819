#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sgl {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/**
 * The linear map A : R^n -> R^m, stored either densely (column-major) or in
 * compressed-sparse-column form. Every solver touches A only through the
 * products and column gathers below.
 */
class DesignMatrix {
public:
    explicit DesignMatrix(Matrix dense);
    explicit DesignMatrix(SparseMatrix sparse);

    // Validates the raw CSC arrays: nondecreasing column pointers ending at
    // nnz, strictly increasing in-range row indices within each column.
    static DesignMatrix from_csc(Index rows, Index cols, std::span<const Index> col_ptr,
                                 std::span<const Index> row_idx, std::span<const double> values);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    bool is_sparse() const noexcept { return std::holds_alternative<SparseMatrix>(storage_); }
    // Stored entries (m*n for dense storage).
    Index stored_entries() const noexcept;

    // out = A x. Columns with x_j == 0 are skipped when x is sparse enough.
    void multiply(const Vector& x, Vector& out) const;
    Vector multiply(const Vector& x) const;

    // out = A^T y
    void adjoint_multiply(const Vector& y, Vector& out) const;
    Vector adjoint_multiply(const Vector& y) const;

    // Dense m x |cols| copy of the selected columns, in the given order.
    Matrix gather_columns(std::span<const Index> cols) const;

    // A A^T as a dense m x m matrix.
    Matrix gram() const;

    Matrix to_dense() const;
    // Dense -> CSC (dropping exact zeros) or CSC -> dense.
    DesignMatrix with_storage(bool sparse) const;

    const Matrix* dense() const noexcept { return std::get_if<Matrix>(&storage_); }
    const SparseMatrix* sparse() const noexcept { return std::get_if<SparseMatrix>(&storage_); }

private:
    std::variant<Matrix, SparseMatrix> storage_;
    Index rows_ = 0;
    Index cols_ = 0;
};

enum class WeightScheme { SqrtSize, Unit };

/**
 * Partition of {0, ..., n-1} into g disjoint nonempty groups with positive
 * weights w_l. Indices are stored flat with CSR-style offsets.
 */
class GroupPartition {
public:
    GroupPartition(const std::vector<std::vector<Index>>& groups, Index n,
                   WeightScheme scheme = WeightScheme::SqrtSize);
    GroupPartition(const std::vector<std::vector<Index>>& groups, Index n,
                   std::vector<double> weights);

    // Adjacent groups of the given sizes covering {0, ..., sum(sizes)-1}.
    static GroupPartition contiguous(std::span<const Index> sizes,
                                     WeightScheme scheme = WeightScheme::SqrtSize);

    // One group id per coordinate. Ids may be arbitrary integers; groups are
    // numbered densely in order of first appearance.
    static GroupPartition from_ids(std::span<const long long> ids,
                                   WeightScheme scheme = WeightScheme::SqrtSize);

    Index num_groups() const noexcept { return static_cast<Index>(weights_.size()); }
    Index dimension() const noexcept { return n_; }

    std::span<const Index> group(Index l) const noexcept {
        return {indices_.data() + offsets_[l], static_cast<std::size_t>(offsets_[l + 1] - offsets_[l])};
    }
    Index group_size(Index l) const noexcept { return offsets_[l + 1] - offsets_[l]; }
    double weight(Index l) const noexcept { return weights_[l]; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    // 0-based group id of every coordinate.
    std::vector<Index> group_ids() const;

private:
    void build(const std::vector<std::vector<Index>>& groups);

    Index n_ = 0;
    std::vector<Index> indices_;
    std::vector<Index> offsets_;
    std::vector<double> weights_;
};

/**
 * p(x) = lambda1 ||x||_1 + lambda2 sum_l w_l ||x_{G_l}||.
 * Caches lambda_{2,l} = lambda2 * w_l per group.
 */
class Penalty {
public:
    Penalty(std::shared_ptr<const GroupPartition> partition, double lambda1, double lambda2);

    double lambda1() const noexcept { return lambda1_; }
    double lambda2() const noexcept { return lambda2_; }
    const GroupPartition& partition() const noexcept { return *partition_; }
    const std::shared_ptr<const GroupPartition>& partition_ptr() const noexcept { return partition_; }
    double group_lambda2(Index l) const noexcept { return group_lambda2_[l]; }
    Index dimension() const noexcept { return partition_->dimension(); }

    double value(const Vector& x) const;

    // Penalty with both parameters multiplied by factor > 0.
    Penalty scaled(double factor) const;

private:
    std::shared_ptr<const GroupPartition> partition_;
    double lambda1_;
    double lambda2_;
    std::vector<double> group_lambda2_;
};

/// min_x 1/2 ||Ax - b||^2 + p(x). Immutable; lambda1 + lambda2 > 0.
class SglProblem {
public:
    SglProblem(std::shared_ptr<const DesignMatrix> A, Vector b,
               std::shared_ptr<const GroupPartition> partition, double lambda1, double lambda2);

    const DesignMatrix& A() const noexcept { return *A_; }
    const std::shared_ptr<const DesignMatrix>& A_ptr() const noexcept { return A_; }
    const Vector& b() const noexcept { return b_; }
    const Penalty& penalty() const noexcept { return penalty_; }
    const GroupPartition& partition() const noexcept { return penalty_.partition(); }
    double lambda1() const noexcept { return penalty_.lambda1(); }
    double lambda2() const noexcept { return penalty_.lambda2(); }
    Index m() const noexcept { return A_->rows(); }
    Index n() const noexcept { return A_->cols(); }

private:
    std::shared_ptr<const DesignMatrix> A_;
    Vector b_;
    Penalty penalty_;
};

struct PrimalDualPoint {
    Vector x;
    Vector y;
    Vector z;

    static PrimalDualPoint zeros(const SglProblem& prob);
};

struct SolveReport {
    double pobj = 0.0;
    double dobj = 0.0;
    double eta_gap = 0.0;
    double eta_dual = 0.0;
    Index nnz = 0;
    int outer_iters = 0;
    int inner_iters = 0;
    double wall_seconds = 0.0;
    std::string solver_name;
    bool converged = false;

    double eta_max() const noexcept { return eta_gap > eta_dual ? eta_gap : eta_dual; }
};

struct EtaMetrics {
    double eta_gap = 0.0;
    double eta_dual = 0.0;
    double pobj = 0.0;
    double dobj = 0.0;
};

double primal_objective(const SglProblem& prob, const Vector& x);
double dual_objective(const SglProblem& prob, const Vector& y);

// Relative duality gap and relative dual infeasibility at (x, y, z).
EtaMetrics eta_metrics(const SglProblem& prob, const PrimalDualPoint& pt);
// Same, reusing a precomputed A^T y.
EtaMetrics eta_metrics(const SglProblem& prob, const PrimalDualPoint& pt, const Vector& aty);

// Relative objective difference between another solver's objective and pobj.
double eta_primal(double pobj, double obj_other);

// Smallest k such that the k largest |x_i| sum to at least 0.999 ||x||_1.
Index nnz_estimate(const Vector& x);

// ||x - Prox_p(x - A^T(Ax - b))||
double kkt_residual(const SglProblem& prob, const Vector& x);

// ||A^T b||_inf
double lambda_max(const DesignMatrix& A, const Vector& b);

} // namespace sgl
