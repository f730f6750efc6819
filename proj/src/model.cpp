#include "sgl/model.hpp"

#include "sgl/errors.hpp"
#include "sgl/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace sgl {

namespace {

void require_dim(Index got, Index want, const char* what) {
    if (got != want) {
        throw ArgumentError(std::string(what) + ": expected length " + std::to_string(want) +
                            ", got " + std::to_string(got));
    }
}

} // namespace

// ---------------------------------------------------------------------------
// DesignMatrix

DesignMatrix::DesignMatrix(Matrix dense) : rows_(dense.rows()), cols_(dense.cols()) {
    if (rows_ <= 0 || cols_ <= 0) {
        throw ArgumentError("DesignMatrix: dimensions must be positive");
    }
    storage_ = std::move(dense);
}

DesignMatrix::DesignMatrix(SparseMatrix sparse) : rows_(sparse.rows()), cols_(sparse.cols()) {
    if (rows_ <= 0 || cols_ <= 0) {
        throw ArgumentError("DesignMatrix: dimensions must be positive");
    }
    sparse.makeCompressed();
    storage_ = std::move(sparse);
}

DesignMatrix DesignMatrix::from_csc(Index rows, Index cols, std::span<const Index> col_ptr,
                                    std::span<const Index> row_idx, std::span<const double> values) {
    if (rows <= 0 || cols <= 0) {
        throw ArgumentError("from_csc: dimensions must be positive");
    }
    if (static_cast<Index>(col_ptr.size()) != cols + 1) {
        throw ArgumentError("from_csc: column pointer array must have cols + 1 entries");
    }
    if (row_idx.size() != values.size()) {
        throw ArgumentError("from_csc: row index and value arrays differ in length");
    }
    const auto nnz = static_cast<Index>(values.size());
    if (col_ptr.front() != 0 || col_ptr.back() != nnz) {
        throw ArgumentError("from_csc: column pointers must start at 0 and end at nnz");
    }
    std::vector<Eigen::Triplet<double, int>> triplets;
    triplets.reserve(values.size());
    for (Index j = 0; j < cols; ++j) {
        if (col_ptr[j + 1] < col_ptr[j]) {
            throw ArgumentError("from_csc: column pointers must be nondecreasing");
        }
        for (Index k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
            const Index i = row_idx[k];
            if (i < 0 || i >= rows) {
                throw ArgumentError("from_csc: row index out of range in column " + std::to_string(j));
            }
            if (k > col_ptr[j] && row_idx[k - 1] >= i) {
                throw ArgumentError("from_csc: row indices must be strictly increasing in column " +
                                    std::to_string(j));
            }
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), values[k]);
        }
    }
    SparseMatrix S(rows, cols);
    S.setFromTriplets(triplets.begin(), triplets.end());
    return DesignMatrix(std::move(S));
}

Index DesignMatrix::stored_entries() const noexcept {
    if (const auto* S = sparse()) return S->nonZeros();
    return rows_ * cols_;
}

void DesignMatrix::multiply(const Vector& x, Vector& out) const {
    require_dim(x.size(), cols_, "DesignMatrix::multiply");
    out.resize(rows_);
    if (const auto* D = dense()) {
        const Index support = (x.array() != 0.0).count();
        if (4 * support >= cols_) {
            out.noalias() = (*D) * x;
            return;
        }
        out.setZero();
        for (Index j = 0; j < cols_; ++j) {
            if (x[j] != 0.0) out.noalias() += x[j] * D->col(j);
        }
        return;
    }
    const auto& S = *sparse();
    out.setZero();
    for (Index j = 0; j < cols_; ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        for (SparseMatrix::InnerIterator it(S, j); it; ++it) out[it.row()] += it.value() * xj;
    }
}

Vector DesignMatrix::multiply(const Vector& x) const {
    Vector out;
    multiply(x, out);
    return out;
}

void DesignMatrix::adjoint_multiply(const Vector& y, Vector& out) const {
    require_dim(y.size(), rows_, "DesignMatrix::adjoint_multiply");
    out.resize(cols_);
    if (const auto* D = dense()) {
        out.noalias() = D->transpose() * y;
    } else {
        out.noalias() = sparse()->transpose() * y;
    }
}

Vector DesignMatrix::adjoint_multiply(const Vector& y) const {
    Vector out;
    adjoint_multiply(y, out);
    return out;
}

Matrix DesignMatrix::gather_columns(std::span<const Index> cols) const {
    Matrix out(rows_, static_cast<Index>(cols.size()));
    if (const auto* D = dense()) {
        for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = D->col(cols[k]);
        return out;
    }
    const auto& S = *sparse();
    out.setZero();
    for (std::size_t k = 0; k < cols.size(); ++k) {
        for (SparseMatrix::InnerIterator it(S, cols[k]); it; ++it) {
            out(it.row(), static_cast<Index>(k)) = it.value();
        }
    }
    return out;
}

Matrix DesignMatrix::gram() const {
    Matrix G = Matrix::Zero(rows_, rows_);
    if (const auto* D = dense()) {
        G.selfadjointView<Eigen::Lower>().rankUpdate(*D);
    } else {
        const auto& S = *sparse();
        const SparseMatrix SSt = S * S.transpose();
        G = Matrix(SSt);
        return G;
    }
    G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
    return G;
}

Matrix DesignMatrix::to_dense() const {
    if (const auto* D = dense()) return *D;
    return Matrix(*sparse());
}

DesignMatrix DesignMatrix::with_storage(bool want_sparse) const {
    if (want_sparse == is_sparse()) return *this;
    if (want_sparse) {
        SparseMatrix S = dense()->sparseView();
        return DesignMatrix(std::move(S));
    }
    return DesignMatrix(Matrix(*sparse()));
}

// ---------------------------------------------------------------------------
// GroupPartition

namespace {

std::vector<double> scheme_weights(const std::vector<std::vector<Index>>& groups, WeightScheme scheme) {
    std::vector<double> w(groups.size(), 1.0);
    if (scheme == WeightScheme::SqrtSize) {
        for (std::size_t l = 0; l < groups.size(); ++l) w[l] = std::sqrt(static_cast<double>(groups[l].size()));
    }
    return w;
}

} // namespace

GroupPartition::GroupPartition(const std::vector<std::vector<Index>>& groups, Index n, WeightScheme scheme)
    : GroupPartition(groups, n, scheme_weights(groups, scheme)) {}

GroupPartition::GroupPartition(const std::vector<std::vector<Index>>& groups, Index n,
                               std::vector<double> weights)
    : n_(n), weights_(std::move(weights)) {
    if (n <= 0) throw ArgumentError("GroupPartition: dimension must be positive");
    if (groups.empty()) throw ArgumentError("GroupPartition: at least one group is required");
    if (weights_.size() != groups.size()) {
        throw ArgumentError("GroupPartition: one weight per group is required");
    }
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("GroupPartition: weights must be positive");
    }
    build(groups);
}

void GroupPartition::build(const std::vector<std::vector<Index>>& groups) {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    offsets_.assign(1, 0);
    indices_.clear();
    indices_.reserve(static_cast<std::size_t>(n_));
    for (std::size_t l = 0; l < groups.size(); ++l) {
        if (groups[l].empty()) {
            throw ArgumentError("GroupPartition: group " + std::to_string(l) + " is empty");
        }
        for (Index i : groups[l]) {
            if (i < 0 || i >= n_) {
                throw ArgumentError("GroupPartition: index " + std::to_string(i) + " out of range");
            }
            if (seen[i]) {
                throw ArgumentError("GroupPartition: index " + std::to_string(i) + " appears in two groups");
            }
            seen[i] = 1;
            indices_.push_back(i);
        }
        offsets_.push_back(static_cast<Index>(indices_.size()));
    }
    if (static_cast<Index>(indices_.size()) != n_) {
        throw ArgumentError("GroupPartition: groups do not cover every coordinate");
    }
}

GroupPartition GroupPartition::contiguous(std::span<const Index> sizes, WeightScheme scheme) {
    std::vector<std::vector<Index>> groups;
    groups.reserve(sizes.size());
    Index next = 0;
    for (Index s : sizes) {
        if (s <= 0) throw ArgumentError("GroupPartition::contiguous: group sizes must be positive");
        std::vector<Index> g(static_cast<std::size_t>(s));
        std::iota(g.begin(), g.end(), next);
        next += s;
        groups.push_back(std::move(g));
    }
    return GroupPartition(groups, next, scheme);
}

GroupPartition GroupPartition::from_ids(std::span<const long long> ids, WeightScheme scheme) {
    std::unordered_map<long long, std::size_t> dense_id;
    std::vector<std::vector<Index>> groups;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto [it, inserted] = dense_id.try_emplace(ids[i], groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(static_cast<Index>(i));
    }
    return GroupPartition(groups, static_cast<Index>(ids.size()), scheme);
}

std::vector<Index> GroupPartition::group_ids() const {
    std::vector<Index> ids(static_cast<std::size_t>(n_));
    for (Index l = 0; l < num_groups(); ++l) {
        for (Index i : group(l)) ids[i] = l;
    }
    return ids;
}

// ---------------------------------------------------------------------------
// Penalty / SglProblem

Penalty::Penalty(std::shared_ptr<const GroupPartition> partition, double lambda1, double lambda2)
    : partition_(std::move(partition)), lambda1_(lambda1), lambda2_(lambda2) {
    if (!partition_) throw ArgumentError("Penalty: partition is required");
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !std::isfinite(lambda1) || !std::isfinite(lambda2)) {
        throw ArgumentError("Penalty: lambda1 and lambda2 must be finite and nonnegative");
    }
    group_lambda2_.resize(static_cast<std::size_t>(partition_->num_groups()));
    for (Index l = 0; l < partition_->num_groups(); ++l) group_lambda2_[l] = lambda2 * partition_->weight(l);
}

double Penalty::value(const Vector& x) const {
    require_dim(x.size(), dimension(), "Penalty::value");
    double group_term = 0.0;
    for (Index l = 0; l < partition_->num_groups(); ++l) {
        double sq = 0.0;
        for (Index i : partition_->group(l)) sq += x[i] * x[i];
        group_term += group_lambda2_[l] * std::sqrt(sq);
    }
    return lambda1_ * x.lpNorm<1>() + group_term;
}

Penalty Penalty::scaled(double factor) const {
    if (!(factor > 0.0)) throw ArgumentError("Penalty::scaled: factor must be positive");
    return Penalty(partition_, factor * lambda1_, factor * lambda2_);
}

SglProblem::SglProblem(std::shared_ptr<const DesignMatrix> A, Vector b,
                       std::shared_ptr<const GroupPartition> partition, double lambda1, double lambda2)
    : A_(std::move(A)), b_(std::move(b)), penalty_(std::move(partition), lambda1, lambda2) {
    if (!A_) throw ArgumentError("SglProblem: design matrix is required");
    require_dim(b_.size(), A_->rows(), "SglProblem: response vector");
    if (penalty_.dimension() != A_->cols()) {
        throw ArgumentError("SglProblem: partition dimension does not match the number of columns");
    }
    if (!(lambda1 + lambda2 > 0.0)) {
        throw ArgumentError("SglProblem: lambda1 + lambda2 must be positive");
    }
    if (!b_.allFinite()) throw ArgumentError("SglProblem: response vector has non-finite entries");
}

PrimalDualPoint PrimalDualPoint::zeros(const SglProblem& prob) {
    return {Vector::Zero(prob.n()), Vector::Zero(prob.m()), Vector::Zero(prob.n())};
}

// ---------------------------------------------------------------------------
// Objectives and metrics

double primal_objective(const SglProblem& prob, const Vector& x) {
    require_dim(x.size(), prob.n(), "primal_objective");
    const Vector r = prob.A().multiply(x) - prob.b();
    return 0.5 * r.squaredNorm() + prob.penalty().value(x);
}

double dual_objective(const SglProblem& prob, const Vector& y) {
    require_dim(y.size(), prob.m(), "dual_objective");
    return -prob.b().dot(y) - 0.5 * y.squaredNorm();
}

EtaMetrics eta_metrics(const SglProblem& prob, const PrimalDualPoint& pt) {
    require_dim(pt.y.size(), prob.m(), "eta_metrics: y");
    return eta_metrics(prob, pt, prob.A().adjoint_multiply(pt.y));
}

EtaMetrics eta_metrics(const SglProblem& prob, const PrimalDualPoint& pt, const Vector& aty) {
    require_dim(pt.x.size(), prob.n(), "eta_metrics: x");
    require_dim(pt.y.size(), prob.m(), "eta_metrics: y");
    require_dim(pt.z.size(), prob.n(), "eta_metrics: z");
    require_dim(aty.size(), prob.n(), "eta_metrics: A^T y");
    EtaMetrics out;
    out.pobj = primal_objective(prob, pt.x);
    out.dobj = dual_objective(prob, pt.y);
    out.eta_gap = std::abs(out.pobj - out.dobj) / (1.0 + std::abs(out.pobj) + std::abs(out.dobj));
    out.eta_dual = (aty + pt.z).norm() / (1.0 + pt.z.norm());
    return out;
}

double eta_primal(double pobj, double obj_other) {
    return (obj_other - pobj) / (1.0 + std::abs(obj_other) + std::abs(pobj));
}

Index nnz_estimate(const Vector& x) {
    std::vector<double> mag(static_cast<std::size_t>(x.size()));
    for (Index i = 0; i < x.size(); ++i) mag[i] = std::abs(x[i]);
    std::stable_sort(mag.begin(), mag.end(), std::greater<>());
    // Sum in sorted order so the final partial sum equals the total exactly.
    const double total = std::accumulate(mag.begin(), mag.end(), 0.0);
    if (total == 0.0) return 0;
    const double threshold = 0.999 * total;
    double partial = 0.0;
    for (std::size_t k = 0; k < mag.size(); ++k) {
        partial += mag[k];
        if (partial >= threshold) return static_cast<Index>(k + 1);
    }
    return static_cast<Index>(mag.size());
}

double kkt_residual(const SglProblem& prob, const Vector& x) {
    require_dim(x.size(), prob.n(), "kkt_residual");
    const Vector grad = prob.A().adjoint_multiply(prob.A().multiply(x) - prob.b());
    const Vector step = x - grad;
    return (x - prox_p(prob.penalty(), step)).norm();
}

double lambda_max(const DesignMatrix& A, const Vector& b) {
    return A.adjoint_multiply(b).cwiseAbs().maxCoeff();
}

} // namespace sgl
