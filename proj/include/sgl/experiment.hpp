#pragma once

#include "sgl/alm.hpp"
#include "sgl/model.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sgl {

/**
 * Regularization parameter strategies, all scaled by lmax = ||A^T b||_inf:
 *   s1: lambda1 = lambda2 = gamma lmax
 *   s2: lambda1 = 0.5 gamma lmax, lambda2 = 9.5 gamma lmax
 *   s3: lambda1 = gamma lmax, lambda2 = sqrt(lambda1) if lambda1 > 1 else lambda1^2
 */
enum class LambdaStrategy { S1, S2, S3 };

LambdaStrategy parse_lambda_strategy(std::string_view name);
std::string_view to_string(LambdaStrategy s);

struct LambdaPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

LambdaPair strategy_lambdas(LambdaStrategy strategy, double gamma, double lmax);

struct GammaScanPoint {
    double gamma = 0.0;
    LambdaPair lambdas;
    Index nnz = 0;
    bool converged = false;
};

struct GammaScanResult {
    std::vector<GammaScanPoint> points;
    std::optional<GammaScanPoint> selected; // nnz within [nnz_lo, nnz_hi], closest to target
    PrimalDualPoint solution;               // solution at the selected gamma
};

/**
 * Walks gammas (expected in decreasing order, i.e. increasing density) with
 * warm starts, stops once nnz exceeds nnz_hi, and bisects in log(gamma)
 * between the bracketing points if no grid value landed in range.
 */
GammaScanResult gamma_scan(std::shared_ptr<const DesignMatrix> A, const Vector& b,
                           std::shared_ptr<const GroupPartition> partition, LambdaStrategy strategy,
                           std::span<const double> gammas, Index nnz_lo, Index nnz_hi, Index target,
                           const AlmParams& params, int max_bisections = 20);

// One (problem, solver) cell of a benchmark grid.
struct BenchCell {
    std::string problem;
    std::string solver;
    double seconds = 0.0;
    bool solved = false;
};

struct ProfilePoint {
    double ratio = 1.0;
    double fraction = 0.0;
};

/**
 * Performance profile: a point (x, y) lies on a solver's curve when the
 * solver solves a fraction y of all problems within x times the fastest
 * solver's time on each problem. Unsolved cells never count. Every curve
 * starts at x = 1.
 */
std::map<std::string, std::vector<ProfilePoint>> performance_profile(const std::vector<BenchCell>& cells);

} // namespace sgl
