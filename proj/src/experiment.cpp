#include "sgl/experiment.hpp"

#include "sgl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sgl {

LambdaStrategy parse_lambda_strategy(std::string_view name) {
    if (name == "s1" || name == "S1") return LambdaStrategy::S1;
    if (name == "s2" || name == "S2") return LambdaStrategy::S2;
    if (name == "s3" || name == "S3") return LambdaStrategy::S3;
    throw ArgumentError("unknown lambda strategy '" + std::string(name) + "'");
}

std::string_view to_string(LambdaStrategy s) {
    switch (s) {
    case LambdaStrategy::S1: return "s1";
    case LambdaStrategy::S2: return "s2";
    case LambdaStrategy::S3: return "s3";
    }
    return "s1";
}

LambdaPair strategy_lambdas(LambdaStrategy strategy, double gamma, double lmax) {
    if (!(gamma >= 0.0) || !(lmax >= 0.0)) throw ArgumentError("strategy_lambdas: gamma and lmax must be nonnegative");
    const double base = gamma * lmax;
    switch (strategy) {
    case LambdaStrategy::S1: return {base, base};
    case LambdaStrategy::S2: return {0.5 * base, 9.5 * base};
    case LambdaStrategy::S3: return {base, base > 1.0 ? std::sqrt(base) : base * base};
    }
    return {base, base};
}

GammaScanResult gamma_scan(std::shared_ptr<const DesignMatrix> A, const Vector& b,
                           std::shared_ptr<const GroupPartition> partition, LambdaStrategy strategy,
                           std::span<const double> gammas, Index nnz_lo, Index nnz_hi, Index target,
                           const AlmParams& params, int max_bisections) {
    if (gammas.empty()) throw ArgumentError("gamma_scan: empty gamma grid");
    if (nnz_lo > nnz_hi) throw ArgumentError("gamma_scan: empty nnz window");
    const double lmax = lambda_max(*A, b);

    GammaScanResult out;
    std::optional<PrimalDualPoint> warm;
    std::optional<double> below; // largest-nnz gamma still under the window
    std::optional<double> above; // gamma that overshot it

    auto consider = [&](const GammaScanPoint& p, const PrimalDualPoint& sol) {
        out.points.push_back(p);
        if (p.nnz < nnz_lo || p.nnz > nnz_hi) return;
        const auto dist = [&](const GammaScanPoint& q) { return std::abs(static_cast<double>(q.nnz - target)); };
        if (!out.selected || dist(p) < dist(*out.selected)) {
            out.selected = p;
            out.solution = sol;
        }
    };
    auto run = [&](double gamma) {
        const LambdaPair lam = strategy_lambdas(strategy, gamma, lmax);
        const SglProblem prob(A, b, partition, lam.lambda1, lam.lambda2);
        AlmResult res = alm_solve(prob, params, warm);
        warm = res.point;
        GammaScanPoint p{gamma, lam, res.report.nnz, res.report.converged};
        consider(p, res.point);
        return p;
    };

    for (double gamma : gammas) {
        const GammaScanPoint p = run(gamma);
        if (p.nnz > nnz_hi) {
            above = gamma;
            break;
        }
        if (p.nnz < nnz_lo) below = gamma;
    }
    if (!out.selected && below && above) {
        double hi = *below; // sparser side
        double lo = *above;
        for (int it = 0; it < max_bisections && !out.selected; ++it) {
            const double mid = std::sqrt(hi * lo);
            const GammaScanPoint p = run(mid);
            if (p.nnz < nnz_lo) {
                hi = mid;
            } else if (p.nnz > nnz_hi) {
                lo = mid;
            }
        }
    }
    return out;
}

std::map<std::string, std::vector<ProfilePoint>> performance_profile(const std::vector<BenchCell>& cells) {
    constexpr double kTimeFloor = 1e-6;
    std::set<std::string> problems;
    std::set<std::string> solvers;
    std::map<std::string, double> fastest;
    for (const auto& c : cells) {
        problems.insert(c.problem);
        solvers.insert(c.solver);
        if (!c.solved) continue;
        const double t = std::max(c.seconds, kTimeFloor);
        auto [it, inserted] = fastest.try_emplace(c.problem, t);
        if (!inserted) it->second = std::min(it->second, t);
    }

    std::map<std::string, std::vector<ProfilePoint>> out;
    const double total = static_cast<double>(problems.size());
    for (const auto& s : solvers) {
        std::vector<double> ratios;
        for (const auto& c : cells) {
            if (c.solver != s || !c.solved) continue;
            ratios.push_back(std::max(c.seconds, kTimeFloor) / fastest.at(c.problem));
        }
        std::sort(ratios.begin(), ratios.end());
        std::vector<ProfilePoint> curve;
        curve.push_back({1.0, 0.0});
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            const double x = std::max(1.0, ratios[i]);
            const double y = static_cast<double>(i + 1) / total;
            if (x == curve.back().ratio) {
                curve.back().fraction = y;
            } else {
                curve.push_back({x, y});
            }
        }
        out[s] = std::move(curve);
    }
    return out;
}

} // namespace sgl
