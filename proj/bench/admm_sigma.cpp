// ADMM with and without sigma tuning, from the default sigma0 and from sigma0 = 1.

#include "sgl/admm.hpp"
#include "sgl/data_io.hpp"

#include <cstdio>

using namespace sgl;

int main() {
    const SyntheticInstance inst = gen_synthetic(100, 1000, 50, 3);
    auto A = std::make_shared<const DesignMatrix>(inst.A);
    auto part = std::make_shared<const GroupPartition>(GroupPartition::contiguous(inst.group_sizes));
    const double lam = 0.1 * lambda_max(*A, inst.b);
    const SglProblem prob(A, inst.b, part, lam, lam);

    std::printf("%-10s %-7s %8s %8s %6s %10s %10s\n", "sigma0", "tuning", "iters", "seconds", "facts", "final", "eta_A");
    for (double sigma0 : {admm_default_sigma0(*A), 1.0}) {
        for (bool tuning : {true, false}) {
            AdmmParams p;
            p.sigma0 = sigma0;
            p.sigma_tuning = tuning;
            p.record_history = true;
            const AdmmResult r = admm_solve(prob, p);
            std::printf("%-10.3g %-7s %8d %8.3f %6d %10.3g %10.2e%s\n", sigma0, tuning ? "on" : "off",
                        r.report.outer_iters, r.report.wall_seconds, r.factorizations,
                        r.history.empty() ? sigma0 : r.history.back().sigma, r.report.eta_max(),
                        r.report.converged ? "" : "  (not converged)");
        }
    }
    return 0;
}
