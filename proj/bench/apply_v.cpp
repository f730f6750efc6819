// Cost of one product with V = I + sigma A M A^T: the structured apply versus
// two full matrix-vector products with A.

#include "sgl/jacobian.hpp"
#include "sgl/newton_system.hpp"
#include "sgl/rng.hpp"

#include <chrono>
#include <cstdio>

using namespace sgl;

namespace {

template <class F>
double time_per_call(F&& f, int reps) {
    f();
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

} // namespace

int main() {
    const Index m = 500, n = 50000, group = 10;
    Xoshiro256 rng(11);
    Matrix A(m, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i) A(i, j) = rng.normal();
    const DesignMatrix design(A);

    const std::vector<Index> sizes(static_cast<std::size_t>(n / group), group);
    const Penalty pen(std::make_shared<const GroupPartition>(GroupPartition::contiguous(sizes)), 1.0, 1.0);
    // Six groups with nine entries past the threshold each: r = 54, r2 = 6.
    Vector u = Vector::Zero(n);
    for (Index l = 0; l < 6; ++l)
        for (Index k = 0; k < 9; ++k) u[l * 800 * group + k] = (k % 2 ? 3.0 : -3.0);
    const ProxDerivativeInfo info = derivative_info(pen, u);
    const double sigma = 2.0;
    const NewtonSystem sys = NewtonSystem::build(design, sigma, info, NewtonStrategy::Woodbury);

    Vector h(m);
    for (Index i = 0; i < m; ++i) h[i] = rng.normal();
    Vector out(m), dense_out(m);

    const double t_apply = time_per_call([&] { sys.apply(h, out); }, 2000);
    const double t_dense = time_per_call(
        [&] { dense_out = h + sigma * design.multiply(apply_M(info, design.adjoint_multiply(h))); }, 20);
    const double diff = (out - dense_out).norm() / dense_out.norm();
    const double speedup = t_dense / t_apply;

    std::printf("m = %lld, n = %lld, r + r2 = %lld\n", static_cast<long long>(m), static_cast<long long>(n),
                static_cast<long long>(info.r + info.r2));
    std::printf("structured apply: %.3e s\n", t_apply);
    std::printf("dense pair:       %.3e s\n", t_dense);
    std::printf("relative difference %.2e, speedup %.1fx (need >= 10x): %s\n", diff, speedup,
                speedup >= 10.0 && diff <= 1e-10 ? "PASS" : "FAIL");
    return speedup >= 10.0 && diff <= 1e-10 ? 0 : 1;
}
