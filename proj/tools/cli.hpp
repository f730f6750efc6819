#pragma once

#include "sgl/model.hpp"
#include "sgl/trace.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sgl::cli {

enum ExitCode : int { kSuccess = 0, kNotConverged = 1, kUsage = 2 };

// Entry point shared by the sglasso binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Where a problem's data comes from: a LIBSVM file or the synthetic generator.
struct InstanceSpec {
    std::string name;
    // LIBSVM source
    std::filesystem::path data;
    std::filesystem::path groups;
    std::optional<Index> avg_group_size;
    std::optional<Index> num_features;
    std::string storage = "auto"; // auto | dense | sparse
    // synthetic source, used when data is empty
    Index gen_m = 0;
    Index gen_n = 0;
    Index gen_g = 0;
    double noise_std = 1.0;

    std::uint64_t seed = 0;
    std::string weights = "sqrt"; // sqrt | one
};

struct LoadedInstance {
    std::shared_ptr<const DesignMatrix> A;
    Vector b;
    std::shared_ptr<const GroupPartition> partition;
    nlohmann::json config;
};

LoadedInstance load_instance(const InstanceSpec& spec);

struct SolverSpec {
    std::string solver = "ssnal"; // ssnal | admm
    double tol = 1e-6;
    std::optional<int> max_outer; // ALM outer iterations, or ADMM iterations
    std::string newton = "auto";
    std::optional<double> sigma0;
};

struct SolverRun {
    SolveReport report;
    nlohmann::json config;
    PrimalDualPoint point;
    std::string error; // nonempty when the solver threw
};

// Never throws for solver-side failures; those come back in error with converged = false.
SolverRun run_solver(const SglProblem& prob, const SolverSpec& spec, const TraceSink& trace = {});

} // namespace sgl::cli
