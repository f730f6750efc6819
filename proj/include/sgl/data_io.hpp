#pragma once

#include "sgl/model.hpp"
#include "sgl/rng.hpp"
#include "sgl/trace.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sgl {

// ---------------------------------------------------------------------------
// Synthetic instances

struct SyntheticInstance {
    Matrix A;
    Vector b;
    std::vector<Index> group_sizes; // contiguous groups
    Vector x_true;
};

/**
 * A ~ N(0, 1) filled column by column; contiguous groups whose sizes are
 * drawn uniformly from [n/g - n/(4g), n/g + n/(4g)] and then nudged one unit
 * at a time (from the last group backwards) until they sum to n; the first
 * min(10, g) groups carry (1, 2, ..., 10, 0, ...); b = A x + noise_std * N(0, 1).
 */
SyntheticInstance gen_synthetic(Index m, Index n, Index g, std::uint64_t seed, double noise_std = 1.0);

// The group-size draw used by gen_synthetic, on its own seeded stream.
std::vector<Index> random_group_sizes(Index n, Index g, std::uint64_t seed);

// ---------------------------------------------------------------------------
// LIBSVM text format: "<label> <idx>:<val> ..." with 1-based ascending indices.

struct LibsvmData {
    DesignMatrix A;
    Vector b;
};

// n is the largest index seen unless num_features is given (it must not be smaller).
LibsvmData read_libsvm(const std::filesystem::path& path, std::optional<Index> num_features = std::nullopt);
LibsvmData parse_libsvm(std::istream& in, std::optional<Index> num_features = std::nullopt);

// Writes stored nonzeros only, shortest round-trip decimal formatting.
void write_libsvm(const std::filesystem::path& path, const DesignMatrix& A, const Vector& b);
void write_libsvm(std::ostream& out, const DesignMatrix& A, const Vector& b);

// ---------------------------------------------------------------------------
// Group files: one positive integer group id per coordinate, one per line.

GroupPartition read_groups(const std::filesystem::path& path, Index n, WeightScheme scheme = WeightScheme::SqrtSize);
GroupPartition parse_groups(std::istream& in, Index n, WeightScheme scheme = WeightScheme::SqrtSize);
void write_groups(const std::filesystem::path& path, const GroupPartition& partition);
// The raw ids, validated but not checked against any dimension.
std::vector<long long> parse_group_ids(std::istream& in);
std::vector<long long> read_group_ids(const std::filesystem::path& path);

// One value per line, shortest round-trip formatting.
void write_vector(const std::filesystem::path& path, const Vector& v);
Vector read_vector(const std::filesystem::path& path);

// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

// ---------------------------------------------------------------------------
// Reports and traces

nlohmann::json report_to_json(const SolveReport& report, const nlohmann::json& config);
SolveReport report_from_json(const nlohmann::json& j);

void write_report(const SolveReport& report, const nlohmann::json& config, const std::filesystem::path& path);

struct ReportFile {
    SolveReport report;
    nlohmann::json config;
};
ReportFile read_report(const std::filesystem::path& path);

nlohmann::json trace_to_json(const TraceRecord& rec);

// Appends one JSON object per line. The returned sink keeps the file open.
TraceSink open_trace(const std::filesystem::path& path);

} // namespace sgl
