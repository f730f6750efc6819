#include "sgl/data_io.hpp"

#include "sgl/errors.hpp"
#include "sgl/rng.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string_view>

namespace sgl {

// ---------------------------------------------------------------------------
// Synthetic instances

namespace {

std::vector<Index> draw_group_sizes(Index n, Index g, Xoshiro256& rng) {
    const Index base = n / g;
    const Index spread = n / (4 * g);
    std::vector<Index> sizes(static_cast<std::size_t>(g));
    Index total = 0;
    for (auto& s : sizes) {
        s = rng.uniform_int(base - spread, base + spread);
        total += s;
    }
    Index diff = n - total;
    for (Index pos = g - 1; diff != 0; pos = (pos == 0 ? g - 1 : pos - 1)) {
        auto& s = sizes[static_cast<std::size_t>(pos)];
        if (diff > 0) {
            ++s;
            --diff;
        } else if (s > 1) {
            --s;
            ++diff;
        }
    }
    return sizes;
}

} // namespace

std::vector<Index> random_group_sizes(Index n, Index g, std::uint64_t seed) {
    if (g < 1 || n < g) throw ArgumentError("random_group_sizes: need 1 <= g <= n");
    Xoshiro256 rng(seed);
    return draw_group_sizes(n, g, rng);
}

SyntheticInstance gen_synthetic(Index m, Index n, Index g, std::uint64_t seed, double noise_std) {
    if (m < 1) throw ArgumentError("gen_synthetic: m must be positive");
    if (g < 1 || n < g) throw ArgumentError("gen_synthetic: need 1 <= g <= n");
    if (!(noise_std >= 0.0)) throw ArgumentError("gen_synthetic: noise_std must be nonnegative");

    Xoshiro256 rng(seed);
    SyntheticInstance inst;
    inst.group_sizes = draw_group_sizes(n, g, rng);

    inst.A.resize(m, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) inst.A(i, j) = rng.normal();
    }

    inst.x_true = Vector::Zero(n);
    Index offset = 0;
    for (Index l = 0; l < g; ++l) {
        const Index size = inst.group_sizes[static_cast<std::size_t>(l)];
        if (l < 10) {
            for (Index k = 0; k < std::min<Index>(10, size); ++k) inst.x_true[offset + k] = static_cast<double>(k + 1);
        }
        offset += size;
    }

    inst.b = inst.A * inst.x_true;
    if (noise_std > 0.0) {
        for (Index i = 0; i < m; ++i) inst.b[i] += noise_std * rng.normal();
    }
    return inst;
}

// ---------------------------------------------------------------------------
// Number formatting

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_real(std::string_view tok, std::size_t line, const char* what) {
    // from_chars rejects a leading '+', which some writers emit.
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError(std::string("malformed ") + what + " '" + std::string(tok) + "'", line);
    }
    return v;
}

long long parse_integer(std::string_view tok, std::size_t line, const char* what) {
    long long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ParseError(std::string("malformed ") + what + " '" + std::string(tok) + "'", line);
    }
    return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// LIBSVM

LibsvmData parse_libsvm(std::istream& in, std::optional<Index> num_features) {
    std::vector<double> labels;
    std::vector<Eigen::Triplet<double, int>> triplets;
    Index max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        const Index row = static_cast<Index>(labels.size());
        labels.push_back(parse_real(toks[0], line_no, "label"));
        long long prev = 0;
        for (std::size_t t = 1; t < toks.size(); ++t) {
            const auto colon = toks[t].find(':');
            if (colon == std::string_view::npos) {
                throw ParseError("expected <index>:<value>, got '" + std::string(toks[t]) + "'", line_no);
            }
            const long long idx = parse_integer(toks[t].substr(0, colon), line_no, "feature index");
            if (idx < 1) throw ParseError("feature index must be >= 1", line_no);
            if (idx <= prev) throw ParseError("feature indices must be strictly ascending", line_no);
            if (idx > std::numeric_limits<int>::max()) throw ParseError("feature index too large", line_no);
            prev = idx;
            const double val = parse_real(toks[t].substr(colon + 1), line_no, "feature value");
            max_index = std::max<Index>(max_index, idx);
            if (val != 0.0) triplets.emplace_back(static_cast<int>(row), static_cast<int>(idx - 1), val);
        }
    }
    if (labels.empty()) throw ParseError("no data rows", 0);
    Index n = max_index;
    if (num_features) {
        if (*num_features < max_index) {
            throw ParseError("feature index " + std::to_string(max_index) + " exceeds the declared feature count " +
                                 std::to_string(*num_features),
                             0);
        }
        n = *num_features;
    }
    if (n < 1) throw ParseError("no features", 0);
    SparseMatrix S(static_cast<Index>(labels.size()), n);
    S.setFromTriplets(triplets.begin(), triplets.end());
    Vector b = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
    return {DesignMatrix(std::move(S)), std::move(b)};
}

LibsvmData read_libsvm(const std::filesystem::path& path, std::optional<Index> num_features) {
    auto in = open_in(path);
    return parse_libsvm(in, num_features);
}

void write_libsvm(std::ostream& out, const DesignMatrix& A, const Vector& b) {
    if (b.size() != A.rows()) throw ArgumentError("write_libsvm: label vector has wrong length");
    // Row-major view for line-by-line output.
    const Eigen::SparseMatrix<double, Eigen::RowMajor, int> R =
        A.is_sparse() ? Eigen::SparseMatrix<double, Eigen::RowMajor, int>(*A.sparse())
                      : Eigen::SparseMatrix<double, Eigen::RowMajor, int>(A.dense()->sparseView());
    std::string line;
    for (Index i = 0; i < R.rows(); ++i) {
        line = format_double(b[i]);
        for (Eigen::SparseMatrix<double, Eigen::RowMajor, int>::InnerIterator it(R, i); it; ++it) {
            line += ' ';
            line += std::to_string(it.col() + 1);
            line += ':';
            line += format_double(it.value());
        }
        line += '\n';
        out << line;
    }
}

void write_libsvm(const std::filesystem::path& path, const DesignMatrix& A, const Vector& b) {
    auto out = open_out(path);
    write_libsvm(out, A, b);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Groups

std::vector<long long> parse_group_ids(std::istream& in) {
    std::vector<long long> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 1) throw ParseError("expected a single group id", line_no);
        const long long id = parse_integer(toks[0], line_no, "group id");
        if (id < 1) throw ParseError("group ids must be positive", line_no);
        ids.push_back(id);
    }
    return ids;
}

std::vector<long long> read_group_ids(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_group_ids(in);
}

GroupPartition parse_groups(std::istream& in, Index n, WeightScheme scheme) {
    const std::vector<long long> ids = parse_group_ids(in);
    if (static_cast<Index>(ids.size()) != n) {
        throw ParseError("group file lists " + std::to_string(ids.size()) + " coordinates, expected " +
                             std::to_string(n),
                         0);
    }
    return GroupPartition::from_ids(ids, scheme);
}

GroupPartition read_groups(const std::filesystem::path& path, Index n, WeightScheme scheme) {
    auto in = open_in(path);
    return parse_groups(in, n, scheme);
}

void write_groups(const std::filesystem::path& path, const GroupPartition& partition) {
    auto out = open_out(path);
    for (Index id : partition.group_ids()) out << (id + 1) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_vector(const std::filesystem::path& path, const Vector& v) {
    auto out = open_out(path);
    for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Vector read_vector(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<double> vals;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 1) throw ParseError("expected one value per line", line_no);
        vals.push_back(parse_real(toks[0], line_no, "value"));
    }
    return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

// ---------------------------------------------------------------------------
// Reports

nlohmann::json report_to_json(const SolveReport& r, const nlohmann::json& config) {
    nlohmann::json j;
    j["pobj"] = r.pobj;
    j["dobj"] = r.dobj;
    j["eta_gap"] = r.eta_gap;
    j["eta_dual"] = r.eta_dual;
    j["nnz"] = r.nnz;
    j["outer_iters"] = r.outer_iters;
    j["inner_iters"] = r.inner_iters;
    j["wall_seconds"] = r.wall_seconds;
    j["solver_name"] = r.solver_name;
    j["converged"] = r.converged;
    j["config"] = config;
    return j;
}

SolveReport report_from_json(const nlohmann::json& j) {
    SolveReport r;
    r.pobj = j.at("pobj").get<double>();
    r.dobj = j.at("dobj").get<double>();
    r.eta_gap = j.at("eta_gap").get<double>();
    r.eta_dual = j.at("eta_dual").get<double>();
    r.nnz = j.at("nnz").get<Index>();
    r.outer_iters = j.at("outer_iters").get<int>();
    r.inner_iters = j.at("inner_iters").get<int>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.solver_name = j.at("solver_name").get<std::string>();
    r.converged = j.at("converged").get<bool>();
    return r;
}

void write_report(const SolveReport& report, const nlohmann::json& config, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << report_to_json(report, config).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

ReportFile read_report(const std::filesystem::path& path) {
    auto in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid report JSON: ") + e.what(), 0);
    }
    ReportFile f;
    try {
        f.report = report_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("incomplete report: ") + e.what(), 0);
    }
    f.config = j.value("config", nlohmann::json::object());
    return f;
}

nlohmann::json trace_to_json(const TraceRecord& rec) {
    return nlohmann::json{{"k", rec.k},
                          {"sigma", rec.sigma},
                          {"grad_norm", rec.grad_norm},
                          {"inner_iters", rec.inner_iters},
                          {"eta_gap", rec.eta_gap},
                          {"eta_dual", rec.eta_dual},
                          {"pobj", rec.pobj},
                          {"dobj", rec.dobj}};
}

TraceSink open_trace(const std::filesystem::path& path) {
    auto stream = std::make_shared<std::ofstream>(open_out(path));
    return [stream](const TraceRecord& rec) {
        *stream << trace_to_json(rec).dump() << '\n';
        stream->flush();
    };
}

} // namespace sgl
