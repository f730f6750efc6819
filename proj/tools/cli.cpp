#include "cli.hpp"

#include "sgl/admm.hpp"
#include "sgl/alm.hpp"
#include "sgl/data_io.hpp"
#include "sgl/errors.hpp"
#include "sgl/experiment.hpp"
#include "sgl/newton_system.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace sgl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Thrown for bad flag combinations that CLI11 cannot express; maps to exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

WeightScheme parse_weights(const std::string& w) {
    if (w == "sqrt") return WeightScheme::SqrtSize;
    if (w == "one") return WeightScheme::Unit;
    throw ArgumentError("unknown weight scheme '" + w + "'");
}

constexpr double kDensifyAbove = 0.3;

} // namespace

LoadedInstance load_instance(const InstanceSpec& spec) {
    LoadedInstance li;
    json& cfg = li.config;
    const WeightScheme scheme = parse_weights(spec.weights);
    cfg["weights"] = spec.weights;

    if (spec.data.empty()) {
        SyntheticInstance inst = gen_synthetic(spec.gen_m, spec.gen_n, spec.gen_g, spec.seed, spec.noise_std);
        li.A = std::make_shared<const DesignMatrix>(std::move(inst.A));
        li.b = std::move(inst.b);
        li.partition = std::make_shared<const GroupPartition>(GroupPartition::contiguous(inst.group_sizes, scheme));
        cfg["source"] = "synthetic";
        cfg["gen"] = {{"m", spec.gen_m}, {"n", spec.gen_n}, {"g", spec.gen_g}, {"noise_std", spec.noise_std}};
        cfg["seed"] = spec.seed;
        cfg["storage"] = "dense";
    } else {
        std::optional<Index> n = spec.num_features;
        std::vector<long long> ids;
        if (!spec.groups.empty()) {
            ids = read_group_ids(spec.groups);
            const auto counted = static_cast<Index>(ids.size());
            if (n && *n != counted) {
                throw ArgumentError("--num-features " + std::to_string(*n) + " disagrees with the " +
                                    std::to_string(counted) + " entries of the group file");
            }
            n = counted;
        }
        LibsvmData d = read_libsvm(spec.data, n);
        const double density = static_cast<double>(d.A.stored_entries()) /
                               (static_cast<double>(d.A.rows()) * static_cast<double>(d.A.cols()));
        bool sparse;
        if (spec.storage == "auto") {
            sparse = density <= kDensifyAbove;
        } else if (spec.storage == "dense" || spec.storage == "sparse") {
            sparse = spec.storage == "sparse";
        } else {
            throw ArgumentError("unknown storage '" + spec.storage + "'");
        }
        DesignMatrix A = d.A.is_sparse() == sparse ? std::move(d.A) : d.A.with_storage(sparse);
        const Index cols = A.cols();
        li.A = std::make_shared<const DesignMatrix>(std::move(A));
        li.b = std::move(d.b);

        cfg["source"] = "libsvm";
        cfg["data"] = spec.data.string();
        cfg["storage"] = sparse ? "sparse" : "dense";
        cfg["density"] = density;
        if (!spec.groups.empty()) {
            li.partition = std::make_shared<const GroupPartition>(GroupPartition::from_ids(ids, scheme));
            cfg["groups"] = spec.groups.string();
        } else if (spec.avg_group_size) {
            if (*spec.avg_group_size < 1) throw ArgumentError("--avg-group-size must be positive");
            const Index g = std::clamp<Index>(
                static_cast<Index>(std::llround(static_cast<double>(cols) / static_cast<double>(*spec.avg_group_size))),
                1, cols);
            const std::vector<Index> sizes = random_group_sizes(cols, g, spec.seed);
            li.partition = std::make_shared<const GroupPartition>(GroupPartition::contiguous(sizes, scheme));
            cfg["avg_group_size"] = *spec.avg_group_size;
            cfg["seed"] = spec.seed;
        } else {
            throw UsageError("one of --groups or --avg-group-size is required");
        }
    }
    cfg["m"] = li.A->rows();
    cfg["n"] = li.A->cols();
    cfg["num_groups"] = li.partition->num_groups();
    if (li.partition->dimension() != li.A->cols()) {
        throw ArgumentError("group partition covers " + std::to_string(li.partition->dimension()) +
                            " coordinates but the data has " + std::to_string(li.A->cols()) + " features");
    }
    return li;
}

SolverRun run_solver(const SglProblem& prob, const SolverSpec& spec, const TraceSink& trace) {
    SolverRun run;
    json& cfg = run.config;
    cfg["solver"] = spec.solver;
    cfg["tol"] = spec.tol;
    if (spec.solver == "ssnal") {
        AlmParams p;
        p.tol = spec.tol;
        if (spec.max_outer) p.max_outer = *spec.max_outer;
        p.sigma0 = spec.sigma0.value_or(default_sigma0(prob));
        p.ssn.strategy = parse_newton_strategy(spec.newton);
        p.trace = trace;
        p.validate();
        cfg["max_outer"] = p.max_outer;
        cfg["max_inner_total"] = p.max_inner_total;
        cfg["sigma0"] = *p.sigma0;
        cfg["sigma_growth"] = p.sigma_growth;
        cfg["sigma_max"] = p.sigma_max;
        cfg["eps_scale"] = p.eps_scale;
        cfg["eps_rate"] = p.eps_rate;
        cfg["delta_cap"] = p.delta_cap;
        cfg["max_b_resumes"] = p.max_b_resumes;
        cfg["newton"] = std::string(to_string(p.ssn.strategy));
        cfg["ssn"] = {{"mu", p.ssn.mu},
                      {"eta_bar", p.ssn.eta_bar},
                      {"tau", p.ssn.tau},
                      {"delta", p.ssn.delta},
                      {"max_iters", p.ssn.max_iters},
                      {"max_backtracks", p.ssn.max_backtracks},
                      {"cg_max_iters", p.ssn.cg_max_iters}};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            AlmResult r = alm_solve(prob, p);
            run.report = r.report;
            run.point = std::move(r.point);
        } catch (const NumericError& e) {
            run.error = e.what();
        } catch (const CapabilityError& e) {
            run.error = e.what();
        }
        if (!run.error.empty()) {
            run.report.solver_name = "ssnal";
            run.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    } else if (spec.solver == "admm") {
        AdmmParams p;
        p.tol = spec.tol;
        if (spec.max_outer) p.max_iters = *spec.max_outer;
        p.sigma0 = spec.sigma0.value_or(admm_default_sigma0(prob.A()));
        p.trace = trace;
        p.validate();
        cfg["max_iters"] = p.max_iters;
        cfg["sigma0"] = *p.sigma0;
        cfg["tau"] = p.tau;
        cfg["sigma_tuning"] = p.sigma_tuning;
        cfg["tune_every"] = p.tune_every;
        cfg["tune_ratio"] = p.tune_ratio;
        cfg["tune_factor"] = p.tune_factor;
        cfg["sigma_min"] = p.sigma_min;
        cfg["sigma_max"] = p.sigma_max;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            AdmmResult r = admm_solve(prob, p);
            run.report = r.report;
            run.point = std::move(r.point);
        } catch (const NumericError& e) {
            run.error = e.what();
        }
        if (!run.error.empty()) {
            run.report.solver_name = "admm";
            run.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    } else {
        throw ArgumentError("unknown solver '" + spec.solver + "'");
    }
    if (!run.error.empty()) {
        run.report.converged = false;
        cfg["error"] = run.error;
    }
    return run;
}

namespace {

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
    InstanceSpec instance;
    SolverSpec solver;
    std::string data, groups;
    std::optional<std::string> strategy;
    std::optional<double> gamma, lambda1, lambda2;
    std::string out, trace;
};

struct Lambdas {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    json config;
};

Lambdas resolve_lambdas(const SolveArgs& a, const DesignMatrix& A, const Vector& b) {
    const bool by_gamma = a.gamma || a.strategy;
    const bool explicit_lambda = a.lambda1 || a.lambda2;
    if (by_gamma && explicit_lambda) {
        throw UsageError("--strategy/--gamma cannot be combined with --lambda1/--lambda2");
    }
    Lambdas out;
    if (explicit_lambda) {
        if (!a.lambda1 || !a.lambda2) throw UsageError("--lambda1 and --lambda2 must be given together");
        out.lambda1 = *a.lambda1;
        out.lambda2 = *a.lambda2;
        out.config["lambda_source"] = "explicit";
    } else if (by_gamma) {
        if (!a.gamma) throw UsageError("--strategy requires --gamma");
        const LambdaStrategy s = parse_lambda_strategy(a.strategy.value_or("s1"));
        const double lmax = lambda_max(A, b);
        const LambdaPair lam = strategy_lambdas(s, *a.gamma, lmax);
        out.lambda1 = lam.lambda1;
        out.lambda2 = lam.lambda2;
        out.config["lambda_source"] = "strategy";
        out.config["strategy"] = std::string(to_string(s));
        out.config["gamma"] = *a.gamma;
        out.config["lambda_max"] = lmax;
    } else {
        throw UsageError("give either --gamma (with optional --strategy) or --lambda1 and --lambda2");
    }
    if (!(out.lambda1 >= 0.0) || !(out.lambda2 >= 0.0)) throw ArgumentError("lambda values must be nonnegative");
    if (!(out.lambda1 + out.lambda2 > 0.0)) throw ArgumentError("lambda1 + lambda2 must be positive");
    out.config["lambda1"] = out.lambda1;
    out.config["lambda2"] = out.lambda2;
    return out;
}

int cmd_solve(SolveArgs a, std::ostream& out, std::ostream& err) {
    a.instance.data = a.data;
    a.instance.groups = a.groups;
    if (!a.groups.empty() && a.instance.avg_group_size) {
        throw UsageError("--groups and --avg-group-size are mutually exclusive");
    }
    LoadedInstance li = load_instance(a.instance);
    const Lambdas lam = resolve_lambdas(a, *li.A, li.b);
    const SglProblem prob(li.A, li.b, li.partition, lam.lambda1, lam.lambda2);

    TraceSink trace;
    if (!a.trace.empty()) trace = open_trace(a.trace);
    SolverRun run = run_solver(prob, a.solver, trace);

    json config = li.config;
    config.update(lam.config);
    config.update(run.config);
    if (a.out.empty()) {
        out << report_to_json(run.report, config).dump(2) << '\n';
    } else {
        write_report(run.report, config, a.out);
    }
    if (!run.error.empty()) err << "solver failed: " << run.error << '\n';
    if (!run.report.converged) {
        if (run.error.empty()) err << "solver did not reach tol " << a.solver.tol << '\n';
        return kNotConverged;
    }
    return kSuccess;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    Index m = 0, n = 0, g = 0;
    std::uint64_t seed = 42;
    double noise_std = 1.0;
    std::string out_prefix;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
    if (!(a.noise_std >= 0.0)) throw ArgumentError("--noise-std must be nonnegative");
    SyntheticInstance inst = gen_synthetic(a.m, a.n, a.g, a.seed, a.noise_std);
    const fs::path dir(a.out_prefix);
    fs::create_directories(dir);
    const DesignMatrix A(std::move(inst.A));
    write_libsvm(dir / "data.libsvm", A, inst.b);
    write_groups(dir / "groups.txt", GroupPartition::contiguous(inst.group_sizes));
    write_vector(dir / "truth.txt", inst.x_true);
    out << "wrote " << (dir / "data.libsvm").string() << ", " << (dir / "groups.txt").string() << ", "
        << (dir / "truth.txt").string() << " (m=" << a.m << " n=" << a.n << " g=" << a.g
        << " nnz=" << (inst.x_true.array() != 0.0).count() << ")\n";
    return kSuccess;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::string config;
    std::string out;
    std::string profile;
    std::vector<std::string> reports;
};

fs::path resolve_relative(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

InstanceSpec instance_from_json(const json& j, const fs::path& base, const std::string& weights) {
    InstanceSpec s;
    s.name = j.at("name").get<std::string>();
    s.weights = j.value("weights", weights);
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("gen")) {
        const json& g = j.at("gen");
        s.gen_m = g.at("m").get<Index>();
        s.gen_n = g.at("n").get<Index>();
        s.gen_g = g.at("g").get<Index>();
        s.seed = g.value("seed", s.seed);
        s.noise_std = g.value("noise_std", 1.0);
    } else {
        s.data = resolve_relative(base, j.at("data").get<std::string>());
        if (j.contains("groups")) s.groups = resolve_relative(base, j.at("groups").get<std::string>());
        if (j.contains("avg_group_size")) s.avg_group_size = j.at("avg_group_size").get<Index>();
        if (j.contains("num_features")) s.num_features = j.at("num_features").get<Index>();
        s.storage = j.value("storage", std::string("auto"));
    }
    return s;
}

std::string csv_number(double x) { return std::isfinite(x) ? format_double(x) : std::string("nan"); }

int cmd_bench_reports(const BenchArgs& a, std::ostream& out) {
    if (a.reports.size() != 2) throw UsageError("--reports takes exactly two report files");
    const ReportFile first = read_report(a.reports[0]);
    const ReportFile second = read_report(a.reports[1]);
    const double eta_p = eta_primal(first.report.pobj, second.report.pobj);
    out << "eta_p " << format_double(eta_p) << '\n';
    return kSuccess;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    if (!a.reports.empty()) {
        if (!a.config.empty()) throw UsageError("--reports and --config are mutually exclusive");
        return cmd_bench_reports(a, out);
    }
    if (a.config.empty()) throw UsageError("bench needs --config or --reports");

    json cfg;
    {
        std::ifstream in(a.config);
        if (!in) throw std::runtime_error("cannot open '" + a.config + "' for reading");
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid bench config: ") + e.what(), 0);
        }
    }
    const fs::path base = fs::path(a.config).parent_path();

    std::vector<InstanceSpec> instances;
    std::vector<std::string> solvers;
    std::vector<std::pair<LambdaStrategy, double>> cells;
    SolverSpec solver_base;
    try {
        const std::string weights = cfg.value("weights", std::string("sqrt"));
        for (const json& j : cfg.at("instances")) instances.push_back(instance_from_json(j, base, weights));
        solvers = cfg.value("solvers", std::vector<std::string>{"ssnal", "admm"});
        for (const json& j : cfg.at("strategies")) {
            cells.emplace_back(parse_lambda_strategy(j.value("strategy", std::string("s1"))),
                               j.at("gamma").get<double>());
        }
        solver_base.tol = cfg.value("tol", 1e-6);
        if (cfg.contains("max_outer")) solver_base.max_outer = cfg.at("max_outer").get<int>();
        solver_base.newton = cfg.value("newton", std::string("auto"));
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid bench config: ") + e.what(), 0);
    }

    std::ofstream csv_file;
    std::ostream* csv = &out;
    if (!a.out.empty()) {
        csv_file.open(a.out, std::ios::binary | std::ios::trunc);
        if (!csv_file) throw std::runtime_error("cannot open '" + a.out + "' for writing");
        csv = &csv_file;
    }
    *csv << "instance,solver,strategy,gamma,pobj,eta_s,nnz,outer,inner,seconds,converged\n";

    std::vector<BenchCell> profile_cells;
    for (const InstanceSpec& spec : instances) {
        std::optional<LoadedInstance> li;
        try {
            li = load_instance(spec);
        } catch (const std::exception& e) {
            err << "instance " << spec.name << ": " << e.what() << '\n';
        }
        for (const auto& [strategy, gamma] : cells) {
            const std::string problem = spec.name + "/" + std::string(to_string(strategy)) + "/" + format_double(gamma);
            for (const std::string& solver : solvers) {
                SolveReport rep;
                rep.pobj = std::numeric_limits<double>::quiet_NaN();
                rep.eta_gap = rep.eta_dual = rep.pobj;
                rep.solver_name = solver;
                if (li) {
                    try {
                        const LambdaPair lam = strategy_lambdas(strategy, gamma, lambda_max(*li->A, li->b));
                        const SglProblem prob(li->A, li->b, li->partition, lam.lambda1, lam.lambda2);
                        SolverSpec s = solver_base;
                        s.solver = solver;
                        SolverRun run = run_solver(prob, s);
                        rep = run.report;
                        if (!run.error.empty()) err << problem << " " << solver << ": " << run.error << '\n';
                    } catch (const std::exception& e) {
                        err << problem << " " << solver << ": " << e.what() << '\n';
                    }
                }
                *csv << spec.name << ',' << solver << ',' << to_string(strategy) << ',' << format_double(gamma) << ','
                     << csv_number(rep.pobj) << ',' << csv_number(rep.eta_max()) << ',' << rep.nnz << ','
                     << rep.outer_iters << ',' << rep.inner_iters << ',' << csv_number(rep.wall_seconds) << ','
                     << (rep.converged ? "true" : "false") << '\n';
                profile_cells.push_back({problem, solver, rep.wall_seconds, rep.converged});
            }
        }
    }

    std::ofstream prof_file;
    std::ostream* prof = nullptr;
    if (!a.profile.empty()) {
        prof_file.open(a.profile, std::ios::binary | std::ios::trunc);
        if (!prof_file) throw std::runtime_error("cannot open '" + a.profile + "' for writing");
        prof = &prof_file;
    } else if (a.out.empty()) {
        *csv << '\n';
        prof = &out;
    }
    if (prof) {
        *prof << "solver,ratio,fraction\n";
        for (const auto& [solver, curve] : performance_profile(profile_cells)) {
            for (const ProfilePoint& p : curve) {
                *prof << solver << ',' << format_double(p.ratio) << ',' << format_double(p.fraction) << '\n';
            }
        }
    }
    return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse group lasso solvers"};
    app.require_subcommand(1);

    SolveArgs sa;
    CLI::App* solve = app.add_subcommand("solve", "Solve one problem and write a JSON report");
    solve->add_option("--data", sa.data, "LIBSVM file")->required();
    solve->add_option("--groups", sa.groups, "group file, one positive id per feature");
    solve->add_option("--avg-group-size", sa.instance.avg_group_size, "random contiguous groups of about this size");
    solve->add_option("--num-features", sa.instance.num_features, "number of features (default: largest index)");
    solve->add_option("--storage", sa.instance.storage, "auto|dense|sparse")
        ->check(CLI::IsMember({"auto", "dense", "sparse"}));
    solve->add_option("--weights", sa.instance.weights, "group weights: sqrt (sqrt|G|) or one")
        ->check(CLI::IsMember({"sqrt", "one"}));
    solve->add_option("--seed", sa.instance.seed, "seed for --avg-group-size");
    solve->add_option("--solver", sa.solver.solver, "ssnal|admm")->check(CLI::IsMember({"ssnal", "admm"}));
    solve->add_option("--strategy", sa.strategy, "s1|s2|s3")->check(CLI::IsMember({"s1", "s2", "s3"}));
    solve->add_option("--gamma", sa.gamma, "scale of lambda relative to ||A^T b||_inf");
    solve->add_option("--lambda1", sa.lambda1);
    solve->add_option("--lambda2", sa.lambda2);
    solve->add_option("--tol", sa.solver.tol, "stopping tolerance on max(eta_gap, eta_dual)");
    solve->add_option("--max-outer", sa.solver.max_outer, "outer iterations (ssnal) or iterations (admm)");
    solve->add_option("--newton", sa.solver.newton, "auto|dense|woodbury|pcg")
        ->check(CLI::IsMember({"auto", "dense", "woodbury", "pcg"}));
    solve->add_option("--sigma0", sa.solver.sigma0, "initial penalty parameter");
    solve->add_option("--out", sa.out, "report path (default: stdout)");
    solve->add_option("--trace", sa.trace, "per-iteration JSON lines");

    GenArgs ga;
    CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic instance");
    gen->add_option("--m", ga.m)->required();
    gen->add_option("--n", ga.n)->required();
    gen->add_option("--g", ga.g)->required();
    gen->add_option("--seed", ga.seed);
    gen->add_option("--noise-std", ga.noise_std);
    gen->add_option("--out-prefix", ga.out_prefix, "output directory")->required();

    BenchArgs ba;
    CLI::App* bench = app.add_subcommand("bench", "Run a benchmark grid, or compare two reports");
    bench->add_option("--config", ba.config, "grid description (JSON)");
    bench->add_option("--out", ba.out, "results CSV (default: stdout)");
    bench->add_option("--profile", ba.profile, "performance profile CSV");
    bench->add_option("--reports", ba.reports, "two reports: prints eta_p of the second against the first")
        ->expected(2);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(sa, out, err);
        if (gen->parsed()) return cmd_gen(ga, out);
        if (bench->parsed()) return cmd_bench(ba, out, err);
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kUsage;
    } catch (const ArgumentError& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

} // namespace sgl::cli
