// sfft command line: experiment sweeps, single detections, lattice utilities
// and hyperbolic cross counts.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sfft/bench.hpp"
#include "sfft/index_sets.hpp"
#include "sfft/lattice.hpp"
#include "sfft/sft.hpp"
#include "sfft/synthetic.hpp"
#include "sfft/testfn.hpp"

namespace {

struct CommonOptions {
    std::size_t dimension = 10;
    std::int64_t radius = 256;
    std::vector<std::size_t> sparsity{8, 16, 32, 64, 128, 256};
    std::string strategy = "subsampled";
    int reps = 10;
    std::uint64_t seed = 0;
    double eps = 0.25;
    int iterations = 5;
    double threshold = 1e-12;
    double local_factor = 1.2;
    double lattice_start = 0.0;
    double lattice_growth = 1.1;
    std::optional<double> timeout_s;
    std::string out;
    std::string format = "csv";
    unsigned jobs = 1;
    std::string function = "testfn";
    bool refit = false;
};

sfft::SftConfig make_config(const CommonOptions& o)
{
    sfft::SftConfig cfg{sfft::HyperbolicCross(o.dimension, o.radius)};
    cfg.sparsity = o.sparsity.front();
    cfg.local_factor = o.local_factor;
    cfg.detection_iterations = o.iterations;
    cfg.threshold = o.threshold;
    cfg.strategy = sfft::parse_strategy(o.strategy);
    cfg.epsilon = o.eps;
    cfg.seed = o.seed;
    cfg.refit = o.refit;
    cfg.lattice.start_factor = o.lattice_start;
    cfg.lattice.growth = o.lattice_growth;
    return cfg;
}

std::vector<sfft::Strategy> parse_strategies(const std::string& list)
{
    if (list == "all")
        return {sfft::Strategy::full_lattice, sfft::Strategy::uniform_random, sfft::Strategy::subsampled_lattice};
    std::vector<sfft::Strategy> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        auto next = list.find(',', pos);
        out.push_back(sfft::parse_strategy(list.substr(pos, next == std::string::npos ? next : next - pos)));
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return out;
}

// Opens --out or falls back to stdout.
std::ostream& output(const std::string& path, std::unique_ptr<std::ofstream>& holder)
{
    if (path.empty() || path == "-")
        return std::cout;
    holder = std::make_unique<std::ofstream>(path);
    if (!*holder)
        throw std::runtime_error("cannot open output file: " + path);
    return *holder;
}

int cmd_run(const CommonOptions& o)
{
    sfft::bench::ExperimentConfig ec;
    ec.base = make_config(o);
    ec.strategies = parse_strategies(o.strategy);
    ec.sparsities = o.sparsity;
    ec.repetitions = o.reps;
    ec.time_limit_s = o.timeout_s;
    ec.master_seed = o.seed;
    ec.jobs = o.jobs;
    auto fn = sfft::bench::reduced_test_function(o.dimension);
    auto records = sfft::bench::run_experiment(ec, fn, &std::cerr);

    std::unique_ptr<std::ofstream> holder;
    if (o.format == "csv") {
        sfft::bench::write_csv(output(o.out, holder), records);
        if (!o.out.empty() && o.out != "-") {
            std::ofstream js(o.out + ".summary.json");
            js << sfft::bench::summary_json(records).dump(2) << '\n';
        }
    } else if (o.format == "json") {
        output(o.out, holder) << sfft::bench::summary_json(records).dump(2) << '\n';
    } else {
        throw CLI::ValidationError("--format", "expected csv or json");
    }
    return 0;
}

int cmd_detect(const CommonOptions& o)
{
    auto cfg = make_config(o);
    std::optional<sfft::SparsePolynomial> poly;
    std::optional<sfft::testfn::TestFunction> fn;
    std::unique_ptr<sfft::SampledFunction> f;
    if (o.function == "testfn") {
        fn = sfft::bench::reduced_test_function(o.dimension);
        f = std::make_unique<sfft::SampledFunction>(
            o.dimension, [&](std::span<const double> x) { return sfft::cplx((*fn)(x), 0.0); });
    } else if (o.function == "sparse") {
        auto support = sfft::random_hc_frequencies(cfg.search_space, cfg.sparsity, sfft::derive_seed(o.seed, {1}));
        poly = sfft::SparsePolynomial::random_unimodular(std::move(support), sfft::derive_seed(o.seed, {2}));
        f = std::make_unique<sfft::SampledFunction>(o.dimension, [&](std::span<const double> x) { return (*poly)(x); });
    } else {
        throw CLI::ValidationError("--function", "expected testfn or sparse");
    }
    if (o.timeout_s)
        cfg.deadline = std::chrono::steady_clock::now()
                       + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(*o.timeout_s));

    auto res = sfft::sft_pipeline(*f, cfg);

    std::unique_ptr<std::ofstream> holder;
    auto& os = output(o.out, holder);
    if (o.format == "json") {
        nlohmann::json j;
        j["dimension"] = o.dimension;
        j["frequencies"] = res.detected.elements();
        std::vector<std::array<double, 2>> values;
        for (auto v : res.coefficients.values)
            values.push_back({v.real(), v.imag()});
        j["coefficients"] = values;
        j["total_samples"] = res.total_samples;
        j["failure_bound"] = res.failure_bound;
        if (res.aborted_stage)
            j["aborted_stage"] = *res.aborted_stage;
        for (const auto& st : res.stages)
            j["stages"].push_back({{"axes", st.axes},
                                   {"strategy", std::string(sfft::to_string(st.strategy))},
                                   {"candidates", st.candidates.size()},
                                   {"detected", st.detected.size()},
                                   {"lattice_size", st.lattice_size},
                                   {"nodes_per_anchor", st.nodes_per_anchor},
                                   {"samples", st.samples_used}});
        os << j.dump(2) << '\n';
    } else {
        sfft::write_frequency_set(os, res.detected);
    }

    std::cerr << "detected " << res.detected.size() << " frequencies, " << res.total_samples << " samples";
    if (fn)
        std::cerr << ", relative L2 error " << sfft::testfn::relative_l2_error(*fn, res.coefficients);
    if (poly)
        std::cerr << ", support " << (res.detected == poly->coefficients().support ? "recovered" : "differs");
    if (res.aborted_stage)
        std::cerr << ", aborted at stage " << *res.aborted_stage;
    std::cerr << '\n';
    return 0;
}

int cmd_lattice(const std::string& set_path, std::uint64_t seed, std::optional<std::size_t> n,
                std::optional<double> tail, const std::string& verify_path, const std::string& out)
{
    std::ifstream in(set_path);
    if (!in)
        throw std::runtime_error("cannot open frequency set file: " + set_path);
    auto I = sfft::read_frequency_set(in);

    if (!verify_path.empty()) {
        std::ifstream lin(verify_path);
        if (!lin)
            throw std::runtime_error("cannot open lattice file: " + verify_path);
        auto desc = sfft::read_lattice(lin);
        const bool ok = sfft::is_reconstructing(desc.lattice, I);
        std::cout << (ok ? "reconstructing" : "not reconstructing") << '\n';
        return ok ? 0 : 1;
    }

    auto lat = sfft::build_reconstructing(I, seed);
    std::unique_ptr<std::ofstream> holder;
    auto& os = output(out, holder);
    if (n || tail) {
        const std::size_t count = n ? *n : sfft::min_subsample_count(I.size(), *tail);
        sfft::write_lattice(os, sfft::subsample(lat, count, sfft::derive_seed(seed, {1})));
    } else {
        sfft::write_lattice(os, lat);
    }
    return 0;
}

void add_pipeline_flags(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--dimension", o.dimension, "Number of variables d")->check(CLI::PositiveNumber);
    cmd->add_option("--radius", o.radius, "Hyperbolic cross radius R")->check(CLI::PositiveNumber);
    cmd->add_option("--sparsity", o.sparsity, "Target sparsity s (comma separated list for run)")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--eps", o.eps, "Per-stage failure probability")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--iterations", o.iterations, "Detection iterations r")->check(CLI::PositiveNumber);
    cmd->add_option("--threshold", o.threshold, "Detection threshold")->check(CLI::NonNegativeNumber);
    cmd->add_option("--local-factor", o.local_factor, "s_local = ceil(factor * s)");
    cmd->add_option("--lattice-start", o.lattice_start, "Lattice search starts at start * |J|^2 (0: at |J|)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--lattice-growth", o.lattice_growth, "Lattice size growth per failed size")
        ->check(CLI::Range(1.0001, 1e6));
    cmd->add_option("--timeout-s", o.timeout_s, "Time limit per pipeline run in seconds")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output file (stdout if omitted)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dimension-incremental sparse FFT on rank-1 lattices"};
    app.require_subcommand(1);

    CommonOptions run_opts, detect_opts;
    detect_opts.sparsity = {8};
    detect_opts.format = "text";

    auto* run = app.add_subcommand("run", "Sweep strategies x sparsities x repetitions on the test function");
    add_pipeline_flags(run, run_opts);
    run_opts.strategy = "all";
    run->add_option("--strategy", run_opts.strategy, "full, random, subsampled, a comma list, or all");
    run->add_option("--reps", run_opts.reps, "Repetitions per configuration")->check(CLI::PositiveNumber);
    run->add_option("--jobs", run_opts.jobs, "Concurrent runs")->check(CLI::PositiveNumber);

    auto* detect = app.add_subcommand("detect", "Single pipeline run");
    add_pipeline_flags(detect, detect_opts);
    detect->add_option("--strategy", detect_opts.strategy, "full, random or subsampled");
    detect->add_option("--function", detect_opts.function, "testfn or sparse")
        ->check(CLI::IsMember({"testfn", "sparse"}));
    detect->add_flag("--refit", detect_opts.refit, "Extra least squares solve on the final set");

    std::string set_path, verify_path, lattice_out;
    std::uint64_t lattice_seed = 0;
    std::optional<std::size_t> subsample_n;
    std::optional<double> subsample_t;
    auto* lattice = app.add_subcommand("lattice", "Build, subsample or verify a lattice for a frequency set file");
    lattice->add_option("set", set_path, "Frequency set file")->required();
    lattice->add_option("--seed", lattice_seed, "Search seed");
    lattice->add_option("--subsample", subsample_n, "Draw this many nodes i.i.d.")->check(CLI::PositiveNumber);
    lattice->add_option("--tail", subsample_t, "Draw min_subsample_count(|I|, t) nodes")->check(CLI::PositiveNumber);
    lattice->add_option("--verify", verify_path, "Check a lattice descriptor file instead of building");
    lattice->add_option("--out", lattice_out, "Output file (stdout if omitted)");

    std::size_t count_d = 10;
    std::int64_t count_r = 256;
    auto* count = app.add_subcommand("count", "Cardinality of the hyperbolic cross");
    count->add_option("--dimension", count_d, "Number of variables d")->check(CLI::PositiveNumber);
    count->add_option("--radius", count_r, "Radius R")->check(CLI::PositiveNumber);

    if (argc <= 1) {
        std::cerr << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*count) {
            std::cout << sfft::hc_count(count_d, count_r) << '\n';
            return 0;
        }
        if (*run)
            return cmd_run(run_opts);
        if (*detect)
            return cmd_detect(detect_opts);
        if (*lattice)
            return cmd_lattice(set_path, lattice_seed, subsample_n, subsample_t, verify_path, lattice_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
