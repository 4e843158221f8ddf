#pragma once

// Experiment sweep over strategies x sparsities x repetitions on the B-spline
// test function, with CSV records and a JSON summary of medians.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "random.hpp"
#include "sft.hpp"
#include "testfn.hpp"

namespace sfft::bench {

enum class RunStatus { ok, aborted, timeout, error };

inline std::string_view to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::ok:
        return "ok";
    case RunStatus::aborted:
        return "aborted";
    case RunStatus::timeout:
        return "timeout";
    case RunStatus::error:
        return "error";
    }
    return "?";
}

inline RunStatus parse_status(std::string_view s)
{
    if (s == "ok")
        return RunStatus::ok;
    if (s == "aborted")
        return RunStatus::aborted;
    if (s == "timeout")
        return RunStatus::timeout;
    if (s == "error")
        return RunStatus::error;
    throw std::invalid_argument("unknown run status: " + std::string(s));
}

/// The benchmark function restricted to axes 1..d; groups that lose all their
/// axes are dropped.
inline testfn::TestFunction reduced_test_function(std::size_t d)
{
    if (d < 1 || d > 10)
        throw std::invalid_argument("reduced_test_function: dimension must be in 1..10");
    const auto full = testfn::TestFunction::benchmark();
    std::vector<testfn::FactorGroup> groups;
    for (const auto& g : full.groups()) {
        testfn::FactorGroup kept{{}, g.order};
        for (auto t : g.axes)
            if (t <= d)
                kept.axes.push_back(t);
        if (!kept.axes.empty())
            groups.push_back(std::move(kept));
    }
    return testfn::TestFunction(d, std::move(groups));
}

struct ExperimentConfig {
    /// Template for every run; sparsity, strategy and seed are overwritten.
    SftConfig base{HyperbolicCross(10, 256)};
    std::vector<Strategy> strategies{Strategy::full_lattice, Strategy::uniform_random,
                                     Strategy::subsampled_lattice};
    std::vector<std::size_t> sparsities{8, 16, 32, 64, 128, 256};
    int repetitions = 10;
    std::optional<double> time_limit_s;
    std::uint64_t master_seed = 0;
    unsigned jobs = 1;

    void validate() const
    {
        if (repetitions < 1)
            throw std::invalid_argument("ExperimentConfig: repetitions must be >= 1");
        if (strategies.empty() || sparsities.empty())
            throw std::invalid_argument("ExperimentConfig: need at least one strategy and one sparsity");
        if (time_limit_s && !(*time_limit_s > 0))
            throw std::invalid_argument("ExperimentConfig: time limit must be positive");
        if (jobs < 1)
            throw std::invalid_argument("ExperimentConfig: jobs must be >= 1");
        base.validate();
    }
};

struct ExperimentRecord {
    Strategy strategy = Strategy::full_lattice;
    std::size_t s = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    /// Present for ok and aborted runs.
    std::optional<double> rel_l2_err;
    std::optional<double> max_coeff_err;
    std::uint64_t samples = 0;
    std::vector<std::uint64_t> stage_samples;
    double wall_s = 0.0;
    RunStatus status = RunStatus::ok;

    friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

inline std::uint64_t run_seed(std::uint64_t master, Strategy strategy, std::size_t s, int rep)
{
    return derive_seed(master, {static_cast<std::uint64_t>(strategy), s, static_cast<std::uint64_t>(rep)});
}

/// One pipeline run on `fn`. Errors and timeouts are folded into the status.
inline ExperimentRecord run_single(const testfn::TestFunction& fn, SftConfig cfg, Strategy strategy, std::size_t s,
                                   int rep, std::uint64_t seed, std::optional<double> time_limit_s)
{
    ExperimentRecord rec;
    rec.strategy = strategy;
    rec.s = s;
    rec.rep = rep;
    rec.seed = seed;
    cfg.strategy = strategy;
    cfg.sparsity = s;
    cfg.seed = seed;

    SampledFunction f(fn.dimension(), [&fn](std::span<const double> x) { return cplx(fn(x), 0.0); });
    const auto start = std::chrono::steady_clock::now();
    if (time_limit_s)
        cfg.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(*time_limit_s));
    try {
        auto res = sft_pipeline(f, cfg);
        rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (time_limit_s && rec.wall_s > *time_limit_s) {
            rec.status = RunStatus::timeout;
            return rec;
        }
        rec.status = res.aborted_stage ? RunStatus::aborted : RunStatus::ok;
        rec.rel_l2_err = testfn::relative_l2_error(fn, res.coefficients);
        rec.max_coeff_err = testfn::max_coefficient_error(fn, res.coefficients);
        for (const auto& st : res.stages)
            rec.stage_samples.push_back(st.samples_used);
        rec.samples = f.evaluations();
        if (rec.samples != res.total_samples)
            throw std::logic_error("sample counter disagrees with stage accounting");
    } catch (const sft_timeout&) {
        rec = ExperimentRecord{strategy, s, rep, seed};
        rec.status = RunStatus::timeout;
        rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } catch (const std::exception&) {
        rec = ExperimentRecord{strategy, s, rep, seed};
        rec.status = RunStatus::error;
        rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return rec;
}

/// Runs every strategy x s x repetition; records come back in that nesting
/// order regardless of `jobs`.
inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg, const testfn::TestFunction& fn,
                                                    std::ostream* progress = nullptr)
{
    cfg.validate();
    require_dimension(fn.dimension(), cfg.base.dimension(), "run_experiment");
    struct Task {
        Strategy strategy;
        std::size_t s;
        int rep;
    };
    std::vector<Task> tasks;
    for (auto st : cfg.strategies)
        for (auto s : cfg.sparsities)
            for (int rep = 0; rep < cfg.repetitions; ++rep)
                tasks.push_back({st, s, rep});

    std::vector<ExperimentRecord> out(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto& t = tasks[i];
            out[i] = run_single(fn, cfg.base, t.strategy, t.s, t.rep, run_seed(cfg.master_seed, t.strategy, t.s, t.rep),
                                cfg.time_limit_s);
            if (progress) {
                std::lock_guard lock(log_mutex);
                *progress << to_string(t.strategy) << " s=" << t.s << " rep=" << t.rep << " "
                          << to_string(out[i].status) << " " << out[i].wall_s << "s\n";
                progress->flush();
            }
        }
    };
    const unsigned n_threads = std::min<std::size_t>(cfg.jobs, tasks.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < n_threads; ++j)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return out;
}

// CSV

inline constexpr std::string_view csv_header = "strategy,s,rep,seed,rel_l2_err,max_coeff_err,samples,stage_samples,wall_s,status";

namespace detail {

inline std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline double parse_double(std::string_view s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error("csv: bad number '" + std::string(s) + "'");
    return v;
}

template <class Int>
Int parse_int(std::string_view s)
{
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error("csv: bad integer '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos)
            break;
        pos = next + 1;
    }
    return parts;
}

} // namespace detail

/// Stage counts are ';'-separated; missing errors are empty fields.
inline void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records)
{
    os << csv_header << '\n';
    for (const auto& r : records) {
        os << to_string(r.strategy) << ',' << r.s << ',' << r.rep << ',' << r.seed << ','
           << (r.rel_l2_err ? detail::format_double(*r.rel_l2_err) : "") << ','
           << (r.max_coeff_err ? detail::format_double(*r.max_coeff_err) : "") << ',' << r.samples << ',';
        for (std::size_t i = 0; i < r.stage_samples.size(); ++i)
            os << (i ? ";" : "") << r.stage_samples[i];
        os << ',' << detail::format_double(r.wall_s) << ',' << to_string(r.status) << '\n';
    }
}

inline std::vector<ExperimentRecord> read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != csv_header)
        throw std::runtime_error("csv: missing or unexpected header");
    std::vector<ExperimentRecord> out;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        auto f = detail::split(line, ',');
        if (f.size() != 10)
            throw std::runtime_error("csv: expected 10 fields");
        ExperimentRecord r;
        r.strategy = parse_strategy(f[0]);
        r.s = detail::parse_int<std::size_t>(f[1]);
        r.rep = detail::parse_int<int>(f[2]);
        r.seed = detail::parse_int<std::uint64_t>(f[3]);
        if (!f[4].empty())
            r.rel_l2_err = detail::parse_double(f[4]);
        if (!f[5].empty())
            r.max_coeff_err = detail::parse_double(f[5]);
        r.samples = detail::parse_int<std::uint64_t>(f[6]);
        if (!f[7].empty())
            for (auto part : detail::split(f[7], ';'))
                r.stage_samples.push_back(detail::parse_int<std::uint64_t>(part));
        r.wall_s = detail::parse_double(f[8]);
        r.status = parse_status(f[9]);
        out.push_back(std::move(r));
    }
    return out;
}

// Summary

/// Lower median: element (n-1)/2 of the sorted values.
inline double lower_median(std::vector<double> v)
{
    if (v.empty())
        throw std::invalid_argument("lower_median: empty input");
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

struct SummaryRow {
    Strategy strategy;
    std::size_t s;
    std::size_t runs = 0;
    std::size_t completed = 0;
    std::size_t timeouts = 0;
    std::size_t errors = 0;
    /// Medians over completed (ok or aborted) runs.
    std::optional<double> rel_l2_err, max_coeff_err, samples, wall_s;
};

inline std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records)
{
    std::map<std::pair<int, std::size_t>, std::vector<const ExperimentRecord*>> groups;
    std::vector<std::pair<int, std::size_t>> order;
    for (const auto& r : records) {
        auto key = std::make_pair(static_cast<int>(r.strategy), r.s);
        if (!groups.count(key))
            order.push_back(key);
        groups[key].push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& key : order) {
        SummaryRow row{static_cast<Strategy>(key.first), key.second};
        std::vector<double> err, cerr, samples, wall;
        for (const auto* r : groups[key]) {
            ++row.runs;
            if (r->status == RunStatus::timeout) {
                ++row.timeouts;
            } else if (r->status == RunStatus::error) {
                ++row.errors;
            } else {
                ++row.completed;
                err.push_back(*r->rel_l2_err);
                cerr.push_back(*r->max_coeff_err);
                samples.push_back(static_cast<double>(r->samples));
                wall.push_back(r->wall_s);
            }
        }
        if (row.completed) {
            row.rel_l2_err = lower_median(err);
            row.max_coeff_err = lower_median(cerr);
            row.samples = lower_median(samples);
            row.wall_s = lower_median(wall);
        }
        out.push_back(row);
    }
    return out;
}

inline nlohmann::json summary_json(const std::vector<ExperimentRecord>& records)
{
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : summarize(records)) {
        rows.push_back({{"strategy", std::string(to_string(row.strategy))},
                        {"s", row.s},
                        {"runs", row.runs},
                        {"completed", row.completed},
                        {"timeouts", row.timeouts},
                        {"errors", row.errors},
                        {"median_rel_l2_err", opt(row.rel_l2_err)},
                        {"median_max_coeff_err", opt(row.max_coeff_err)},
                        {"median_samples", opt(row.samples)},
                        {"median_wall_s", opt(row.wall_s)}});
    }
    return {{"median", "lower"}, {"groups", rows}};
}

} // namespace sfft::bench
