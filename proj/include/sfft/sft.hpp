#pragma once

// Dimension-incremental sparse Fourier transform.
//
// For each axis t the projected coefficients of f(., xi) on the 1-D candidate
// set are approximated for r random anchors xi; frequencies whose largest
// magnitude over the anchors passes the threshold are kept (at most s_local of
// them). The kept sets are then combined axis by axis: the candidates for axes
// 1..t are (I_{1..t-1} x I_t) restricted to the search space, and the same
// anchored detection picks I_{1..t}. Each stage samples f on a full rank-1
// lattice, an i.i.d. subsample of one, or i.i.d. uniform points.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "index_sets.hpp"
#include "lattice.hpp"
#include "random.hpp"
#include "solver.hpp"
#include "transform.hpp"

namespace sfft {

enum class Strategy { full_lattice, uniform_random, subsampled_lattice };

inline std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::full_lattice:
        return "full";
    case Strategy::uniform_random:
        return "random";
    case Strategy::subsampled_lattice:
        return "subsampled";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view name)
{
    if (name == "full" || name == "full_lattice")
        return Strategy::full_lattice;
    if (name == "random" || name == "uniform" || name == "uniform_random")
        return Strategy::uniform_random;
    if (name == "subsampled" || name == "subsampled_lattice")
        return Strategy::subsampled_lattice;
    throw std::invalid_argument("unknown strategy: " + std::string(name));
}

struct SftConfig {
    HyperbolicCross search_space{1, 1};
    std::size_t sparsity = 1;
    double local_factor = 1.2;
    int detection_iterations = 5;
    double threshold = 1e-12;
    Strategy strategy = Strategy::subsampled_lattice;
    /// Per-stage failure probability; the subsample size uses t = ln(2r/eps).
    double epsilon = 0.25;
    /// Overrides t = ln(2r/eps) when set.
    std::optional<double> oversampling_t;
    SolverSettings solver;
    LatticeSearchOptions lattice;
    std::uint64_t seed = 0;
    /// One extra least squares solve on the final set.
    bool refit = false;
    std::optional<std::chrono::steady_clock::time_point> deadline;

    std::size_t dimension() const { return search_space.dimension(); }

    /// ceil(local_factor * s).
    std::size_t local_sparsity() const
    {
        return static_cast<std::size_t>(std::ceil(local_factor * static_cast<double>(sparsity) - 1e-9));
    }

    double tail_parameter() const
    {
        return oversampling_t ? *oversampling_t : std::log(2.0 * detection_iterations / epsilon);
    }

    void validate() const
    {
        if (sparsity < 1)
            throw std::invalid_argument("SftConfig: sparsity must be >= 1");
        if (!(local_factor >= 1.0))
            throw std::invalid_argument("SftConfig: local_factor must be >= 1");
        if (detection_iterations < 1)
            throw std::invalid_argument("SftConfig: detection_iterations must be >= 1");
        if (!(threshold >= 0.0))
            throw std::invalid_argument("SftConfig: threshold must be >= 0");
        if (!(epsilon > 0.0 && epsilon < 1.0) && !oversampling_t)
            throw std::invalid_argument("SftConfig: epsilon must lie in (0, 1)");
        if (oversampling_t && !(*oversampling_t > 0.0))
            throw std::invalid_argument("SftConfig: oversampling_t must be positive");
        if (solver.max_iterations < 1)
            throw std::invalid_argument("SftConfig: solver.max_iterations must be >= 1");
    }
};

class sft_timeout : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Black-box f : T^d -> C with an evaluation counter. Safe to call
/// concurrently if the wrapped callable is.
class SampledFunction {
public:
    using Fn = std::function<cplx(std::span<const double>)>;

    SampledFunction(std::size_t dimension, Fn f) : d_(dimension), f_(std::move(f)) {}

    std::size_t dimension() const { return d_; }

    cplx operator()(std::span<const double> x) const
    {
        count_.fetch_add(1, std::memory_order_relaxed);
        return f_(x);
    }

    std::uint64_t evaluations() const { return count_.load(std::memory_order_relaxed); }
    void reset_count() { count_.store(0, std::memory_order_relaxed); }

private:
    std::size_t d_;
    Fn f_;
    mutable std::atomic<std::uint64_t> count_{0};
};

struct AnchorSolve {
    std::vector<double> anchor;
    int iterations = 0;
    double relative_residual = 0.0;
    bool breakdown = false;
    /// ||f - L g|| / ||f|| on this anchor's samples.
    double relative_sample_residual = 0.0;
};

struct StageResult {
    /// 1-based axes covered by the stage ({t} or {1..t}).
    std::vector<std::size_t> axes;
    /// Strategy actually executed; a subsample no smaller than its lattice is
    /// replaced by the full lattice.
    Strategy strategy = Strategy::full_lattice;
    FrequencySet candidates;
    FrequencySet detected;
    /// max over anchors of |g_k|, aligned with `detected`.
    std::vector<double> scores;
    /// Same, aligned with `candidates`.
    std::vector<double> candidate_scores;
    /// Size of the underlying lattice (0 for uniform points).
    std::uint64_t lattice_size = 0;
    std::size_t nodes_per_anchor = 0;
    std::uint64_t samples_used = 0;
    std::vector<AnchorSolve> solves;
    /// Coefficients from the anchor solve with the smallest sample residual.
    CoefficientVector best_coefficients;
};

/// r >= 4 (|I_delta| + tail^2 / delta^2) (ln |I_delta| + ln(1/eps)), rounded up.
inline std::uint64_t min_detection_iterations(std::uint64_t sparse_count, double tail_abs_sum, double delta,
                                              double eps)
{
    if (sparse_count < 1 || !(tail_abs_sum >= 0) || !(delta > 0) || !(eps > 0 && eps < 1))
        throw std::invalid_argument("min_detection_iterations: invalid arguments");
    const long double s = static_cast<long double>(sparse_count);
    const long double tail = static_cast<long double>(tail_abs_sum) / static_cast<long double>(delta);
    const long double r = 4.0L * (s + tail * tail)
                          * (std::log(s) + std::log(1.0L / static_cast<long double>(eps)));
    return static_cast<std::uint64_t>(std::ceil(r));
}

/// delta / sqrt(2) - 4 ||f - P_{I_delta} f||_2 - 2 ||f - P f||_inf. May be
/// negative, in which case the detection guarantee is void.
inline double threshold_bound(double delta, double proj_err_l2, double sup_err)
{
    return static_cast<double>(static_cast<long double>(delta) / std::sqrt(2.0L)
                               - 4.0L * proj_err_l2 - 2.0L * sup_err);
}

struct LsqErrorBound {
    /// (3 e2 + sqrt(2 / (9|I|)) e_in)^2 + 4 e_out^2
    double tight;
    /// (3 + sqrt(2 |I_M \ I| / (9 |I|)))^2 e2^2 + 4 e_out^2
    double loose;
};

/// Squared L2 error bound of least squares on an i.i.d. lattice subsample.
inline LsqErrorBound lsq_error_bound(double proj_err_l2, double sup_err_in, double sup_err_out,
                                     std::uint64_t set_size, std::uint64_t excess)
{
    if (set_size < 1)
        throw std::invalid_argument("lsq_error_bound: set_size must be >= 1");
    const long double n = static_cast<long double>(set_size);
    const long double e2 = proj_err_l2, ein = sup_err_in, eout = sup_err_out;
    const long double a = 3.0L * e2 + std::sqrt(2.0L / (9.0L * n)) * ein;
    const long double b = 3.0L + std::sqrt(2.0L * static_cast<long double>(excess) / (9.0L * n));
    return {static_cast<double>(a * a + 4.0L * eout * eout),
            static_cast<double>(b * b * e2 * e2 + 4.0L * eout * eout)};
}

/// Keeps candidates with score >= threshold, at most `limit` of them, ranked by
/// descending score and then canonical order. Returns the kept set with their
/// scores in canonical order.
inline std::pair<FrequencySet, std::vector<double>> select_frequencies(const FrequencySet& candidates,
                                                                       std::span<const double> scores,
                                                                       double threshold, std::size_t limit)
{
    if (scores.size() != candidates.size())
        throw dimension_error("select_frequencies: score count mismatch");
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < candidates.size(); ++j)
        if (scores[j] >= threshold)
            order.push_back(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (order.size() > limit)
        order.resize(limit);
    std::sort(order.begin(), order.end());
    std::vector<MultiIndex> kept;
    std::vector<double> kept_scores;
    for (auto j : order) {
        kept.push_back(candidates[j]);
        kept_scores.push_back(scores[j]);
    }
    return {FrequencySet::from_sorted(candidates.dimension(), std::move(kept)), std::move(kept_scores)};
}

namespace detail {

enum class SeedTag : std::uint64_t { axis_stage = 1, incremental_stage, refit_stage, lattice, nodes, anchors };

inline std::uint64_t tag(SeedTag t) { return static_cast<std::uint64_t>(t); }

inline void check_deadline(const SftConfig& cfg)
{
    if (cfg.deadline && std::chrono::steady_clock::now() > *cfg.deadline)
        throw sft_timeout("sft: time limit exceeded");
}

/// Local node coordinates of a lattice node, entry t = ((i z_t) mod M) / M.
inline void lattice_coords(const Rank1Lattice& lat, std::uint64_t i, std::span<double> out)
{
    const double inv = 1.0 / static_cast<double>(lat.size());
    for (std::size_t t = 0; t < out.size(); ++t) {
        const auto r = static_cast<std::uint64_t>(static_cast<unsigned __int128>(i) * lat.generator()[t] % lat.size());
        out[t] = static_cast<double>(r) * inv;
    }
}

/// Runs the anchored least squares for one stage on candidate set J.
inline StageResult run_stage(const SampledFunction& f, std::vector<std::size_t> axes, FrequencySet J,
                             const SftConfig& cfg, std::uint64_t seed, std::optional<Rank1Lattice> axis_grid)
{
    const std::size_t d = cfg.dimension();
    require_dimension(f.dimension(), d, "sft stage");
    StageResult res;
    res.axes = axes;
    res.candidates = std::move(J);
    const FrequencySet& cand = res.candidates;
    if (cand.empty()) {
        res.strategy = cfg.strategy;
        return res;
    }
    check_deadline(cfg);

    std::vector<std::size_t> anchor_axes;
    for (std::size_t t = 1; t <= d; ++t)
        if (std::find(axes.begin(), axes.end(), t) == axes.end())
            anchor_axes.push_back(t);
    // With no free axes every anchor would repeat the same solve.
    const int n_anchors = anchor_axes.empty() ? 1 : cfg.detection_iterations;
    const std::size_t local_dim = axes.size();

    // Sampling design.
    std::optional<Rank1Lattice> lattice;
    std::optional<LatticeOperator> full_op;
    std::optional<SubsampledOperator> sub_op;
    std::optional<NaiveOperator> naive_op;
    std::vector<std::uint64_t> picks;
    PointSet uniform_nodes;

    const std::uint64_t n_bound = min_subsample_count(cand.size(), cfg.tail_parameter());
    Strategy executed = cfg.strategy;
    if (cfg.strategy != Strategy::uniform_random) {
        lattice = axis_grid ? *axis_grid
                            : build_reconstructing(cand, derive_seed(seed, {tag(SeedTag::lattice)}), cfg.lattice);
        res.lattice_size = lattice->size();
        if (cfg.strategy == Strategy::subsampled_lattice && n_bound >= lattice->size())
            executed = Strategy::full_lattice;
    }
    res.strategy = executed;

    switch (executed) {
    case Strategy::full_lattice:
        full_op.emplace(*lattice, cand);
        res.nodes_per_anchor = lattice->size();
        break;
    case Strategy::subsampled_lattice: {
        auto sub = subsample(*lattice, n_bound, derive_seed(seed, {tag(SeedTag::nodes)}));
        picks = sub.picks;
        sub_op.emplace(std::move(sub), cand);
        res.nodes_per_anchor = picks.size();
        break;
    }
    case Strategy::uniform_random: {
        Rng rng(derive_seed(seed, {tag(SeedTag::nodes)}));
        std::vector<double> x(n_bound * local_dim);
        for (auto& v : x)
            v = uniform01(rng);
        uniform_nodes = PointSet(local_dim, std::move(x));
        naive_op.emplace(uniform_nodes, cand);
        res.nodes_per_anchor = n_bound;
        break;
    }
    }

    std::vector<double> point(d), local(local_dim);
    std::vector<cplx> samples(res.nodes_per_anchor);
    std::vector<double> best(cand.size(), 0.0);
    double best_residual = std::numeric_limits<double>::infinity();
    Rng anchor_rng(derive_seed(seed, {tag(SeedTag::anchors)}));

    SolverSettings solver = cfg.solver;
    if (cfg.deadline) {
        auto user = solver.interrupt;
        auto limit = *cfg.deadline;
        solver.interrupt = [user, limit] {
            return (user && user()) || std::chrono::steady_clock::now() > limit;
        };
    }

    for (int a = 0; a < n_anchors; ++a) {
        check_deadline(cfg);
        AnchorSolve diag;
        for (auto t : anchor_axes) {
            point[t - 1] = uniform01(anchor_rng);
            diag.anchor.push_back(point[t - 1]);
        }

        for (std::size_t i = 0; i < res.nodes_per_anchor; ++i) {
            switch (executed) {
            case Strategy::full_lattice:
                lattice_coords(*lattice, i, local);
                break;
            case Strategy::subsampled_lattice:
                lattice_coords(*lattice, picks[i], local);
                break;
            case Strategy::uniform_random: {
                auto p = uniform_nodes[i];
                std::copy(p.begin(), p.end(), local.begin());
                break;
            }
            }
            for (std::size_t j = 0; j < local_dim; ++j)
                point[axes[j] - 1] = local[j];
            samples[i] = f(point);
        }
        res.samples_used += res.nodes_per_anchor;

        CoefficientVector g;
        const double f_norm = std::sqrt(detail::norm2(samples));
        try {
            if (executed == Strategy::full_lattice) {
                g = full_lattice_solve(*full_op, samples, cand);
                // Reconstructing lattice: ||f - L g||^2 = ||f||^2 - M ||g||^2.
                const double fit = static_cast<double>(lattice->size()) * detail::norm2(g.values);
                diag.relative_sample_residual = f_norm > 0 ? std::sqrt(std::max(0.0, f_norm * f_norm - fit)) / f_norm : 0.0;
            } else {
                auto sol = executed == Strategy::subsampled_lattice ? lsq_solve(*sub_op, samples, cand, solver)
                                                                    : lsq_solve(*naive_op, samples, cand, solver);
                diag.iterations = sol.iterations;
                diag.relative_residual = sol.relative_residual;
                diag.breakdown = sol.breakdown;
                diag.relative_sample_residual = f_norm > 0 ? sol.sample_residual_history.back() / f_norm : 0.0;
                g = std::move(sol.coefficients);
            }
        } catch (const solve_interrupted&) {
            throw sft_timeout("sft: time limit exceeded during least squares");
        }

        for (std::size_t j = 0; j < cand.size(); ++j)
            best[j] = std::max(best[j], std::abs(g.values[j]));
        if (diag.relative_sample_residual < best_residual || res.best_coefficients.size() == 0) {
            best_residual = diag.relative_sample_residual;
            res.best_coefficients = std::move(g);
        }
        res.solves.push_back(std::move(diag));
    }

    res.candidate_scores = best;
    auto [kept, scores] = select_frequencies(cand, best, cfg.threshold, cfg.local_sparsity());
    res.detected = std::move(kept);
    res.scores = std::move(scores);
    return res;
}

} // namespace detail

/// One-dimensional detection on axis t (1-based) over the axis projection of
/// the search space, sampled on the power-of-two grid covering it.
inline StageResult detect_1d(const SampledFunction& f, std::size_t t, const SftConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    if (t < 1 || t > cfg.dimension())
        throw std::out_of_range("detect_1d: axis out of range");
    auto J = hc_project_materialize(cfg.search_space, t);
    return detail::run_stage(f, {t}, std::move(J), cfg, seed, axis_lattice(cfg.search_space.radius()));
}

/// Detection on axes 1..t from I_{1..t-1} and I_t.
inline StageResult detect_incremental(const SampledFunction& f, const FrequencySet& prev,
                                      const FrequencySet& axis_set, const SftConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    const std::size_t t = prev.dimension() + 1;
    if (t < 2 || t > cfg.dimension())
        throw std::invalid_argument("detect_incremental: stage dimension out of range");
    auto J = candidate_product(prev, axis_set, cfg.search_space);
    std::vector<std::size_t> axes(t);
    std::iota(axes.begin(), axes.end(), std::size_t{1});
    return detail::run_stage(f, std::move(axes), std::move(J), cfg, seed, std::nullopt);
}

struct SftResult {
    FrequencySet detected;
    CoefficientVector coefficients;
    std::vector<StageResult> stages;
    std::uint64_t total_samples = 0;
    /// Index into `stages` of the stage that came back empty, if any.
    std::optional<std::size_t> aborted_stage;
    /// Union bound 6 d eps over all stages.
    double failure_bound = 0.0;
};

inline SftResult sft_pipeline(const SampledFunction& f, const SftConfig& cfg)
{
    cfg.validate();
    const std::size_t d = cfg.dimension();
    require_dimension(f.dimension(), d, "sft_pipeline");

    SftResult out;
    out.failure_bound = 6.0 * static_cast<double>(d) * cfg.epsilon;
    out.detected = FrequencySet(d);
    out.coefficients = CoefficientVector(FrequencySet(d));

    auto finish_abort = [&](std::size_t stage_index) {
        out.aborted_stage = stage_index;
        for (const auto& s : out.stages)
            out.total_samples += s.samples_used;
        return out;
    };

    std::vector<FrequencySet> axis_sets;
    for (std::size_t t = 1; t <= d; ++t) {
        out.stages.push_back(
            detect_1d(f, t, cfg, derive_seed(cfg.seed, {detail::tag(detail::SeedTag::axis_stage), t})));
        if (out.stages.back().detected.empty())
            return finish_abort(out.stages.size() - 1);
        axis_sets.push_back(out.stages.back().detected);
    }

    FrequencySet current = axis_sets[0];
    for (std::size_t t = 2; t <= d; ++t) {
        out.stages.push_back(detect_incremental(
            f, current, axis_sets[t - 1], cfg,
            derive_seed(cfg.seed, {detail::tag(detail::SeedTag::incremental_stage), t})));
        if (out.stages.back().detected.empty())
            return finish_abort(out.stages.size() - 1);
        current = out.stages.back().detected;
    }

    const StageResult& last = out.stages.back();
    std::vector<double> magnitude(last.best_coefficients.size());
    for (std::size_t j = 0; j < magnitude.size(); ++j)
        magnitude[j] = std::abs(last.best_coefficients.values[j]);
    auto [final_set, unused] = select_frequencies(last.candidates, magnitude, cfg.threshold, cfg.sparsity);
    std::vector<cplx> values;
    for (const auto& k : final_set)
        values.push_back(last.best_coefficients.values[last.candidates.index_of(k)]);
    out.detected = final_set;
    out.coefficients = CoefficientVector(final_set, std::move(values));

    if (cfg.refit && !final_set.empty()) {
        std::vector<std::size_t> axes(d);
        std::iota(axes.begin(), axes.end(), std::size_t{1});
        std::optional<Rank1Lattice> grid;
        if (d == 1)
            grid = axis_lattice(cfg.search_space.radius());
        auto refit = detail::run_stage(f, std::move(axes), final_set, cfg,
                                       derive_seed(cfg.seed, {detail::tag(detail::SeedTag::refit_stage)}), grid);
        out.coefficients = refit.best_coefficients;
        out.stages.push_back(std::move(refit));
    }

    for (const auto& s : out.stages)
        out.total_samples += s.samples_used;
    return out;
}

} // namespace sfft
