// Acceptance checks. `acceptance N` runs criterion N, `acceptance` runs all.
// Each criterion prints its diagnostics followed by one PASS/FAIL line.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sfft/bench.hpp"
#include "sfft/mz.hpp"
#include "sfft/sft.hpp"
#include "sfft/synthetic.hpp"
#include "sfft/testfn.hpp"

#ifndef SFFT_CLI_PATH
#define SFFT_CLI_PATH "sfft_cli"
#endif

using namespace sfft;
using Clock = std::chrono::steady_clock;
using lcplx = std::complex<long double>;
using hp = boost::multiprecision::cpp_bin_float_50;

namespace {

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(int id, bool pass, const std::string& summary)
{
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << " (" << summary << ")" << std::endl;
    return pass;
}

FrequencySet random_set(std::mt19937_64& rng, std::size_t d, std::size_t n, std::int64_t range)
{
    std::uniform_int_distribution<std::int64_t> coord(-range, range);
    std::set<MultiIndex> s;
    while (s.size() < n) {
        MultiIndex k(d);
        for (auto& v : k)
            v = coord(rng);
        s.insert(k);
    }
    return FrequencySet(d, {s.begin(), s.end()});
}

std::vector<cplx> gaussian_vector(std::mt19937_64& rng, std::size_t n)
{
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    for (auto& x : v)
        x = cplx(g(rng), g(rng));
    return v;
}

// exp(2 pi i (a / M)) for an exact integer residue a.
lcplx unit_root(unsigned __int128 a, std::uint64_t M)
{
    const long double phase = static_cast<long double>(a % M) / static_cast<long double>(M);
    return std::polar(1.0L, 2 * std::numbers::pi_v<long double> * phase);
}

std::uint64_t residue(const MultiIndex& k, const Rank1Lattice& lat)
{
    __int128 r = 0;
    const auto M = static_cast<__int128>(lat.size());
    for (std::size_t t = 0; t < k.size(); ++t)
        r = (r + static_cast<__int128>(k[t]) * static_cast<__int128>(lat.generator()[t])) % M;
    return static_cast<std::uint64_t>((r + M) % M);
}

// Long double direct sums over lattice node indices.
std::vector<cplx> oracle_evaluate(std::span<const cplx> c, const FrequencySet& I, const Rank1Lattice& lat,
                                  std::span<const std::uint64_t> nodes)
{
    std::vector<std::uint64_t> res(I.size());
    for (std::size_t j = 0; j < I.size(); ++j)
        res[j] = residue(I[j], lat);
    std::vector<cplx> out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        lcplx acc = 0;
        for (std::size_t j = 0; j < I.size(); ++j)
            acc += lcplx(c[j]) * unit_root(static_cast<unsigned __int128>(res[j]) * nodes[i], lat.size());
        out[i] = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    return out;
}

std::vector<cplx> oracle_adjoint(std::span<const cplx> v, const FrequencySet& I, const Rank1Lattice& lat,
                                 std::span<const std::uint64_t> nodes)
{
    std::vector<cplx> out(I.size());
    for (std::size_t j = 0; j < I.size(); ++j) {
        const std::uint64_t r = residue(I[j], lat);
        lcplx acc = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += lcplx(v[i]) * std::conj(unit_root(static_cast<unsigned __int128>(r) * nodes[i], lat.size()));
        out[j] = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    return out;
}

double rel_err(std::span<const cplx> a, std::span<const cplx> b)
{
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double norm2(std::span<const cplx> a)
{
    double s = 0;
    for (auto x : a)
        s += std::norm(x);
    return std::sqrt(s);
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b)
{
    cplx s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * std::conj(b[i]);
    return s;
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// ---------------------------------------------------------------------------

bool criterion1()
{
    const auto t0 = Clock::now();
    std::string out;
    FILE* p = popen(SFFT_CLI_PATH " count --dimension 10 --radius 256", "r");
    if (!p)
        return report(1, false, "could not start CLI");
    char buf[256];
    while (std::fgets(buf, sizeof buf, p))
        out += buf;
    const int status = pclose(p);
    const double secs = seconds_since(t0);
    std::cout << "count --dimension 10 --radius 256 -> " << out << "elapsed " << secs << " s" << std::endl;
    const bool ok = status == 0 && out == "8827703433\n" && secs < 5.0;
    return report(1, ok, "output " + out.substr(0, out.find('\n')) + ", " + std::to_string(secs) + " s");
}

bool criterion2()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240602);
    double worst_eval = 0, worst_adj = 0, worst_identity = 0;
    int primes = 0, pow2 = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + rng() % 4;
        const std::size_t n = 1 + rng() % 32;
        auto I = random_set(rng, d, n, 20);
        std::uint64_t M;
        if (trial % 2) {
            M = std::uint64_t{1} << (1 + rng() % 8);
            ++pow2;
        } else {
            do
                M = next_prime(2 + rng() % 255);
            while (M > 256);
            ++primes;
        }
        std::vector<std::uint64_t> z(d);
        for (auto& v : z)
            v = rng() % M;
        Rank1Lattice lat(z, M);
        auto c = gaussian_vector(rng, I.size());

        // full lattice
        std::vector<std::uint64_t> all(M);
        std::iota(all.begin(), all.end(), std::uint64_t{0});
        LatticeOperator L(lat, I);
        std::vector<cplx> f(M), back(I.size());
        L.evaluate(c, f);
        worst_eval = std::max(worst_eval, rel_err(f, oracle_evaluate(c, I, lat, all)));
        auto v = gaussian_vector(rng, M);
        L.adjoint(v, back);
        worst_adj = std::max(worst_adj, rel_err(back, oracle_adjoint(v, I, lat, all)));
        worst_identity = std::max(worst_identity, std::abs(inner(f, v) - inner(c, back)) / (norm2(c) * norm2(v)));

        // subsampled lattice
        auto sub = subsample(lat, 1 + rng() % 64, rng());
        SubsampledOperator S(sub, I);
        std::vector<cplx> fs(sub.size());
        S.evaluate(c, fs);
        worst_eval = std::max(worst_eval, rel_err(fs, oracle_evaluate(c, I, lat, sub.picks)));
        auto vs = gaussian_vector(rng, sub.size());
        S.adjoint(vs, back);
        worst_adj = std::max(worst_adj, rel_err(back, oracle_adjoint(vs, I, lat, sub.picks)));
        worst_identity = std::max(worst_identity, std::abs(inner(fs, vs) - inner(c, back)) / (norm2(c) * norm2(vs)));

        // naive operator on the same subsampled nodes
        NaiveOperator N(subsample_points(sub), I);
        std::vector<cplx> fn(sub.size());
        N.evaluate(c, fn);
        worst_eval = std::max(worst_eval, rel_err(fn, oracle_evaluate(c, I, lat, sub.picks)));
        N.adjoint(vs, back);
        worst_adj = std::max(worst_adj, rel_err(back, oracle_adjoint(vs, I, lat, sub.picks)));
        worst_identity = std::max(worst_identity, std::abs(inner(fn, vs) - inner(c, back)) / (norm2(c) * norm2(vs)));
    }
    const double secs = seconds_since(t0);
    std::cout << "instances: 200 (" << primes << " prime M, " << pow2 << " power-of-two M)\n"
              << "max relative error evaluate " << worst_eval << ", adjoint " << worst_adj << "\n"
              << "max adjointness defect " << worst_identity << "\nelapsed " << secs << " s" << std::endl;
    const bool ok = worst_eval <= 1e-10 && worst_adj <= 1e-10 && worst_identity <= 1e-10 && secs < 30;
    std::ostringstream s;
    s << "eval " << worst_eval << ", adjoint " << worst_adj << ", identity " << worst_identity << ", " << secs << " s";
    return report(2, ok, s.str());
}

bool criterion3()
{
    std::mt19937_64 rng(77);
    double worst_full = 0, worst_lsq = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + rng() % 6;
        auto I = random_set(rng, d, 1 + rng() % 32, 30);
        auto lat = build_reconstructing(I, rng());
        auto c = gaussian_vector(rng, I.size());
        std::vector<std::uint64_t> all(lat.size());
        std::iota(all.begin(), all.end(), std::uint64_t{0});
        auto f = oracle_evaluate(c, I, lat, all);
        auto g = full_lattice_solve(f, I, lat);
        worst_full = std::max(worst_full, max_diff(g.values, c));
        auto h = lsq_solve(LatticeOperator(lat, I), f, I);
        worst_lsq = std::max(worst_lsq, max_diff(h.coefficients.values, g.values));
    }
    std::cout << "max coefficient error full_lattice_solve " << worst_full << ", lsq vs full " << worst_lsq
              << std::endl;
    std::ostringstream s;
    s << "full " << worst_full << ", lsq " << worst_lsq;
    return report(3, worst_full <= 1e-12 && worst_lsq <= 1e-10, s.str());
}

bool criterion4()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(4);
    auto pool = HyperbolicCross(3, 16).materialize();
    std::vector<MultiIndex> elems(pool.begin(), pool.end());
    std::shuffle(elems.begin(), elems.end(), rng);
    elems.resize(64);
    FrequencySet I(3, elems);
    auto lat = build_reconstructing(I, 11);
    const std::uint64_t n = min_subsample_count(64, std::log(40.0));
    std::cout << "|I| = 64, M = " << lat.size() << ", n = " << n << std::endl;

    std::vector<std::uint64_t> res(I.size());
    for (std::size_t j = 0; j < I.size(); ++j)
        res[j] = residue(I[j], lat);
    int good = 0;
    for (int draw = 0; draw < 20; ++draw) {
        auto sub = subsample(lat, n, 1000 + draw);
        // Test-side: (1/n) sum_i |p(x_i)|^2 = c^H G c with G = (1/n) A^H A.
        const std::size_t m = I.size();
        std::vector<lcplx> A(n * m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                A[i * m + j] = unit_root(static_cast<unsigned __int128>(res[j]) * sub.picks[i], lat.size());
        std::vector<cplx> G(m * m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a; b < m; ++b) {
                lcplx s = 0;
                for (std::size_t i = 0; i < n; ++i)
                    s += std::conj(A[i * m + a]) * A[i * m + b];
                s /= static_cast<long double>(n);
                G[a * m + b] = cplx(static_cast<double>(s.real()), static_cast<double>(s.imag()));
                G[b * m + a] = std::conj(G[a * m + b]);
            }
        std::mt19937_64 prng(5000 + draw);
        double lo = 1e300, hi = 0;
        for (int trial = 0; trial < 200; ++trial) {
            auto c = gaussian_vector(prng, m);
            const double nc = norm2(c);
            for (auto& x : c)
                x /= nc;
            cplx q = 0;
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < m; ++b)
                    q += std::conj(c[a]) * G[a * m + b] * c[b];
            lo = std::min(lo, q.real());
            hi = std::max(hi, q.real());
        }
        auto lib = empirical_mz(sub, I, 200, 9000 + draw);
        const bool inside = lo >= 0.5 && hi <= 1.5;
        const bool lib_inside = lib.lower >= 0.5 && lib.upper <= 1.5;
        good += inside;
        std::cout << "draw " << draw << ": test-side [" << lo << ", " << hi << "], empirical_mz [" << lib.lower
                  << ", " << lib.upper << "]" << (inside ? "" : " outside") << (inside == lib_inside ? "" : " (disagree)")
                  << std::endl;
    }
    const double secs = seconds_since(t0);
    std::ostringstream s;
    s << good << "/20 draws within [1/2, 3/2], " << secs << " s";
    return report(4, good >= 17 && secs < 120, s.str());
}

bool criterion5()
{
    const auto t0 = Clock::now();
    HyperbolicCross hc(6, 32);
    int exact = 0;
    for (int run = 0; run < 10; ++run) {
        auto support = random_hc_frequencies(hc, 32, 100 + run);
        auto p = SparsePolynomial::random_unimodular(support, 200 + run);
        SampledFunction f(6, [&p](std::span<const double> x) { return p(x); });
        SftConfig cfg{hc};
        cfg.sparsity = 32;
        cfg.detection_iterations = 5;
        cfg.threshold = 0.1;
        cfg.strategy = Strategy::subsampled_lattice;
        cfg.seed = 300 + run;
        auto res = sft_pipeline(f, cfg);
        const bool hit = res.detected == support;
        exact += hit;
        std::cout << "run " << run << ": |I| = " << res.detected.size() << ", samples " << res.total_samples
                  << (hit ? ", support recovered" : ", support differs") << std::endl;
    }
    const double secs = seconds_since(t0);
    std::ostringstream s;
    s << exact << "/10 exact supports, " << secs << " s";
    return report(5, exact >= 9 && secs < 120, s.str());
}

double lower_median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

bool criterion6()
{
    const auto t0 = Clock::now();
    const double budget_s = 30 * 60;
    const std::vector<std::size_t> sparsities{8, 16, 32, 64, 128};
    const int reps = 5;
    const auto fn = testfn::TestFunction::benchmark();

    bench::ExperimentConfig cfg;
    cfg.base = SftConfig{HyperbolicCross(10, 256)};
    cfg.sparsities = sparsities;
    cfg.repetitions = reps;
    cfg.master_seed = 2024;

    // The lattice strategies run first; the uniform runs share what is left
    // of the budget equally.
    cfg.strategies = {Strategy::full_lattice, Strategy::subsampled_lattice};
    cfg.time_limit_s = 300;
    auto records = bench::run_experiment(cfg, fn, &std::cout);
    const double remaining = budget_s - 60 - seconds_since(t0);
    cfg.strategies = {Strategy::uniform_random};
    cfg.time_limit_s = std::max(1.0, remaining / static_cast<double>(sparsities.size() * reps));
    std::cout << "uniform per-run limit " << *cfg.time_limit_s << " s" << std::endl;
    auto uniform = bench::run_experiment(cfg, fn, &std::cout);
    records.insert(records.end(), uniform.begin(), uniform.end());
    const double secs = seconds_since(t0);

    {
        std::ofstream csv("acceptance_6.csv");
        bench::write_csv(csv, records);
    }

    const std::vector<Strategy> strategies{Strategy::full_lattice, Strategy::uniform_random,
                                           Strategy::subsampled_lattice};
    std::map<std::pair<Strategy, std::size_t>, std::optional<double>> err, samples;
    std::map<std::pair<Strategy, std::size_t>, double> wall;
    std::cout << "strategy s completed median_rel_l2_err median_samples median_wall_s(all runs)\n";
    for (auto st : strategies)
        for (auto s : sparsities) {
            std::vector<double> e, n, w;
            for (const auto& r : records) {
                if (r.strategy != st || r.s != s)
                    continue;
                w.push_back(r.wall_s);
                if (r.status == bench::RunStatus::ok || r.status == bench::RunStatus::aborted) {
                    e.push_back(*r.rel_l2_err);
                    n.push_back(static_cast<double>(r.samples));
                }
            }
            const auto key = std::make_pair(st, s);
            if (!e.empty()) {
                err[key] = lower_median(e);
                samples[key] = lower_median(n);
            }
            wall[key] = lower_median(w);
            std::cout << to_string(st) << " " << s << " " << e.size() << "/" << w.size() << " "
                      << (err[key] ? std::to_string(*err[key]) : "n/a") << " "
                      << (samples[key] ? std::to_string(static_cast<std::uint64_t>(*samples[key])) : "n/a") << " "
                      << wall[key] << "\n";
        }

    // (a) non-increasing median error in s
    bool a = true;
    for (auto st : strategies) {
        bool st_ok = true;
        for (std::size_t i = 0; i < sparsities.size(); ++i) {
            const auto cur = err[{st, sparsities[i]}];
            if (!cur) {
                st_ok = false;
                continue;
            }
            if (i > 0) {
                const auto prev = err[{st, sparsities[i - 1]}];
                if (prev && *cur > *prev)
                    st_ok = false;
            }
        }
        std::cout << "(a) " << to_string(st) << ": " << (st_ok ? "non-increasing" : "violated or incomplete") << "\n";
        a = a && st_ok;
    }
    // (b) strategies agree within a factor of 2
    bool b = true;
    for (auto s : sparsities) {
        double lo = 1e300, hi = 0;
        bool complete = true;
        for (auto st : strategies) {
            const auto v = err[{st, s}];
            if (!v) {
                complete = false;
                continue;
            }
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
        const bool ok = complete && hi <= 2 * lo;
        std::cout << "(b) s=" << s << ": " << (complete ? "ratio " + std::to_string(hi / lo) : "incomplete") << "\n";
        b = b && ok;
    }
    // (c) fewer samples for the subsampled lattice at s=128
    const auto ns = samples[{Strategy::subsampled_lattice, 128}];
    const auto nf = samples[{Strategy::full_lattice, 128}];
    const bool c = ns && nf && *ns < *nf;
    std::cout << "(c) samples subsampled " << (ns ? std::to_string(*ns) : "n/a") << " vs full "
              << (nf ? std::to_string(*nf) : "n/a") << "\n";
    // (d) wall time ordering at s=128; a timed-out run contributes its
    // elapsed time, which is a lower bound on its true wall time.
    const double wu = wall[{Strategy::uniform_random, 128}];
    const double wsub = wall[{Strategy::subsampled_lattice, 128}];
    const double wf = wall[{Strategy::full_lattice, 128}];
    const bool dd = wu > wsub && wsub > wf;
    std::cout << "(d) wall uniform " << wu << " s, subsampled " << wsub << " s, full " << wf << " s\n";
    std::cout << "elapsed " << secs << " s" << std::endl;

    std::ostringstream s;
    s << "a " << (a ? "pass" : "fail") << ", b " << (b ? "pass" : "fail") << ", c " << (c ? "pass" : "fail")
      << ", d " << (dd ? "pass" : "fail") << ", " << secs << " s";
    return report(6, a && b && c && dd && secs < budget_s, s.str());
}

std::int64_t ulp_distance(double a, double b)
{
    auto key = [](double x) {
        const auto u = std::bit_cast<std::int64_t>(x);
        return u < 0 ? std::numeric_limits<std::int64_t>::min() - u : u;
    };
    return std::abs(key(a) - key(b));
}

std::uint64_t hp_ceil(const hp& v)
{
    return static_cast<std::uint64_t>(boost::multiprecision::ceil(v));
}

bool criterion7()
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    int mismatches = 0;
    std::int64_t worst_ulp = 0;
    for (int trial = 0; trial < 20; ++trial) {
        // iteration count
        const std::uint64_t s = 1 + rng() % 1000;
        const double tail = 5 * u(rng), delta = 0.01 + u(rng), eps = 0.001 + 0.9 * u(rng);
        const hp tr = hp(tail) / hp(delta);
        const hp r = 4 * (hp(s) + tr * tr) * (log(hp(s)) + log(1 / hp(eps)));
        if (min_detection_iterations(s, tail, delta, eps) != hp_ceil(r))
            ++mismatches;

        // subsample count
        const std::uint64_t n = 1 + rng() % 100000;
        const double t = 0.1 + 10 * u(rng);
        const hp m = 12 * hp(n) * (log(hp(n)) + hp(t));
        if (min_subsample_count(n, t) != hp_ceil(m))
            ++mismatches;

        // threshold
        const double d2 = 0.1 + u(rng), p2 = 0.01 * u(rng), sup = 0.01 * u(rng);
        const hp th = hp(d2) / sqrt(hp(2)) - 4 * hp(p2) - 2 * hp(sup);
        worst_ulp = std::max(worst_ulp, ulp_distance(threshold_bound(d2, p2, sup), static_cast<double>(th)));

        // least squares error bound
        const double e2 = u(rng), ein = u(rng), eout = u(rng);
        const std::uint64_t size = 1 + rng() % 5000, excess = rng() % 100000;
        const hp a = 3 * hp(e2) + sqrt(hp(2) / (9 * hp(size))) * hp(ein);
        const hp b = 3 + sqrt(2 * hp(excess) / (9 * hp(size)));
        const hp tight = a * a + 4 * hp(eout) * hp(eout);
        const hp loose = b * b * hp(e2) * hp(e2) + 4 * hp(eout) * hp(eout);
        const auto bound = lsq_error_bound(e2, ein, eout, size, excess);
        worst_ulp = std::max(worst_ulp, ulp_distance(bound.tight, static_cast<double>(tight)));
        worst_ulp = std::max(worst_ulp, ulp_distance(bound.loose, static_cast<double>(loose)));
    }
    std::cout << "ceiling mismatches " << mismatches << ", worst ulp distance " << worst_ulp << std::endl;
    std::ostringstream s;
    s << mismatches << " ceiling mismatches, max " << worst_ulp << " ulp";
    return report(7, mismatches == 0 && worst_ulp <= 1, s.str());
}

// Composite 5-point Gauss-Legendre rule on [0, 1) with `panels` equal panels.
template <class F>
auto gauss(F f, int panels)
{
    static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                0.9061798459386640};
    static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                0.2369268850561891};
    decltype(f(0.0)) acc{};
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p)
        for (int q = 0; q < 5; ++q)
            acc += w[q] * 0.5 * h * f(h * (p + 0.5 * (x[q] + 1)));
    return acc;
}

bool criterion8()
{
    bool ok = true;
    // (a) unit norm
    double worst_norm = 0;
    for (int m : {2, 4, 6}) {
        const double n2 = gauss([m](double x) { return testfn::bspline_eval(m, x) * testfn::bspline_eval(m, x); }, 64 * m);
        worst_norm = std::max(worst_norm, std::abs(n2 - 1));
        std::cout << "||N_" << m << "||^2 = " << std::setprecision(16) << n2 << std::endl;
    }
    ok = ok && worst_norm <= 1e-8;

    // (b) coefficients against tensor quadrature of each separable group term
    const auto fn = testfn::TestFunction::benchmark();
    std::mt19937_64 rng(8);
    double worst_coeff = 0;
    for (int trial = 0; trial < 20; ++trial) {
        MultiIndex k(10, 0);
        const auto& g = fn.groups()[rng() % fn.groups().size()];
        for (auto t : g.axes)
            if (rng() % 2)
                k[t - 1] = static_cast<std::int64_t>(rng() % 9) - 4;
        if (trial % 4 == 3)
            k[rng() % 10] = 1 + static_cast<std::int64_t>(rng() % 3);
        cplx quad = 0;
        for (const auto& grp : fn.groups()) {
            cplx term = 1;
            for (std::size_t t = 1; t <= 10; ++t) {
                const bool in = std::find(grp.axes.begin(), grp.axes.end(), t) != grp.axes.end();
                const std::int64_t kt = k[t - 1];
                const int m = grp.order;
                term *= gauss(
                    [&](double x) {
                        const double v = in ? testfn::bspline_eval(m, x) : 1.0;
                        return v * std::polar(1.0, -2 * std::numbers::pi * static_cast<double>(kt) * x);
                    },
                    64 * 6);
            }
            quad += term;
        }
        worst_coeff = std::max(worst_coeff, std::abs(quad - cplx(fn.coefficient(k), 0)));
    }
    std::cout << "max coefficient deviation from quadrature " << worst_coeff << std::endl;
    ok = ok && worst_coeff <= 1e-8;

    // (c) truncation error. Coefficients vanish unless k is supported on one
    // group's axes, so the truncation onto hc(10, R) is the union of these
    // low-dimensional slices and the rest contributes exact zeros.
    auto truncation = [&](std::int64_t R) {
        std::set<MultiIndex> support;
        for (const auto& grp : fn.groups()) {
            auto slice = HyperbolicCross(grp.axes.size(), R).materialize();
            for (const auto& ks : slice) {
                MultiIndex k(10, 0);
                for (std::size_t j = 0; j < grp.axes.size(); ++j)
                    k[grp.axes[j] - 1] = ks[j];
                support.insert(k);
            }
        }
        FrequencySet I(10, {support.begin(), support.end()});
        std::vector<cplx> values;
        for (const auto& k : I)
            values.emplace_back(fn.coefficient(k), 0.0);
        return testfn::relative_l2_error(fn, CoefficientVector(I, values));
    };
    const double e16 = truncation(16), e32 = truncation(32);
    std::cout << "truncation error hc(10,16) " << e16 << ", hc(10,32) " << e32 << std::endl;
    ok = ok && e16 > 0 && e16 < 1 && e32 < e16;

    std::ostringstream s;
    s << "norm " << worst_norm << ", coeff " << worst_coeff << ", trunc " << e16 << " -> " << e32;
    return report(8, ok, s.str());
}

} // namespace

int main(int argc, char** argv)
{
    bool (*criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                            criterion5, criterion6, criterion7, criterion8};
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > 8) {
            std::cerr << "usage: acceptance [1-8 ...]\n";
            return 2;
        }
        which.push_back(id);
    }
    if (which.empty())
        for (int id = 1; id <= 8; ++id)
            which.push_back(id);
    bool all = true;
    for (int id : which) {
        try {
            all = criteria[id - 1]() && all;
        } catch (const std::exception& e) {
            report(id, false, std::string("exception: ") + e.what());
            all = false;
        }
    }
    return all ? 0 : 1;
}
