#pragma once

// Least squares for Fourier coefficients: conjugate gradients on the normal
// equations L* L g = L* f using only operator applications, and the direct
// projection (1/M) L* f on a reconstructing full lattice.

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "transform.hpp"

namespace sfft {

struct SolverSettings {
    int max_iterations = 10;
    /// Stop once ||L*(L g - f)|| <= tol * ||L* f||.
    double residual_tolerance = 1e-8;
    /// Polled once per iteration; returning true aborts with solve_interrupted.
    std::function<bool()> interrupt;
};

class solve_interrupted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveResult {
    CoefficientVector coefficients;
    int iterations = 0;
    /// Final ||L*(L g - f)|| / ||L* f|| (0 for a zero right-hand side).
    double relative_residual = 0.0;
    bool converged = false;
    /// A search direction with L p = 0 appeared before convergence; the
    /// returned iterate is the last valid one and L is rank deficient.
    bool breakdown = false;
    /// Relative normal-equation residual before the first and after every
    /// iteration.
    std::vector<double> residual_history;
    /// ||f - L g|| after every iteration (index 0: initial iterate).
    std::vector<double> sample_residual_history;
};

namespace detail {

inline double norm2(std::span<const cplx> v)
{
    double s = 0.0;
    for (const auto& x : v)
        s += std::norm(x);
    return s;
}

inline double residual_norm(std::span<const cplx> Lg, std::span<const cplx> f)
{
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += std::norm(f[i] - Lg[i]);
    return std::sqrt(s);
}

} // namespace detail

/// Operator concept shared by the lattice, subsampled and naive operators.
template <class Op>
concept LinearOperator = requires(const Op& op, std::span<const cplx> in, std::span<cplx> out) {
    { op.rows() } -> std::convertible_to<std::size_t>;
    { op.cols() } -> std::convertible_to<std::size_t>;
    op.evaluate(in, out);
    op.adjoint(in, out);
};

/// CGNR from the zero vector.
template <LinearOperator Op>
SolveResult lsq_solve(const Op& L, std::span<const cplx> samples, const FrequencySet& I,
                      const SolverSettings& settings = {})
{
    if (settings.max_iterations < 1)
        throw std::invalid_argument("lsq_solve: max_iterations must be >= 1");
    if (samples.size() != L.rows() || I.size() != L.cols())
        throw dimension_error("lsq_solve: operator shape does not match samples / frequency set");

    const std::size_t n = L.cols();
    SolveResult res;
    res.coefficients = CoefficientVector(I);
    auto& x = res.coefficients.values;

    std::vector<cplx> r(n), p(n), q(L.rows()), s(n), Lx(L.rows(), cplx(0.0, 0.0));
    L.adjoint(samples, r);
    const double b_norm = std::sqrt(detail::norm2(r));
    res.sample_residual_history.push_back(std::sqrt(detail::norm2(samples)));
    if (b_norm == 0.0) {
        res.converged = true;
        res.residual_history.push_back(0.0);
        return res;
    }
    p = r;
    double rr = detail::norm2(r);
    res.residual_history.push_back(1.0);

    for (int it = 0; it < settings.max_iterations; ++it) {
        if (settings.interrupt && settings.interrupt())
            throw solve_interrupted("lsq_solve: interrupted");
        L.evaluate(p, q);
        const double qq = detail::norm2(q);
        if (qq == 0.0) {
            res.breakdown = true;
            break;
        }
        const double alpha = rr / qq;
        for (std::size_t j = 0; j < n; ++j)
            x[j] += alpha * p[j];
        for (std::size_t i = 0; i < q.size(); ++i)
            Lx[i] += alpha * q[i];
        L.adjoint(q, s);
        for (std::size_t j = 0; j < n; ++j)
            r[j] -= alpha * s[j];
        const double rr_new = detail::norm2(r);
        ++res.iterations;
        res.relative_residual = std::sqrt(rr_new) / b_norm;
        res.residual_history.push_back(res.relative_residual);
        res.sample_residual_history.push_back(detail::residual_norm(Lx, samples));
        if (res.relative_residual <= settings.residual_tolerance) {
            res.converged = true;
            break;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t j = 0; j < n; ++j)
            p[j] = r[j] + beta * p[j];
    }
    return res;
}

/// Adapts an (apply, apply_adjoint) pair of callables to LinearOperator.
template <class Apply, class Adjoint>
struct CallableOperator {
    std::size_t n_rows;
    std::size_t n_cols;
    Apply apply;
    Adjoint apply_adjoint;

    std::size_t rows() const { return n_rows; }
    std::size_t cols() const { return n_cols; }
    void evaluate(std::span<const cplx> in, std::span<cplx> out) const { apply(in, out); }
    void adjoint(std::span<const cplx> in, std::span<cplx> out) const { apply_adjoint(in, out); }
};

template <class Apply, class Adjoint>
SolveResult lsq_solve(Apply apply, Adjoint apply_adjoint, std::span<const cplx> samples, const FrequencySet& I,
                      const SolverSettings& settings = {})
    requires std::invocable<Apply, std::span<const cplx>, std::span<cplx>>
{
    CallableOperator<Apply, Adjoint> op{samples.size(), I.size(), std::move(apply), std::move(apply_adjoint)};
    return lsq_solve(op, samples, I, settings);
}

/// g = (1/M) L* f. Exact least squares solution when the lattice is
/// reconstructing for I, since then L* L = M Id.
inline CoefficientVector full_lattice_solve(std::span<const cplx> samples, const FrequencySet& I,
                                            const Rank1Lattice& lat)
{
    if (samples.size() != lat.size())
        throw dimension_error("full_lattice_solve: need one sample per lattice node");
    auto out = lattice_adjoint(samples, I, lat);
    const double scale = 1.0 / static_cast<double>(lat.size());
    for (auto& v : out.values)
        v *= scale;
    return out;
}

inline CoefficientVector full_lattice_solve(const LatticeOperator& op, std::span<const cplx> samples,
                                            const FrequencySet& I)
{
    CoefficientVector out(I);
    op.adjoint(samples, out.values);
    const double scale = 1.0 / static_cast<double>(op.rows());
    for (auto& v : out.values)
        v *= scale;
    return out;
}

} // namespace sfft
