#pragma once

// Periodic B-spline test functions with exact Fourier coefficients.
//
// N_m(x) = C_m sum_k (-1)^k sinc(pi k / m)^m exp(2 pi i k x) is, on [0,1),
// m C_m M_m(m x) with M_m the cardinal B-spline on knots 0..m. C_m normalizes
// ||N_m||_{L2} = 1, i.e. C_m^-2 = sum_k sinc(pi k/m)^{2m} = m M_{2m}(m).

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "index_sets.hpp"
#include "transform.hpp"

namespace sfft::testfn {

constexpr int max_order = 32;

/// Cardinal B-spline of order m (degree m-1) on knots 0, 1, ..., m, evaluated by
/// the Cox-de Boor triangle. Zero outside [0, m).
inline double cardinal_bspline(int m, double u)
{
    if (m < 1 || m > max_order)
        throw std::invalid_argument("cardinal_bspline: order out of range");
    if (!(u >= 0.0) || u >= m)
        return 0.0;
    const int j = static_cast<int>(std::floor(u));
    // b[a] holds N_{i, k}(u), i = j - m + 1 + a, for the order-k basis
    // functions alive on [j, j+1). Ascending a reads b[a + 1] before it is
    // overwritten.
    std::array<double, max_order + 1> b{};
    b[m - 1] = 1.0;
    for (int k = 2; k <= m; ++k) {
        for (int a = m - k; a < m; ++a) {
            const double i = j - m + 1 + a;
            b[a] = ((u - i) * b[a] + (i + k - u) * b[a + 1]) / (k - 1);
        }
    }
    return b[m - 1 - j];
}

/// sin(x) / x with sinc(0) = 1.
inline double sinc(double x)
{
    return x == 0.0 ? 1.0 : std::sin(x) / x;
}

/// C_m with ||N_m||_{L2(T)} = 1.
inline double bspline_norm_const(int m)
{
    if (m < 1 || m > max_order / 2)
        throw std::invalid_argument("bspline_norm_const: order out of range");
    static const auto cache = [] {
        std::array<double, max_order / 2 + 1> c{};
        for (int order = 1; order <= max_order / 2; ++order)
            c[order] = 1.0 / std::sqrt(order * cardinal_bspline(2 * order, static_cast<double>(order)));
        return c;
    }();
    return cache[m];
}

/// Fourier coefficient C_m (-1)^k sinc(pi k/m)^m.
inline double bspline_coeff(int m, std::int64_t k)
{
    if (k % m == 0 && k != 0)
        return 0.0;
    const double s = std::pow(sinc(std::numbers::pi * static_cast<double>(k) / m), m);
    return bspline_norm_const(m) * ((k & 1) ? -s : s);
}

/// N_m(x), x taken modulo 1.
inline double bspline_eval(int m, double x)
{
    const double frac = x - std::floor(x);
    return m * bspline_norm_const(m) * cardinal_bspline(m, m * frac);
}

/// Truncated series sum_{|k| <= K} of the defining Fourier series. Returns
/// the complex sum so callers can check the imaginary part cancels.
inline std::complex<double> bspline_eval_series(int m, double x, std::int64_t K)
{
    std::complex<double> acc = bspline_coeff(m, 0);
    for (std::int64_t k = 1; k <= K; ++k) {
        const double c = bspline_coeff(m, k);
        if (c == 0.0)
            continue;
        const double kx = static_cast<double>(k) * x;
        const double phase = 2.0 * std::numbers::pi * (kx - std::floor(kx));
        // c_{-k} = c_k
        acc += c * std::polar(1.0, phase) + c * std::polar(1.0, -phase);
    }
    return acc;
}

struct FactorGroup {
    /// 1-based axes.
    std::vector<std::size_t> axes;
    int order;
};

/// f(x) = sum_g prod_{t in g} N_{m_g}(x_t) over disjoint groups of axes.
class TestFunction {
public:
    TestFunction(std::size_t dimension, std::vector<FactorGroup> groups)
        : d_(dimension), groups_(std::move(groups))
    {
        std::vector<bool> used(d_ + 1, false);
        for (const auto& g : groups_) {
            if (g.order < 1 || g.order > max_order / 2)
                throw std::invalid_argument("TestFunction: order out of range");
            for (auto t : g.axes) {
                if (t < 1 || t > d_)
                    throw std::invalid_argument("TestFunction: axis out of range");
                if (used[t])
                    throw std::invalid_argument("TestFunction: groups must be disjoint");
                used[t] = true;
            }
        }
    }

    /// The 10-dimensional benchmark: N_2 on {1,3,8}, N_4 on {2,5,6,10}, N_6 on
    /// {4,7,9}.
    static TestFunction benchmark()
    {
        return TestFunction(10, {{{1, 3, 8}, 2}, {{2, 5, 6, 10}, 4}, {{4, 7, 9}, 6}});
    }

    std::size_t dimension() const { return d_; }
    const std::vector<FactorGroup>& groups() const { return groups_; }

    double operator()(std::span<const double> x) const
    {
        require_dimension(x.size(), d_, "TestFunction");
        double sum = 0.0;
        for (const auto& g : groups_) {
            double prod = 1.0;
            for (auto t : g.axes)
                prod *= bspline_eval(g.order, x[t - 1]);
            sum += prod;
        }
        return sum;
    }

    /// Exact coefficient: group g contributes prod_{t in g} c_{m_g}(k_t) when k
    /// vanishes off the axes of g.
    double coefficient(const MultiIndex& k) const
    {
        require_dimension(k.size(), d_, "TestFunction::coefficient");
        double sum = 0.0;
        for (const auto& g : groups_) {
            std::size_t on_group_nonzero = 0;
            for (auto t : g.axes)
                on_group_nonzero += k[t - 1] != 0;
            std::size_t total_nonzero = 0;
            for (auto kt : k)
                total_nonzero += kt != 0;
            if (on_group_nonzero != total_nonzero)
                continue;
            double prod = 1.0;
            for (auto t : g.axes)
                prod *= bspline_coeff(g.order, k[t - 1]);
            sum += prod;
        }
        return sum;
    }

    /// ||f||^2: each group has unit norm; cross terms are products of means.
    double squared_norm() const
    {
        std::vector<double> means;
        for (const auto& g : groups_)
            means.push_back(std::pow(bspline_norm_const(g.order), static_cast<double>(g.axes.size())));
        return squared_norm_from_means(means);
    }

    static double squared_norm_from_means(std::span<const double> means)
    {
        double s = static_cast<double>(means.size());
        for (std::size_t a = 0; a < means.size(); ++a)
            for (std::size_t b = a + 1; b < means.size(); ++b)
                s += 2.0 * means[a] * means[b];
        return s;
    }

private:
    std::size_t d_;
    std::vector<FactorGroup> groups_;
};

/// sqrt(sum_{k in I} |f_k - g_k|^2 + ||f||^2 - sum_{k in I} |f_k|^2) / ||f||.
inline double relative_l2_error(const TestFunction& f, const CoefficientVector& g)
{
    const double f2 = f.squared_norm();
    double diff = 0.0, captured = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double fk = f.coefficient(g.support[j]);
        diff += std::norm(std::complex<double>(fk, 0.0) - g.values[j]);
        captured += fk * fk;
    }
    const double tail = std::max(0.0, f2 - captured);
    return std::sqrt(diff + tail) / std::sqrt(f2);
}

/// max_{k in I} |f_k - g_k|, 0 for an empty I.
inline double max_coefficient_error(const TestFunction& f, const CoefficientVector& g)
{
    double m = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        m = std::max(m, std::abs(std::complex<double>(f.coefficient(g.support[j]), 0.0) - g.values[j]));
    return m;
}

} // namespace sfft::testfn
