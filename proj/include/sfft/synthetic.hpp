#pragma once

// Exactly sparse trigonometric polynomials with random support in a hyperbolic
// cross, used as known-answer inputs for the pipeline.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "index_sets.hpp"
#include "random.hpp"
#include "transform.hpp"

namespace sfft {

/// `count` distinct frequencies drawn uniformly from the hyperbolic cross.
/// Each draw walks the axes, picking k_t with weight equal to the number of
/// completions of the remaining axes.
inline FrequencySet random_hc_frequencies(const HyperbolicCross& hc, std::size_t count, std::uint64_t seed)
{
    const std::size_t d = hc.dimension();
    const std::int64_t R = hc.radius();
    std::map<std::pair<std::size_t, std::int64_t>, double> memo;
    auto completions = [&](auto& self, std::size_t dims, std::int64_t q) -> double {
        if (dims == 0)
            return 1.0;
        auto key = std::make_pair(dims, q);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
        double total = 0.0;
        for (std::int64_t k = -q; k <= q; ++k)
            total += self(self, dims - 1, q / std::max<std::int64_t>(1, std::abs(k)));
        memo.emplace(key, total);
        return total;
    };
    if (static_cast<double>(count) > completions(completions, d, R))
        throw std::invalid_argument("random_hc_frequencies: more frequencies requested than the cross holds");

    Rng rng(seed);
    std::set<MultiIndex> picked;
    while (picked.size() < count) {
        MultiIndex k(d);
        std::int64_t q = R;
        for (std::size_t t = 0; t < d; ++t) {
            const double total = completions(completions, d - t, q);
            double u = uniform01(rng) * total;
            std::int64_t chosen = q;
            for (std::int64_t v = -q; v <= q; ++v) {
                u -= completions(completions, d - t - 1, q / std::max<std::int64_t>(1, std::abs(v)));
                if (u < 0) {
                    chosen = v;
                    break;
                }
            }
            k[t] = chosen;
            q /= std::max<std::int64_t>(1, std::abs(chosen));
        }
        picked.insert(std::move(k));
    }
    return FrequencySet::from_sorted(d, std::vector<MultiIndex>(picked.begin(), picked.end()));
}

/// p(x) = sum_k c_k exp(2 pi i <k, x>).
class SparsePolynomial {
public:
    explicit SparsePolynomial(CoefficientVector c) : c_(std::move(c)) {}

    /// Unit-magnitude coefficients with uniformly random phases.
    static SparsePolynomial random_unimodular(FrequencySet support, std::uint64_t seed)
    {
        Rng rng(seed);
        std::vector<cplx> v(support.size());
        for (auto& x : v)
            x = std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng));
        return SparsePolynomial(CoefficientVector(std::move(support), std::move(v)));
    }

    const CoefficientVector& coefficients() const { return c_; }
    std::size_t dimension() const { return c_.support.dimension(); }

    cplx operator()(std::span<const double> x) const
    {
        require_dimension(x.size(), dimension(), "SparsePolynomial");
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < c_.size(); ++j) {
            double phase = 0.0;
            for (std::size_t t = 0; t < x.size(); ++t) {
                const double kx = static_cast<double>(c_.support[j][t]) * x[t];
                phase += kx - std::floor(kx);
            }
            acc += c_.values[j] * std::polar(1.0, 2.0 * std::numbers::pi * (phase - std::floor(phase)));
        }
        return acc;
    }

private:
    CoefficientVector c_;
};

} // namespace sfft
