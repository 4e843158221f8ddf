#pragma once

// Empirical Marcinkiewicz-Zygmund constants: extremes of (1/n) sum |p(x_i)|^2
// over random polynomials p with support I and unit L2 norm.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"
#include "random.hpp"
#include "transform.hpp"

namespace sfft {

struct MzEstimate {
    double lower;
    double upper;
};

namespace detail {

template <class Op>
MzEstimate empirical_mz_impl(const Op& op, const FrequencySet& I, int trials, std::uint64_t seed)
{
    if (trials < 1)
        throw std::invalid_argument("empirical_mz: trials must be >= 1");
    if (I.empty())
        throw std::invalid_argument("empirical_mz: empty frequency set");
    Rng rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<cplx> c(I.size()), v(op.rows());
    MzEstimate est{std::numeric_limits<double>::infinity(), 0.0};
    for (int trial = 0; trial < trials; ++trial) {
        double norm = 0.0;
        for (auto& x : c) {
            x = cplx(gauss(rng), gauss(rng));
            norm += std::norm(x);
        }
        const double scale = 1.0 / std::sqrt(norm);
        for (auto& x : c)
            x *= scale;
        op.evaluate(c, v);
        double q = 0.0;
        for (const auto& y : v)
            q += std::norm(y);
        q /= static_cast<double>(v.size());
        est.lower = std::min(est.lower, q);
        est.upper = std::max(est.upper, q);
    }
    return est;
}

} // namespace detail

inline MzEstimate empirical_mz(const Rank1Lattice& lat, const FrequencySet& I, int trials, std::uint64_t seed)
{
    return detail::empirical_mz_impl(LatticeOperator(lat, I), I, trials, seed);
}

inline MzEstimate empirical_mz(const SubsampledLattice& sub, const FrequencySet& I, int trials, std::uint64_t seed)
{
    return detail::empirical_mz_impl(SubsampledOperator(sub, I), I, trials, seed);
}

} // namespace sfft
