#pragma once

// Evaluation and adjoint of the Fourier matrix L = (exp(2 pi i <k, x^j>))_{j, k}
// on rank-1 lattices (one length-M FFT plus binning), on subsampled lattices,
// and on arbitrary point sets (direct summation).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "fft.hpp"
#include "index_sets.hpp"
#include "lattice.hpp"

namespace sfft {

using cplx = std::complex<double>;

struct CoefficientVector {
    FrequencySet support;
    std::vector<cplx> values;

    CoefficientVector() = default;
    CoefficientVector(FrequencySet s, std::vector<cplx> v) : support(std::move(s)), values(std::move(v))
    {
        if (values.size() != support.size())
            throw std::invalid_argument("CoefficientVector: size mismatch");
    }
    explicit CoefficientVector(FrequencySet s)
        : support(std::move(s)), values(support.size(), cplx(0.0, 0.0))
    {
    }

    std::size_t size() const { return values.size(); }
};

/// n points in [0,1)^d, stored row-major.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t dimension, std::vector<double> coords) : d_(dimension), x_(std::move(coords))
    {
        if (d_ == 0 || x_.size() % d_ != 0)
            throw std::invalid_argument("PointSet: coordinate count not a multiple of dimension");
    }

    std::size_t dimension() const { return d_; }
    std::size_t size() const { return d_ ? x_.size() / d_ : 0; }
    std::span<const double> operator[](std::size_t i) const { return {x_.data() + i * d_, d_}; }
    const std::vector<double>& coordinates() const { return x_; }

    void push_back(std::span<const double> p)
    {
        require_dimension(p.size(), d_, "PointSet::push_back");
        x_.insert(x_.end(), p.begin(), p.end());
    }

private:
    std::size_t d_ = 0;
    std::vector<double> x_;
};

inline PointSet lattice_points(const Rank1Lattice& lat)
{
    std::vector<double> x;
    x.reserve(lat.size() * lat.dimension());
    for (std::uint64_t i = 0; i < lat.size(); ++i) {
        auto p = node(lat, i);
        x.insert(x.end(), p.begin(), p.end());
    }
    return PointSet(lat.dimension(), std::move(x));
}

inline PointSet subsample_points(const SubsampledLattice& sub)
{
    std::vector<double> x;
    x.reserve(sub.size() * sub.base.dimension());
    for (auto i : sub.picks) {
        auto p = node(sub.base, i);
        x.insert(x.end(), p.begin(), p.end());
    }
    return PointSet(sub.base.dimension(), std::move(x));
}

/// L and L* for a full rank-1 lattice. Each k is mapped to the bin
/// <k, z> mod M once; bins shared by several k accumulate on evaluation and are
/// read by each of them on the adjoint, so both are exact linear maps whether or
/// not the lattice is reconstructing for the set.
class LatticeOperator {
public:
    LatticeOperator(Rank1Lattice lattice, const FrequencySet& set)
        : lattice_(std::move(lattice)), bins_(lattice_.residues(set))
    {
    }

    const Rank1Lattice& lattice() const { return lattice_; }
    std::size_t rows() const { return lattice_.size(); }
    std::size_t cols() const { return bins_.size(); }

    void evaluate(std::span<const cplx> c, std::span<cplx> out) const
    {
        if (c.size() != cols() || out.size() != rows())
            throw dimension_error("LatticeOperator::evaluate: size mismatch");
        fft::Buffer buf(rows());
        for (std::size_t j = 0; j < c.size(); ++j)
            buf[bins_[j]] += c[j];
        fft::transform(buf, fft::Direction::backward);
        std::copy(buf.data(), buf.data() + rows(), out.begin());
    }

    void adjoint(std::span<const cplx> v, std::span<cplx> out) const
    {
        if (v.size() != rows() || out.size() != cols())
            throw dimension_error("LatticeOperator::adjoint: size mismatch");
        fft::Buffer buf(rows());
        std::copy(v.begin(), v.end(), buf.data());
        fft::transform(buf, fft::Direction::forward);
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = buf[bins_[j]];
    }

private:
    Rank1Lattice lattice_;
    std::vector<std::uint64_t> bins_;
};

/// Rows of the full-lattice matrix restricted to the picked nodes, duplicates
/// repeated.
class SubsampledOperator {
public:
    SubsampledOperator(SubsampledLattice sub, const FrequencySet& set)
        : full_(sub.base, set), picks_(std::move(sub.picks))
    {
    }

    std::size_t rows() const { return picks_.size(); }
    std::size_t cols() const { return full_.cols(); }

    void evaluate(std::span<const cplx> c, std::span<cplx> out) const
    {
        if (c.size() != cols() || out.size() != rows())
            throw dimension_error("SubsampledOperator::evaluate: size mismatch");
        std::vector<cplx> all(full_.rows());
        full_.evaluate(c, all);
        for (std::size_t j = 0; j < picks_.size(); ++j)
            out[j] = all[picks_[j]];
    }

    void adjoint(std::span<const cplx> v, std::span<cplx> out) const
    {
        if (v.size() != rows() || out.size() != cols())
            throw dimension_error("SubsampledOperator::adjoint: size mismatch");
        std::vector<cplx> scattered(full_.rows(), cplx(0.0, 0.0));
        for (std::size_t j = 0; j < picks_.size(); ++j)
            scattered[picks_[j]] += v[j];
        full_.adjoint(scattered, out);
    }

private:
    LatticeOperator full_;
    std::vector<std::uint64_t> picks_;
};

namespace detail {

// Plain complex product; std::complex multiplication goes through the
// NaN-recovering library routine unless fast-math style flags are set.
inline cplx mul(cplx a, cplx b)
{
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

} // namespace detail

/// Direct O(n |I|) summation at arbitrary points.
///
/// Per point, exp(2 pi i k x_t) is tabulated over the range of each axis.
/// Frequencies sharing all but the last coordinate form a group: the product
/// over the leading axes is formed once per group (only from the first axis
/// where it differs from the previous group) and the last axis is a dot
/// product against the table row.
class NaiveOperator {
public:
    NaiveOperator(PointSet points, const FrequencySet& set)
        : points_(std::move(points)), d_(set.dimension()), n_freq_(set.size())
    {
        require_dimension(points_.dimension(), d_, "NaiveOperator");
        lo_.assign(d_, 0);
        hi_.assign(d_, 0);
        if (!set.empty()) {
            lo_ = hi_ = set[0];
            for (const auto& k : set)
                for (std::size_t t = 0; t < d_; ++t) {
                    lo_[t] = std::min(lo_[t], k[t]);
                    hi_[t] = std::max(hi_[t], k[t]);
                }
        }
        offset_.assign(d_ + 1, 0);
        for (std::size_t t = 0; t < d_; ++t)
            offset_[t + 1] = offset_[t] + static_cast<std::size_t>(hi_[t] - lo_[t] + 1);
        if (d_ == 0)
            return;
        const std::size_t last = d_ - 1;
        last_index_.resize(n_freq_);
        for (std::size_t j = 0; j < n_freq_; ++j) {
            std::size_t r = 0;
            if (j > 0)
                while (r < d_ && set[j][r] == set[j - 1][r])
                    ++r;
            if (j == 0 || r < last) {
                group_begin_.push_back(j);
                group_restart_.push_back(j == 0 ? 0 : r);
                for (std::size_t t = 0; t < last; ++t)
                    prefix_index_.push_back(static_cast<std::uint32_t>(offset_[t] + (set[j][t] - lo_[t])));
            }
            last_index_[j] = static_cast<std::uint32_t>(set[j][last] - lo_[last]);
        }
        group_begin_.push_back(n_freq_);
    }

    std::size_t rows() const { return points_.size(); }
    std::size_t cols() const { return n_freq_; }
    const PointSet& points() const { return points_; }

    void evaluate(std::span<const cplx> c, std::span<cplx> out) const
    {
        if (c.size() != cols() || out.size() != rows())
            throw dimension_error("NaiveOperator::evaluate: size mismatch");
        if (n_freq_ == 0) {
            std::fill(out.begin(), out.end(), cplx(0.0, 0.0));
            return;
        }
        std::vector<double> cr(n_freq_), ci(n_freq_);
        for (std::size_t j = 0; j < n_freq_; ++j) {
            cr[j] = c[j].real();
            ci[j] = c[j].imag();
        }
        std::vector<double> tr(offset_[d_]), ti(offset_[d_]);
        std::vector<cplx> partial(d_, cplx(1.0, 0.0));
        const std::size_t last = d_ - 1;
        for (std::size_t i = 0; i < rows(); ++i) {
            fill_table(points_[i], tr, ti);
            const double* lr = tr.data() + offset_[last];
            const double* li = ti.data() + offset_[last];
            cplx acc(0.0, 0.0);
            for (std::size_t g = 0; g + 1 < group_begin_.size(); ++g) {
                const cplx p = prefix_product(g, tr, ti, partial);
                double sr0 = 0, si0 = 0, sr1 = 0, si1 = 0;
                std::size_t j = group_begin_[g];
                const std::size_t e = group_begin_[g + 1];
                for (; j + 1 < e; j += 2) {
                    const std::uint32_t a = last_index_[j], b = last_index_[j + 1];
                    sr0 += cr[j] * lr[a] - ci[j] * li[a];
                    si0 += cr[j] * li[a] + ci[j] * lr[a];
                    sr1 += cr[j + 1] * lr[b] - ci[j + 1] * li[b];
                    si1 += cr[j + 1] * li[b] + ci[j + 1] * lr[b];
                }
                if (j < e) {
                    const std::uint32_t a = last_index_[j];
                    sr0 += cr[j] * lr[a] - ci[j] * li[a];
                    si0 += cr[j] * li[a] + ci[j] * lr[a];
                }
                acc += detail::mul(p, cplx(sr0 + sr1, si0 + si1));
            }
            out[i] = acc;
        }
    }

    void adjoint(std::span<const cplx> v, std::span<cplx> out) const
    {
        if (v.size() != rows() || out.size() != cols())
            throw dimension_error("NaiveOperator::adjoint: size mismatch");
        if (n_freq_ == 0)
            return;
        std::vector<double> orr(n_freq_, 0.0), oi(n_freq_, 0.0);
        std::vector<double> tr(offset_[d_]), ti(offset_[d_]);
        std::vector<cplx> partial(d_, cplx(1.0, 0.0));
        const std::size_t last = d_ - 1;
        for (std::size_t i = 0; i < rows(); ++i) {
            fill_table(points_[i], tr, ti);
            const double* lr = tr.data() + offset_[last];
            const double* li = ti.data() + offset_[last];
            for (std::size_t g = 0; g + 1 < group_begin_.size(); ++g) {
                // conj(p t_j) v = conj(t_j) q with q = conj(p) v.
                const cplx q = detail::mul(std::conj(prefix_product(g, tr, ti, partial)), v[i]);
                const double qr = q.real(), qi = q.imag();
                for (std::size_t j = group_begin_[g]; j < group_begin_[g + 1]; ++j) {
                    const std::uint32_t a = last_index_[j];
                    orr[j] += lr[a] * qr + li[a] * qi;
                    oi[j] += lr[a] * qi - li[a] * qr;
                }
            }
        }
        for (std::size_t j = 0; j < n_freq_; ++j)
            out[j] = cplx(orr[j], oi[j]);
    }

private:
    // Product over the leading d-1 axes for group g; partial[t] holds the
    // product over axes < t and stays valid for the axes the groups share.
    cplx prefix_product(std::size_t g, const std::vector<double>& tr, const std::vector<double>& ti,
                        std::vector<cplx>& partial) const
    {
        const std::size_t last = d_ - 1;
        const std::uint32_t* idx = prefix_index_.data() + g * last;
        for (std::size_t t = group_restart_[g]; t < last; ++t)
            partial[t + 1] = detail::mul(partial[t], cplx(tr[idx[t]], ti[idx[t]]));
        return partial[last];
    }

    // exp(2 pi i k x) for k in [lo, hi] by repeated multiplication in four
    // interleaved chains, re-anchored with an exact evaluation every 32 steps.
    void fill_table(std::span<const double> x, std::vector<double>& tr, std::vector<double>& ti) const
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        constexpr std::int64_t block = 32;
        for (std::size_t t = 0; t < d_; ++t) {
            const double xt = x[t];
            const cplx step = std::polar(1.0, two_pi * xt);
            const cplx step4 = std::polar(1.0, two_pi * (4 * xt - std::floor(4 * xt)));
            double* rr = tr.data() + offset_[t];
            double* ri = ti.data() + offset_[t];
            const std::int64_t len = hi_[t] - lo_[t] + 1;
            for (std::int64_t m0 = 0; m0 < len; m0 += block) {
                // reduce k * x mod 1 before scaling to keep the phase exact
                const double kx = static_cast<double>(lo_[t] + m0) * xt;
                cplx c0 = std::polar(1.0, two_pi * (kx - std::floor(kx)));
                cplx c1 = detail::mul(c0, step);
                cplx c2 = detail::mul(c1, step);
                cplx c3 = detail::mul(c2, step);
                const std::int64_t end = std::min(len, m0 + block);
                for (std::int64_t m = m0; m < end; m += 4) {
                    rr[m] = c0.real();
                    ri[m] = c0.imag();
                    if (m + 1 < end) {
                        rr[m + 1] = c1.real();
                        ri[m + 1] = c1.imag();
                    }
                    if (m + 2 < end) {
                        rr[m + 2] = c2.real();
                        ri[m + 2] = c2.imag();
                    }
                    if (m + 3 < end) {
                        rr[m + 3] = c3.real();
                        ri[m + 3] = c3.imag();
                    }
                    c0 = detail::mul(c0, step4);
                    c1 = detail::mul(c1, step4);
                    c2 = detail::mul(c2, step4);
                    c3 = detail::mul(c3, step4);
                }
            }
        }
    }

    PointSet points_;
    std::size_t d_;
    std::size_t n_freq_;
    MultiIndex lo_, hi_;
    std::vector<std::size_t> offset_;
    std::vector<std::size_t> group_begin_;
    std::vector<std::size_t> group_restart_;
    std::vector<std::uint32_t> prefix_index_;
    std::vector<std::uint32_t> last_index_;
};

// Free-function forms.

inline std::vector<cplx> lattice_evaluate(const CoefficientVector& c, const Rank1Lattice& lat)
{
    LatticeOperator op(lat, c.support);
    std::vector<cplx> out(op.rows());
    op.evaluate(c.values, out);
    return out;
}

inline CoefficientVector lattice_adjoint(std::span<const cplx> v, const FrequencySet& I, const Rank1Lattice& lat)
{
    LatticeOperator op(lat, I);
    CoefficientVector out(I);
    op.adjoint(v, out.values);
    return out;
}

inline std::vector<cplx> subsampled_evaluate(const CoefficientVector& c, const SubsampledLattice& sub)
{
    SubsampledOperator op(sub, c.support);
    std::vector<cplx> out(op.rows());
    op.evaluate(c.values, out);
    return out;
}

inline CoefficientVector subsampled_adjoint(std::span<const cplx> v, const FrequencySet& I, const SubsampledLattice& sub)
{
    SubsampledOperator op(sub, I);
    CoefficientVector out(I);
    op.adjoint(v, out.values);
    return out;
}

inline std::vector<cplx> naive_evaluate(const CoefficientVector& c, const PointSet& pts)
{
    NaiveOperator op(pts, c.support);
    std::vector<cplx> out(op.rows());
    op.evaluate(c.values, out);
    return out;
}

inline CoefficientVector naive_adjoint(std::span<const cplx> v, const FrequencySet& I, const PointSet& pts)
{
    NaiveOperator op(pts, I);
    CoefficientVector out(I);
    op.adjoint(v, out.values);
    return out;
}

} // namespace sfft
