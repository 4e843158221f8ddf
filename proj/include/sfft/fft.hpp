#pragma once

// Thin RAII layer over FFTW for unnormalized length-n complex DFTs of any n.

#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>

#include <fftw3.h>

namespace sfft::fft {

using cplx = std::complex<double>;

enum class Direction : int {
    /// sum_j x_j exp(-2 pi i j k / n)
    forward = FFTW_FORWARD,
    /// sum_j x_j exp(+2 pi i j k / n)
    backward = FFTW_BACKWARD,
};

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

/// SIMD-aligned complex buffer for in-place transforms.
class Buffer {
public:
    explicit Buffer(std::size_t n)
        : n_(n), data_(static_cast<cplx*>(fftw_malloc(sizeof(cplx) * (n ? n : 1))))
    {
        if (!data_)
            throw std::bad_alloc();
        for (std::size_t i = 0; i < n_; ++i)
            data_.get()[i] = cplx(0.0, 0.0);
    }

    std::size_t size() const { return n_; }
    cplx* data() { return data_.get(); }
    const cplx* data() const { return data_.get(); }
    cplx& operator[](std::size_t i) { return data_.get()[i]; }
    const cplx& operator[](std::size_t i) const { return data_.get()[i]; }
    std::span<cplx> span() { return {data_.get(), n_}; }
    std::span<const cplx> span() const { return {data_.get(), n_}; }

private:
    std::size_t n_;
    std::unique_ptr<cplx, FftwFree> data_;
};

namespace detail {

class PlanCache {
public:
    static PlanCache& instance()
    {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, Direction dir)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, static_cast<int>(dir));
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;
        // Plan on a scratch aligned buffer; execution uses fftw_execute_dft on
        // other buffers with identical alignment, which FFTW permits.
        Buffer scratch(n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, static_cast<int>(dir), FFTW_ESTIMATE);
        if (!plan)
            throw std::runtime_error("fftw: planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

    ~PlanCache()
    {
        for (auto& [key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

private:
    PlanCache() = default;

    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

} // namespace detail

/// In-place unnormalized DFT of the whole buffer.
inline void transform(Buffer& buf, Direction dir)
{
    if (buf.size() == 0)
        return;
    if (buf.size() > static_cast<std::size_t>(std::numeric_limits<int>::max()))
        throw std::length_error("fft: length exceeds FFTW int range");
    fftw_plan plan = detail::PlanCache::instance().get(buf.size(), dir);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plan, p, p);
}

} // namespace sfft::fft
