#pragma once

// Rank-1 lattices X_M = { (i z mod M) / M : i = 0..M-1 }, their reconstructing
// property for a frequency set, the randomized lattice search, and i.i.d.
// subsampling of lattice nodes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "index_sets.hpp"
#include "random.hpp"

namespace sfft {

class Rank1Lattice {
public:
    Rank1Lattice(std::vector<std::uint64_t> generator, std::uint64_t size)
        : z_(std::move(generator)), M_(size)
    {
        if (M_ == 0)
            throw std::invalid_argument("Rank1Lattice: size must be positive");
        if (z_.empty())
            throw std::invalid_argument("Rank1Lattice: empty generator");
        for (auto& zt : z_)
            zt %= M_;
    }

    std::size_t dimension() const { return z_.size(); }
    std::uint64_t size() const { return M_; }
    const std::vector<std::uint64_t>& generator() const { return z_; }

    /// <k, z> mod M in [0, M).
    std::uint64_t residue(const MultiIndex& k) const
    {
        require_dimension(k.size(), z_.size(), "Rank1Lattice::residue");
        if (M_ < (std::uint64_t{1} << 32)) {
            const auto M = static_cast<std::int64_t>(M_);
            std::int64_t acc = 0;
            bool small = true;
            for (std::size_t t = 0; t < k.size(); ++t) {
                if (k[t] >= (std::int64_t{1} << 31) || k[t] <= -(std::int64_t{1} << 31)) {
                    small = false;
                    break;
                }
                acc += (k[t] * static_cast<std::int64_t>(z_[t])) % M;
            }
            if (small) {
                acc %= M;
                return static_cast<std::uint64_t>(acc < 0 ? acc + M : acc);
            }
        }
        const auto M = static_cast<__int128>(M_);
        __int128 acc = 0;
        for (std::size_t t = 0; t < k.size(); ++t)
            acc = (acc + static_cast<__int128>(k[t]) * static_cast<__int128>(z_[t])) % M;
        if (acc < 0)
            acc += M;
        return static_cast<std::uint64_t>(acc);
    }

    std::vector<std::uint64_t> residues(const FrequencySet& I) const
    {
        require_dimension(I.dimension(), z_.size(), "Rank1Lattice::residues");
        std::vector<std::uint64_t> r;
        r.reserve(I.size());
        for (const auto& k : I)
            r.push_back(residue(k));
        return r;
    }

    friend bool operator==(const Rank1Lattice&, const Rank1Lattice&) = default;

private:
    std::vector<std::uint64_t> z_;
    std::uint64_t M_;
};

/// Multiset of node indices drawn from a base lattice (duplicates allowed).
struct SubsampledLattice {
    Rank1Lattice base;
    std::vector<std::uint64_t> picks;

    std::size_t size() const { return picks.size(); }
};

/// Node i of the lattice; coordinate t is ((i z_t) mod M) / M.
inline std::vector<double> node(const Rank1Lattice& lat, std::uint64_t i)
{
    if (i >= lat.size())
        throw std::out_of_range("node: index out of range");
    std::vector<double> x(lat.dimension());
    const auto M = static_cast<unsigned __int128>(lat.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        auto r = static_cast<unsigned __int128>(i) * lat.generator()[t] % M;
        x[t] = static_cast<double>(static_cast<std::uint64_t>(r)) / static_cast<double>(lat.size());
    }
    return x;
}

/// True iff the residues <k, z> mod M are pairwise distinct on I, which is the
/// exactness of the lattice rule on the difference set D(I).
inline bool is_reconstructing(const Rank1Lattice& lat, const FrequencySet& I)
{
    require_dimension(I.dimension(), lat.dimension(), "is_reconstructing");
    if (I.size() > lat.size())
        return false;
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(I.size() * 2);
    for (const auto& k : I)
        if (!seen.insert(lat.residue(k)).second)
            return false;
    return true;
}

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m)
{
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1)
            r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

} // namespace detail

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime(std::uint64_t n)
{
    if (n < 2)
        return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0)
            return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = detail::powmod(a, d, n);
        if (x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

/// Smallest prime >= n.
inline std::uint64_t next_prime(std::uint64_t n)
{
    if (n <= 2)
        return 2;
    if ((n & 1) == 0)
        ++n;
    while (!is_prime(n))
        n += 2;
    return n;
}

struct LatticeSearchOptions {
    /// Random generators tried per lattice size.
    int tries_per_size = 20;
    /// First candidate size is the smallest prime >= max(start_factor |I|^2, |I|).
    /// With 0 the search starts at |I|.
    double start_factor = 0.0;
    /// Multiplicative step between consecutive candidate sizes.
    double growth = 1.1;
    /// Give up beyond this size.
    std::uint64_t max_size = std::uint64_t{1} << 31;
};

class lattice_search_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t quadratic_start(std::size_t set_size, const LatticeSearchOptions& opts)
{
    const double n = static_cast<double>(set_size);
    return static_cast<std::uint64_t>(std::ceil(opts.start_factor * n * n));
}

/// Searches a rank-1 lattice with prime size that is reconstructing for I.
///
/// 1-D sets use z = (1) and the smallest prime covering the span of I, which
/// is always reconstructing. Otherwise the size starts at the smallest prime
/// >= max(|I|, start_factor |I|^2) and grows geometrically; for each size a
/// fixed number of uniformly random generators is tested by residue
/// distinctness. The result is verified, not probabilistic.
inline Rank1Lattice build_reconstructing(const FrequencySet& I, std::uint64_t seed,
                                         const LatticeSearchOptions& opts = {})
{
    if (I.empty())
        throw std::invalid_argument("build_reconstructing: empty frequency set");
    const std::size_t d = I.dimension();

    if (d == 1) {
        const auto span = static_cast<std::uint64_t>(I.elements().back()[0] - I.elements().front()[0]) + 1;
        Rank1Lattice lat({1}, next_prime(std::max({span, std::uint64_t{2}, quadratic_start(I.size(), opts)})));
        if (!is_reconstructing(lat, I))
            throw std::logic_error("build_reconstructing: 1-D lattice failed verification");
        return lat;
    }

    Rng rng(seed);
    std::vector<std::uint64_t> z(d);
    std::uint32_t epoch = 0;
    std::vector<std::uint32_t> stamp;

    std::uint64_t M = next_prime(std::max({std::uint64_t{I.size()}, std::uint64_t{2}, quadratic_start(I.size(), opts)}));
    while (M <= opts.max_size) {
        std::uniform_int_distribution<std::uint64_t> pick(0, M - 1);
        // Dense stamp table for collision detection when it is affordable.
        const bool dense = M <= (std::uint64_t{1} << 25);
        if (dense && stamp.size() < M)
            stamp.resize(M, 0);
        for (int attempt = 0; attempt < opts.tries_per_size; ++attempt) {
            for (auto& zt : z)
                zt = pick(rng);
            Rank1Lattice lat(z, M);
            bool ok = true;
            if (dense) {
                ++epoch;
                for (const auto& k : I) {
                    auto r = lat.residue(k);
                    if (stamp[r] == epoch) {
                        ok = false;
                        break;
                    }
                    stamp[r] = epoch;
                }
            } else {
                ok = is_reconstructing(lat, I);
            }
            if (ok) {
                if (!is_reconstructing(lat, I))
                    throw std::logic_error("build_reconstructing: verification mismatch");
                return lat;
            }
        }
        auto grown = static_cast<std::uint64_t>(std::ceil(static_cast<double>(M) * opts.growth));
        M = next_prime(std::max(grown, M + 1));
    }
    throw lattice_search_error("build_reconstructing: no reconstructing lattice found within size limit");
}

/// Equispaced 1-D grid with a power-of-two size covering {-R..R}.
inline Rank1Lattice axis_lattice(std::int64_t radius)
{
    std::uint64_t M = 1;
    while (M < static_cast<std::uint64_t>(2 * radius + 1))
        M <<= 1;
    return Rank1Lattice({1}, M);
}

/// n i.i.d. uniform node indices, with replacement.
inline SubsampledLattice subsample(const Rank1Lattice& lat, std::size_t n, std::uint64_t seed)
{
    if (n == 0)
        throw std::invalid_argument("subsample: n must be positive");
    Rng rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, lat.size() - 1);
    SubsampledLattice sub{lat, {}};
    sub.picks.resize(n);
    for (auto& p : sub.picks)
        p = pick(rng);
    return sub;
}

/// ceil(12 |I| (ln |I| + t)), the i.i.d. sample count for the
/// Marcinkiewicz-Zygmund bounds A = 1/2, B = 3/2 with probability 1 - 2 e^-t.
inline std::uint64_t min_subsample_count(std::uint64_t set_size, double t)
{
    if (set_size < 1 || !(t > 0))
        throw std::invalid_argument("min_subsample_count: need set_size >= 1 and t > 0");
    const long double n = 12.0L * static_cast<long double>(set_size)
                          * (std::log(static_cast<long double>(set_size)) + static_cast<long double>(t));
    return static_cast<std::uint64_t>(std::ceil(n));
}

// Descriptor format: "d M", then the d generator entries, then optionally "n"
// followed by n node indices.

inline void write_lattice(std::ostream& os, const Rank1Lattice& lat,
                          const std::vector<std::uint64_t>* picks = nullptr)
{
    os << lat.dimension() << ' ' << lat.size() << '\n';
    for (std::size_t t = 0; t < lat.dimension(); ++t)
        os << (t ? " " : "") << lat.generator()[t];
    os << '\n';
    if (picks) {
        os << picks->size() << '\n';
        for (std::size_t i = 0; i < picks->size(); ++i)
            os << (i ? " " : "") << (*picks)[i];
        os << '\n';
    }
}

inline void write_lattice(std::ostream& os, const SubsampledLattice& sub)
{
    write_lattice(os, sub.base, &sub.picks);
}

struct LatticeDescriptor {
    Rank1Lattice lattice;
    std::optional<std::vector<std::uint64_t>> picks;
};

inline LatticeDescriptor read_lattice(std::istream& is)
{
    std::size_t d = 0;
    std::uint64_t M = 0;
    if (!(is >> d >> M) || d == 0 || M == 0)
        throw std::runtime_error("read_lattice: bad header");
    std::vector<std::uint64_t> z(d);
    for (auto& v : z)
        if (!(is >> v))
            throw std::runtime_error("read_lattice: truncated generator");
    LatticeDescriptor out{Rank1Lattice(std::move(z), M), std::nullopt};
    std::size_t n = 0;
    if (is >> n) {
        std::vector<std::uint64_t> picks(n);
        for (auto& p : picks) {
            if (!(is >> p))
                throw std::runtime_error("read_lattice: truncated picks");
            if (p >= M)
                throw std::runtime_error("read_lattice: pick out of range");
        }
        out.picks = std::move(picks);
    }
    return out;
}

} // namespace sfft
