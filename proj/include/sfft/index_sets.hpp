#pragma once

// Frequency index sets on Z^d: multi-indices, canonical sets, hyperbolic-cross
// search spaces, projections and candidate products.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sfft {

using MultiIndex = std::vector<std::int64_t>;

class dimension_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require_dimension(std::size_t got, std::size_t want, const char* what)
{
    if (got != want) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << got << " vs " << want << ")";
        throw dimension_error(msg.str());
    }
}

/// Finite set of frequencies in Z^d, kept sorted lexicographically and free of
/// duplicates, so two sets are equal iff their element lists are equal.
class FrequencySet {
public:
    FrequencySet() = default;

    explicit FrequencySet(std::size_t dimension) : dimension_(dimension)
    {
        if (dimension == 0)
            throw std::invalid_argument("FrequencySet: dimension must be positive");
    }

    FrequencySet(std::size_t dimension, std::vector<MultiIndex> elements)
        : FrequencySet(dimension)
    {
        for (const auto& k : elements)
            require_dimension(k.size(), dimension_, "FrequencySet");
        elements_ = std::move(elements);
        canonicalize();
    }

    /// Builds from elements that are already sorted and unique. Cheap; checked
    /// only in debug builds.
    static FrequencySet from_sorted(std::size_t dimension, std::vector<MultiIndex> elements)
    {
        FrequencySet s(dimension);
        s.elements_ = std::move(elements);
#ifndef NDEBUG
        for (std::size_t i = 1; i < s.elements_.size(); ++i)
            if (!(s.elements_[i - 1] < s.elements_[i]))
                throw std::logic_error("FrequencySet::from_sorted: input not canonical");
#endif
        return s;
    }

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }

    const MultiIndex& operator[](std::size_t i) const { return elements_[i]; }
    const std::vector<MultiIndex>& elements() const { return elements_; }
    auto begin() const { return elements_.begin(); }
    auto end() const { return elements_.end(); }

    bool contains(const MultiIndex& k) const
    {
        return std::binary_search(elements_.begin(), elements_.end(), k);
    }

    /// Position of k in canonical order, or size() if absent.
    std::size_t index_of(const MultiIndex& k) const
    {
        auto it = std::lower_bound(elements_.begin(), elements_.end(), k);
        if (it == elements_.end() || *it != k)
            return elements_.size();
        return static_cast<std::size_t>(it - elements_.begin());
    }

    friend bool operator==(const FrequencySet&, const FrequencySet&) = default;

private:
    void canonicalize()
    {
        std::sort(elements_.begin(), elements_.end());
        elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    }

    std::size_t dimension_ = 0;
    std::vector<MultiIndex> elements_;
};

/// Search space abstraction: a membership test on prefixes and the 1-D axis
/// projection. Only the hyperbolic cross implements it here.
template <class S>
concept SearchSpace = requires(const S& s, const MultiIndex& k, std::size_t t) {
    { s.dimension() } -> std::convertible_to<std::size_t>;
    { s.contains_prefix(k) } -> std::convertible_to<bool>;
    { s.axis_projection(t) } -> std::same_as<FrequencySet>;
};

/// { k in Z^d : prod_t max(1, |k_t|) <= R }.
class HyperbolicCross {
public:
    HyperbolicCross(std::size_t dimension, std::int64_t radius)
        : dimension_(dimension), radius_(radius)
    {
        if (dimension == 0 || radius < 1)
            throw std::invalid_argument("HyperbolicCross: need dimension >= 1 and radius >= 1");
    }

    std::size_t dimension() const { return dimension_; }
    std::int64_t radius() const { return radius_; }

    /// Membership of a prefix (k_1..k_t), t <= d. A prefix lies in the
    /// projection onto the first t axes iff its own weight is <= R, because
    /// the remaining entries can be zero.
    bool contains_prefix(const MultiIndex& k) const
    {
        if (k.size() > dimension_)
            throw dimension_error("HyperbolicCross: prefix longer than dimension");
        std::int64_t product = 1;
        for (auto kt : k) {
            std::int64_t m = kt < 0 ? -kt : kt;
            if (m <= 1)
                continue;
            // product * m > R without overflow
            if (m > radius_ / product)
                return false;
            product *= m;
        }
        return true;
    }

    bool contains(const MultiIndex& k) const
    {
        require_dimension(k.size(), dimension_, "HyperbolicCross::contains");
        return contains_prefix(k);
    }

    /// Projection onto axis t (1-based): always {-R, ..., R}.
    FrequencySet axis_projection(std::size_t t) const
    {
        if (t < 1 || t > dimension_)
            throw std::out_of_range("HyperbolicCross::axis_projection: axis out of range");
        std::vector<MultiIndex> elems;
        elems.reserve(static_cast<std::size_t>(2 * radius_ + 1));
        for (std::int64_t k = -radius_; k <= radius_; ++k)
            elems.push_back({k});
        return FrequencySet::from_sorted(1, std::move(elems));
    }

    /// Enumerates the full set. Only for small instances and tests.
    FrequencySet materialize() const
    {
        std::vector<MultiIndex> out;
        MultiIndex k(dimension_, 0);
        enumerate(0, 1, k, out);
        return FrequencySet(dimension_, std::move(out));
    }

private:
    void enumerate(std::size_t t, std::int64_t product, MultiIndex& k, std::vector<MultiIndex>& out) const
    {
        if (t == dimension_) {
            out.push_back(k);
            return;
        }
        std::int64_t bound = radius_ / product;
        for (std::int64_t v = -bound; v <= bound; ++v) {
            k[t] = v;
            std::int64_t m = v < 0 ? -v : v;
            enumerate(t + 1, product * std::max<std::int64_t>(1, m), k, out);
        }
    }

    std::size_t dimension_;
    std::int64_t radius_;
};

static_assert(SearchSpace<HyperbolicCross>);

inline bool hc_contains(const HyperbolicCross& hc, const MultiIndex& k) { return hc.contains(k); }

inline FrequencySet hc_project_materialize(const HyperbolicCross& hc, std::size_t t)
{
    return hc.axis_projection(t);
}

using BigCount = boost::multiprecision::cpp_int;

/// Exact |{k in Z^d : prod max(1,|k_t|) <= R}|.
///
/// N(d, R) = sum_{k=-R}^{R} N(d-1, floor(R / max(1,|k|))), N(0, .) = 1, memoized
/// on (d, q). Only the O(sqrt R) distinct quotients floor(R/m) ever appear.
inline BigCount hc_count(std::size_t d, std::int64_t R)
{
    if (d < 1 || R < 1)
        throw std::invalid_argument("hc_count: need d >= 1 and R >= 1");
    std::map<std::pair<std::size_t, std::int64_t>, BigCount> memo;
    auto rec = [&](auto& self, std::size_t dim, std::int64_t q) -> BigCount {
        if (dim == 0)
            return 1;
        auto key = std::make_pair(dim, q);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
        // k = 0 and k = +-1 keep the full radius, |k| = m >= 2 gives floor(q/m).
        BigCount total = 3 * self(self, dim - 1, q);
        // Group m by equal quotient floor(q/m).
        for (std::int64_t m = 2; m <= q;) {
            std::int64_t v = q / m;
            std::int64_t m_last = q / v;
            total += 2 * BigCount(m_last - m + 1) * self(self, dim - 1, v);
            m = m_last + 1;
        }
        memo.emplace(key, total);
        return total;
    };
    return rec(rec, d, R);
}

/// { (k_t)_{t in dims} : k in set }, dims 1-based and strictly increasing.
inline FrequencySet project(const FrequencySet& set, const std::vector<std::size_t>& dims)
{
    if (dims.empty())
        throw std::invalid_argument("project: empty dimension list");
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 1 || dims[i] > set.dimension())
            throw std::invalid_argument("project: dimension index out of range");
        if (i > 0 && dims[i] <= dims[i - 1])
            throw std::invalid_argument("project: dimensions must be strictly increasing");
    }
    std::vector<MultiIndex> out;
    out.reserve(set.size());
    for (const auto& k : set) {
        MultiIndex p(dims.size());
        for (std::size_t i = 0; i < dims.size(); ++i)
            p[i] = k[dims[i] - 1];
        out.push_back(std::move(p));
    }
    return FrequencySet(dims.size(), std::move(out));
}

/// (prev x axis) filtered by prefix membership in the search space.
template <SearchSpace S>
FrequencySet candidate_product(const FrequencySet& prev, const FrequencySet& axis, const S& space)
{
    require_dimension(axis.dimension(), 1, "candidate_product (axis set)");
    const std::size_t t = prev.dimension() + 1;
    if (t > space.dimension())
        throw dimension_error("candidate_product: result dimension exceeds search space");
    std::vector<MultiIndex> out;
    MultiIndex k(t);
    // prev and axis are both sorted, so the nested loop emits canonical order.
    for (const auto& a : prev) {
        std::copy(a.begin(), a.end(), k.begin());
        for (const auto& b : axis) {
            k[t - 1] = b[0];
            if (space.contains_prefix(k))
                out.push_back(k);
        }
    }
    return FrequencySet::from_sorted(t, std::move(out));
}

// Text format: "d N" then N lines of d integers in canonical order.

inline void write_frequency_set(std::ostream& os, const FrequencySet& s)
{
    os << s.dimension() << ' ' << s.size() << '\n';
    for (const auto& k : s) {
        for (std::size_t i = 0; i < k.size(); ++i)
            os << (i ? " " : "") << k[i];
        os << '\n';
    }
}

inline FrequencySet read_frequency_set(std::istream& is)
{
    std::size_t d = 0, n = 0;
    if (!(is >> d >> n) || d == 0)
        throw std::runtime_error("read_frequency_set: bad header");
    std::vector<MultiIndex> elems(n, MultiIndex(d));
    for (auto& k : elems)
        for (auto& v : k)
            if (!(is >> v))
                throw std::runtime_error("read_frequency_set: truncated input");
    return FrequencySet(d, std::move(elems));
}

inline std::string to_string(const FrequencySet& s)
{
    std::ostringstream os;
    write_frequency_set(os, s);
    return os.str();
}

inline FrequencySet frequency_set_from_string(const std::string& text)
{
    std::istringstream is(text);
    return read_frequency_set(is);
}

} // namespace sfft
