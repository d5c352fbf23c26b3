#pragma once

// Brute-force dyadic content for small grids.
//
// Enumerates every antichain of dyadic cubes (cubes disjoint from the set are
// never chosen; adding one only raises the cost) that covers the set, checks
// coverage leaf by leaf, sums side^delta for each cover, and keeps the least
// sum. Shares no code with ContentTree; tests use it as ground truth.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "capnorm/content.hpp"
#include "capnorm/errors.hpp"
#include "capnorm/grid.hpp"

namespace capnorm {

namespace detail {

class CoverEnumerator {
public:
    CoverEnumerator(const CellSet& set, double delta) : set_(set), delta_(delta)
    {
        const auto& g = set.grid();
        depth_ = g.depth();
        dim_ = g.dim();
        hits_.resize(depth_ + 1);
        for (int k = 0; k <= depth_; ++k) {
            hits_[k].assign(std::size_t{1} << (k * dim_), 0);
            const std::uint32_t n = 1u << k;
            for (std::size_t flat = 0; flat < hits_[k].size(); ++flat) {
                DyadicCube q{k, {}};
                std::size_t rest = flat;
                for (int a = dim_ - 1; a >= 0; --a) {
                    q.index[a] = static_cast<std::uint32_t>(rest % n);
                    rest /= n;
                }
                bool hit = false;
                for_each_leaf(q, [&](std::size_t cell) { hit = hit || set_.contains(cell); });
                hits_[k][flat] = hit ? 1 : 0;
            }
        }
    }

    bool meets(const DyadicCube& q) const
    {
        std::size_t flat = 0;
        for (int a = 0; a < dim_; ++a) flat = (flat << q.level) | q.index[a];
        return hits_[q.level][flat] != 0;
    }

    /// Number of covers the enumeration will visit.
    double cover_count(const DyadicCube& q) const
    {
        if (!meets(q)) return 1.0;
        if (q.level == depth_) return 1.0;
        double prod = 1.0;
        for (const auto& c : children(q)) prod *= cover_count(c);
        return 1.0 + prod;
    }

    double minimum()
    {
        std::vector<DyadicCube> pending{DyadicCube{}};
        std::vector<DyadicCube> chosen;
        best_ = std::numeric_limits<double>::infinity();
        recurse(pending, chosen);
        return best_;
    }

private:
    template <class F>
    void for_each_leaf(const DyadicCube& q, F&& f) const
    {
        const auto& g = set_.grid();
        const std::uint32_t span = 1u << (depth_ - q.level);
        MultiIndex lo{}, cur{};
        for (int a = 0; a < dim_; ++a) lo[a] = q.index[a] * span;
        const std::uint32_t span1 = dim_ > 1 ? span : 1;
        const std::uint32_t span2 = dim_ > 2 ? span : 1;
        for (std::uint32_t i = 0; i < span; ++i)
            for (std::uint32_t j = 0; j < span1; ++j)
                for (std::uint32_t k = 0; k < span2; ++k) {
                    cur = lo;
                    cur[0] += i;
                    if (dim_ > 1) cur[1] += j;
                    if (dim_ > 2) cur[2] += k;
                    f(g.index(cur));
                }
    }

    std::vector<DyadicCube> children(const DyadicCube& q) const
    {
        std::vector<DyadicCube> out;
        for (std::uint32_t bits = 0; bits < (1u << dim_); ++bits) {
            DyadicCube c{q.level + 1, {}};
            for (int a = 0; a < dim_; ++a) c.index[a] = 2 * q.index[a] + ((bits >> a) & 1u);
            out.push_back(c);
        }
        return out;
    }

    void evaluate(const std::vector<DyadicCube>& chosen)
    {
        std::vector<std::uint8_t> covered(set_.size(), 0);
        double cost = 0.0;
        for (const auto& q : chosen) {
            cost += std::pow(set_.grid().side_at(q.level), delta_);
            for_each_leaf(q, [&](std::size_t cell) { covered[cell] = 1; });
        }
        for (std::size_t i = 0; i < covered.size(); ++i)
            if (set_.contains(i) && !covered[i]) return;
        if (cost < best_) best_ = cost;
    }

    void recurse(std::vector<DyadicCube>& pending, std::vector<DyadicCube>& chosen)
    {
        if (pending.empty()) {
            evaluate(chosen);
            return;
        }
        const DyadicCube q = pending.back();
        pending.pop_back();
        if (!meets(q)) {
            recurse(pending, chosen);
        } else {
            chosen.push_back(q);
            recurse(pending, chosen);
            chosen.pop_back();
            if (q.level < depth_) {
                const auto kids = children(q);
                pending.insert(pending.end(), kids.begin(), kids.end());
                recurse(pending, chosen);
                pending.resize(pending.size() - kids.size());
            }
        }
        pending.push_back(q);
    }

    const CellSet& set_;
    double delta_;
    int depth_ = 1;
    int dim_ = 1;
    double best_ = 0.0;
    std::vector<std::vector<std::uint8_t>> hits_;
};

} // namespace detail

/// Largest grid the oracle accepts.
inline constexpr std::size_t oracle_max_cells = std::size_t{1} << 12;
/// Largest number of covers the oracle will enumerate.
inline constexpr double oracle_max_covers = 5.0e6;

/// Exhaustive minimum over all dyadic covers of `set`.
inline double content_oracle(const CellSet& set, ContentParams params)
{
    params.validate(set.grid().dim());
    if (set.grid().cell_count() > oracle_max_cells)
        throw ParameterError("constraint violated: oracle instance too large (more than 2^12 cells)");
    detail::CoverEnumerator e(set, params.delta);
    if (e.cover_count(DyadicCube{}) > oracle_max_covers)
        throw ParameterError("constraint violated: oracle instance too large (cover count)");
    if (!e.meets(DyadicCube{})) return 0.0;
    return e.minimum();
}

} // namespace capnorm
