#pragma once

// Dyadic Hausdorff content of cell sets.
//
// For a set S of leaf cells the content is the least total  sum side(Q)^delta
// over covers of S by dyadic cubes of the grid's tree. It is computed bottom-up:
//
//     cost(Q) = min(side(Q)^delta, sum over children of cost(child)),
//     cost(leaf) = h^delta if the leaf is in S, else 0,
//
// and the content is cost(root). Exactness at leaf resolution:
//  - every dyadic cube meeting the root is nested with it, and cubes larger
//    than the root cost more than the root itself;
//  - for delta <= dim, covering a whole cube of side l by its 2^(k dim)
//    descendants of side l 2^-k costs l^delta 2^(k (dim - delta)) >= l^delta,
//    so sub-leaf cubes never help.
//
// Ties (side^delta equal to the children's sum) select the coarser cube.
//
// The tree is stored level by level in Morton order so that the children of
// node m at level k are nodes m * 2^dim + c, c in [0, 2^dim), at level k + 1.

#include <cmath>
#include <cstdint>
#include <vector>

#include "capnorm/errors.hpp"
#include "capnorm/grid.hpp"

namespace capnorm {

struct ContentParams {
    double delta = 1.0;

    void validate(int dim) const
    {
        detail::require(std::isfinite(delta) && delta > 0.0 && delta <= dim,
                        "delta in (0, dim]");
    }
};

/// Optimal dyadic cover of a cell set.
struct CoverSolution {
    double value = 0.0;
    std::vector<DyadicCube> cover;
    ContentParams params;
    int dim = 1;
    double root_side = 1.0;
};

/// Bracket of the ball-cover content H_inf^delta implied by a dyadic value.
struct ContentBracket {
    double lower = 0.0;
    double upper = 0.0;
};

namespace detail {

/// Morton interleaving of leaf multi-indices; axis 0 is the most
/// significant bit of each dim-bit group.
class MortonCodec {
public:
    MortonCodec() = default;
    MortonCodec(int dim, int depth) : dim_(dim), depth_(depth)
    {
        const std::size_t n = std::size_t{1} << depth;
        for (int a = 0; a < dim; ++a) {
            spread_[a].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                std::uint64_t code = 0;
                for (int b = 0; b < depth; ++b)
                    if ((i >> b) & 1u)
                        code |= std::uint64_t{1} << (b * dim + (dim - 1 - a));
                spread_[a][i] = code;
            }
        }
    }

    std::uint64_t encode(const MultiIndex& idx) const
    {
        std::uint64_t code = 0;
        for (int a = 0; a < dim_; ++a) code |= spread_[a][idx[a]];
        return code;
    }

    /// Multi-index of node `code` at `level`.
    MultiIndex decode(std::uint64_t code, int level) const
    {
        MultiIndex idx{};
        for (int b = 0; b < level; ++b)
            for (int a = 0; a < dim_; ++a)
                if ((code >> (b * dim_ + (dim_ - 1 - a))) & 1u) idx[a] |= 1u << b;
        return idx;
    }

private:
    int dim_ = 1;
    int depth_ = 1;
    std::array<std::vector<std::uint64_t>, 3> spread_;
};

} // namespace detail

/// Dyadic content DP with incremental updates. Erasing or inserting a leaf
/// recomputes only its ancestor path with the same expression the full
/// rebuild uses, so results are bit-identical to a from-scratch evaluation.
class ContentTree {
public:
    ContentTree(const DyadicGrid& grid, ContentParams params)
        : grid_(grid), params_(params), codec_(grid.dim(), grid.depth())
    {
        params_.validate(grid.dim());
        const int depth = grid.depth();
        weight_.resize(depth + 1);
        cost_.resize(depth + 1);
        for (int k = 0; k <= depth; ++k) {
            weight_[k] = std::pow(grid.side_at(k), params_.delta);
            cost_[k].assign(std::size_t{1} << (k * grid.dim()), 0.0);
        }
        leaf_code_.resize(grid.cell_count());
        for (std::size_t i = 0; i < grid.cell_count(); ++i)
            leaf_code_[i] = codec_.encode(grid.coords(i));
    }

    ContentTree(const CellSet& set, ContentParams params) : ContentTree(set.grid(), params)
    {
        assign(set);
    }

    /// Replaces the whole set and rebuilds every level.
    void assign(const CellSet& set)
    {
        require_same_grid(grid_, set.grid());
        const int depth = grid_.depth();
        auto& leaves = cost_[depth];
        std::fill(leaves.begin(), leaves.end(), 0.0);
        for (std::size_t i = 0; i < set.size(); ++i)
            if (set.contains(i)) leaves[leaf_code_[i]] = weight_[depth];
        for (int k = depth - 1; k >= 0; --k)
            for (std::size_t m = 0; m < cost_[k].size(); ++m) cost_[k][m] = node_cost(k, m);
    }

    void insert(std::size_t cell) { set_leaf(cell, weight_[grid_.depth()]); }
    void erase(std::size_t cell) { set_leaf(cell, 0.0); }

    double value() const { return cost_[0][0]; }
    const DyadicGrid& grid() const { return grid_; }
    const ContentParams& params() const { return params_; }

    CoverSolution solution() const
    {
        CoverSolution out;
        out.value = value();
        out.params = params_;
        out.dim = grid_.dim();
        out.root_side = grid_.root_side();
        collect(0, 0, out.cover);
        return out;
    }

private:
    double children_sum(int level, std::size_t m) const
    {
        const std::size_t fan = std::size_t{1} << grid_.dim();
        const auto& below = cost_[level + 1];
        double s = 0.0;
        for (std::size_t c = 0; c < fan; ++c) s += below[m * fan + c];
        return s;
    }

    double node_cost(int level, std::size_t m) const
    {
        const double s = children_sum(level, m);
        return s < weight_[level] ? s : weight_[level];
    }

    void set_leaf(std::size_t cell, double v)
    {
        const int depth = grid_.depth();
        std::size_t m = leaf_code_[cell];
        if (cost_[depth][m] == v) return;
        cost_[depth][m] = v;
        for (int k = depth - 1; k >= 0; --k) {
            m >>= grid_.dim();
            const double c = node_cost(k, m);
            if (c == cost_[k][m]) return;
            cost_[k][m] = c;
        }
    }

    void collect(int level, std::size_t m, std::vector<DyadicCube>& cover) const
    {
        if (cost_[level][m] == 0.0) return;
        if (level == grid_.depth()) {
            cover.push_back({level, codec_.decode(m, level)});
            return;
        }
        if (weight_[level] <= children_sum(level, m)) {
            cover.push_back({level, codec_.decode(m, level)});
            return;
        }
        const std::size_t fan = std::size_t{1} << grid_.dim();
        for (std::size_t c = 0; c < fan; ++c) collect(level + 1, m * fan + c, cover);
    }

    DyadicGrid grid_;
    ContentParams params_;
    detail::MortonCodec codec_;
    std::vector<double> weight_;
    std::vector<std::vector<double>> cost_;
    std::vector<std::uint64_t> leaf_code_;
};

/// Exact dyadic content of `set` with an optimal cover.
inline CoverSolution dyadic_content(const CellSet& set, ContentParams params)
{
    params.validate(set.grid().dim());
    return ContentTree(set, params).solution();
}

/// Value-only shortcut.
inline double content_value(const CellSet& set, double delta)
{
    return ContentTree(set, ContentParams{delta}).value();
}

/// Brackets H_inf^delta from a dyadic solution.
///
/// upper: each cube of side l lies in its circumscribed ball of radius
///        l sqrt(dim) / 2, so H_inf <= (sqrt(dim)/2)^delta * value.
/// lower: a ball of radius r meets at most 2 dyadic intervals of side
///        l in [2r, 4r) along each axis, hence is covered by 2^dim dyadic
///        cubes costing at most 2^dim (4r)^delta. So value <= 2^dim 4^delta
///        H_inf, i.e. H_inf >= value / (2^dim 4^delta).
/// lower / upper = 1 / (2^dim (2 sqrt(dim))^delta) whenever value > 0.
inline ContentBracket ball_cover_bracket(const CoverSolution& solution)
{
    const double delta = solution.params.delta;
    const int dim = solution.dim;
    double upper = 0.0;
    for (const auto& q : solution.cover) upper += std::pow(std::ldexp(solution.root_side, -q.level), delta);
    upper *= std::pow(std::sqrt(static_cast<double>(dim)) / 2.0, delta);
    const double lower = solution.value / (std::ldexp(1.0, dim) * std::pow(4.0, delta));
    return {lower, upper};
}

/// lower / upper ratio guaranteed by ball_cover_bracket.
inline double bracket_ratio(int dim, double delta)
{
    return 1.0 / (std::ldexp(1.0, dim) * std::pow(2.0 * std::sqrt(static_cast<double>(dim)), delta));
}

struct SubadditivityReport {
    double content_a = 0.0;
    double content_b = 0.0;
    double content_union = 0.0;
    double content_intersection = 0.0;
    /// H(A) + H(B) - H(A u B) - H(A n B); nonnegative up to rounding.
    double slack = 0.0;
};

inline SubadditivityReport strong_subadditivity_check(const CellSet& a, const CellSet& b,
                                                      ContentParams params)
{
    require_same_grid(a.grid(), b.grid());
    params.validate(a.grid().dim());
    ContentTree tree(a.grid(), params);
    SubadditivityReport r;
    tree.assign(a);
    r.content_a = tree.value();
    tree.assign(b);
    r.content_b = tree.value();
    tree.assign(set_union(a, b));
    r.content_union = tree.value();
    tree.assign(set_intersection(a, b));
    r.content_intersection = tree.value();
    r.slack = r.content_a + r.content_b - r.content_union - r.content_intersection;
    return r;
}

} // namespace capnorm
