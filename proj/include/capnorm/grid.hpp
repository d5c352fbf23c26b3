#pragma once

// Dyadic grids, cell sets and grid functions.
//
// A DyadicGrid of depth L tiles its root cube [origin, origin + root_side)^dim
// by 2^(L*dim) half-open leaf cells of side root_side * 2^-L. Leaf cells are
// addressed by a flat row-major index (last axis fastest). Dyadic cubes at
// coarser levels are unions of leaf cells; any two of them are either nested
// or disjoint.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "capnorm/errors.hpp"

namespace capnorm {

/// Point of R^dim; coordinates beyond dim are kept at zero.
using Point = std::array<double, 3>;

/// Multi-index of a cell or cube; entries beyond dim are zero.
using MultiIndex = std::array<std::uint32_t, 3>;

inline double distance(const Point& a, const Point& b)
{
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double norm(const Point& a) { return distance(a, Point{}); }

class DyadicGrid {
public:
    static constexpr std::size_t default_cell_cap = std::size_t{1} << 24;

    DyadicGrid() = default;

    DyadicGrid(int dim, int depth, double root_side, Point origin = {},
               std::size_t cell_cap = default_cell_cap)
        : dim_(dim), depth_(depth), root_side_(root_side), origin_(origin)
    {
        detail::require(dim >= 1 && dim <= 3, "dim in {1,2,3}");
        detail::require(depth >= 1, "depth >= 1");
        detail::require(std::isfinite(root_side) && root_side > 0, "root_side > 0");
        for (int a = 0; a < 3; ++a) {
            if (a >= dim) origin_[a] = 0.0;
            detail::require(std::isfinite(origin_[a]), "origin finite");
        }
        // 2^(depth*dim) must fit the cap; compare exponents to avoid overflow.
        const int bits = depth * dim;
        if (bits >= 63 || (std::size_t{1} << bits) > cell_cap) {
            throw CapacityError("memory cap exceeded: grid needs 2^" + std::to_string(bits) +
                                " leaf cells, cap is " + std::to_string(cell_cap));
        }
        per_axis_ = std::size_t{1} << depth;
        cell_count_ = std::size_t{1} << bits;
        h_ = std::ldexp(root_side, -depth);
    }

    int dim() const { return dim_; }
    int depth() const { return depth_; }
    double root_side() const { return root_side_; }
    const Point& origin() const { return origin_; }

    /// Leaf cell side h = root_side * 2^-depth.
    double cell_side() const { return h_; }
    double cell_volume() const { return std::pow(h_, dim_); }
    std::size_t cells_per_axis() const { return per_axis_; }
    std::size_t cell_count() const { return cell_count_; }
    double diameter() const { return root_side_ * std::sqrt(static_cast<double>(dim_)); }

    /// Side of a dyadic cube at `level` (0 = root, depth = leaf).
    double side_at(int level) const { return std::ldexp(root_side_, -level); }

    MultiIndex coords(std::size_t cell) const
    {
        MultiIndex idx{};
        for (int a = dim_ - 1; a >= 0; --a) {
            idx[a] = static_cast<std::uint32_t>(cell & (per_axis_ - 1));
            cell >>= depth_;
        }
        return idx;
    }

    std::size_t index(const MultiIndex& idx) const
    {
        std::size_t cell = 0;
        for (int a = 0; a < dim_; ++a) cell = (cell << depth_) | idx[a];
        return cell;
    }

    Point center(std::size_t cell) const
    {
        const MultiIndex idx = coords(cell);
        Point c{};
        for (int a = 0; a < dim_; ++a) c[a] = origin_[a] + (idx[a] + 0.5) * h_;
        return c;
    }

    /// Closed root box [origin, origin + root_side]^dim.
    bool contains_closed(const Point& x) const
    {
        for (int a = 0; a < dim_; ++a)
            if (x[a] < origin_[a] || x[a] > origin_[a] + root_side_) return false;
        return true;
    }

    friend bool operator==(const DyadicGrid& a, const DyadicGrid& b)
    {
        return a.dim_ == b.dim_ && a.depth_ == b.depth_ && a.root_side_ == b.root_side_ &&
               a.origin_ == b.origin_;
    }

private:
    int dim_ = 1;
    int depth_ = 1;
    double root_side_ = 1.0;
    Point origin_{};
    std::size_t per_axis_ = 2;
    std::size_t cell_count_ = 2;
    double h_ = 0.5;
};

inline DyadicGrid make_grid(int dim, int depth, double root_side, Point origin = {},
                            std::size_t cell_cap = DyadicGrid::default_cell_cap)
{
    return DyadicGrid(dim, depth, root_side, origin, cell_cap);
}

/// Grid whose root is centered at `center`, so that `center` is a corner of
/// 2^dim leaf cells and never a cell center.
inline DyadicGrid centered_grid(int dim, int depth, double root_side, Point center = {},
                                std::size_t cell_cap = DyadicGrid::default_cell_cap)
{
    Point origin{};
    for (int a = 0; a < dim; ++a) origin[a] = center[a] - 0.5 * root_side;
    return DyadicGrid(dim, depth, root_side, origin, cell_cap);
}

inline void require_same_grid(const DyadicGrid& a, const DyadicGrid& b)
{
    if (!(a == b)) throw GridMismatch("operands live on different grids");
}

/// Dyadic cube of the grid's tree: `level` in [0, depth], one index per axis
/// in [0, 2^level).
struct DyadicCube {
    int level = 0;
    MultiIndex index{};

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// Finite union of leaf cells.
class CellSet {
public:
    CellSet() = default;

    explicit CellSet(DyadicGrid grid)
        : grid_(grid), occupied_(grid.cell_count(), 0)
    {
    }

    CellSet(DyadicGrid grid, std::vector<std::uint8_t> occupancy)
        : grid_(grid), occupied_(std::move(occupancy))
    {
        detail::require(occupied_.size() == grid_.cell_count(),
                        "occupancy size equals cell count");
        for (auto& o : occupied_) o = o ? 1 : 0;
    }

    static CellSet full(const DyadicGrid& grid)
    {
        return CellSet(grid, std::vector<std::uint8_t>(grid.cell_count(), 1));
    }

    /// Cells whose center satisfies `pred`.
    template <class Pred>
    static CellSet from_centers(const DyadicGrid& grid, Pred&& pred)
    {
        CellSet s(grid);
        for (std::size_t i = 0; i < grid.cell_count(); ++i)
            s.occupied_[i] = pred(grid.center(i)) ? 1 : 0;
        return s;
    }

    const DyadicGrid& grid() const { return grid_; }
    std::size_t size() const { return occupied_.size(); }
    bool contains(std::size_t cell) const { return occupied_[cell] != 0; }
    void insert(std::size_t cell) { occupied_[cell] = 1; }
    void erase(std::size_t cell) { occupied_[cell] = 0; }
    std::span<const std::uint8_t> occupancy() const { return occupied_; }

    std::size_t count() const
    {
        return static_cast<std::size_t>(std::count(occupied_.begin(), occupied_.end(), 1));
    }
    bool empty() const { return count() == 0; }

    /// Lebesgue measure: number of cells times h^dim.
    double measure() const { return static_cast<double>(count()) * grid_.cell_volume(); }

    std::vector<std::size_t> cells() const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < occupied_.size(); ++i)
            if (occupied_[i]) out.push_back(i);
        return out;
    }

    bool subset_of(const CellSet& other) const
    {
        require_same_grid(grid_, other.grid_);
        for (std::size_t i = 0; i < occupied_.size(); ++i)
            if (occupied_[i] && !other.occupied_[i]) return false;
        return true;
    }

    /// Euclidean diameter of the union of the cells (farthest corner pair).
    double diameter() const { return extent(1); }

    /// Diameter of the set of cell centers.
    double center_diameter() const { return extent(0); }

private:
    /// Extreme pairs lie on boundary cells, so only those are compared;
    /// `pad` = 1 measures corner to corner, 0 center to center.
    double extent(int pad) const
    {
        const int d = grid_.dim();
        const auto n = static_cast<std::uint32_t>(grid_.cells_per_axis());
        std::vector<MultiIndex> boundary;
        for (std::size_t i = 0; i < occupied_.size(); ++i) {
            if (!occupied_[i]) continue;
            const MultiIndex idx = grid_.coords(i);
            bool edge = false;
            for (int a = 0; a < d && !edge; ++a) {
                if (idx[a] == 0 || idx[a] + 1 == n) { edge = true; break; }
                MultiIndex lo = idx, hi = idx;
                --lo[a];
                ++hi[a];
                edge = !occupied_[grid_.index(lo)] || !occupied_[grid_.index(hi)];
            }
            if (edge) boundary.push_back(idx);
        }
        const double h = grid_.cell_side();
        double best = 0.0;
        for (std::size_t i = 0; i < boundary.size(); ++i) {
            for (std::size_t j = i; j < boundary.size(); ++j) {
                double s = 0.0;
                for (int a = 0; a < d; ++a) {
                    const auto lo = std::min(boundary[i][a], boundary[j][a]);
                    const auto hi = std::max(boundary[i][a], boundary[j][a]);
                    const double ext = (hi - lo + pad) * h;
                    s += ext * ext;
                }
                best = std::max(best, s);
            }
        }
        return std::sqrt(best);
    }

public:
    friend bool operator==(const CellSet& a, const CellSet& b)
    {
        return a.grid_ == b.grid_ && a.occupied_ == b.occupied_;
    }

private:
    DyadicGrid grid_;
    std::vector<std::uint8_t> occupied_;
};

namespace detail {
template <class Op>
CellSet combine(const CellSet& a, const CellSet& b, Op op)
{
    require_same_grid(a.grid(), b.grid());
    std::vector<std::uint8_t> out(a.size());
    auto oa = a.occupancy();
    auto ob = b.occupancy();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(oa[i] != 0, ob[i] != 0) ? 1 : 0;
    return CellSet(a.grid(), std::move(out));
}
} // namespace detail

inline CellSet set_union(const CellSet& a, const CellSet& b)
{
    return detail::combine(a, b, [](bool x, bool y) { return x || y; });
}
inline CellSet set_intersection(const CellSet& a, const CellSet& b)
{
    return detail::combine(a, b, [](bool x, bool y) { return x && y; });
}
inline CellSet set_difference(const CellSet& a, const CellSet& b)
{
    return detail::combine(a, b, [](bool x, bool y) { return x && !y; });
}
/// Complement within the root cube.
inline CellSet complement(const CellSet& a)
{
    std::vector<std::uint8_t> out(a.size());
    auto oa = a.occupancy();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = oa[i] ? 0 : 1;
    return CellSet(a.grid(), std::move(out));
}

/// Nonnegative function, constant on each leaf cell.
class GridFunction {
public:
    GridFunction() = default;

    explicit GridFunction(DyadicGrid grid)
        : grid_(grid), values_(grid.cell_count(), 0.0)
    {
    }

    GridFunction(DyadicGrid grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values))
    {
        detail::require(values_.size() == grid_.cell_count(), "values size equals cell count");
        for (double v : values_) {
            if (!std::isfinite(v)) throw NonFiniteValue("grid function value is not finite");
            if (v < 0) throw ParameterError("constraint violated: grid function values >= 0");
        }
    }

    static GridFunction indicator(const CellSet& s, double height = 1.0)
    {
        std::vector<double> v(s.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i)
            if (s.contains(i)) v[i] = height;
        return GridFunction(s.grid(), std::move(v));
    }

    const DyadicGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }

    double max_value() const
    {
        return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
    }

    /// {cells : value > lambda}, strict inequality.
    CellSet superlevel(double lambda) const
    {
        std::vector<std::uint8_t> occ(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) occ[i] = values_[i] > lambda ? 1 : 0;
        return CellSet(grid_, std::move(occ));
    }

    CellSet support() const { return superlevel(0.0); }

    /// Lebesgue integral sum(value) * h^dim.
    double integral() const
    {
        double s = 0.0;
        for (double v : values_) s += v;
        return s * grid_.cell_volume();
    }

    GridFunction scaled(double c) const
    {
        std::vector<double> v(values_);
        for (auto& x : v) x *= c;
        return GridFunction(grid_, std::move(v));
    }

    GridFunction pow(double nu) const
    {
        std::vector<double> v(values_);
        for (auto& x : v) x = x > 0 ? std::pow(x, nu) : 0.0;
        return GridFunction(grid_, std::move(v));
    }

    friend bool operator==(const GridFunction& a, const GridFunction& b)
    {
        return a.grid_ == b.grid_ && a.values_ == b.values_;
    }

private:
    DyadicGrid grid_;
    std::vector<double> values_;
};

inline GridFunction operator+(const GridFunction& a, const GridFunction& b)
{
    require_same_grid(a.grid(), b.grid());
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return GridFunction(a.grid(), std::move(v));
}

/// Restriction f * 1_S.
inline GridFunction restrict_to(const GridFunction& f, const CellSet& s)
{
    require_same_grid(f.grid(), s.grid());
    std::vector<double> v(f.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (s.contains(i)) v[i] = f[i];
    return GridFunction(f.grid(), std::move(v));
}

/// Signed values on leaf cells, used for u before taking |u - b|.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(DyadicGrid grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values))
    {
        detail::require(values_.size() == grid_.cell_count(), "values size equals cell count");
        for (double v : values_)
            if (!std::isfinite(v)) throw NonFiniteValue("field value is not finite");
    }

    const DyadicGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }

    /// |u - b| on the cells of `mask`, zero elsewhere.
    GridFunction abs_minus(double b, const CellSet& mask) const
    {
        require_same_grid(grid_, mask.grid());
        std::vector<double> v(values_.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i)
            if (mask.contains(i)) v[i] = std::abs(values_[i] - b);
        return GridFunction(grid_, std::move(v));
    }

    GridFunction abs() const
    {
        std::vector<double> v(values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(values_[i]);
        return GridFunction(grid_, std::move(v));
    }

    ScalarField scaled(double c) const
    {
        std::vector<double> v(values_);
        for (auto& x : v) x *= c;
        return ScalarField(grid_, std::move(v));
    }

private:
    DyadicGrid grid_;
    std::vector<double> values_;
};

} // namespace capnorm
