#pragma once

// John domains with explicit constants and the mean-value ball.
//
// A cell belongs to a domain iff its center lies in the open continuum shape.
// Constants (alpha, beta) and the John center x0, dim >= 2:
//
//   ball(c, k)          (k, k), x0 = c.
//   rectangle(a, b)     sides a along axis 0 and b along the others, a <= b,
//                       centered at c; x0 = c, alpha = a/2,
//                       beta = sqrt(a^2 + (dim-1) b^2) / 2.
//   l_shape(s)          (-s, s)^2 \ [0, s)^2 shifted by c (dim 2 only);
//                       x0 = c + (-s/2, -s/2), alpha = s/2, beta = s sqrt(5/2).
//   punctured_ball(c,R) the ball's constants; the 2^dim cells with a corner
//                       at c are removed so samples of |x - c|^eta stay finite.
//
// Rectangle and L-shape: take the straight segment from x to x0, of length
// l <= beta (the farthest points from x0 are the corners). The segment lies in
// a convex subset K of the domain containing B(x0, alpha) (the rectangle
// itself; the left column or the bottom row of the L), and the convex hull of
// x and B(x0, alpha) stays in K, so the point at arc length t from x is at
// distance >= alpha t / l >= (alpha / beta) t from the boundary.

#include <cmath>
#include <string>
#include <variant>

#include "capnorm/errors.hpp"
#include "capnorm/grid.hpp"

namespace capnorm {

struct BallShape {
    Point center{};
    double radius = 1.0;
};

struct RectangleShape {
    double a = 1.0;
    double b = 1.0;
    Point center{};
};

struct LShape {
    double unit = 1.0;
    Point center{};
};

struct PuncturedBallShape {
    Point center{};
    double radius = 1.0;
};

using Shape = std::variant<BallShape, RectangleShape, LShape, PuncturedBallShape>;

inline std::string shape_name(const Shape& s)
{
    switch (s.index()) {
    case 0: return "ball";
    case 1: return "rectangle";
    case 2: return "l_shape";
    default: return "punctured_ball";
    }
}

struct JohnDomain {
    Shape shape;
    double alpha_john = 1.0;
    double beta_john = 1.0;
    Point center_x0{};
    CellSet cells;

    const DyadicGrid& grid() const { return cells.grid(); }
};

struct MeanValueBall {
    Point center{};
    double radius = 1.0;
};

inline constexpr double default_c_ball = 0.25;

namespace detail {

struct Box {
    Point lo{}, hi{};
};

inline bool inside_shape(const Shape& shape, int dim, const Point& x)
{
    if (const auto* b = std::get_if<BallShape>(&shape)) return distance(x, b->center) < b->radius;
    if (const auto* b = std::get_if<PuncturedBallShape>(&shape))
        return distance(x, b->center) < b->radius;
    if (const auto* r = std::get_if<RectangleShape>(&shape)) {
        for (int a = 0; a < dim; ++a) {
            const double half = (a == 0 ? r->a : r->b) / 2.0;
            if (!(std::abs(x[a] - r->center[a]) < half)) return false;
        }
        return true;
    }
    const auto& l = std::get<LShape>(shape);
    const double u = x[0] - l.center[0], v = x[1] - l.center[1];
    const bool square = u > -l.unit && u < l.unit && v > -l.unit && v < l.unit;
    const bool notch = u >= 0.0 && u < l.unit && v >= 0.0 && v < l.unit;
    return square && !notch;
}

inline Box bounding_box(const Shape& shape, int dim)
{
    Box box;
    auto fill = [&](const Point& c, auto half) {
        for (int a = 0; a < dim; ++a) {
            box.lo[a] = c[a] - half(a);
            box.hi[a] = c[a] + half(a);
        }
    };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RectangleShape>)
                fill(s.center, [&](int a) { return (a == 0 ? s.a : s.b) / 2.0; });
            else if constexpr (std::is_same_v<T, LShape>)
                fill(s.center, [&](int) { return s.unit; });
            else
                fill(s.center, [&](int) { return s.radius; });
        },
        shape);
    return box;
}

} // namespace detail

/// Continuum membership (open shape, puncture included in the shape).
inline bool shape_contains(const Shape& shape, int dim, const Point& x)
{
    return detail::inside_shape(shape, dim, x);
}

/// Discretizes `shape` on `grid` and attaches its John constants.
inline JohnDomain make_john_domain(const Shape& shape, const DyadicGrid& grid)
{
    const int dim = grid.dim();
    detail::require(dim >= 2, "John domains need dim >= 2");
    JohnDomain d;
    d.shape = shape;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BallShape> || std::is_same_v<T, PuncturedBallShape>) {
                detail::require(s.radius > 0.0 && std::isfinite(s.radius), "radius > 0");
                d.alpha_john = d.beta_john = s.radius;
                d.center_x0 = s.center;
            } else if constexpr (std::is_same_v<T, RectangleShape>) {
                detail::require(s.a > 0.0 && s.a <= s.b && std::isfinite(s.b), "0 < a <= b");
                d.alpha_john = s.a / 2.0;
                d.beta_john = std::sqrt(s.a * s.a + (dim - 1) * s.b * s.b) / 2.0;
                d.center_x0 = s.center;
            } else {
                detail::require(dim == 2, "l_shape needs dim 2");
                detail::require(s.unit > 0.0 && std::isfinite(s.unit), "unit > 0");
                d.alpha_john = s.unit / 2.0;
                d.beta_john = s.unit * std::sqrt(2.5);
                d.center_x0 = s.center;
                d.center_x0[0] -= s.unit / 2.0;
                d.center_x0[1] -= s.unit / 2.0;
            }
        },
        shape);

    const auto box = detail::bounding_box(shape, dim);
    for (int a = 0; a < dim; ++a) {
        const double lo = grid.origin()[a], hi = lo + grid.root_side();
        if (box.lo[a] < lo || box.hi[a] > hi)
            throw ParameterError("constraint violated: shape inside grid root (shape outside root)");
    }

    d.cells = CellSet::from_centers(grid, [&](const Point& x) { return shape_contains(shape, dim, x); });
    if (const auto* p = std::get_if<PuncturedBallShape>(&shape)) {
        // Cells whose closure contains the puncture.
        const double h = grid.cell_side();
        for (std::size_t i = 0; i < grid.cell_count(); ++i) {
            const Point c = grid.center(i);
            bool touches = true;
            for (int a = 0; a < dim; ++a) touches = touches && std::abs(c[a] - p->center[a]) <= h / 2.0;
            if (touches) d.cells.erase(i);
        }
    }
    detail::require(!d.cells.empty(), "domain contains at least one cell center");
    detail::require(d.cells.center_diameter() <= 2.0 * d.beta_john * (1.0 + 1e-12), "diam(cells) <= 2 beta");
    return d;
}

/// B(x0, c_ball alpha^2 / beta).
inline MeanValueBall mean_value_ball(const JohnDomain& d, double c_ball = default_c_ball)
{
    detail::require(c_ball > 0.0 && c_ball <= 1.0 && std::isfinite(c_ball), "c_ball in (0, 1]");
    return {d.center_x0, c_ball * d.alpha_john * d.alpha_john / d.beta_john};
}

/// Average of u over the domain cells with center in B. Written as
/// u_0 + sum (u_i - u_0) / n so constants are reproduced exactly.
inline double mean_value(const ScalarField& u, const JohnDomain& d, const MeanValueBall& b)
{
    require_same_grid(u.grid(), d.grid());
    const auto& g = d.grid();
    double base = 0.0, acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        if (!d.cells.contains(i) || !(distance(g.center(i), b.center) < b.radius)) continue;
        if (n == 0) base = u[i];
        acc += u[i] - base;
        ++n;
    }
    if (n == 0)
        throw ParameterError("constraint violated: mean-value ball meets the domain cells (empty intersection)");
    return base + acc / static_cast<double>(n);
}

inline double mean_value(const GridFunction& u, const JohnDomain& d, const MeanValueBall& b)
{
    std::vector<double> v(u.values().begin(), u.values().end());
    return mean_value(ScalarField(u.grid(), std::move(v)), d, b);
}

} // namespace capnorm
