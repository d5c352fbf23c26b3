#pragma once

// Closed-form test functions and their midpoint sampling on a grid.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "capnorm/errors.hpp"
#include "capnorm/grid.hpp"

namespace capnorm {

/// |x - center|^exponent, times scale.
struct RadialPower {
    Point center{};
    double exponent = 1.0;
    double scale = 1.0;
};

struct Constant {
    double value = 0.0;
};

/// 1 on the open ball B(center, radius).
struct BallIndicator {
    Point center{};
    double radius = 1.0;
};

/// coefficients . x + offset.
struct Linear {
    Point coefficients{1.0, 0.0, 0.0};
    double offset = 0.0;
};

/// scale * (1 - |x - center|^2 / radius^2)_+^2, a C^1 bump.
struct Bump {
    Point center{};
    double radius = 1.0;
    double scale = 1.0;
};

/// Arbitrary callable; its gradient is taken by finite differences.
struct Tabulated {
    std::function<double(const Point&)> fn;
    std::string label = "tabulated";
};

/// Samples are zero unless inner <= |x - center| < outer.
struct Annulus {
    Point center{};
    double inner = 0.0;
    double outer = std::numeric_limits<double>::infinity();

    bool admits(const Point& x) const
    {
        const double r = distance(x, center);
        return r >= inner && r < outer;
    }
};

class Sampler {
public:
    using Form = std::variant<RadialPower, Constant, BallIndicator, Linear, Bump, Tabulated>;

    Sampler(Form form, std::optional<Annulus> truncation = std::nullopt)
        : form_(std::move(form)), truncation_(truncation)
    {
    }

    const Form& form() const { return form_; }
    const std::optional<Annulus>& truncation() const { return truncation_; }

    bool admits(const Point& x) const { return !truncation_ || truncation_->admits(x); }

    double value(const Point& x) const
    {
        if (!admits(x)) return 0.0;
        return std::visit([&](const auto& f) { return eval(f, x); }, form_);
    }

    /// |grad u|(x) in closed form; nullopt when the form is tabulated.
    std::optional<double> gradient_norm(const Point& x) const
    {
        if (std::holds_alternative<Tabulated>(form_)) return std::nullopt;
        if (std::holds_alternative<BallIndicator>(form_))
            throw ParameterError("constraint violated: sampler is differentiable "
                                 "(ball indicator has no gradient)");
        if (!admits(x)) return 0.0;
        return std::visit([&](const auto& f) { return grad(f, x); }, form_);
    }

    bool tabulated() const { return std::holds_alternative<Tabulated>(form_); }

private:
    static double eval(const RadialPower& f, const Point& x)
    {
        return f.scale * std::pow(distance(x, f.center), f.exponent);
    }
    static double eval(const Constant& f, const Point&) { return f.value; }
    static double eval(const BallIndicator& f, const Point& x)
    {
        return distance(x, f.center) < f.radius ? 1.0 : 0.0;
    }
    static double eval(const Linear& f, const Point& x)
    {
        return f.coefficients[0] * x[0] + f.coefficients[1] * x[1] + f.coefficients[2] * x[2] +
               f.offset;
    }
    static double eval(const Bump& f, const Point& x)
    {
        const double r = distance(x, f.center) / f.radius;
        if (r >= 1.0) return 0.0;
        const double t = 1.0 - r * r;
        return f.scale * t * t;
    }
    static double eval(const Tabulated& f, const Point& x) { return f.fn(x); }

    static double grad(const RadialPower& f, const Point& x)
    {
        // |grad |x|^eta| = |eta| |x|^(eta - 1)
        if (f.exponent == 0.0) return 0.0;
        return std::abs(f.scale * f.exponent) * std::pow(distance(x, f.center), f.exponent - 1.0);
    }
    static double grad(const Constant&, const Point&) { return 0.0; }
    static double grad(const BallIndicator&, const Point&) { return 0.0; }
    static double grad(const Linear& f, const Point&) { return norm(f.coefficients); }
    static double grad(const Bump& f, const Point& x)
    {
        // d/dr s(1 - r^2/R^2)^2 = -4 s r (1 - r^2/R^2) / R^2
        const double r = distance(x, f.center);
        if (r >= f.radius) return 0.0;
        const double t = 1.0 - (r * r) / (f.radius * f.radius);
        return std::abs(4.0 * f.scale * r * t) / (f.radius * f.radius);
    }
    static double grad(const Tabulated&, const Point&) { return 0.0; }

    Form form_;
    std::optional<Annulus> truncation_;
};

/// Signed midpoint samples on the cells of `mask` (all cells when null);
/// zero elsewhere.
inline ScalarField sample_field(const Sampler& u, const DyadicGrid& grid,
                                const CellSet* mask = nullptr)
{
    if (mask) require_same_grid(grid, mask->grid());
    std::vector<double> v(grid.cell_count(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (mask && !mask->contains(i)) continue;
        v[i] = u.value(grid.center(i));
        if (!std::isfinite(v[i]))
            throw NonFiniteValue("non-finite sample value at cell " + std::to_string(i));
    }
    return ScalarField(grid, std::move(v));
}

/// Midpoint samples of a nonnegative sampler.
inline GridFunction sample(const Sampler& u, const DyadicGrid& grid,
                           const CellSet* mask = nullptr)
{
    const ScalarField field = sample_field(u, grid, mask);
    std::vector<double> v(field.values().begin(), field.values().end());
    return GridFunction(grid, std::move(v));
}

/// |grad u| at cell centers of `mask` (all cells when null), zero elsewhere.
/// Closed-form gradients are used when available; tabulated forms use central
/// differences, falling back to one-sided differences where a neighbour lies
/// outside the region where u is defined.
inline GridFunction gradient_magnitude(const Sampler& u, const DyadicGrid& grid,
                                       const CellSet* mask = nullptr)
{
    if (mask) require_same_grid(grid, mask->grid());
    const std::size_t n = grid.cell_count();
    std::vector<double> g(n, 0.0);
    auto inside = [&](std::size_t i) {
        return (!mask || mask->contains(i)) && u.admits(grid.center(i));
    };

    if (!u.tabulated()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (mask && !mask->contains(i)) continue;
            g[i] = *u.gradient_norm(grid.center(i));
            if (!std::isfinite(g[i]))
                throw NonFiniteValue("non-finite gradient value at cell " + std::to_string(i));
        }
        return GridFunction(grid, std::move(g));
    }

    const ScalarField field = sample_field(u, grid, mask);
    const double h = grid.cell_side();
    const auto per_axis = grid.cells_per_axis();
    for (std::size_t i = 0; i < n; ++i) {
        if (!inside(i)) continue;
        const MultiIndex idx = grid.coords(i);
        double sq = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            std::optional<std::size_t> lo, hi;
            if (idx[a] > 0) {
                MultiIndex m = idx;
                --m[a];
                if (inside(grid.index(m))) lo = grid.index(m);
            }
            if (idx[a] + 1 < per_axis) {
                MultiIndex m = idx;
                ++m[a];
                if (inside(grid.index(m))) hi = grid.index(m);
            }
            double d = 0.0;
            if (lo && hi) d = (field[*hi] - field[*lo]) / (2.0 * h);
            else if (hi) d = (field[*hi] - field[i]) / h;
            else if (lo) d = (field[i] - field[*lo]) / h;
            sq += d * d;
        }
        g[i] = std::sqrt(sq);
        if (!std::isfinite(g[i]))
            throw NonFiniteValue("non-finite gradient value at cell " + std::to_string(i));
    }
    return GridFunction(grid, std::move(g));
}

} // namespace capnorm
