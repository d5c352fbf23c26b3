#pragma once

// Choquet integrals and Choquet-Lorentz quasi-norms with respect to the dyadic
// content.
//
// For a grid function the map lambda -> H({f > lambda}) is a step function:
// with distinct positive values v_1 < ... < v_m and v_0 = 0 it equals h_j on
// [v_j, v_{j+1}) and 0 from v_m on. Every functional below is a finite sum
// over these plateaus, so nothing is integrated numerically.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "capnorm/content.hpp"
#include "capnorm/errors.hpp"
#include "capnorm/grid.hpp"

namespace capnorm {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Exponents (p, q, delta) of a Choquet-Lorentz quasi-norm; q may be infinity.
struct LorentzExponents {
    double p = 1.0;
    double q = 1.0;
    double delta = 1.0;

    void validate(int dim) const
    {
        detail::require(std::isfinite(p) && p > 0.0, "p in (0, inf)");
        detail::require(q > 0.0 && !std::isnan(q), "q in (0, inf]");
        ContentParams{delta}.validate(dim);
    }
};

/// Piecewise-constant distribution lambda -> H({f > lambda}).
struct StepDistribution {
    std::vector<double> thresholds; ///< v_1 < ... < v_m
    std::vector<double> plateaus;   ///< h_0 >= ... >= h_{m-1}

    bool empty() const { return thresholds.empty(); }

    /// h(lambda) for lambda >= 0.
    double at(double lambda) const
    {
        const auto j = static_cast<std::size_t>(
            std::upper_bound(thresholds.begin(), thresholds.end(), lambda) - thresholds.begin());
        return j < plateaus.size() ? plateaus[j] : 0.0;
    }

    double lower(std::size_t j) const { return j == 0 ? 0.0 : thresholds[j - 1]; }
};

/// Relative tolerance below which sampled values are merged into one level.
inline constexpr double level_merge_tolerance = 1e-12;

namespace detail {

/// Positive cells ordered by value, split into groups of equal value.
struct LevelGroups {
    std::vector<std::size_t> order;  ///< positive cells, ascending value
    std::vector<std::size_t> starts; ///< group j = order[starts[j] .. starts[j+1])
    std::vector<double> values;      ///< representative (largest) value per group
};

inline LevelGroups level_groups(const GridFunction& f)
{
    LevelGroups g;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] > 0.0) g.order.push_back(i);
    std::stable_sort(g.order.begin(), g.order.end(),
                     [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    double first = 0.0;
    for (std::size_t k = 0; k < g.order.size(); ++k) {
        const double v = f[g.order[k]];
        if (g.starts.empty() || v - first > level_merge_tolerance * v) {
            g.starts.push_back(k);
            g.values.push_back(v);
            first = v;
        } else {
            g.values.back() = v;
        }
    }
    g.starts.push_back(g.order.size());
    return g;
}

/// [sum_j (v_{j+1}^q - v_j^q) h_j^{q/p}]^{1/q}, evaluated relative to v_m so
/// large exponents do not overflow.
inline double plateau_power_sum(const StepDistribution& d, double p, double q, double weight)
{
    if (d.empty()) return 0.0;
    const double top = d.thresholds.back();
    double s = 0.0;
    for (std::size_t j = 0; j < d.plateaus.size(); ++j) {
        const double a = std::pow(d.lower(j) / top, q);
        const double b = std::pow(d.thresholds[j] / top, q);
        s += (b - a) * std::pow(d.plateaus[j], q / p);
    }
    return top * std::pow(weight * s, 1.0 / q);
}

} // namespace detail

/// Exact distribution of f with respect to the dyadic content of order delta.
/// Superlevel sets are nested, so the content tree is updated incrementally
/// as cells leave; each plateau equals a from-scratch evaluation bit for bit.
inline StepDistribution distribution(const GridFunction& f, double delta)
{
    ContentParams{delta}.validate(f.grid().dim());
    const auto groups = detail::level_groups(f);
    StepDistribution d;
    d.thresholds = groups.values;
    d.plateaus.reserve(groups.values.size());
    ContentTree tree(f.support(), ContentParams{delta});
    for (std::size_t j = 0; j < groups.values.size(); ++j) {
        d.plateaus.push_back(tree.value());
        for (std::size_t k = groups.starts[j]; k < groups.starts[j + 1]; ++k)
            tree.erase(groups.order[k]);
    }
    return d;
}

/// Same shape with Lebesgue measure (cell count times h^dim) in place of the
/// content.
inline StepDistribution lebesgue_distribution(const GridFunction& f)
{
    const auto groups = detail::level_groups(f);
    StepDistribution d;
    d.thresholds = groups.values;
    const double vol = f.grid().cell_volume();
    for (std::size_t j = 0; j < groups.values.size(); ++j)
        d.plateaus.push_back(static_cast<double>(groups.order.size() - groups.starts[j]) * vol);
    return d;
}

/// int_0^inf h(lambda) dlambda = sum_j (v_{j+1} - v_j) h_j.
inline double choquet_integral(const StepDistribution& d)
{
    double s = 0.0;
    for (std::size_t j = 0; j < d.plateaus.size(); ++j)
        s += (d.thresholds[j] - d.lower(j)) * d.plateaus[j];
    return s;
}

inline double choquet_integral(const GridFunction& f, double delta)
{
    return choquet_integral(distribution(f, delta));
}

/// [p int_0^inf lambda^{p-1} h(lambda) dlambda]^{1/p}.
inline double choquet_p_norm(const StepDistribution& d, double p)
{
    detail::require(std::isfinite(p) && p > 0.0, "p in (0, inf)");
    return detail::plateau_power_sum(d, p, p, 1.0);
}

inline double choquet_p_norm(const GridFunction& f, double p, double delta)
{
    detail::require(std::isfinite(p) && p > 0.0, "p in (0, inf)");
    return choquet_p_norm(distribution(f, delta), p);
}

/// Choquet-Lorentz quasi-norm from a distribution.
/// q < inf: [(p/q) sum_j (v_{j+1}^q - v_j^q) h_j^{q/p}]^{1/q}.
/// q = inf: max_j v_{j+1} h_j^{1/p}, the supremum of lambda h(lambda)^{1/p}
///          over each plateau approached from below its right end.
inline double lorentz_norm(const StepDistribution& d, double p, double q)
{
    detail::require(std::isfinite(p) && p > 0.0, "p in (0, inf)");
    detail::require(q > 0.0 && !std::isnan(q), "q in (0, inf]");
    if (d.empty()) return 0.0;
    if (std::isinf(q)) {
        double best = 0.0;
        for (std::size_t j = 0; j < d.plateaus.size(); ++j)
            best = std::max(best, d.thresholds[j] * std::pow(d.plateaus[j], 1.0 / p));
        return best;
    }
    if (q == p) return detail::plateau_power_sum(d, p, p, 1.0);
    return detail::plateau_power_sum(d, p, q, p / q);
}

inline double lorentz_norm(const GridFunction& f, const LorentzExponents& e)
{
    e.validate(f.grid().dim());
    return lorentz_norm(distribution(f, e.delta), e.p, e.q);
}

/// Dyadic-level form  [sum_{i in Z} 2^{iq} h(2^i)^{q/p}]^{1/q}  (q < inf) or
/// sup_i 2^i h(2^i)^{1/p}  (q = inf). Levels with 2^i >= v_m vanish; levels
/// with 2^i < v_1 all see h_0 and are summed as a geometric series.
inline double lorentz_norm_dyadic(const StepDistribution& d, double p, double q)
{
    detail::require(std::isfinite(p) && p > 0.0, "p in (0, inf)");
    detail::require(q > 0.0 && !std::isnan(q), "q in (0, inf]");
    if (d.empty()) return 0.0;
    // Largest i with 2^i < v.
    auto below = [](double v) {
        int e = 0;
        const double m = std::frexp(v, &e);
        return m == 0.5 ? e - 2 : e - 1;
    };
    const int first = below(d.thresholds.front());
    const int last = below(d.thresholds.back());
    if (std::isinf(q)) {
        double best = std::ldexp(1.0, first) * std::pow(d.plateaus.front(), 1.0 / p);
        for (int i = first + 1; i <= last; ++i)
            best = std::max(best, std::ldexp(1.0, i) * std::pow(d.at(std::ldexp(1.0, i)), 1.0 / p));
        return best;
    }
    // Relative to 2^last to keep the powers bounded.
    const double scale = std::ldexp(1.0, last);
    double s = std::pow(std::ldexp(1.0, first) / scale, q) / (1.0 - std::pow(2.0, -q)) *
               std::pow(d.plateaus.front(), q / p);
    for (int i = first + 1; i <= last; ++i) {
        const double lambda = std::ldexp(1.0, i);
        s += std::pow(lambda / scale, q) * std::pow(d.at(lambda), q / p);
    }
    return scale * std::pow(s, 1.0 / q);
}

inline double lorentz_norm_dyadic(const GridFunction& f, const LorentzExponents& e)
{
    e.validate(f.grid().dim());
    return lorentz_norm_dyadic(distribution(f, e.delta), e.p, e.q);
}

/// Classical Lorentz norm with Lebesgue measure.
inline double lebesgue_lorentz_norm(const GridFunction& f, double p, double q)
{
    return lorentz_norm(lebesgue_distribution(f), p, q);
}

/// Bounds [lo, hi] on lorentz_norm_dyadic / lorentz_norm.
///
/// On [2^i, 2^{i+1}) the distribution lies between h(2^{i+1}) and h(2^i), and
/// int_{2^i}^{2^{i+1}} lambda^{q-1} dlambda = 2^{iq} (2^q - 1) / q. Comparing
/// term by term:
///   (p/q)(1 - 2^-q) D <= N^q <= (p/q)(2^q - 1) D,  D = dyadic sum,
/// so D^{1/q} / N lies in [(q / (p (2^q - 1)))^{1/q}, (q / (p (1 - 2^-q)))^{1/q}].
/// For q = inf the dyadic supremum samples the continuous one (ratio <= 1)
/// and lambda h(lambda)^{1/p} <= 2 * 2^i h(2^i)^{1/p} (ratio >= 1/2).
struct Comparability {
    double lo = 0.0;
    double hi = 0.0;
};

inline Comparability dyadic_comparability(double p, double q)
{
    if (std::isinf(q)) return {0.5, 1.0};
    return {std::pow(q / (p * (std::pow(2.0, q) - 1.0)), 1.0 / q),
            std::pow(q / (p * (1.0 - std::pow(2.0, -q))), 1.0 / q)};
}

/// C with ||f||_{p,r} <= C ||f||_{p,s} for s <= r:
/// ||f||_{p,r}^r <= ||f||_{p,inf}^{r-s} ||f||_{p,s}^s and
/// ||f||_{p,inf} <= (s/p)^{1/s} ||f||_{p,s} give C = (s/p)^{1/s - 1/r}.
inline double second_index_embedding_constant(double p, double s, double r)
{
    detail::require(s > 0.0 && s <= r, "0 < s <= r");
    if (std::isinf(r)) return std::pow(s / p, 1.0 / s);
    return std::pow(s / p, 1.0 / s - 1.0 / r);
}

/// Lebesgue vs content embedding constant:
/// ||f||_{L^{p,q}} <= (dim/delta)^{1/q} ||f||_{L^{p delta/dim, q}(H^delta)}.
/// Any dyadic cover has |E| <= sum l_i^dim <= (sum l_i^delta)^{dim/delta},
/// so |E| <= H(E)^{dim/delta}; the prefactors p and p delta/dim differ by
/// dim/delta. For q = inf the constant is 1.
inline double lebesgue_embedding_constant(int dim, double delta, double q)
{
    if (std::isinf(q)) return 1.0;
    return std::pow(static_cast<double>(dim) / delta, 1.0 / q);
}

} // namespace capnorm
