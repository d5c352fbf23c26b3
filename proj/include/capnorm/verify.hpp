#pragma once

// Experiment runners: inequality checks across grid depths, sharpness sweeps
// and comparability checks, each producing a self-contained report.
//
// A check passes when every per-depth ratio is finite and each refinement
// multiplies it by less than stability_limit (an unbounded constant grows
// geometrically in 1/h). Ratios are 0 when the left side vanishes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "capnorm/choquet.hpp"
#include "capnorm/domains.hpp"
#include "capnorm/errors.hpp"
#include "capnorm/grid.hpp"
#include "capnorm/interp.hpp"
#include "capnorm/operators.hpp"
#include "capnorm/sampler.hpp"
#include "capnorm/serialize.hpp"

namespace capnorm {

inline constexpr const char* artifact_version = "1.0.0";
inline constexpr double stability_limit = 1.2;
inline constexpr double slope_tolerance = 0.05;
inline constexpr double variation_limit = 0.10;

struct SeriesEntry {
    std::string label;
    double value = 0.0;
};

struct ExperimentReport {
    std::string experiment;
    Json params;
    std::vector<SeriesEntry> series;
    bool verdict = false;
    std::string detail;

    void add(std::string label, double value) { series.push_back({std::move(label), value}); }

    double value(const std::string& label) const
    {
        for (const auto& e : series)
            if (e.label == label) return e.value;
        throw Error("no series entry '" + label + "'");
    }

    std::string config_hash() const { return fnv1a_hex(params.dump()); }

    Json to_json() const
    {
        Json s = Json::array();
        for (const auto& e : series) s.push_back(Json{{"label", e.label}, {"value", real_to_json(e.value)}});
        return Json{{"experiment", experiment},
                    {"params", params},
                    {"series", s},
                    {"verdict", verdict ? "pass" : "fail"},
                    {"detail", detail},
                    {"provenance", Json{{"version", artifact_version}, {"config_hash", config_hash()}}}};
    }
};

/// Least-squares fit of log ys against log xs.
struct SlopeFit {
    std::vector<double> xs, ys;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline SlopeFit fit_slope(std::vector<double> xs, std::vector<double> ys)
{
    detail::require(xs.size() == ys.size(), "xs and ys of equal length");
    detail::require(xs.size() >= 4, "at least 4 points");
    for (std::size_t i = 0; i < xs.size(); ++i)
        detail::require(xs[i] > 0.0 && ys[i] > 0.0 && std::isfinite(xs[i]) && std::isfinite(ys[i]),
                        "positive finite points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = std::log(xs[i]) - mx, dy = std::log(ys[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    detail::require(sxx > 0.0, "xs not all equal");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? std::min(1.0, (sxy * sxy) / (sxx * syy)) : 1.0;
    f.xs = std::move(xs);
    f.ys = std::move(ys);
    return f;
}

/// Growth factors of a ratio series and the resulting verdict.
struct Stability {
    std::vector<double> growth;
    bool finite = true;
    bool stable = true;
};

inline Stability stability(const std::vector<double>& ratios, double limit = stability_limit)
{
    Stability s;
    for (double r : ratios) s.finite = s.finite && std::isfinite(r);
    for (std::size_t i = 1; i < ratios.size(); ++i) {
        const double a = ratios[i - 1], b = ratios[i];
        const double g = a == 0.0 ? (b == 0.0 ? 1.0 : infinity) : b / a;
        s.growth.push_back(g);
        s.stable = s.stable && g < limit;
    }
    s.stable = s.stable && s.finite;
    return s;
}

// Exponent arithmetic.

/// Real interval with open/closed ends.
struct Window {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(double x) const
    {
        const bool above = lo_closed ? x >= lo : x > lo;
        const bool below = hi_closed ? x <= hi : x < hi;
        return above && below;
    }

    std::string describe() const
    {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%c%.6g, %.6g%c", lo_closed ? '[' : '(', lo, hi, hi_closed ? ']' : ')');
        return buf;
    }
};

/// p (delta - mu p) / (delta - p alpha); alpha = 1 gives the Sobolev exponent.
inline double target_exponent(double delta, double mu, double p, double alpha)
{
    return p * (delta - mu * p) / (delta - p * alpha);
}

/// q (delta - p alpha) / (delta - mu p), the second index on the right.
inline double source_second_index(double delta, double mu, double p, double alpha, double q)
{
    if (std::isinf(q)) return q;
    return q * (delta - p * alpha) / (delta - mu * p);
}

/// Lower bound on q: delta (delta - mu p) / (dim (delta - p alpha)).
inline double q_threshold(int dim, double delta, double mu, double p, double alpha)
{
    return delta * (delta - mu * p) / (dim * (delta - p * alpha));
}

/// eta with ||u_0|| = inf and ||grad u_0|| < inf: (1 - delta/p, -(delta - mu p)/s].
inline Window poincare_eta_window(double delta, double mu, double p, double s)
{
    return {1.0 - delta / p, -(delta - mu * p) / s, false, true};
}

/// eta with blow-up of ||I_alpha f_eps|| and bounded ||f_eps||:
/// (-delta/p, -(delta - mu p)/s - alpha).
inline Window riesz_eta_window(double delta, double mu, double alpha, double p, double s)
{
    return {-delta / p, -(delta - mu * p) / s - alpha, false, false};
}

inline double poincare_predicted_slope(double delta, double mu, double s, double p, double eta)
{
    return eta + (delta - mu * p) / s;
}

inline double riesz_predicted_slope(double delta, double mu, double alpha, double s, double p, double eta)
{
    return eta + alpha + (delta - mu * p) / s;
}

namespace detail {

inline bool is_endpoint(double p, double delta, int dim)
{
    return std::abs(p - delta / dim) <= 1e-12 * (delta / dim);
}

/// Root box: the smallest cube around the shape's bounding box.
inline DyadicGrid fitted_grid(const Shape& shape, int dim, int depth)
{
    const auto box = bounding_box(shape, dim);
    double side = 0.0;
    for (int a = 0; a < dim; ++a) side = std::max(side, box.hi[a] - box.lo[a]);
    Point origin{};
    for (int a = 0; a < dim; ++a) origin[a] = 0.5 * (box.lo[a] + box.hi[a]) - 0.5 * side;
    return DyadicGrid(dim, depth, side, origin);
}

inline double shape_diameter(const Shape& shape, int dim)
{
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RectangleShape>)
                return std::sqrt(s.a * s.a + (dim - 1) * s.b * s.b);
            else if constexpr (std::is_same_v<T, LShape>)
                return s.unit * std::sqrt(8.0);
            else
                return 2.0 * s.radius;
        },
        shape);
}

inline Json depths_json(const std::vector<int>& depths)
{
    Json a = Json::array();
    for (int d : depths) a.push_back(d);
    return a;
}

inline void require_depths(const std::vector<int>& depths)
{
    require(depths.size() >= 3, "at least 3 depths");
    for (std::size_t i = 1; i < depths.size(); ++i) require(depths[i] > depths[i - 1], "depths increasing");
}

inline std::string label(const char* prefix, int depth, const char* what)
{
    return std::string(prefix) + std::to_string(depth) + "/" + what;
}

/// Records lhs, rhs and ratio per depth and sets the stability verdict.
struct DepthSeries {
    std::vector<int> depths;
    std::vector<double> ratios;

    void push(ExperimentReport& r, int depth, double lhs, double rhs)
    {
        double ratio = 0.0;
        if (lhs > 0.0) {
            if (!(rhs > 0.0))
                throw Error("right-hand side vanishes while the left-hand side is " + std::to_string(lhs) +
                            " (depth " + std::to_string(depth) + ")");
            ratio = lhs / rhs;
        }
        r.add(label("depth=", depth, "lhs"), lhs);
        r.add(label("depth=", depth, "rhs"), rhs);
        r.add(label("depth=", depth, "ratio"), ratio);
        depths.push_back(depth);
        ratios.push_back(ratio);
    }

    void finish(ExperimentReport& r) const
    {
        const auto s = stability(ratios);
        for (std::size_t i = 0; i < s.growth.size(); ++i)
            r.add(label("growth=", depths[i + 1], "factor"), s.growth[i]);
        r.verdict = s.stable;
        r.detail = s.stable ? "ratios finite, growth factor < 1.2 per refinement"
                            : (s.finite ? "growth factor >= 1.2 under refinement" : "non-finite ratio");
    }
};

/// Golden-section minimum of ||u - b|| over b in [lo, hi].
inline std::pair<double, double> golden_scan(const std::function<double(double)>& norm_at, double lo, double hi)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = norm_at(c), fd = norm_at(d);
    for (int it = 0; it < 48 && b - a > 1e-10 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = norm_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = norm_at(d);
        }
    }
    return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

/// Shared body of the John-domain checks. `left` maps |u - u_B| (or |u|) to
/// the left norm, `right` maps |grad u| to the right norm.
struct DomainRun {
    ExperimentReport& report;
    const Shape& shape;
    int dim;
    const Sampler& u;
    double c_ball;
    bool subtract_mean;

    template <class Left, class Right>
    void run(const std::vector<int>& depths, double factor, Left&& left, Right&& right)
    {
        DepthSeries series;
        for (int depth : depths) {
            const auto grid = fitted_grid(shape, dim, depth);
            const auto domain = make_john_domain(shape, grid);
            const auto field = sample_field(u, grid, &domain.cells);
            double b = 0.0;
            if (subtract_mean) {
                b = mean_value(field, domain, mean_value_ball(domain, c_ball));
                report.add(label("depth=", depth, "u_B"), b);
            }
            const double lhs = left(field.abs_minus(b, domain.cells));
            const double rhs = factor * right(gradient_magnitude(u, grid, &domain.cells));
            series.push(report, depth, lhs, rhs);
            if (subtract_mean && depth == depths.back() && lhs > 0.0) {
                double lo = infinity, hi = -infinity;
                for (std::size_t i = 0; i < field.size(); ++i)
                    if (domain.cells.contains(i)) {
                        lo = std::min(lo, field[i]);
                        hi = std::max(hi, field[i]);
                    }
                const auto best = golden_scan([&](double c) { return left(field.abs_minus(c, domain.cells)); }, lo, hi);
                const double gain = best.second > 0.0 ? lhs / best.second : infinity;
                report.add("b_scan/best_b", best.first);
                report.add("b_scan/best_lhs", best.second);
                report.add("b_scan/gain_over_u_B", gain);
                report.add("b_scan/within_factor_2", gain <= 2.0 ? 1.0 : 0.0);
            }
        }
        series.finish(report);
    }
};

inline Json domain_params(const Shape& shape, int dim, double c_ball)
{
    const auto grid = fitted_grid(shape, dim, 1);
    const auto d = make_john_domain(shape, grid);
    return Json{{"shape", shape_to_json(shape, dim)},
                {"alpha_john", real_to_json(d.alpha_john)},
                {"beta_john", real_to_json(d.beta_john)},
                {"john_center", point_to_json(d.center_x0, dim)},
                {"c_ball", real_to_json(c_ball)}};
}

} // namespace detail

struct PoincareExponents {
    double p = 1.5;
    double q = 1.5;
    double delta = 2.0;
};

/// ||u - u_B||_{L^{p,q}(H^delta)} / (beta (beta/alpha)^{2 dim} ||grad u||_{L^{p,q}(H^delta)}).
inline ExperimentReport poincare_check(const Shape& shape, int dim, const Sampler& u, PoincareExponents e,
                                       const std::vector<int>& depths, double c_ball = default_c_ball)
{
    ContentParams{e.delta}.validate(dim);
    detail::require(std::isfinite(e.p) && e.p > e.delta / dim, "p in (delta/dim, inf)");
    detail::require(std::isfinite(e.q) && e.q > e.delta / dim, "q in (delta/dim, inf)");
    detail::require_depths(depths);
    ExperimentReport r;
    r.experiment = "poincare";
    r.params = detail::domain_params(shape, dim, c_ball);
    r.params["dim"] = dim;
    r.params["sampler"] = sampler_to_json(u, dim);
    r.params["p"] = real_to_json(e.p);
    r.params["q"] = real_to_json(e.q);
    r.params["delta"] = real_to_json(e.delta);
    r.params["depths"] = detail::depths_json(depths);
    const double alpha = r.params["alpha_john"].get<double>(), beta = r.params["beta_john"].get<double>();
    const double factor = beta * std::pow(beta / alpha, 2.0 * dim);
    r.params["john_factor"] = real_to_json(factor);
    detail::DomainRun run{r, shape, dim, u, c_ball, true};
    run.run(
        depths, factor, [&](const GridFunction& f) { return lorentz_norm(f, {e.p, e.q, e.delta}); },
        [&](const GridFunction& g) { return lorentz_norm(g, {e.p, e.q, e.delta}); });
    return r;
}

/// ||u - u_B||_{L^{p,inf}(H^delta)} / (beta (beta/alpha)^{2 dim} ||grad u||_{L^p(H^delta)}), p = delta/dim.
inline ExperimentReport poincare_weak_check(const Shape& shape, int dim, const Sampler& u, double p, double delta,
                                            const std::vector<int>& depths, double c_ball = default_c_ball)
{
    ContentParams{delta}.validate(dim);
    detail::require(detail::is_endpoint(p, delta, dim), "p = delta/dim");
    detail::require_depths(depths);
    ExperimentReport r;
    r.experiment = "poincare_weak";
    r.params = detail::domain_params(shape, dim, c_ball);
    r.params["dim"] = dim;
    r.params["sampler"] = sampler_to_json(u, dim);
    r.params["p"] = real_to_json(p);
    r.params["delta"] = real_to_json(delta);
    r.params["depths"] = detail::depths_json(depths);
    const double alpha = r.params["alpha_john"].get<double>(), beta = r.params["beta_john"].get<double>();
    const double factor = beta * std::pow(beta / alpha, 2.0 * dim);
    r.params["john_factor"] = real_to_json(factor);
    detail::DomainRun run{r, shape, dim, u, c_ball, true};
    run.run(
        depths, factor, [&](const GridFunction& f) { return lorentz_norm(f, {p, infinity, delta}); },
        [&](const GridFunction& g) { return lorentz_norm(g, {p, p, delta}); });
    return r;
}

struct SobolevExponents {
    double mu = 0.0;
    double delta = 2.0;
    double p = 1.5;
    double q = 6.0; ///< ignored at the endpoint p = delta/dim
};

namespace detail {

/// Validates the Poincare-Sobolev exponents and returns the two norms
/// (exponent, second index, content order) of each side.
struct SobolevNorms {
    LorentzExponents left;
    LorentzExponents right;
    bool endpoint = false;
};

inline SobolevNorms sobolev_norms(int dim, const SobolevExponents& e)
{
    ContentParams{e.delta}.validate(dim);
    require(e.mu >= 0.0 && e.mu < 1.0, "mu in [0, 1)");
    SobolevNorms n;
    n.endpoint = is_endpoint(e.p, e.delta, dim);
    const double p = n.endpoint ? e.delta / dim : e.p;
    if (!n.endpoint) {
        require(e.p > e.delta / dim && e.p < e.delta, "p in (delta/dim, delta)");
        require(std::isfinite(e.q) && e.q > q_threshold(dim, e.delta, e.mu, e.p, 1.0),
                "q in (delta(delta - mu p)/(dim(delta - p)), inf)");
    }
    const double star = target_exponent(e.delta, e.mu, p, 1.0);
    const double lower_delta = e.delta - e.mu * p;
    if (n.endpoint) {
        n.left = {star, infinity, lower_delta};
        n.right = {p, p, e.delta};
    } else {
        n.left = {star, e.q, lower_delta};
        n.right = {p, source_second_index(e.delta, e.mu, p, 1.0, e.q), e.delta};
    }
    return n;
}

inline Json lorentz_json(const LorentzExponents& e)
{
    return Json{{"p", real_to_json(e.p)}, {"q", real_to_json(e.q)}, {"delta", real_to_json(e.delta)}};
}

} // namespace detail

/// Poincare-Sobolev ratio with left norm over H^{delta - mu p}.
inline ExperimentReport poincare_sobolev_check(const Shape& shape, int dim, const Sampler& u, SobolevExponents e,
                                               const std::vector<int>& depths, double c_ball = default_c_ball)
{
    const auto n = detail::sobolev_norms(dim, e);
    detail::require_depths(depths);
    ExperimentReport r;
    r.experiment = "poincare_sobolev";
    r.params = detail::domain_params(shape, dim, c_ball);
    r.params["dim"] = dim;
    r.params["sampler"] = sampler_to_json(u, dim);
    r.params["mu"] = real_to_json(e.mu);
    r.params["delta"] = real_to_json(e.delta);
    r.params["p"] = real_to_json(e.p);
    r.params["q"] = real_to_json(e.q);
    r.params["branch"] = n.endpoint ? "endpoint" : "strong";
    r.params["left_norm"] = detail::lorentz_json(n.left);
    r.params["right_norm"] = detail::lorentz_json(n.right);
    r.params["depths"] = detail::depths_json(depths);
    detail::DomainRun run{r, shape, dim, u, c_ball, true};
    run.run(
        depths, 1.0, [&](const GridFunction& f) { return lorentz_norm(f, n.left); },
        [&](const GridFunction& g) { return lorentz_norm(g, n.right); });
    return r;
}

enum class CompactVariant { diameter_strong, diameter_weak, sobolev_strong, sobolev_weak };

inline const char* variant_name(CompactVariant v)
{
    switch (v) {
    case CompactVariant::diameter_strong: return "diameter_strong";
    case CompactVariant::diameter_weak: return "diameter_weak";
    case CompactVariant::sobolev_strong: return "sobolev_strong";
    default: return "sobolev_weak";
    }
}

/// Compactly supported u: ||u|| / (diam(Omega) ||grad u||) for the diameter
/// variants, ||u|| / ||grad u|| with Sobolev exponents otherwise. The support
/// must stay at least margin_cells cells away from the domain boundary.
inline ExperimentReport compact_support_check(const Shape& shape, int dim, const Sampler& u, CompactVariant variant,
                                              SobolevExponents e, const std::vector<int>& depths,
                                              int margin_cells = 2)
{
    ContentParams{e.delta}.validate(dim);
    detail::require_depths(depths);
    LorentzExponents left, right;
    double factor = 1.0;
    switch (variant) {
    case CompactVariant::diameter_strong:
        detail::require(std::isfinite(e.p) && e.p > e.delta / dim, "p in (delta/dim, inf)");
        detail::require(std::isfinite(e.q) && e.q > e.delta / dim, "q in (delta/dim, inf)");
        left = right = {e.p, e.q, e.delta};
        factor = detail::shape_diameter(shape, dim);
        break;
    case CompactVariant::diameter_weak:
        detail::require(detail::is_endpoint(e.p, e.delta, dim), "p = delta/dim");
        left = {e.p, infinity, e.delta};
        right = {e.p, e.p, e.delta};
        factor = detail::shape_diameter(shape, dim);
        break;
    case CompactVariant::sobolev_strong: {
        detail::require(!detail::is_endpoint(e.p, e.delta, dim), "p in (delta/dim, delta)");
        const auto n = detail::sobolev_norms(dim, e);
        left = n.left;
        right = n.right;
        break;
    }
    case CompactVariant::sobolev_weak: {
        detail::require(detail::is_endpoint(e.p, e.delta, dim), "p = delta/dim");
        const auto n = detail::sobolev_norms(dim, e);
        left = n.left;
        right = n.right;
        break;
    }
    }
    ExperimentReport r;
    r.experiment = "compact_support";
    r.params = detail::domain_params(shape, dim, default_c_ball);
    r.params.erase("c_ball");
    r.params["dim"] = dim;
    r.params["sampler"] = sampler_to_json(u, dim);
    r.params["variant"] = variant_name(variant);
    r.params["mu"] = real_to_json(e.mu);
    r.params["delta"] = real_to_json(e.delta);
    r.params["p"] = real_to_json(e.p);
    r.params["q"] = real_to_json(e.q);
    r.params["left_norm"] = detail::lorentz_json(left);
    r.params["right_norm"] = detail::lorentz_json(right);
    r.params["diameter_factor"] = real_to_json(factor);
    r.params["margin_cells"] = margin_cells;
    r.params["depths"] = detail::depths_json(depths);

    // Support margin, checked on every depth before any norm is taken.
    for (int depth : depths) {
        const auto grid = detail::fitted_grid(shape, dim, depth);
        const auto domain = make_john_domain(shape, grid);
        const long n = static_cast<long>(grid.cells_per_axis());
        for (std::size_t i = 0; i < grid.cell_count(); ++i) {
            if (u.value(grid.center(i)) == 0.0) continue;
            const auto c = grid.coords(i);
            bool clear = true;
            std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
            for (int a = 0; a < dim; ++a) {
                lo[a] = static_cast<long>(c[a]) - margin_cells;
                hi[a] = static_cast<long>(c[a]) + margin_cells;
            }
            for (long x = lo[0]; x <= hi[0] && clear; ++x)
                for (long y = lo[1]; y <= hi[1] && clear; ++y)
                    for (long z = lo[2]; z <= hi[2] && clear; ++z) {
                        const long idx[3] = {x, y, z};
                        MultiIndex m{};
                        for (int a = 0; a < dim; ++a) {
                            if (idx[a] < 0 || idx[a] >= n) clear = false;
                            m[a] = static_cast<std::uint32_t>(std::max(0L, idx[a]));
                        }
                        if (clear && !domain.cells.contains(grid.index(m))) clear = false;
                    }
            if (!clear)
                throw ParameterError("constraint violated: support inside the domain with a margin of " +
                                     std::to_string(margin_cells) + " cells (support touches boundary at depth " +
                                     std::to_string(depth) + ")");
        }
    }
    detail::DomainRun run{r, shape, dim, u, default_c_ball, false};
    run.run(
        depths, factor, [&](const GridFunction& f) { return lorentz_norm(f, left); },
        [&](const GridFunction& g) { return lorentz_norm(g, right); });
    return r;
}

/// Root of a whole-space experiment: a cube of side `side` with lower corner `origin`.
struct RootSpec {
    int dim = 2;
    double side = 2.0;
    Point origin{-1.0, -1.0, 0.0};

    DyadicGrid grid(int depth) const { return DyadicGrid(dim, depth, side, origin); }

    Json to_json() const
    {
        return Json{{"dim", dim}, {"root_side", real_to_json(side)}, {"origin", point_to_json(origin, dim)}};
    }
};

struct RieszExponents {
    double alpha = 1.0;
    double mu = 0.0;
    double delta = 2.0;
    double p = 1.5;
    double q = 6.0; ///< ignored at the endpoint
};

namespace detail {

struct RieszNorms {
    LorentzExponents left;
    LorentzExponents right;
    bool endpoint = false;
};

inline RieszNorms riesz_norms(int dim, const RieszExponents& e)
{
    ContentParams{e.delta}.validate(dim);
    require(e.alpha > 0.0 && e.alpha < dim, "alpha in (0, dim)");
    require(e.mu >= 0.0 && e.mu < e.alpha, "mu in [0, alpha)");
    RieszNorms n;
    n.endpoint = is_endpoint(e.p, e.delta, dim);
    const double p = n.endpoint ? e.delta / dim : e.p;
    if (!n.endpoint) {
        require(e.p > e.delta / dim && e.p < e.delta / e.alpha, "p in (delta/dim, delta/alpha)");
        require(std::isfinite(e.q) && e.q > q_threshold(dim, e.delta, e.mu, e.p, e.alpha),
                "q in (delta(delta - mu p)/(dim(delta - p alpha)), inf)");
    }
    const double star = target_exponent(e.delta, e.mu, p, e.alpha);
    if (n.endpoint) {
        n.left = {star, infinity, e.delta - e.mu * p};
        n.right = {p, p, e.delta};
    } else {
        n.left = {star, e.q, e.delta - e.mu * p};
        n.right = {p, source_second_index(e.delta, e.mu, p, e.alpha, e.q), e.delta};
    }
    return n;
}

} // namespace detail

/// ||I_alpha f||_{L^{p(delta-mu p)/(delta-p alpha), q}(H^{delta-mu p})} /
/// ||f||_{L^{p, q(delta-p alpha)/(delta-mu p)}(H^delta)}; weak form at p = delta/dim.
/// Both norms are taken over the root box.
inline ExperimentReport riesz_boundedness_check(const Sampler& f, const RootSpec& root, RieszExponents e,
                                                const std::vector<int>& depths)
{
    const auto n = detail::riesz_norms(root.dim, e);
    detail::require_depths(depths);
    ExperimentReport r;
    r.experiment = "riesz";
    r.params = Json{{"root", root.to_json()},
                    {"sampler", sampler_to_json(f, root.dim)},
                    {"alpha", real_to_json(e.alpha)},
                    {"mu", real_to_json(e.mu)},
                    {"delta", real_to_json(e.delta)},
                    {"p", real_to_json(e.p)},
                    {"q", real_to_json(e.q)},
                    {"branch", n.endpoint ? "endpoint" : "strong"},
                    {"left_norm", detail::lorentz_json(n.left)},
                    {"right_norm", detail::lorentz_json(n.right)},
                    {"depths", detail::depths_json(depths)}};
    const auto rp = RieszParams::make(e.alpha, root.dim);
    detail::DepthSeries series;
    for (int depth : depths) {
        const auto grid = root.grid(depth);
        const auto fs = sample(f, grid);
        const double rhs = lorentz_norm(fs, n.right);
        const double lhs = rhs > 0.0 ? lorentz_norm(riesz(fs, rp), n.left) : 0.0;
        series.push(r, depth, lhs, rhs);
    }
    series.finish(r);
    return r;
}

struct MaximalExponents {
    double delta = 2.0;
    double mu = 0.0;
    double p = 1.5;
    double s = 1.5;
    double r = 1.5;
};

/// ||M_mu f||_{L^{p,r}(H^{delta - mu p})} / ||f||_{L^{p,s}(H^delta)}; at
/// p = delta/dim the weak form sup_lambda lambda H^{delta-mu p}(M f > lambda)^{1/p}
/// against ||f||_{L^p(H^delta)}.
inline ExperimentReport maximal_inequality_check(const Sampler& f, const RootSpec& root, MaximalExponents e,
                                                 const std::vector<int>& depths)
{
    const int dim = root.dim;
    ContentParams{e.delta}.validate(dim);
    detail::require(e.mu >= 0.0 && e.mu < dim, "mu in [0, dim)");
    const bool endpoint = detail::is_endpoint(e.p, e.delta, dim);
    const double p = endpoint ? e.delta / dim : e.p;
    if (!endpoint) {
        detail::require(e.p > e.delta / dim && (e.mu == 0.0 || e.p < e.delta / e.mu), "p in (delta/dim, delta/mu)");
        detail::require(e.r > e.delta / dim && std::isfinite(e.r), "r in (delta/dim, inf)");
        detail::require(e.s > 0.0 && e.s <= e.r, "s in (0, r]");
    } else {
        detail::require(e.mu * p < e.delta, "mu p < delta");
    }
    detail::require_depths(depths);
    const LorentzExponents left = endpoint ? LorentzExponents{p, infinity, e.delta - e.mu * p}
                                           : LorentzExponents{p, e.r, e.delta - e.mu * p};
    const LorentzExponents right = endpoint ? LorentzExponents{p, p, e.delta} : LorentzExponents{p, e.s, e.delta};
    ExperimentReport r;
    r.experiment = "maximal";
    r.params = Json{{"root", root.to_json()},
                    {"sampler", sampler_to_json(f, dim)},
                    {"delta", real_to_json(e.delta)},
                    {"mu", real_to_json(e.mu)},
                    {"p", real_to_json(e.p)},
                    {"s", real_to_json(e.s)},
                    {"r", real_to_json(e.r)},
                    {"branch", endpoint ? "endpoint" : "strong"},
                    {"left_norm", detail::lorentz_json(left)},
                    {"right_norm", detail::lorentz_json(right)},
                    {"depths", detail::depths_json(depths)}};
    detail::DepthSeries series;
    for (int depth : depths) {
        const auto grid = root.grid(depth);
        const auto fs = sample(f, grid);
        const double rhs = lorentz_norm(fs, right);
        const double lhs = rhs > 0.0 ? lorentz_norm(maximal(fs, maximal_params(grid, e.mu)), left) : 0.0;
        series.push(r, depth, lhs, rhs);
    }
    series.finish(r);
    return r;
}

/// Sup over cell centers of the Hedberg ratio, per depth; passes when finite
/// and each refinement changes it by less than 20% either way.
inline ExperimentReport hedberg_check(const Sampler& f, const RootSpec& root, HedbergParams hp,
                                      const std::vector<int>& depths)
{
    hp.validate(root.dim);
    detail::require_depths(depths);
    ExperimentReport r;
    r.experiment = "hedberg";
    r.params = Json{{"root", root.to_json()},
                    {"sampler", sampler_to_json(f, root.dim)},
                    {"alpha", real_to_json(hp.alpha)},
                    {"mu", real_to_json(hp.mu)},
                    {"p", real_to_json(hp.p)},
                    {"q", real_to_json(hp.q)},
                    {"delta", real_to_json(hp.delta)},
                    {"branch", hp.endpoint(root.dim) ? "endpoint" : "strong"},
                    {"depths", detail::depths_json(depths)}};
    std::vector<double> sups;
    for (int depth : depths) {
        const auto field = hedberg_field(sample(f, root.grid(depth)), hp);
        r.add(detail::label("depth=", depth, "sup_ratio"), field.sup);
        r.add(detail::label("depth=", depth, "norm"), field.norm);
        sups.push_back(field.sup);
    }
    bool ok = true;
    for (std::size_t i = 0; i < sups.size(); ++i) {
        ok = ok && std::isfinite(sups[i]) && sups[i] > 0.0;
        if (i > 0 && ok) {
            const double change = sups[i] / sups[i - 1];
            r.add(detail::label("change=", depths[i], "factor"), change);
            ok = ok && std::abs(change - 1.0) < 0.2;
        }
    }
    r.verdict = ok;
    r.detail = ok ? "sup ratio finite and stable within 20%" : "sup ratio unstable or not finite";
    return r;
}

// Sharpness sweeps.

struct SharpnessReport {
    SlopeFit fit;
    std::vector<double> eps;
    std::vector<double> left;
    std::vector<double> right;
    double predicted = 0.0;
    double right_variation = 0.0; ///< max/min - 1 of the right norms
    double reference_right = 0.0; ///< right norm without the epsilon cut-off
    bool slope_ok = false;
    bool bounded_ok = false;
    ExperimentReport report;
};

namespace detail {

inline void finish_sharpness(SharpnessReport& s, double reference_label_value)
{
    s.fit = fit_slope(s.eps, s.left);
    const auto [mn, mx] = std::minmax_element(s.right.begin(), s.right.end());
    s.right_variation = *mx / *mn - 1.0;
    s.bounded_ok = s.right_variation < variation_limit;
    s.reference_right = reference_label_value;
    auto& r = s.report;
    for (std::size_t i = 0; i < s.eps.size(); ++i) {
        r.add("eps=" + std::to_string(s.eps[i]) + "/left", s.left[i]);
        r.add("eps=" + std::to_string(s.eps[i]) + "/right", s.right[i]);
    }
    r.add("fit/slope", s.fit.slope);
    r.add("fit/intercept", s.fit.intercept);
    r.add("fit/r_squared", s.fit.r_squared);
    r.add("predicted_slope", s.predicted);
    r.add("right/variation", s.right_variation);
    r.add("right/reference_uncut", s.reference_right);
    r.verdict = s.slope_ok && s.bounded_ok;
    r.detail = std::string(s.slope_ok ? "slope within tolerance" : "slope outside tolerance") + "; " +
               (s.bounded_ok ? "right norm varies < 10%" : "right norm varies >= 10%");
}

inline Json eps_json(const std::vector<double>& eps)
{
    Json a = Json::array();
    for (double e : eps) a.push_back(real_to_json(e));
    return a;
}

} // namespace detail

struct SharpnessPoincareParams {
    int dim = 2;
    double delta = 2.0;
    double mu = 0.0;
    double p = 1.05;
    double s = 4.0;
    double q = 4.0;
    double eta = -0.8;
    double q_tilde = 50.0; ///< second index of the gradient norm
    int depth = 8;
};

/// u_eps = |x|^eta on eps <= |x| < 1 inside the punctured unit ball; fits the
/// slope of ||u_eps||_{L^{s,q}(H^{delta - mu p})} in eps and tracks
/// ||grad u_eps||_{L^{p,q_tilde}(H^delta)}. Slope must equal
/// eta + (delta - mu p)/s within 0.05; the gradient norm must vary < 10%.
inline SharpnessReport sharpness_poincare(const SharpnessPoincareParams& sp, const std::vector<double>& eps_list)
{
    const int dim = sp.dim;
    ContentParams{sp.delta}.validate(dim);
    detail::require(sp.mu >= 0.0 && sp.mu < 1.0, "mu in [0, 1)");
    detail::require(sp.p > sp.delta / dim && sp.p < sp.delta, "p in (delta/dim, delta)");
    detail::require(sp.s > target_exponent(sp.delta, sp.mu, sp.p, 1.0), "s > p(delta - mu p)/(delta - p)");
    detail::require(sp.q > 0.0 && std::isfinite(sp.q), "q in (0, inf)");
    detail::require(sp.q_tilde > 0.0 && std::isfinite(sp.q_tilde), "q_tilde in (0, inf)");
    const auto window = poincare_eta_window(sp.delta, sp.mu, sp.p, sp.s);
    if (!window.contains(sp.eta))
        throw ParameterError("constraint violated: eta in " + window.describe() + " (eta outside the admissible window)");
    for (double e : eps_list) detail::require(e > 0.0 && e < 1.0, "eps in (0, 1)");

    SharpnessReport s;
    s.predicted = poincare_predicted_slope(sp.delta, sp.mu, sp.s, sp.p, sp.eta);
    s.report.experiment = "sharpness_poincare";
    s.report.params = Json{{"dim", dim},
                           {"delta", real_to_json(sp.delta)},
                           {"mu", real_to_json(sp.mu)},
                           {"p", real_to_json(sp.p)},
                           {"s", real_to_json(sp.s)},
                           {"q", real_to_json(sp.q)},
                           {"eta", real_to_json(sp.eta)},
                           {"q_tilde", real_to_json(sp.q_tilde)},
                           {"depth", sp.depth},
                           {"window", window.describe()},
                           {"eps", detail::eps_json(eps_list)}};
    const Shape shape = PuncturedBallShape{{}, 1.0};
    const auto grid = detail::fitted_grid(shape, dim, sp.depth);
    const auto domain = make_john_domain(shape, grid);
    const LorentzExponents left{sp.s, sp.q, sp.delta - sp.mu * sp.p};
    const LorentzExponents right{sp.p, sp.q_tilde, sp.delta};
    for (double e : eps_list) {
        const Sampler u(RadialPower{{}, sp.eta, 1.0}, Annulus{{}, e, 1.0});
        s.eps.push_back(e);
        s.left.push_back(lorentz_norm(sample(u, grid, &domain.cells), left));
        s.right.push_back(lorentz_norm(gradient_magnitude(u, grid, &domain.cells), right));
    }
    const Sampler uncut(RadialPower{{}, sp.eta, 1.0});
    const double reference = lorentz_norm(gradient_magnitude(uncut, grid, &domain.cells), right);
    s.slope_ok = false;
    detail::finish_sharpness(s, reference);
    s.slope_ok = std::abs(s.fit.slope - s.predicted) <= slope_tolerance;
    s.report.verdict = s.slope_ok && s.bounded_ok;
    s.report.detail = std::string(s.slope_ok ? "slope within tolerance" : "slope outside tolerance") + "; " +
                      (s.bounded_ok ? "gradient norm varies < 10%" : "gradient norm varies >= 10%");
    return s;
}

struct SharpnessRieszParams {
    int dim = 2;
    double delta = 2.0;
    double mu = 0.0;
    double alpha = 1.0;
    double p = 1.5;
    double s = 8.0;
    double q = 8.0;
    double eta = -1.3;
    double q_tilde = 8.0; ///< second index of the norm of f_eps
    double outer = 10.0;  ///< f_eps = |x|^eta on eps <= |x| < outer
    int depth = 10;
};

/// f_eps = |x|^eta on eps <= |x| < outer over the root [-outer, outer)^dim;
/// fits the slope of ||I_alpha f_eps||_{L^{s,q}(H^{delta - mu p})} in eps.
/// Blow-up at least at the predicted rate: slope <= eta + alpha +
/// (delta - mu p)/s + 0.05; ||f_eps||_{L^{p,q_tilde}(H^delta)} must vary < 10%.
inline SharpnessReport sharpness_riesz(const SharpnessRieszParams& sp, const std::vector<double>& eps_list)
{
    const int dim = sp.dim;
    ContentParams{sp.delta}.validate(dim);
    detail::require(sp.alpha > 0.0 && sp.alpha < dim, "alpha in (0, dim)");
    detail::require(sp.mu >= 0.0 && sp.mu < sp.alpha, "mu in [0, alpha)");
    detail::require(sp.p > sp.delta / dim && sp.p < sp.delta / sp.alpha, "p in (delta/dim, delta/alpha)");
    detail::require(sp.s > target_exponent(sp.delta, sp.mu, sp.p, sp.alpha),
                    "s > p(delta - mu p)/(delta - p alpha)");
    detail::require(sp.q > 0.0 && std::isfinite(sp.q), "q in (0, inf)");
    detail::require(sp.q_tilde > 0.0 && std::isfinite(sp.q_tilde), "q_tilde in (0, inf)");
    detail::require(sp.outer > 0.0, "outer radius > 0");
    const auto window = riesz_eta_window(sp.delta, sp.mu, sp.alpha, sp.p, sp.s);
    if (!window.contains(sp.eta))
        throw ParameterError("constraint violated: eta in " + window.describe() + " (eta outside the admissible window)");
    for (double e : eps_list) detail::require(e > 0.0 && e < sp.outer, "eps in (0, outer)");

    SharpnessReport s;
    s.predicted = riesz_predicted_slope(sp.delta, sp.mu, sp.alpha, sp.s, sp.p, sp.eta);
    s.report.experiment = "sharpness_riesz";
    s.report.params = Json{{"dim", dim},
                           {"delta", real_to_json(sp.delta)},
                           {"mu", real_to_json(sp.mu)},
                           {"alpha", real_to_json(sp.alpha)},
                           {"p", real_to_json(sp.p)},
                           {"s", real_to_json(sp.s)},
                           {"q", real_to_json(sp.q)},
                           {"eta", real_to_json(sp.eta)},
                           {"q_tilde", real_to_json(sp.q_tilde)},
                           {"outer", real_to_json(sp.outer)},
                           {"depth", sp.depth},
                           {"window", window.describe()},
                           {"eps", detail::eps_json(eps_list)}};
    Point origin{};
    for (int a = 0; a < dim; ++a) origin[a] = -sp.outer;
    const DyadicGrid grid(dim, sp.depth, 2.0 * sp.outer, origin);
    const auto rp = RieszParams::make(sp.alpha, dim);
    const LorentzExponents left{sp.s, sp.q, sp.delta - sp.mu * sp.p};
    const LorentzExponents right{sp.p, sp.q_tilde, sp.delta};
    for (double e : eps_list) {
        const auto f = sample(Sampler(RadialPower{{}, sp.eta, 1.0}, Annulus{{}, e, sp.outer}), grid);
        s.eps.push_back(e);
        s.right.push_back(lorentz_norm(f, right));
        s.left.push_back(lorentz_norm(riesz(f, rp), left));
    }
    // Reference: the cut-off at the smallest cell scale.
    const auto fine = sample(Sampler(RadialPower{{}, sp.eta, 1.0}, Annulus{{}, grid.cell_side(), sp.outer}), grid);
    detail::finish_sharpness(s, lorentz_norm(fine, right));
    s.slope_ok = s.fit.slope <= s.predicted + slope_tolerance;
    s.report.verdict = s.slope_ok && s.bounded_ok;
    s.report.detail = std::string(s.slope_ok ? "blow-up at least at the predicted rate" : "blow-up slower than predicted") +
                      "; " + (s.bounded_ok ? "source norm varies < 10%" : "source norm varies >= 10%");
    return s;
}

// Interpolation comparability.

/// Deterministic family of nonnegative test functions on [-1, 1)^2.
inline Sampler interp_family_member(int k)
{
    const double t = static_cast<double>(k) / 50.0;
    switch (k % 5) {
    case 0: return Sampler(BallIndicator{{0.1 * t, -0.05 * t, 0.0}, 0.2 + 0.6 * t});
    case 1: return Sampler(Bump{{0.2 - 0.3 * t, 0.1, 0.0}, 0.3 + 0.5 * t, 1.0 + 3.0 * t});
    case 2: return Sampler(RadialPower{{}, -0.2 - 0.6 * t, 1.0}, Annulus{{}, 0.05, 0.4 + 0.5 * t});
    case 3: return Sampler(RadialPower{{0.1, 0.1, 0.0}, 0.5 + 1.5 * t, 1.0}, Annulus{{0.1, 0.1, 0.0}, 0.0, 0.9});
    default: {
        const double a = 1.0 + 6.0 * t;
        return Sampler(Tabulated{[a](const Point& x) { return std::exp(-a * (x[0] * x[0] + 2.0 * x[1] * x[1])); },
                                 "gaussian"});
    }
    }
}

inline constexpr int interp_family_size = 50;

/// Ratio interpolation_norm / lorentz_norm(p, q) over the family at each depth.
/// Passes when max/min over family and depths <= 100 and every function's
/// ratio changes by less than 20% between consecutive depths.
inline ExperimentReport interp_comparability_check(const InterpPair& pair, const std::vector<int>& depths)
{
    pair.validate(2);
    detail::require(depths.size() >= 2, "at least 2 depths");
    ExperimentReport r;
    r.experiment = "interp";
    r.params = Json{{"p0", real_to_json(pair.p0)},
                    {"p1", real_to_json(pair.p1)},
                    {"delta", real_to_json(pair.delta)},
                    {"eta", real_to_json(pair.eta)},
                    {"q", real_to_json(pair.q_interp)},
                    {"p", real_to_json(pair.p())},
                    {"family_size", interp_family_size},
                    {"root", RootSpec{}.to_json()},
                    {"depths", detail::depths_json(depths)}};
    double lo = infinity, hi = 0.0, worst_change = 0.0;
    std::vector<double> previous;
    for (int depth : depths) {
        const auto grid = RootSpec{}.grid(depth);
        std::vector<double> ratios;
        for (int k = 0; k < interp_family_size; ++k) {
            const auto rep = interp_report(sample(interp_family_member(k), grid), pair);
            ratios.push_back(rep.ratio);
            lo = std::min(lo, rep.ratio);
            hi = std::max(hi, rep.ratio);
        }
        const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
        r.add(detail::label("depth=", depth, "ratio_min"), *mn);
        r.add(detail::label("depth=", depth, "ratio_max"), *mx);
        if (!previous.empty())
            for (std::size_t k = 0; k < ratios.size(); ++k)
                worst_change = std::max(worst_change, std::abs(ratios[k] / previous[k] - 1.0));
        previous = ratios;
    }
    const double spread = hi / lo;
    r.add("window/lo", lo);
    r.add("window/hi", hi);
    r.add("window/spread", spread);
    r.add("refinement/worst_change", worst_change);
    r.verdict = std::isfinite(spread) && spread <= 100.0 && worst_change < 0.2;
    r.detail = r.verdict ? "ratio window spread <= 100 and stable within 20%" : "ratio window too wide or unstable";
    return r;
}

} // namespace capnorm
