#pragma once

// K-functional of the pair (L^{p0}(H^delta), L^{p1}(H^delta)) over the level
// truncation family and the resulting (eta, q) interpolation quasi-norm.
//
// For a cut c >= 0 the splitting f = (f - c)_+ + min(f, c) has
//   ||(f - c)_+||^{p0} = sum_j [(v_{j+1} - c)_+^{p0} - (v_j - c)_+^{p0}] h_j,
//   ||min(f, c)||^{p1} = sum_j [min(v_{j+1}, c)^{p1} - min(v_j, c)^{p1}] h_j,
// both read off the distribution of f. Every cut gives a line A_c + t B_c;
// the bound on K(t) is their lower envelope over c in {0, v_1, ..., v_m}
// (c = v_m is the c = inf splitting). The envelope is concave and piecewise
// linear: K = t B_top below its first breakpoint and K = A_0 above its last,
// so both tails of int (t^-eta K)^q dt/t are integrated exactly and the
// finitely many linear pieces in between by Gauss-Legendre in log t.

#include <algorithm>
#include <cmath>
#include <vector>

#include "capnorm/choquet.hpp"
#include "capnorm/errors.hpp"
#include "capnorm/grid.hpp"

namespace capnorm {

struct InterpPair {
    double p0 = 1.0;
    double p1 = 2.0;
    double delta = 1.0;
    double eta = 0.5;
    double q_interp = 2.0;

    /// 1/p = (1 - eta)/p0 + eta/p1.
    double p() const { return 1.0 / ((1.0 - eta) / p0 + eta / p1); }

    void validate(int dim) const
    {
        detail::require(std::isfinite(p0) && std::isfinite(p1) && p0 > 0.0 && p0 < p1,
                        "0 < p0 < p1 < inf");
        ContentParams{delta}.validate(dim);
        detail::require(eta > 0.0 && eta < 1.0, "eta in (0, 1)");
        detail::require(std::isfinite(q_interp) && q_interp > p0, "q in (p0, inf)");
    }
};

/// Lower envelope of the truncation lines A + t B.
struct KEnvelope {
    std::vector<double> a;      ///< intercepts, increasing
    std::vector<double> b;      ///< slopes, decreasing
    std::vector<double> breaks; ///< breaks[i]: line i gives way to line i+1

    bool zero() const { return a.empty(); }

    double at(double t) const
    {
        if (a.empty()) return 0.0;
        const auto i = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), t) -
                                                breaks.begin());
        return a[i] + t * b[i];
    }
};

namespace detail {

/// Norms of the two truncation pieces for every cut c = v_k, k = 0..m (v_0 = 0).
struct TruncationNorms {
    std::vector<double> upper; ///< ||(f - c)_+||_{L^{p0}}
    std::vector<double> lower; ///< ||min(f, c)||_{L^{p1}}
};

inline TruncationNorms truncation_norms(const StepDistribution& d, double p0, double p1)
{
    const std::size_t m = d.thresholds.size();
    TruncationNorms out;
    out.upper.resize(m + 1);
    out.lower.resize(m + 1);
    if (m == 0) return out;
    const double top = d.thresholds.back();
    double prefix = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
        const double c = k == 0 ? 0.0 : d.thresholds[k - 1];
        double s = 0.0;
        for (std::size_t j = k; j < m; ++j) {
            const double hi = std::pow((d.thresholds[j] - c) / top, p0);
            const double lo = std::pow(std::max(d.lower(j) - c, 0.0) / top, p0);
            s += (hi - lo) * d.plateaus[j];
        }
        out.upper[k] = top * std::pow(s, 1.0 / p0);
        if (k > 0) {
            const std::size_t j = k - 1;
            prefix += (std::pow(d.thresholds[j] / top, p1) - std::pow(d.lower(j) / top, p1)) *
                      d.plateaus[j];
        }
        out.lower[k] = top * std::pow(prefix, 1.0 / p1);
    }
    return out;
}

/// Gauss-Legendre nodes and weights on [-1, 1], 8 points.
inline constexpr double gl_nodes[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                       -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                       0.7966664774136267,  0.9602898564975363};
inline constexpr double gl_weights[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                         0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};

} // namespace detail

inline KEnvelope k_envelope(const StepDistribution& d, const InterpPair& pair)
{
    KEnvelope env;
    if (d.empty()) return env;
    const auto norms = detail::truncation_norms(d, pair.p0, pair.p1);
    // Lines ordered by decreasing slope (c from v_m down to 0).
    for (std::size_t r = norms.upper.size(); r-- > 0;) {
        const double a = norms.upper[r], b = norms.lower[r];
        if (!env.a.empty() && b >= env.b.back()) {
            if (a >= env.a.back()) continue;
            env.a.pop_back();
            env.b.pop_back();
            if (!env.breaks.empty()) env.breaks.pop_back();
        }
        while (!env.a.empty()) {
            const double cross = (a - env.a.back()) / (env.b.back() - b);
            if (env.breaks.empty() || cross > env.breaks.back()) {
                if (cross <= 0.0) {
                    // New line is below the whole current envelope on t > 0.
                    env.a.pop_back();
                    env.b.pop_back();
                    if (!env.breaks.empty()) env.breaks.pop_back();
                    continue;
                }
                env.breaks.push_back(cross);
                break;
            }
            env.a.pop_back();
            env.b.pop_back();
            env.breaks.pop_back();
        }
        env.a.push_back(a);
        env.b.push_back(b);
    }
    return env;
}

/// Upper bound on K(t, f) over the truncation family.
inline double k_functional_upper(const GridFunction& f, const InterpPair& pair, double t)
{
    pair.validate(f.grid().dim());
    detail::require(t > 0.0 && std::isfinite(t), "t > 0");
    return k_envelope(distribution(f, pair.delta), pair).at(t);
}

/// {int_0^inf [t^-eta K(t)]^q dt/t}^{1/q} for the envelope.
inline double interpolation_norm(const KEnvelope& env, const InterpPair& pair)
{
    if (env.zero()) return 0.0;
    const double eta = pair.eta, q = pair.q_interp;
    const std::size_t last = env.a.size() - 1;
    if (last == 0) {
        // A single line with A = 0 or B = 0 has a divergent integral unless f = 0.
        throw NonFiniteValue("interpolation integral diverges (single truncation line)");
    }
    // Work relative to the crossover scale of the two extreme lines.
    const double t_lo = env.breaks.front(), t_hi = env.breaks.back();
    double s = std::pow(env.b.front(), q) * std::pow(t_lo, (1.0 - eta) * q) / ((1.0 - eta) * q) +
               std::pow(env.a.back(), q) * std::pow(t_hi, -eta * q) / (eta * q);
    for (std::size_t i = 1; i < last; ++i) {
        const double u0 = std::log(env.breaks[i - 1]), u1 = std::log(env.breaks[i]);
        const int pieces = std::max(1, static_cast<int>(std::ceil((u1 - u0) / 0.25)));
        const double width = (u1 - u0) / pieces;
        for (int k = 0; k < pieces; ++k) {
            const double mid = u0 + (k + 0.5) * width;
            for (int g = 0; g < 8; ++g) {
                const double u = mid + 0.5 * width * detail::gl_nodes[g];
                const double t = std::exp(u);
                s += 0.5 * width * detail::gl_weights[g] *
                     std::pow(std::pow(t, -eta) * (env.a[i] + t * env.b[i]), q);
            }
        }
    }
    const double norm = std::pow(s, 1.0 / q);
    if (!std::isfinite(norm)) throw NonFiniteValue("interpolation norm is not finite");
    return norm;
}

inline double interpolation_norm(const GridFunction& f, const InterpPair& pair)
{
    pair.validate(f.grid().dim());
    return interpolation_norm(k_envelope(distribution(f, pair.delta), pair), pair);
}

/// Reporting grid: 64 geometric points on [t_min, t_max], where with
/// t* = ||f||_{A0} / ||f||_{A1} the cut-offs t_min = t* 10^{-6/((1-eta) q)} and
/// t_max = t* 10^{6/(eta q)} leave tails below 1e-6 of the crossover scale
/// (K <= t ||f||_{A1} below, K <= ||f||_{A0} above).
struct InterpReport {
    std::vector<double> t_grid;
    std::vector<double> k_values;
    double interp_norm = 0.0;
    double direct_norm = 0.0;
    double ratio = 0.0;
};

inline constexpr int interp_grid_points = 64;

inline InterpReport interp_report(const GridFunction& f, const InterpPair& pair)
{
    pair.validate(f.grid().dim());
    const auto d = distribution(f, pair.delta);
    const auto env = k_envelope(d, pair);
    InterpReport r;
    r.direct_norm = lorentz_norm(d, pair.p(), pair.q_interp);
    if (env.zero()) return r;
    r.interp_norm = interpolation_norm(env, pair);
    r.ratio = r.interp_norm / r.direct_norm;
    const double star = env.a.back() / env.b.front();
    const double lo = std::log(star) - 6.0 * std::log(10.0) / ((1.0 - pair.eta) * pair.q_interp);
    const double hi = std::log(star) + 6.0 * std::log(10.0) / (pair.eta * pair.q_interp);
    for (int i = 0; i < interp_grid_points; ++i) {
        const double t = std::exp(lo + (hi - lo) * i / (interp_grid_points - 1));
        r.t_grid.push_back(t);
        r.k_values.push_back(env.at(t));
    }
    return r;
}

} // namespace capnorm
