#pragma once

// Randomized identity suites over contents and norms. Each suite draws its
// inputs from a seeded mt19937_64 and reports the worst deviation seen.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "capnorm/choquet.hpp"
#include "capnorm/content.hpp"
#include "capnorm/content_oracle.hpp"
#include "capnorm/grid.hpp"

namespace capnorm {

struct SuiteResult {
    std::string name;
    bool passed = true;
    std::size_t cases = 0;
    std::size_t failures = 0;
    double worst = 0.0; ///< largest deviation (or smallest slack, per suite)
    std::string detail;
};

namespace detail {

inline CellSet seeded_set(const DyadicGrid& g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> density(0.05, 0.95);
    std::bernoulli_distribution coin(density(rng));
    CellSet s(g);
    for (std::size_t i = 0; i < g.cell_count(); ++i)
        if (coin(rng)) s.insert(i);
    return s;
}

/// Step function with up to `levels` heights in [0.05, 4) on random cells.
inline GridFunction seeded_step(const DyadicGrid& g, std::mt19937_64& rng, int levels = 5)
{
    std::uniform_real_distribution<double> height(0.05, 4.0);
    std::vector<double> hs(static_cast<std::size_t>(levels));
    for (auto& h : hs) h = height(rng);
    std::uniform_int_distribution<int> pick(-1, levels - 1);
    std::vector<double> v(g.cell_count(), 0.0);
    for (auto& x : v) {
        const int k = pick(rng);
        x = k < 0 ? 0.0 : hs[static_cast<std::size_t>(k)];
    }
    return GridFunction(g, std::move(v));
}

inline double rel_diff(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline void tally(SuiteResult& r, bool ok, double deviation)
{
    ++r.cases;
    if (!ok) ++r.failures;
    r.worst = std::max(r.worst, deviation);
}

inline void close(SuiteResult& r, const std::string& what)
{
    r.passed = r.failures == 0 && r.cases > 0;
    r.detail = std::to_string(r.cases) + " cases, " + std::to_string(r.failures) + " failures, " + what;
}

} // namespace detail

/// Dyadic content vs exhaustive cover enumeration: every set of the 1D grids
/// of depth 1..max_depth_1d, plus `random_2d` random sets on the 2D depth-3
/// grid; delta in {0.5, 1, 1.5, dim} (values above dim skipped).
inline SuiteResult oracle_equivalence_suite(std::uint64_t seed, int max_depth_1d = 4, int random_2d = 200)
{
    SuiteResult r;
    r.name = "content oracle equivalence";
    auto check = [&](const CellSet& s) {
        const int dim = s.grid().dim();
        for (double delta : {0.5, 1.0, 1.5, static_cast<double>(dim)}) {
            if (delta > dim) continue;
            const double a = content_value(s, delta);
            const double b = content_oracle(s, ContentParams{delta});
            const double dev = std::abs(a - b);
            detail::tally(r, dev <= 1e-12, dev);
        }
    };
    for (int depth = 1; depth <= max_depth_1d; ++depth) {
        const DyadicGrid g(1, depth, 1.0, Point{});
        const std::size_t n = g.cell_count();
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            CellSet s(g);
            for (std::size_t i = 0; i < n; ++i)
                if (mask >> i & 1u) s.insert(i);
            check(s);
        }
    }
    std::mt19937_64 rng(seed);
    const DyadicGrid g2(2, 3, 1.0, Point{});
    for (int k = 0; k < random_2d; ++k) check(detail::seeded_set(g2, rng));
    detail::close(r, "max |dyadic - oracle| reported");
    return r;
}

/// delta = dim: content equals the Lebesgue measure of the set.
inline SuiteResult lebesgue_coincidence_suite(std::uint64_t seed, int sets = 500)
{
    SuiteResult r;
    r.name = "delta = dim coincidence";
    std::mt19937_64 rng(seed);
    for (int k = 0; k < sets; ++k) {
        const int dim = 1 + k % 3;
        const int depth = dim == 1 ? 8 : (dim == 2 ? 5 : 3);
        const DyadicGrid g(dim, depth, 1.0, Point{});
        const auto s = detail::seeded_set(g, rng);
        const double measure = static_cast<double>(s.count()) * g.cell_volume();
        const double dev = std::abs(content_value(s, dim) - measure);
        detail::tally(r, dev <= 1e-12, dev);
    }
    detail::close(r, "max |content - measure| reported");
    return r;
}

/// H(A) + H(B) - H(A u B) - H(A n B) >= -1e-12; worst = most negative slack, negated.
inline SuiteResult subadditivity_suite(std::uint64_t seed, int pairs = 500)
{
    SuiteResult r;
    r.name = "strong subadditivity";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double min_slack = infinity;
    for (int k = 0; k < pairs; ++k) {
        const int dim = 1 + k % 2;
        const DyadicGrid g(dim, dim == 1 ? 7 : 4, 1.0, Point{});
        const double delta = 0.2 + (dim - 0.2) * unit(rng);
        const auto a = detail::seeded_set(g, rng), b = detail::seeded_set(g, rng);
        const double slack = strong_subadditivity_check(a, b, ContentParams{delta}).slack;
        min_slack = std::min(min_slack, slack);
        detail::tally(r, slack >= -1e-12, std::max(0.0, -slack));
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, "min slack %.3g", min_slack);
    detail::close(r, buf);
    return r;
}

/// L^{p,p} = L^p bitwise; power identity ||f^nu||_{p,q} = ||f||_{p nu, q nu}^nu
/// to 1e-10; dyadic level sums within the derived comparability constants.
inline SuiteResult norm_identity_suite(std::uint64_t seed, int functions = 100)
{
    SuiteResult r;
    r.name = "norm identities";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const DyadicGrid g(2, 4, 1.0, Point{});
    std::size_t diag = 0, power = 0, dyadic = 0;
    for (int k = 0; k < functions; ++k) {
        const auto f = detail::seeded_step(g, rng);
        const double delta = 0.5 + 1.5 * unit(rng);
        const auto d = distribution(f, delta);
        for (double p : {0.7, 1.0, 1.5, 2.0}) {
            const bool same = lorentz_norm(d, p, p) == choquet_p_norm(d, p);
            detail::tally(r, same, same ? 0.0 : detail::rel_diff(lorentz_norm(d, p, p), choquet_p_norm(d, p)));
            diag += !same;
        }
        for (double nu : {0.5, 2.0, 3.0}) {
            const double p = 0.6 + 1.4 * unit(rng), q = 0.6 + 2.4 * unit(rng);
            const double lhs = lorentz_norm(f.pow(nu), {p, q, delta});
            const double rhs = std::pow(lorentz_norm(d, p * nu, q * nu), nu);
            const double dev = detail::rel_diff(lhs, rhs);
            detail::tally(r, dev <= 1e-10, dev);
            power += dev > 1e-10;
        }
        for (double q : {0.5, 1.0, 2.5, infinity}) {
            const double p = 0.6 + 1.4 * unit(rng);
            const auto c = dyadic_comparability(p, q);
            const double ratio = lorentz_norm_dyadic(d, p, q) / lorentz_norm(d, p, q);
            const bool ok = ratio >= c.lo * (1.0 - 1e-12) && ratio <= c.hi * (1.0 + 1e-12);
            ++r.cases;
            if (!ok) ++r.failures;
            dyadic += !ok;
        }
    }
    detail::close(r, "failures by family: diagonal " + std::to_string(diag) + ", power " + std::to_string(power) +
                         ", dyadic " + std::to_string(dyadic));
    return r;
}

/// int (f + g) <= 2 (int f + int g) for the Choquet integral.
inline SuiteResult nonlinearity_suite(std::uint64_t seed, int pairs = 200)
{
    SuiteResult r;
    r.name = "Choquet nonlinearity bound";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_ratio = 0.0;
    for (int k = 0; k < pairs; ++k) {
        const int dim = 1 + k % 2;
        const DyadicGrid g(dim, dim == 1 ? 7 : 4, 1.0, Point{});
        const double delta = 0.2 + (dim - 0.2) * unit(rng);
        const auto f = detail::seeded_step(g, rng), h = detail::seeded_step(g, rng);
        const double lhs = choquet_integral(f + h, delta);
        const double rhs = 2.0 * (choquet_integral(f, delta) + choquet_integral(h, delta));
        const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
        worst_ratio = std::max(worst_ratio, ratio);
        detail::tally(r, lhs <= rhs, std::max(0.0, lhs - rhs));
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, "max lhs/rhs %.6g", worst_ratio);
    detail::close(r, buf);
    return r;
}

} // namespace capnorm
