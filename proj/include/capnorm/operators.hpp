#pragma once

// Fractional maximal operator, Riesz potential and Hedberg diagnostics on a
// dyadic grid. Inputs are zero outside the root; outputs are evaluated at the
// leaf cell centers. Both operators depend on the source/target cells only
// through their index offset, so the pairwise weights are tabulated once per
// offset and each output value is a sum in fixed (row-major) source order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "capnorm/choquet.hpp"
#include "capnorm/errors.hpp"
#include "capnorm/grid.hpp"

namespace capnorm {

/// Volume of the unit ball of R^dim.
inline double unit_ball_volume(int dim)
{
    return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

/// Area of the unit sphere of R^dim.
inline double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

struct MaximalParams {
    double mu = 0.0;
    std::vector<double> radii;

    void validate(const DyadicGrid& grid) const
    {
        detail::require(std::isfinite(mu) && mu >= 0.0 && mu < grid.dim(), "mu in [0, dim)");
        detail::require(!radii.empty(), "radius set nonempty");
        for (std::size_t k = 0; k < radii.size(); ++k) {
            detail::require(radii[k] > 0.0 && std::isfinite(radii[k]), "radii positive");
            if (k > 0) detail::require(radii[k] > radii[k - 1], "radii strictly increasing");
        }
        detail::require(radii.back() >= grid.diameter(), "max radius >= grid diameter");
    }
};

/// Sixteen radii per octave from h up to 2 * diameter. The ratio 2^(1/16)
/// keeps the sets nested under refinement (h halves, the set gains radii).
inline std::vector<double> default_radii(const DyadicGrid& grid, int per_octave = 16)
{
    std::vector<double> r;
    const double h = grid.cell_side();
    const double top = 2.0 * grid.diameter();
    for (int k = 0;; ++k) {
        const double v = h * std::exp2(static_cast<double>(k) / per_octave);
        r.push_back(v);
        if (v >= top) break;
    }
    return r;
}

inline MaximalParams maximal_params(const DyadicGrid& grid, double mu)
{
    return MaximalParams{mu, default_radii(grid)};
}

/// c_alpha = pi^{dim/2} 2^alpha Gamma(alpha/2) / Gamma((dim - alpha)/2).
inline double riesz_constant(double alpha, int dim)
{
    return std::pow(std::numbers::pi, dim / 2.0) * std::pow(2.0, alpha) *
           std::tgamma(alpha / 2.0) / std::tgamma((dim - alpha) / 2.0);
}

struct RieszParams {
    double alpha = 1.0;
    double c_alpha = 1.0;

    static RieszParams make(double alpha, int dim)
    {
        detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha < dim, "alpha in (0, dim)");
        return RieszParams{alpha, riesz_constant(alpha, dim)};
    }

    void validate(int dim) const
    {
        detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha < dim, "alpha in (0, dim)");
        detail::require(c_alpha > 0.0, "c_alpha > 0");
    }
};

enum class SumMethod { automatic, direct, fft };

namespace detail {

/// Extents of the grid and of the offset table, padded to three axes.
struct OffsetLayout {
    std::array<std::size_t, 3> n{1, 1, 1};
    std::array<std::size_t, 3> w{1, 1, 1};

    explicit OffsetLayout(const DyadicGrid& g)
    {
        for (int a = 0; a < g.dim(); ++a) {
            n[a] = g.cells_per_axis();
            w[a] = 2 * g.cells_per_axis() - 1;
        }
    }

    std::size_t table_size() const { return w[0] * w[1] * w[2]; }

    /// Visits every table entry with its integer offset.
    template <class F>
    void for_each_offset(F&& f) const
    {
        std::size_t t = 0;
        for (std::size_t i = 0; i < w[0]; ++i)
            for (std::size_t j = 0; j < w[1]; ++j)
                for (std::size_t k = 0; k < w[2]; ++k, ++t) {
                    const double di = static_cast<double>(i) - static_cast<double>(n[0] - 1);
                    const double dj = static_cast<double>(j) - static_cast<double>(n[1] - 1);
                    const double dk = static_cast<double>(k) - static_cast<double>(n[2] - 1);
                    f(t, std::sqrt(di * di + dj * dj + dk * dk));
                }
    }

    /// For target cell x visits (source index, table index) over all sources.
    template <class F>
    void for_each_source(const MultiIndex& x, F&& f) const
    {
        std::size_t y = 0;
        for (std::size_t i = 0; i < n[0]; ++i) {
            const std::size_t ti = (i + n[0] - 1 - x[0]) * w[1] * w[2];
            for (std::size_t j = 0; j < n[1]; ++j) {
                const std::size_t tj = ti + (j + n[1] - 1 - x[1]) * w[2];
                for (std::size_t k = 0; k < n[2]; ++k, ++y) f(y, tj + (k + n[2] - 1 - x[2]));
            }
        }
    }
};

/// Integral of |x - y|^{alpha - dim} over each source cell, by offset.
/// Distinct cells use the midpoint value with its second-order correction
/// h^2/24 * Laplacian, i.e. |z|^b h^dim (1 + b (b + dim - 2) h^2 / (24 |z|^2))
/// with b = alpha - dim. The self cell gets the integral over the ball of
/// volume h^dim centered at x: sigma_{dim-1} rho^alpha / alpha with
/// omega_dim rho^dim = h^dim.
inline std::vector<double> riesz_kernel_table(const DyadicGrid& grid, double alpha)
{
    const OffsetLayout layout(grid);
    const int d = grid.dim();
    const double h = grid.cell_side();
    const double vol = grid.cell_volume();
    const double rho = h / std::pow(unit_ball_volume(d), 1.0 / d);
    const double self = unit_sphere_area(d) * std::pow(rho, alpha) / alpha;
    std::vector<double> table(layout.table_size());
    layout.for_each_offset([&](std::size_t t, double dist) {
        if (dist == 0.0) {
            table[t] = self;
            return;
        }
        const double b = alpha - d;
        table[t] = std::pow(dist * h, b) * vol * (1.0 + b * (b + d - 2) / (24.0 * dist * dist));
    });
    return table;
}

/// sum_y f(y) K(y - x) for every x, direct O(N^2).
inline std::vector<double> kernel_sum_direct(const GridFunction& f, const std::vector<double>& table)
{
    const auto& grid = f.grid();
    const OffsetLayout layout(grid);
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t x = 0; x < f.size(); ++x) {
        const MultiIndex xi = grid.coords(x);
        double s = 0.0;
        layout.for_each_source(xi, [&](std::size_t y, std::size_t t) {
            const double v = f[y];
            if (v != 0.0) s += v * table[t];
        });
        out[x] = s;
    }
    return out;
}

/// Same sum by zero-padded FFT convolution (period 2n per axis, so offsets
/// in [-(n-1), n-1] never wrap onto each other).
inline std::vector<double> kernel_sum_fft(const GridFunction& f, const std::vector<double>& table)
{
    const auto& grid = f.grid();
    const OffsetLayout layout(grid);
    const int d = grid.dim();
    std::array<int, 3> period{1, 1, 1};
    for (int a = 0; a < d; ++a) period[a] = static_cast<int>(2 * layout.n[a]);
    const std::size_t real_size =
        static_cast<std::size_t>(period[0]) * period[1] * period[2];
    const std::size_t last = static_cast<std::size_t>(period[d - 1]);
    const std::size_t complex_size = real_size / last * (last / 2 + 1);

    struct FftwBuffer {
        double* real = nullptr;
        fftw_complex* spec = nullptr;
        ~FftwBuffer()
        {
            fftw_free(real);
            fftw_free(spec);
        }
    } src, ker;
    src.real = fftw_alloc_real(real_size);
    ker.real = fftw_alloc_real(real_size);
    src.spec = fftw_alloc_complex(complex_size);
    ker.spec = fftw_alloc_complex(complex_size);
    std::fill(src.real, src.real + real_size, 0.0);
    std::fill(ker.real, ker.real + real_size, 0.0);

    auto flat = [&](std::size_t i, std::size_t j, std::size_t k) {
        return (i * period[1] + j) * period[2] + k;
    };
    {
        std::size_t y = 0;
        for (std::size_t i = 0; i < layout.n[0]; ++i)
            for (std::size_t j = 0; j < layout.n[1]; ++j)
                for (std::size_t k = 0; k < layout.n[2]; ++k, ++y) src.real[flat(i, j, k)] = f[y];
    }
    {
        std::size_t t = 0;
        for (std::size_t i = 0; i < layout.w[0]; ++i)
            for (std::size_t j = 0; j < layout.w[1]; ++j)
                for (std::size_t k = 0; k < layout.w[2]; ++k, ++t) {
                    auto wrap = [&](std::size_t idx, int a) {
                        const long off = static_cast<long>(idx) - static_cast<long>(layout.n[a] - 1);
                        return static_cast<std::size_t>((off + period[a]) % period[a]);
                    };
                    ker.real[flat(wrap(i, 0), wrap(j, 1), wrap(k, 2))] = table[t];
                }
    }

    const int rank = d;
    const int* dims = period.data();
    fftw_plan fs = fftw_plan_dft_r2c(rank, dims, src.real, src.spec, FFTW_ESTIMATE);
    fftw_plan fk = fftw_plan_dft_r2c(rank, dims, ker.real, ker.spec, FFTW_ESTIMATE);
    fftw_execute(fs);
    fftw_execute(fk);
    fftw_destroy_plan(fs);
    fftw_destroy_plan(fk);
    for (std::size_t c = 0; c < complex_size; ++c) {
        const double re = src.spec[c][0] * ker.spec[c][0] - src.spec[c][1] * ker.spec[c][1];
        const double im = src.spec[c][0] * ker.spec[c][1] + src.spec[c][1] * ker.spec[c][0];
        src.spec[c][0] = re;
        src.spec[c][1] = im;
    }
    fftw_plan back = fftw_plan_dft_c2r(rank, dims, src.spec, src.real, FFTW_ESTIMATE);
    fftw_execute(back);
    fftw_destroy_plan(back);

    std::vector<double> out(f.size());
    const double norm = 1.0 / static_cast<double>(real_size);
    std::size_t x = 0;
    for (std::size_t i = 0; i < layout.n[0]; ++i)
        for (std::size_t j = 0; j < layout.n[1]; ++j)
            for (std::size_t k = 0; k < layout.n[2]; ++k, ++x)
                out[x] = std::max(0.0, src.real[flat(i, j, k)] * norm);
    return out;
}

/// Direct summation up to this many leaf cells when the method is automatic.
inline constexpr std::size_t direct_sum_limit = std::size_t{1} << 14;

} // namespace detail

/// #{k in Z^dim : |k|^2 < r2}, the leaf-cell count of a centered lattice ball
/// including cells outside the root.
inline double lattice_ball_count(int dim, double r2)
{
    if (r2 <= 0.0) return 0.0;
    // Largest m >= 0 with m^2 < rem, or -1.
    auto half_width = [](double rem) -> long {
        if (rem <= 0.0) return -1;
        long m = static_cast<long>(std::sqrt(rem));
        while (static_cast<double>(m) * m >= rem) --m;
        while (static_cast<double>(m + 1) * (m + 1) < rem) ++m;
        return m;
    };
    const long a = half_width(r2);
    if (dim == 1) return static_cast<double>(2 * a + 1);
    double count = 0.0;
    for (long i = -a; i <= a; ++i) {
        const double rem = r2 - static_cast<double>(i) * i;
        if (dim == 2) {
            count += static_cast<double>(2 * half_width(rem) + 1);
            continue;
        }
        const long b = half_width(rem);
        for (long j = -b; j <= b; ++j)
            count += static_cast<double>(2 * half_width(rem - static_cast<double>(j) * j) + 1);
    }
    return count;
}

/// M_mu f(x) = max over the radius set of r^mu times the average of f over the
/// cells with center in B(x, r). The average divides by the lattice-ball
/// volume (cell count of the ball over all of Z^dim, times h^dim), so averages
/// of constants are exact for balls inside the root and zero extension lowers
/// them near the boundary. Membership tests compare integer squared offsets
/// with (r/h)^2 in both the mass and the volume.
inline GridFunction maximal(const GridFunction& f, const MaximalParams& params)
{
    const auto& grid = f.grid();
    params.validate(grid);
    const detail::OffsetLayout layout(grid);
    const int d = grid.dim();
    const double h = grid.cell_side();
    const std::size_t nr = params.radii.size();

    std::vector<double> r2(nr), scale(nr);
    for (std::size_t k = 0; k < nr; ++k) {
        const double ratio = params.radii[k] / h;
        r2[k] = ratio * ratio;
        const double count = lattice_ball_count(d, r2[k]);
        scale[k] = count > 0.0 ? std::pow(params.radii[k], params.mu) / count : 0.0;
    }
    // Smallest k with |offset|^2 < r2[k], or nr when outside every ball.
    std::vector<std::uint16_t> bin(layout.table_size());
    layout.for_each_offset([&](std::size_t t, double dist) {
        const double m = std::round(dist * dist);
        bin[t] = static_cast<std::uint16_t>(std::upper_bound(r2.begin(), r2.end(), m) - r2.begin());
    });

    std::vector<double> mass(nr + 1);
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t x = 0; x < f.size(); ++x) {
        std::fill(mass.begin(), mass.end(), 0.0);
        layout.for_each_source(grid.coords(x), [&](std::size_t y, std::size_t t) {
            const double v = f[y];
            if (v != 0.0) mass[bin[t]] += v;
        });
        double cumulative = 0.0, best = 0.0;
        for (std::size_t k = 0; k < nr; ++k) {
            cumulative += mass[k];
            best = std::max(best, cumulative * scale[k]);
        }
        out[x] = best;
    }
    return GridFunction(grid, std::move(out));
}

/// int f(y) |x - y|^{alpha - dim} dy at every cell center (no 1/c_alpha).
inline GridFunction potential_integral(const GridFunction& f, double alpha,
                                       SumMethod method = SumMethod::automatic)
{
    const auto& grid = f.grid();
    detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha < grid.dim(), "alpha in (0, dim)");
    const auto table = detail::riesz_kernel_table(grid, alpha);
    if (method == SumMethod::automatic)
        method = grid.cell_count() <= detail::direct_sum_limit ? SumMethod::direct : SumMethod::fft;
    auto values = method == SumMethod::direct ? detail::kernel_sum_direct(f, table)
                                              : detail::kernel_sum_fft(f, table);
    return GridFunction(grid, std::move(values));
}

/// I_alpha f = (1/c_alpha) int f(y) |x - y|^{alpha - dim} dy.
inline GridFunction riesz(const GridFunction& f, const RieszParams& params,
                          SumMethod method = SumMethod::automatic)
{
    params.validate(f.grid().dim());
    return potential_integral(f, params.alpha, method).scaled(1.0 / params.c_alpha);
}

/// Exponents of the pointwise estimate
///   int |f(y)| |x-y|^{alpha-dim} dy
///     <= C [M_mu f(x)]^{(delta - p alpha)/(delta - mu p)} ||f||^{p (alpha - mu)/(delta - mu p)}
/// with ||f|| = ||f||_{L^{p, q (delta - p alpha)/(delta - mu p)}(H^delta)} for
/// p in (delta/dim, delta/alpha), and ||f||_{L^p(H^delta)} for p = delta/dim.
struct HedbergParams {
    double alpha = 1.0;
    double mu = 0.0;
    double p = 1.0;
    double q = 1.0;
    double delta = 1.0;

    bool endpoint(int dim) const { return p == delta / dim; }

    void validate(int dim) const
    {
        ContentParams{delta}.validate(dim);
        detail::require(alpha > 0.0 && alpha < dim, "alpha in (0, dim)");
        detail::require(mu >= 0.0 && mu < alpha, "mu in [0, alpha)");
        if (!endpoint(dim)) {
            detail::require(p > delta / dim && p < delta / alpha, "p in (delta/dim, delta/alpha)");
            detail::require(q > 0.0 && !std::isnan(q), "q in (0, inf]");
        }
    }

    double maximal_exponent() const { return (delta - p * alpha) / (delta - mu * p); }
    double norm_exponent() const { return p * (alpha - mu) / (delta - mu * p); }
    double norm_second_index(int dim) const
    {
        if (endpoint(dim)) return p;
        if (std::isinf(q)) return q;
        return q * (delta - p * alpha) / (delta - mu * p);
    }
};

struct HedbergField {
    GridFunction ratio;    ///< empirical constant at each cell center
    GridFunction lhs;      ///< potential integral
    GridFunction maximal;  ///< M_mu f
    double norm = 0.0;     ///< the global norm factor's base
    double sup = 0.0;      ///< max over cells of ratio
};

inline HedbergField hedberg_field(const GridFunction& f, const HedbergParams& params)
{
    const auto& grid = f.grid();
    params.validate(grid.dim());
    HedbergField out;
    out.lhs = potential_integral(f, params.alpha);
    out.maximal = maximal(f, maximal_params(grid, params.mu));
    out.norm = lorentz_norm(distribution(f, params.delta), params.p,
                            params.norm_second_index(grid.dim()));
    std::vector<double> r(f.size(), 0.0);
    const double norm_factor = std::pow(out.norm, params.norm_exponent());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (out.lhs[i] == 0.0) continue;
        // A nonempty support meets the largest ball around every center.
        const double denom = std::pow(out.maximal[i], params.maximal_exponent()) * norm_factor;
        r[i] = out.lhs[i] / denom;
        out.sup = std::max(out.sup, r[i]);
    }
    out.ratio = GridFunction(grid, std::move(r));
    return out;
}

/// Empirical Hedberg constant at cell `x`; 0 when f vanishes.
inline double hedberg_ratio(const GridFunction& f, std::size_t x, const HedbergParams& params)
{
    return hedberg_field(f, params).ratio[x];
}

struct L1ContentBound {
    double lhs = 0.0;      ///< int |f| dx
    double rhs = 0.0;      ///< [int |f|^{delta/dim} dH^delta]^{dim/delta}
    double ratio = 0.0;    ///< lhs / rhs, 0 when both vanish
    double constant = 0.0; ///< dim / delta, the proven bound on ratio
};

/// int |f| dx <= (dim/delta) [int |f|^{delta/dim} dH^delta]^{dim/delta}:
/// the Lebesgue embedding with (p, q) = (1, 1) followed by the second-index
/// embedding from delta/dim to 1, whose constant is 1.
inline L1ContentBound l1_content_bound_check(const GridFunction& f, double delta)
{
    const int dim = f.grid().dim();
    ContentParams{delta}.validate(dim);
    L1ContentBound r;
    r.lhs = f.integral();
    r.rhs = std::pow(choquet_integral(f.pow(delta / dim), delta), dim / delta);
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
    r.constant = dim / delta;
    return r;
}

} // namespace capnorm
