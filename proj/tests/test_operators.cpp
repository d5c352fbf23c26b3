#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "capnorm/operators.hpp"
#include "capnorm/sampler.hpp"
#include "helpers.hpp"

using namespace capnorm;
using testing_support::random_set;
using testing_support::random_step;

namespace {

std::size_t center_cell(const DyadicGrid& g)
{
    // Cell whose lower corner is the root center.
    MultiIndex idx{};
    for (int a = 0; a < g.dim(); ++a) idx[a] = static_cast<std::uint32_t>(g.cells_per_axis() / 2);
    return g.index(idx);
}

} // namespace

TEST(Maximal, LatticeBallCount)
{
    EXPECT_EQ(lattice_ball_count(1, 4.0), 3.0);
    EXPECT_EQ(lattice_ball_count(2, 1.0), 1.0);
    EXPECT_EQ(lattice_ball_count(2, 1.5), 5.0);
    EXPECT_EQ(lattice_ball_count(2, 2.5), 9.0);
    EXPECT_EQ(lattice_ball_count(3, 1.5), 7.0);
}

TEST(Maximal, ConstantAtCenter)
{
    const auto g = centered_grid(2, 5, 2.0);
    const auto f = sample(Sampler(Constant{2.5}), g);
    const auto m = maximal(f, maximal_params(g, 0.0));
    const double v = m[center_cell(g)];
    EXPECT_LE(v, 2.5 * (1 + 1e-14));
    EXPECT_GE(v, 2.5 * (1 - 1e-14));
    for (std::size_t i = 0; i < g.cell_count(); ++i) EXPECT_LE(m[i], 2.5 * (1 + 1e-14));
}

TEST(Maximal, BallIndicatorFractional)
{
    const double R = 0.5, mu = 0.7;
    const auto g = centered_grid(2, 6, 2.0);
    const auto f = sample(Sampler(BallIndicator{{}, R}), g);
    const auto m = maximal(f, maximal_params(g, mu));
    const double v = m[center_cell(g)];
    EXPECT_NEAR(v / std::pow(R, mu), 1.0, 0.05);
}

TEST(Maximal, IndicatorBounds)
{
    std::mt19937_64 rng(1);
    const auto g = make_grid(2, 4, 1.0);
    const auto s = random_set(g, rng, 0.3);
    const auto m = maximal(GridFunction::indicator(s), maximal_params(g, 0.0));
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        EXPECT_LE(m[i], 1.0 + 1e-14);
        if (s.contains(i)) {
            EXPECT_GE(m[i], 1.0 - 1e-14);
        }
    }
}

TEST(Maximal, HomogeneousMonotoneSubadditive)
{
    std::mt19937_64 rng(2);
    const auto g = make_grid(2, 4, 1.0);
    const auto p = maximal_params(g, 0.4);
    for (int t = 0; t < 5; ++t) {
        const auto f = random_step(g, rng), h = random_step(g, rng);
        const auto mf = maximal(f, p), mh = maximal(h, p), msum = maximal(f + h, p);
        const auto mscaled = maximal(f.scaled(2.0), p);
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            EXPECT_EQ(mscaled[i], 2.0 * mf[i]);
            EXPECT_LE(msum[i], (mf[i] + mh[i]) * (1 + 1e-14));
            EXPECT_LE(mf[i], msum[i] * (1 + 1e-14));
        }
    }
}

TEST(Maximal, InvalidRadii)
{
    const auto g = make_grid(2, 3, 1.0);
    const auto f = GridFunction(g);
    EXPECT_THROW(maximal(f, MaximalParams{0.0, {}}), ParameterError);
    EXPECT_THROW(maximal(f, MaximalParams{0.0, {0.5, 0.4, 2.0}}), ParameterError);
    EXPECT_THROW(maximal(f, MaximalParams{0.0, {0.1, 0.2}}), ParameterError);
    EXPECT_THROW(maximal(f, MaximalParams{2.0, default_radii(g)}), ParameterError);
}

TEST(Riesz, Constant)
{
    EXPECT_NEAR(riesz_constant(1.0, 2), std::pow(std::numbers::pi, 1.0) * 2.0 * std::tgamma(0.5) /
                                            std::tgamma(0.5),
                1e-14);
}

TEST(Riesz, Linear)
{
    std::mt19937_64 rng(3);
    const auto g = make_grid(2, 4, 1.0);
    const auto f = random_step(g, rng);
    const auto p = RieszParams::make(0.8, 2);
    const auto a = riesz(f, p), b = riesz(f.scaled(3.0), p);
    for (std::size_t i = 0; i < g.cell_count(); ++i) EXPECT_NEAR(b[i], 3.0 * a[i], 1e-14 * b[i]);
}

TEST(Riesz, FarCellAgainstQuadrature)
{
    const auto g = make_grid(2, 5, 1.0);
    const double alpha = 0.7;
    const auto p = RieszParams::make(alpha, 2);
    CellSet s(g);
    const std::size_t src = g.index({3, 4, 0});
    s.insert(src);
    const auto out = riesz(GridFunction::indicator(s), p);
    const double h = g.cell_side();
    const auto yc = g.center(src);
    const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                             0.9061798459386640};
    const double weights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};
    for (std::size_t x = 0; x < g.cell_count(); ++x) {
        const auto xc = g.center(x);
        if (distance(xc, yc) < 4 * h) continue;
        double q = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                const Point y{yc[0] + 0.5 * h * nodes[i], yc[1] + 0.5 * h * nodes[j], 0.0};
                q += 0.25 * weights[i] * weights[j] * std::pow(distance(xc, y), alpha - 2);
            }
        q *= h * h / p.c_alpha;
        EXPECT_LT(std::abs(out[x] - q) / q, 1e-3);
    }
}

TEST(Riesz, BallAtOrigin)
{
    const double R = 0.5, alpha = 1.0;
    const auto g = centered_grid(2, 6, 2.0);
    const auto f = sample(Sampler(BallIndicator{{}, R}), g);
    const auto p = RieszParams::make(alpha, 2);
    const auto out = riesz(f, p);
    const double expected = unit_sphere_area(2) * std::pow(R, alpha) / alpha / p.c_alpha;
    // Value at the center, interpolated from the four cells around the origin.
    EXPECT_NEAR(out[center_cell(g)] / expected, 1.0, 0.05);
}

TEST(Riesz, FftMatchesDirect)
{
    std::mt19937_64 rng(4);
    for (int dim = 1; dim <= 3; ++dim) {
        const auto g = make_grid(dim, dim == 3 ? 3 : 5, 1.0);
        const auto f = random_step(g, rng);
        const auto p = RieszParams::make(0.5 * dim, dim);
        const auto a = riesz(f, p, SumMethod::direct), b = riesz(f, p, SumMethod::fft);
        for (std::size_t i = 0; i < g.cell_count(); ++i) EXPECT_NEAR(b[i], a[i], 1e-10 * a[i]);
    }
}

TEST(Riesz, NonnegativeMonotone)
{
    std::mt19937_64 rng(5);
    const auto g = make_grid(2, 4, 1.0);
    const auto f = random_step(g, rng), h = random_step(g, rng);
    const auto p = RieszParams::make(1.2, 2);
    const auto a = riesz(f, p), b = riesz(f + h, p);
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        EXPECT_GE(a[i], 0.0);
        EXPECT_LE(a[i], b[i]);
    }
}

TEST(Hedberg, ZeroFunction)
{
    const auto g = centered_grid(2, 4, 2.0);
    EXPECT_EQ(hedberg_ratio(GridFunction(g), 0, {1.0, 0.0, 1.5, 1.5, 2.0}), 0.0);
}

TEST(Hedberg, StableAcrossDepths)
{
    const HedbergParams hp{1.0, 0.0, 1.5, 1.5, 2.0};
    std::vector<double> r;
    for (int depth = 5; depth <= 6; ++depth) {
        const auto g = centered_grid(2, depth, 2.0);
        const auto f = sample(Sampler(BallIndicator{{}, 0.5}), g);
        r.push_back(hedberg_ratio(f, center_cell(g), hp));
        EXPECT_TRUE(std::isfinite(r.back()));
        EXPECT_GT(r.back(), 0.0);
    }
    EXPECT_LT(std::abs(r[1] / r[0] - 1.0), 0.2);
}

TEST(Hedberg, ConstraintsNamed)
{
    const auto g = centered_grid(2, 3, 2.0);
    const auto f = GridFunction(g);
    try {
        hedberg_ratio(f, 0, {1.0, 0.0, 2.5, 1.5, 2.0});
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("p in (delta/dim, delta/alpha)"), std::string::npos);
    }
    EXPECT_THROW(hedberg_ratio(f, 0, {1.0, 1.0, 1.5, 1.5, 2.0}), ParameterError);
    EXPECT_THROW(hedberg_ratio(f, 0, {2.5, 0.0, 1.5, 1.5, 2.0}), ParameterError);
}

TEST(L1ContentBound, RandomSets)
{
    std::mt19937_64 rng(6);
    const auto g = make_grid(2, 4, 1.0);
    for (int t = 0; t < 100; ++t) {
        const double delta = 0.5 + 1.5 * (t % 4) / 3.0;
        const auto s = random_set(g, rng, 0.3);
        const auto r = l1_content_bound_check(GridFunction::indicator(s), delta);
        EXPECT_DOUBLE_EQ(r.lhs, s.measure());
        EXPECT_NEAR(r.rhs, std::pow(content_value(s, delta), 2.0 / delta), 1e-12);
        EXPECT_LE(r.ratio, r.constant * (1 + 1e-12));
    }
}

TEST(L1ContentBound, ZeroAndPower)
{
    const auto g = centered_grid(2, 5, 2.0);
    const auto z = l1_content_bound_check(GridFunction(g), 1.0);
    EXPECT_EQ(z.lhs, 0.0);
    EXPECT_EQ(z.rhs, 0.0);
    const auto f = sample(Sampler(RadialPower{{}, -0.5, 1.0}), g);
    const auto r = l1_content_bound_check(f, 1.2);
    EXPECT_TRUE(std::isfinite(r.ratio));
    EXPECT_LE(r.ratio, r.constant);
}
