#include <gtest/gtest.h>

#include <cmath>

#include "capnorm/domains.hpp"
#include "capnorm/sampler.hpp"

using namespace capnorm;

TEST(Domains, BallConstants)
{
    const auto g = centered_grid(2, 6, 2.0);
    const auto d = make_john_domain(BallShape{{}, 1.0}, g);
    EXPECT_EQ(d.alpha_john, 1.0);
    EXPECT_EQ(d.beta_john, 1.0);
    EXPECT_EQ(d.center_x0[0], 0.0);
    EXPECT_EQ(d.center_x0[1], 0.0);
    EXPECT_LE(d.cells.center_diameter(), 2.0);
    // Area of the discretized disc approaches pi.
    EXPECT_NEAR(static_cast<double>(d.cells.count()) * g.cell_volume(), std::numbers::pi, 0.05);
}

TEST(Domains, BallRadiusTwo)
{
    const auto g = centered_grid(3, 4, 4.0);
    const auto d = make_john_domain(BallShape{{}, 2.0}, g);
    EXPECT_EQ(d.alpha_john, 2.0);
    EXPECT_EQ(d.beta_john, 2.0);
}

TEST(Domains, RectangleConstants)
{
    const auto g = centered_grid(2, 6, 4.0);
    const auto d = make_john_domain(RectangleShape{1.0, 3.0, {}}, g);
    EXPECT_DOUBLE_EQ(d.alpha_john, 0.5);
    EXPECT_DOUBLE_EQ(d.beta_john, 0.5 * std::sqrt(10.0));
    // Every cell center inside |x0| < 1/2, |x1| < 3/2.
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        const auto c = g.center(i);
        EXPECT_EQ(d.cells.contains(i), std::abs(c[0]) < 0.5 && std::abs(c[1]) < 1.5);
    }
}

TEST(Domains, LShapeConstants)
{
    const auto g = centered_grid(2, 5, 2.0);
    const auto d = make_john_domain(LShape{1.0, {}}, g);
    EXPECT_DOUBLE_EQ(d.alpha_john, 0.5);
    EXPECT_DOUBLE_EQ(d.beta_john, std::sqrt(2.5));
    EXPECT_DOUBLE_EQ(d.center_x0[0], -0.5);
    EXPECT_DOUBLE_EQ(d.center_x0[1], -0.5);
    // Three quarters of the square.
    EXPECT_EQ(d.cells.count(), 3 * g.cell_count() / 4);
    EXPECT_FALSE(shape_contains(LShape{1.0, {}}, 2, Point{0.5, 0.5, 0.0}));
    EXPECT_TRUE(shape_contains(LShape{1.0, {}}, 2, Point{-0.5, 0.5, 0.0}));
}

TEST(Domains, PuncturedBallDropsCenterCells)
{
    const auto g = centered_grid(2, 5, 2.0);
    const auto ball = make_john_domain(BallShape{{}, 1.0}, g);
    const auto punct = make_john_domain(PuncturedBallShape{{}, 1.0}, g);
    EXPECT_EQ(ball.cells.count() - punct.cells.count(), 4u);
    const auto u = Sampler(RadialPower{{}, -0.8, 1.0});
    const auto f = sample(u, g, &punct.cells);
    for (double v : f.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST(Domains, Errors)
{
    const auto g = centered_grid(2, 4, 2.0);
    EXPECT_THROW(make_john_domain(BallShape{{0.5, 0.0, 0.0}, 1.0}, g), ParameterError);
    EXPECT_THROW(make_john_domain(RectangleShape{2.0, 1.0, {}}, g), ParameterError);
    EXPECT_THROW(make_john_domain(BallShape{{}, -1.0}, g), ParameterError);
    EXPECT_THROW(make_john_domain(BallShape{{}, 1.0}, DyadicGrid(1, 4, 2.0, Point{-1.0, 0.0, 0.0})),
                 ParameterError);
    try {
        make_john_domain(BallShape{{0.5, 0.0, 0.0}, 1.0}, g);
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("shape outside root"), std::string::npos);
    }
}

TEST(Domains, MeanValueBallRadius)
{
    const auto g = centered_grid(2, 5, 4.0);
    const auto d = make_john_domain(RectangleShape{1.0, 3.0, {}}, g);
    const auto b = mean_value_ball(d);
    EXPECT_DOUBLE_EQ(b.radius, 0.25 * 0.25 / (0.5 * std::sqrt(10.0)));
    EXPECT_THROW(mean_value_ball(d, 0.0), ParameterError);
}

TEST(Domains, MeanValueConstantExact)
{
    const auto g = centered_grid(2, 6, 2.0);
    const auto d = make_john_domain(BallShape{{}, 1.0}, g);
    const auto u = sample_field(Sampler(Constant{0.1}), g, &d.cells);
    EXPECT_EQ(mean_value(u, d, mean_value_ball(d)), 0.1);
}

TEST(Domains, MeanValueLinearAndHalfPlane)
{
    const auto g = centered_grid(2, 7, 2.0);
    const auto d = make_john_domain(BallShape{{}, 1.0}, g);
    const auto b = mean_value_ball(d);
    const auto x1 = sample_field(Sampler(Linear{{1.0, 0.0, 0.0}, 0.0}), g, &d.cells);
    EXPECT_NEAR(mean_value(x1, d, b), 0.0, 2.0 * g.cell_side());
    const auto half = sample_field(Sampler(Tabulated{[](const Point& x) { return x[0] > 0.0 ? 1.0 : 0.0; }, "half"}),
                                   g, &d.cells);
    EXPECT_DOUBLE_EQ(mean_value(half, d, b), 0.5);
}

TEST(Domains, MeanValueEmptyIntersection)
{
    const auto g = centered_grid(2, 2, 2.0);
    const auto d = make_john_domain(BallShape{{}, 1.0}, g);
    const auto u = sample_field(Sampler(Constant{1.0}), g, &d.cells);
    EXPECT_THROW(mean_value(u, d, MeanValueBall{{}, 0.1}), ParameterError);
}
