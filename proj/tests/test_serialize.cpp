#include <gtest/gtest.h>

#include <random>

#include "capnorm/choquet.hpp"
#include "capnorm/serialize.hpp"
#include "helpers.hpp"

using namespace capnorm;

TEST(Serialize, RealsWithInfinity)
{
    EXPECT_EQ(real_to_json(infinity), "inf");
    EXPECT_TRUE(std::isinf(real_from_json(Json("inf"), "x")));
    EXPECT_EQ(real_from_json(Json(0.1), "x"), 0.1);
    EXPECT_THROW(real_from_json(Json("abc"), "x"), FormatError);
}

TEST(Serialize, GridRoundTrip)
{
    const DyadicGrid g(2, 4, 2.0, Point{-1.0, -0.5, 0.0});
    EXPECT_EQ(grid_from_json(grid_to_json(g)), g);
    EXPECT_THROW(grid_from_json(Json{{"dim", 2}, {"depth", 3}, {"bogus", 1}}), FormatError);
    EXPECT_THROW(grid_from_json(Json{{"depth", 3}}), FormatError);
}

TEST(Serialize, CellSetAndFunctionRoundTrip)
{
    std::mt19937_64 rng(3);
    const auto g = centered_grid(2, 3, 1.0);
    const auto s = testing_support::random_set(g, rng, 0.4);
    EXPECT_EQ(cellset_from_json(Json::parse(cellset_to_json(s).dump())), s);
    const auto f = testing_support::random_step(g, rng, 3);
    const auto back = function_from_json(Json::parse(function_to_json(f).dump()));
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back[i], f[i]);
    auto bad = cellset_to_json(s);
    bad["cells"][0] = 2;
    EXPECT_THROW(cellset_from_json(bad), FormatError);
}

TEST(Serialize, SamplerRoundTrip)
{
    const Sampler u(RadialPower{{0.1, 0.2, 0.0}, -0.5, 2.0}, Annulus{{}, 0.1, 1.0});
    const auto j = sampler_to_json(u, 2);
    const auto back = sampler_from_json(Json::parse(j.dump()), 2);
    EXPECT_EQ(sampler_to_json(back, 2), j);
    const Point x{0.3, 0.4, 0.0};
    EXPECT_EQ(back.value(x), u.value(x));
    EXPECT_THROW(sampler_from_json(Json{{"form", "radial_power"}, {"power", 1}}, 2), FormatError);
    EXPECT_THROW(sampler_from_json(Json{{"form", "spline"}}, 2), FormatError);
}

TEST(Serialize, ShapeRoundTrip)
{
    for (const Shape& s : {Shape{BallShape{{}, 2.0}}, Shape{RectangleShape{1.0, 2.0, {}}}, Shape{LShape{1.0, {}}},
                           Shape{PuncturedBallShape{{}, 1.0}}}) {
        const auto j = shape_to_json(s, 2);
        EXPECT_EQ(shape_to_json(shape_from_json(j, 2), 2), j);
    }
    EXPECT_THROW(shape_from_json(Json{{"shape", "ball"}, {"radius", 1}, {"extra", 0}}, 2), FormatError);
}

TEST(Serialize, Fnv1a)
{
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}
