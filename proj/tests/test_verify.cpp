#include <gtest/gtest.h>

#include <cmath>

#include "capnorm/verify.hpp"

using namespace capnorm;

namespace {

// Second, independently written forms of the exponent formulas.
double alt_poincare_lo(double delta, double p) { return (p - delta) / p; }
double alt_poincare_hi(double delta, double mu, double p, double s) { return (mu * p - delta) / s; }
double alt_riesz_hi(double delta, double mu, double alpha, double p, double s)
{
    return -(alpha * s + delta - mu * p) / s;
}
double alt_target(double delta, double mu, double p, double alpha)
{
    return 1.0 / ((delta - p * alpha) / (p * (delta - mu * p)));
}

const std::vector<int> depths{4, 5, 6};

} // namespace

TEST(Windows, PoincareExampleTuple)
{
    const auto w = poincare_eta_window(2.0, 0.0, 1.05, 4.0);
    EXPECT_NEAR(w.lo, -0.9047619047619047, 1e-12);
    EXPECT_EQ(w.hi, -0.5);
    EXPECT_FALSE(w.lo_closed);
    EXPECT_TRUE(w.hi_closed);
    EXPECT_TRUE(w.contains(-0.8));
    EXPECT_TRUE(w.contains(-0.5));
    EXPECT_FALSE(w.contains(-0.4));
    EXPECT_NEAR(poincare_predicted_slope(2.0, 0.0, 4.0, 1.05, -0.8), -0.3, 1e-15);
}

TEST(Windows, RieszExampleTuple)
{
    const auto w = riesz_eta_window(2.0, 0.0, 1.0, 1.5, 8.0);
    EXPECT_NEAR(w.lo, -4.0 / 3.0, 1e-15);
    EXPECT_EQ(w.hi, -1.25);
    EXPECT_TRUE(w.contains(-1.3));
    EXPECT_FALSE(w.contains(-1.25));
    EXPECT_NEAR(riesz_predicted_slope(2.0, 0.0, 1.0, 8.0, 1.5, -1.3), -0.05, 1e-15);
}

TEST(Windows, AgreeWithIndependentForms)
{
    for (double delta : {0.5, 1.0, 1.5, 2.0})
        for (double mu : {0.0, 0.25, 0.5})
            for (double p : {0.6, 0.9, 1.2, 1.5})
                for (double s : {2.0, 4.0, 8.0}) {
                    const auto w = poincare_eta_window(delta, mu, p, s);
                    EXPECT_NEAR(w.lo, alt_poincare_lo(delta, p), 1e-12);
                    EXPECT_NEAR(w.hi, alt_poincare_hi(delta, mu, p, s), 1e-12);
                    for (double alpha : {0.3, 0.7}) {
                        if (delta - p * alpha <= 0.0 || delta - mu * p <= 0.0) continue;
                        const auto r = riesz_eta_window(delta, mu, alpha, p, s);
                        EXPECT_NEAR(r.lo, -delta / p, 1e-12);
                        EXPECT_NEAR(r.hi, alt_riesz_hi(delta, mu, alpha, p, s), 1e-12);
                        EXPECT_NEAR(target_exponent(delta, mu, p, alpha), alt_target(delta, mu, p, alpha),
                                    1e-12 * std::abs(target_exponent(delta, mu, p, alpha)));
                    }
                }
}

TEST(Windows, SobolevExponents)
{
    EXPECT_DOUBLE_EQ(target_exponent(2.0, 0.0, 1.5, 1.0), 6.0);
    EXPECT_NEAR(target_exponent(2.0, 0.5, 1.2, 1.0), 2.1, 1e-12);
    EXPECT_DOUBLE_EQ(source_second_index(2.0, 0.0, 1.5, 1.0, 6.0), 1.5);
    EXPECT_TRUE(std::isinf(source_second_index(2.0, 0.0, 1.5, 1.0, infinity)));
    EXPECT_DOUBLE_EQ(q_threshold(2, 2.0, 0.0, 1.5, 1.0), 4.0);
}

TEST(SlopeFitTest, ExactPowerLaw)
{
    std::vector<double> xs{0.25, 0.125, 0.0625, 0.03125}, ys;
    for (double x : xs) ys.push_back(2.0 * std::pow(x, -0.3));
    const auto f = fit_slope(xs, ys);
    EXPECT_NEAR(f.slope, -0.3, 1e-13);
    EXPECT_NEAR(f.intercept, std::log(2.0), 1e-13);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-13);
    EXPECT_THROW(fit_slope({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), ParameterError);
    EXPECT_THROW(fit_slope({1.0, 2.0, 3.0, 4.0}, {1.0, 0.0, 3.0, 4.0}), ParameterError);
}

TEST(StabilityTest, GrowthFactors)
{
    auto s = stability({1.0, 1.1, 1.15});
    EXPECT_TRUE(s.stable);
    s = stability({1.0, 1.3, 1.35});
    EXPECT_FALSE(s.stable);
    s = stability({0.0, 0.0, 0.0});
    EXPECT_TRUE(s.stable);
    s = stability({0.0, 1.0, 1.0});
    EXPECT_FALSE(s.stable);
    s = stability({1.0, infinity, 1.0});
    EXPECT_FALSE(s.finite);
}

TEST(Checks, ConstantGivesZero)
{
    const Sampler c(Constant{3.0});
    const Shape ball = BallShape{{}, 1.0};
    auto r = poincare_check(ball, 2, c, {1.5, 1.5, 2.0}, depths);
    EXPECT_TRUE(r.verdict);
    for (int d : depths) EXPECT_EQ(r.value("depth=" + std::to_string(d) + "/ratio"), 0.0);
    r = poincare_weak_check(ball, 2, c, 1.0, 2.0, depths);
    EXPECT_TRUE(r.verdict);
    EXPECT_EQ(r.value("depth=6/lhs"), 0.0);
    r = poincare_sobolev_check(ball, 2, c, {0.0, 2.0, 1.5, 6.0}, depths);
    EXPECT_TRUE(r.verdict);
    EXPECT_EQ(r.value("depth=6/lhs"), 0.0);
    r = compact_support_check(ball, 2, Sampler(Constant{0.0}), CompactVariant::diameter_strong,
                              {0.0, 2.0, 1.5, 1.5}, depths);
    EXPECT_TRUE(r.verdict);
    EXPECT_EQ(r.value("depth=6/ratio"), 0.0);
    const Sampler zero(Constant{0.0});
    r = riesz_boundedness_check(zero, RootSpec{}, {1.0, 0.0, 2.0, 1.5, 6.0}, depths);
    EXPECT_TRUE(r.verdict);
    EXPECT_EQ(r.value("depth=6/lhs"), 0.0);
    r = maximal_inequality_check(zero, RootSpec{}, {2.0, 0.0, 1.5, 1.5, 1.5}, depths);
    EXPECT_TRUE(r.verdict);
    EXPECT_EQ(r.value("depth=6/lhs"), 0.0);
}

TEST(Checks, RatioScalingInvariance)
{
    const Shape ball = BallShape{{}, 1.0};
    const Sampler u(Linear{{1.0, 0.5, 0.0}, 0.2});
    const Sampler u4(Linear{{4.0, 2.0, 0.0}, 0.8});
    const Sampler u3(Linear{{3.0, 1.5, 0.0}, 0.6});
    const auto a = poincare_check(ball, 2, u, {1.5, 1.5, 2.0}, depths);
    const auto b = poincare_check(ball, 2, u4, {1.5, 1.5, 2.0}, depths);
    const auto c = poincare_check(ball, 2, u3, {1.5, 1.5, 2.0}, depths);
    for (int d : depths) {
        const auto key = "depth=" + std::to_string(d) + "/ratio";
        EXPECT_EQ(a.value(key), b.value(key));
        EXPECT_NEAR(a.value(key), c.value(key), 1e-13 * a.value(key));
    }
    const Sampler f(BallIndicator{{}, 0.5});
    const Sampler f4(Bump{{}, 0.5, 1.0}), f16(Bump{{}, 0.5, 4.0});
    const auto m1 = maximal_inequality_check(f4, RootSpec{}, {2.0, 0.0, 1.5, 1.5, 1.5}, depths);
    const auto m4 = maximal_inequality_check(f16, RootSpec{}, {2.0, 0.0, 1.5, 1.5, 1.5}, depths);
    const auto r1 = riesz_boundedness_check(f4, RootSpec{}, {1.0, 0.0, 2.0, 1.5, 6.0}, depths);
    const auto r4 = riesz_boundedness_check(f16, RootSpec{}, {1.0, 0.0, 2.0, 1.5, 6.0}, depths);
    for (int d : depths) {
        const auto key = "depth=" + std::to_string(d) + "/ratio";
        EXPECT_EQ(m1.value(key), m4.value(key));
        EXPECT_EQ(r1.value(key), r4.value(key));
    }
}

TEST(Checks, ExponentErrorsByName)
{
    const Shape ball = BallShape{{}, 1.0};
    const Sampler u(Linear{});
    auto message = [](auto&& fn) {
        try {
            fn();
        } catch (const ParameterError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message([&] { poincare_check(ball, 2, u, {0.9, 1.5, 2.0}, depths); }).find("p in (delta/dim, inf)"),
              std::string::npos);
    EXPECT_NE(message([&] { poincare_weak_check(ball, 2, u, 1.1, 2.0, depths); }).find("p = delta/dim"),
              std::string::npos);
    EXPECT_NE(message([&] { poincare_sobolev_check(ball, 2, u, {0.0, 2.0, 1.5, 3.0}, depths); })
                  .find("q in (delta(delta - mu p)/(dim(delta - p)), inf)"),
              std::string::npos);
    EXPECT_NE(message([&] { poincare_sobolev_check(ball, 2, u, {1.0, 2.0, 1.5, 6.0}, depths); }).find("mu in [0, 1)"),
              std::string::npos);
    EXPECT_NE(message([&] { riesz_boundedness_check(u, RootSpec{}, {1.0, 0.0, 2.0, 2.5, 6.0}, depths); })
                  .find("p in (delta/dim, delta/alpha)"),
              std::string::npos);
    EXPECT_NE(message([&] { riesz_boundedness_check(u, RootSpec{}, {1.0, 1.0, 2.0, 1.5, 6.0}, depths); })
                  .find("mu in [0, alpha)"),
              std::string::npos);
    EXPECT_NE(message([&] { maximal_inequality_check(u, RootSpec{}, {2.0, 0.0, 1.5, 2.0, 1.5}, depths); })
                  .find("s in (0, r]"),
              std::string::npos);
    EXPECT_NE(message([&] { poincare_check(ball, 2, u, {1.5, 1.5, 2.0}, {4, 5}); }).find("at least 3 depths"),
              std::string::npos);
}

TEST(Checks, SupportTouchingBoundary)
{
    const Shape ball = BallShape{{}, 1.0};
    EXPECT_THROW(compact_support_check(ball, 2, Sampler(Bump{{}, 1.0, 1.0}), CompactVariant::diameter_strong,
                                       {0.0, 2.0, 1.5, 1.5}, depths),
                 ParameterError);
    const auto r = compact_support_check(ball, 2, Sampler(Bump{{}, 0.6, 1.0}), CompactVariant::diameter_strong,
                                         {0.0, 2.0, 1.5, 1.5}, depths);
    EXPECT_TRUE(r.verdict);
}

TEST(Sharpness, WindowError)
{
    SharpnessPoincareParams sp;
    sp.eta = -0.4;
    try {
        sharpness_poincare(sp, {0.25, 0.125, 0.0625, 0.03125});
        FAIL() << "expected ParameterError";
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("(-0.904762, -0.5]"), std::string::npos) << e.what();
    }
    SharpnessRieszParams rp;
    rp.eta = -1.2;
    EXPECT_THROW(sharpness_riesz(rp, {0.5, 0.25, 0.125, 0.0625}), ParameterError);
}

TEST(Sharpness, PoincareSmallRun)
{
    SharpnessPoincareParams sp;
    sp.depth = 6;
    const auto s = sharpness_poincare(sp, {0.25, 0.125, 0.0625, 0.03125});
    EXPECT_NEAR(s.fit.slope, -0.3, 0.05);
    EXPECT_NEAR(s.predicted, -0.3, 1e-15);
    EXPECT_EQ(s.report.verdict, s.slope_ok && s.bounded_ok);
}

TEST(Report, JsonAndHash)
{
    const auto r = poincare_check(BallShape{{}, 1.0}, 2, Sampler(Linear{}), {1.5, 1.5, 2.0}, depths);
    const auto j = r.to_json();
    EXPECT_EQ(j["experiment"], "poincare");
    EXPECT_EQ(j["provenance"]["version"], artifact_version);
    EXPECT_EQ(j["provenance"]["config_hash"].get<std::string>().size(), 16u);
    EXPECT_EQ(j["params"]["alpha_john"], 1.0);
    EXPECT_EQ(j["params"]["c_ball"], 0.25);
    const auto again = poincare_check(BallShape{{}, 1.0}, 2, Sampler(Linear{}), {1.5, 1.5, 2.0}, depths);
    EXPECT_EQ(j.dump(), again.to_json().dump());
}
