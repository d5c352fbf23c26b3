#pragma once

// JSON documents for grids, cell sets, grid functions, covers, samplers and
// shapes. Infinite reals are written as the strings "inf" / "-inf"; finite
// reals as JSON numbers (shortest round-trip form). Readers reject unknown
// keys.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "capnorm/content.hpp"
#include "capnorm/domains.hpp"
#include "capnorm/errors.hpp"
#include "capnorm/grid.hpp"
#include "capnorm/sampler.hpp"

namespace capnorm {

using Json = nlohmann::json;

inline Json real_to_json(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

inline double real_from_json(const Json& j, const std::string& what)
{
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw FormatError("expected a real for '" + what + "'");
}

/// Throws on keys outside `allowed`.
inline void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& context)
{
    if (!j.is_object()) throw FormatError(context + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key)) throw FormatError(context + ": unknown key '" + key + "'");
}

inline const Json& require_key(const Json& j, const char* key, const std::string& context)
{
    if (!j.contains(key)) throw FormatError(context + ": missing key '" + key + "'");
    return j.at(key);
}

inline Json point_to_json(const Point& x, int dim)
{
    Json a = Json::array();
    for (int i = 0; i < dim; ++i) a.push_back(real_to_json(x[i]));
    return a;
}

inline Point point_from_json(const Json& j, int dim, const std::string& what)
{
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw FormatError("'" + what + "' must be an array of " + std::to_string(dim) + " reals");
    Point p{};
    for (int i = 0; i < dim; ++i) p[i] = real_from_json(j[i], what);
    return p;
}

inline Json grid_to_json(const DyadicGrid& g)
{
    return Json{{"dim", g.dim()},
                {"depth", g.depth()},
                {"root_side", real_to_json(g.root_side())},
                {"origin", point_to_json(g.origin(), g.dim())}};
}

inline DyadicGrid grid_from_json(const Json& j)
{
    check_keys(j, {"dim", "depth", "root_side", "origin"}, "grid");
    const int dim = require_key(j, "dim", "grid").get<int>();
    const int depth = require_key(j, "depth", "grid").get<int>();
    const double side = j.contains("root_side") ? real_from_json(j.at("root_side"), "root_side") : 1.0;
    const Point origin = j.contains("origin") ? point_from_json(j.at("origin"), dim, "origin") : Point{};
    return DyadicGrid(dim, depth, side, origin);
}

inline Json cellset_to_json(const CellSet& s)
{
    Json cells = Json::array();
    for (std::size_t i = 0; i < s.size(); ++i) cells.push_back(s.contains(i) ? 1 : 0);
    return Json{{"grid", grid_to_json(s.grid())}, {"cells", cells}};
}

inline CellSet cellset_from_json(const Json& j)
{
    check_keys(j, {"grid", "cells"}, "cell set");
    const auto g = grid_from_json(require_key(j, "grid", "cell set"));
    const auto& cells = require_key(j, "cells", "cell set");
    if (!cells.is_array() || cells.size() != g.cell_count())
        throw FormatError("cell set: 'cells' must list one 0/1 entry per leaf cell");
    std::vector<std::uint8_t> occ(g.cell_count());
    for (std::size_t i = 0; i < occ.size(); ++i) {
        const int v = cells[i].get<int>();
        if (v != 0 && v != 1) throw FormatError("cell set: entries must be 0 or 1");
        occ[i] = static_cast<std::uint8_t>(v);
    }
    return CellSet(g, std::move(occ));
}

inline Json function_to_json(const GridFunction& f)
{
    Json values = Json::array();
    for (double v : f.values()) values.push_back(v);
    return Json{{"grid", grid_to_json(f.grid())}, {"values", values}};
}

inline GridFunction function_from_json(const Json& j)
{
    check_keys(j, {"grid", "values"}, "grid function");
    const auto g = grid_from_json(require_key(j, "grid", "grid function"));
    const auto& values = require_key(j, "values", "grid function");
    if (!values.is_array() || values.size() != g.cell_count())
        throw FormatError("grid function: 'values' must list one value per leaf cell");
    std::vector<double> v(g.cell_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = real_from_json(values[i], "values");
    return GridFunction(g, std::move(v));
}

inline Json cover_to_json(const CoverSolution& s)
{
    Json cover = Json::array();
    for (const auto& q : s.cover) {
        Json idx = Json::array();
        for (int a = 0; a < s.dim; ++a) idx.push_back(q.index[a]);
        cover.push_back(Json{{"level", q.level}, {"index", idx}});
    }
    return Json{{"delta", real_to_json(s.params.delta)}, {"value", real_to_json(s.value)}, {"cover", cover}};
}

inline Json annulus_to_json(const Annulus& a, int dim)
{
    return Json{{"center", point_to_json(a.center, dim)},
                {"inner", real_to_json(a.inner)},
                {"outer", real_to_json(a.outer)}};
}

/// Closed-form samplers only; tabulated forms have no document.
inline Json sampler_to_json(const Sampler& u, int dim)
{
    Json j;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, RadialPower>)
                j = Json{{"form", "radial_power"}, {"center", point_to_json(f.center, dim)},
                         {"exponent", real_to_json(f.exponent)}, {"scale", real_to_json(f.scale)}};
            else if constexpr (std::is_same_v<T, Constant>)
                j = Json{{"form", "constant"}, {"value", real_to_json(f.value)}};
            else if constexpr (std::is_same_v<T, BallIndicator>)
                j = Json{{"form", "ball_indicator"}, {"center", point_to_json(f.center, dim)},
                         {"radius", real_to_json(f.radius)}};
            else if constexpr (std::is_same_v<T, Linear>)
                j = Json{{"form", "linear"}, {"coefficients", point_to_json(f.coefficients, dim)},
                         {"offset", real_to_json(f.offset)}};
            else if constexpr (std::is_same_v<T, Bump>)
                j = Json{{"form", "bump"}, {"center", point_to_json(f.center, dim)},
                         {"radius", real_to_json(f.radius)}, {"scale", real_to_json(f.scale)}};
            else
                j = Json{{"form", "tabulated"}, {"label", f.label}};
        },
        u.form());
    if (u.truncation()) j["annulus"] = annulus_to_json(*u.truncation(), dim);
    return j;
}

inline Sampler sampler_from_json(const Json& j, int dim)
{
    const std::string ctx = "sampler";
    if (!j.is_object()) throw FormatError("sampler: expected an object");
    const auto form = require_key(j, "form", ctx).get<std::string>();
    auto real = [&](const char* key, double fallback) {
        return j.contains(key) ? real_from_json(j.at(key), key) : fallback;
    };
    auto point = [&](const char* key) {
        return j.contains(key) ? point_from_json(j.at(key), dim, key) : Point{};
    };
    std::optional<Annulus> annulus;
    if (j.contains("annulus")) {
        const auto& a = j.at("annulus");
        check_keys(a, {"center", "inner", "outer"}, "annulus");
        annulus = Annulus{a.contains("center") ? point_from_json(a.at("center"), dim, "center") : Point{},
                          a.contains("inner") ? real_from_json(a.at("inner"), "inner") : 0.0,
                          a.contains("outer") ? real_from_json(a.at("outer"), "outer") : std::numeric_limits<double>::infinity()};
    }
    if (form == "radial_power") {
        check_keys(j, {"form", "center", "exponent", "scale", "annulus"}, ctx);
        return Sampler(RadialPower{point("center"), real("exponent", 1.0), real("scale", 1.0)}, annulus);
    }
    if (form == "constant") {
        check_keys(j, {"form", "value", "annulus"}, ctx);
        return Sampler(Constant{real("value", 0.0)}, annulus);
    }
    if (form == "ball_indicator") {
        check_keys(j, {"form", "center", "radius", "annulus"}, ctx);
        return Sampler(BallIndicator{point("center"), real("radius", 1.0)}, annulus);
    }
    if (form == "linear") {
        check_keys(j, {"form", "coefficients", "offset", "annulus"}, ctx);
        Point c{1.0, 0.0, 0.0};
        if (j.contains("coefficients")) c = point_from_json(j.at("coefficients"), dim, "coefficients");
        return Sampler(Linear{c, real("offset", 0.0)}, annulus);
    }
    if (form == "bump") {
        check_keys(j, {"form", "center", "radius", "scale", "annulus"}, ctx);
        return Sampler(Bump{point("center"), real("radius", 1.0), real("scale", 1.0)}, annulus);
    }
    throw FormatError("sampler: unknown form '" + form + "'");
}

inline Json shape_to_json(const Shape& s, int dim)
{
    return std::visit(
        [&](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BallShape>)
                return {{"shape", "ball"}, {"center", point_to_json(v.center, dim)}, {"radius", real_to_json(v.radius)}};
            else if constexpr (std::is_same_v<T, RectangleShape>)
                return {{"shape", "rectangle"}, {"a", real_to_json(v.a)}, {"b", real_to_json(v.b)},
                        {"center", point_to_json(v.center, dim)}};
            else if constexpr (std::is_same_v<T, LShape>)
                return {{"shape", "l_shape"}, {"unit", real_to_json(v.unit)}, {"center", point_to_json(v.center, dim)}};
            else
                return {{"shape", "punctured_ball"}, {"center", point_to_json(v.center, dim)},
                        {"radius", real_to_json(v.radius)}};
        },
        s);
}

inline Shape shape_from_json(const Json& j, int dim)
{
    const std::string ctx = "shape";
    if (!j.is_object()) throw FormatError("shape: expected an object");
    const auto name = require_key(j, "shape", ctx).get<std::string>();
    auto real = [&](const char* key, double fallback) {
        return j.contains(key) ? real_from_json(j.at(key), key) : fallback;
    };
    auto point = [&](const char* key) {
        return j.contains(key) ? point_from_json(j.at(key), dim, key) : Point{};
    };
    if (name == "ball") {
        check_keys(j, {"shape", "center", "radius"}, ctx);
        return BallShape{point("center"), real("radius", 1.0)};
    }
    if (name == "rectangle") {
        check_keys(j, {"shape", "a", "b", "center"}, ctx);
        return RectangleShape{real("a", 1.0), real("b", 1.0), point("center")};
    }
    if (name == "l_shape") {
        check_keys(j, {"shape", "unit", "center"}, ctx);
        return LShape{real("unit", 1.0), point("center")};
    }
    if (name == "punctured_ball") {
        check_keys(j, {"shape", "center", "radius"}, ctx);
        return PuncturedBallShape{point("center"), real("radius", 1.0)};
    }
    throw FormatError("shape: unknown shape '" + name + "'");
}

/// 64-bit FNV-1a of a string, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace capnorm
