#pragma once

// Command-line front end. run() parses argv, dispatches the subcommand and
// returns the exit code: 0 success / verdict pass, 1 verdict fail, 2 usage or
// configuration error.
//
// Experiment configs are JSON objects. Each experiment has a full default
// record; a config file may override any subset of its keys and
// `--param key=value` overrides the file (value parsed as JSON, else taken as
// a string). Unknown keys are errors. The resolved record is embedded in the
// output under "config".

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capnorm/choquet.hpp"
#include "capnorm/content.hpp"
#include "capnorm/domains.hpp"
#include "capnorm/errors.hpp"
#include "capnorm/interp.hpp"
#include "capnorm/operators.hpp"
#include "capnorm/serialize.hpp"
#include "capnorm/suites.hpp"
#include "capnorm/verify.hpp"

namespace capnorm::cli {

enum ExitCode : int { exit_ok = 0, exit_fail = 1, exit_usage = 2 };

/// Bad invocation or unreadable input; exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

inline Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw FormatError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
}

inline double parse_real(const std::string& s, const std::string& what)
{
    if (s == "inf" || s == "infinity") return infinity;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("'" + what + "' expects a real, got '" + s + "'");
}

/// defaults <- file <- overrides, keeping the key set of `defaults`.
inline Json resolve_config(const Json& defaults, const Json& file, const std::vector<std::string>& overrides,
                           const std::string& context)
{
    Json cfg = defaults;
    if (!file.is_null()) {
        if (!file.is_object()) throw FormatError(context + ": config must be a JSON object");
        for (const auto& [key, value] : file.items()) {
            if (!defaults.contains(key)) throw FormatError(context + ": unknown key '" + key + "'");
            cfg[key] = value;
        }
    }
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + item + "'");
        const auto key = item.substr(0, eq), text = item.substr(eq + 1);
        if (!defaults.contains(key)) throw FormatError(context + ": unknown key '" + key + "'");
        Json value;
        try {
            value = Json::parse(text);
        } catch (const Json::parse_error&) {
            value = text;
        }
        cfg[key] = value;
    }
    return cfg;
}

namespace detail {

inline double real_at(const Json& c, const char* key) { return real_from_json(c.at(key), key); }

inline std::vector<int> ints_at(const Json& c, const char* key)
{
    const auto& a = c.at(key);
    if (!a.is_array()) throw FormatError(std::string("'") + key + "' must be an array of integers");
    std::vector<int> v;
    for (const auto& x : a) {
        if (!x.is_number_integer()) throw FormatError(std::string("'") + key + "' must be an array of integers");
        v.push_back(x.get<int>());
    }
    return v;
}

inline std::vector<double> reals_at(const Json& c, const char* key)
{
    const auto& a = c.at(key);
    if (!a.is_array()) throw FormatError(std::string("'") + key + "' must be an array of reals");
    std::vector<double> v;
    for (const auto& x : a) v.push_back(real_from_json(x, key));
    return v;
}

inline int int_at(const Json& c, const char* key)
{
    if (!c.at(key).is_number_integer()) throw FormatError(std::string("'") + key + "' must be an integer");
    return c.at(key).get<int>();
}

inline RootSpec root_from_json(const Json& j)
{
    check_keys(j, {"dim", "root_side", "origin"}, "root");
    RootSpec r;
    r.dim = require_key(j, "dim", "root").get<int>();
    if (r.dim < 1 || r.dim > 3) throw ParameterError("constraint violated: dim in {1, 2, 3}");
    r.side = real_from_json(require_key(j, "root_side", "root"), "root_side");
    r.origin = point_from_json(require_key(j, "origin", "root"), r.dim, "origin");
    return r;
}

inline Json unit_ball_shape() { return Json{{"shape", "ball"}, {"center", {0.0, 0.0}}, {"radius", 1.0}}; }

inline Json default_root() { return Json{{"dim", 2}, {"root_side", 2.0}, {"origin", {-1.0, -1.0}}}; }

inline Json linear_x1() { return Json{{"form", "linear"}, {"coefficients", {1.0, 0.0}}, {"offset", 0.0}}; }

inline Json half_ball_indicator()
{
    return Json{{"form", "ball_indicator"}, {"center", {0.0, 0.0}}, {"radius", 0.5}};
}

inline CompactVariant variant_from(const std::string& s)
{
    for (auto v : {CompactVariant::diameter_strong, CompactVariant::diameter_weak, CompactVariant::sobolev_strong,
                   CompactVariant::sobolev_weak})
        if (s == variant_name(v)) return v;
    throw FormatError("unknown compact-support variant '" + s + "'");
}

/// p = null means the endpoint delta/dim; written back into the config.
inline double endpoint_or(Json& cfg, int dim)
{
    if (cfg.at("p").is_null()) cfg["p"] = real_at(cfg, "delta") / dim;
    return real_at(cfg, "p");
}

struct Experiment {
    std::function<Json()> defaults;
    std::function<ExperimentReport(Json&)> run;
};

inline const std::map<std::string, Experiment>& experiments()
{
    static const std::map<std::string, Experiment> table{
        {"poincare",
         {[] {
              return Json{{"dim", 2},         {"shape", unit_ball_shape()}, {"sampler", linear_x1()}, {"p", 1.5},
                          {"q", 1.5},         {"delta", 2.0},               {"depths", {4, 5, 6}},   {"c_ball", 0.25}};
          },
          [](Json& c) {
              const int dim = int_at(c, "dim");
              return poincare_check(shape_from_json(c.at("shape"), dim), dim, sampler_from_json(c.at("sampler"), dim),
                                    {real_at(c, "p"), real_at(c, "q"), real_at(c, "delta")}, ints_at(c, "depths"),
                                    real_at(c, "c_ball"));
          }}},
        {"poincare_weak",
         {[] {
              return Json{{"dim", 2},         {"shape", unit_ball_shape()}, {"sampler", linear_x1()}, {"p", nullptr},
                          {"delta", 2.0},     {"depths", {4, 5, 6}},        {"c_ball", 0.25}};
          },
          [](Json& c) {
              const int dim = int_at(c, "dim");
              const double p = endpoint_or(c, dim);
              return poincare_weak_check(shape_from_json(c.at("shape"), dim), dim,
                                         sampler_from_json(c.at("sampler"), dim), p, real_at(c, "delta"),
                                         ints_at(c, "depths"), real_at(c, "c_ball"));
          }}},
        {"poincare_sobolev",
         {[] {
              return Json{{"dim", 2},   {"shape", unit_ball_shape()}, {"sampler", linear_x1()}, {"mu", 0.0},
                          {"delta", 2.0}, {"p", 1.5}, {"q", 6.0}, {"depths", {4, 5, 6}}, {"c_ball", 0.25}};
          },
          [](Json& c) {
              const int dim = int_at(c, "dim");
              const double p = endpoint_or(c, dim);
              return poincare_sobolev_check(
                  shape_from_json(c.at("shape"), dim), dim, sampler_from_json(c.at("sampler"), dim),
                  {real_at(c, "mu"), real_at(c, "delta"), p, real_at(c, "q")}, ints_at(c, "depths"),
                  real_at(c, "c_ball"));
          }}},
        {"compact_support",
         {[] {
              return Json{{"dim", 2},
                          {"shape", unit_ball_shape()},
                          {"sampler", Json{{"form", "bump"}, {"center", {0.0, 0.0}}, {"radius", 0.6}, {"scale", 1.0}}},
                          {"variant", "diameter_strong"},
                          {"mu", 0.0},
                          {"delta", 2.0},
                          {"p", 1.5},
                          {"q", 1.5},
                          {"depths", {4, 5, 6}},
                          {"margin_cells", 2}};
          },
          [](Json& c) {
              const int dim = int_at(c, "dim");
              const double p = endpoint_or(c, dim);
              return compact_support_check(shape_from_json(c.at("shape"), dim), dim,
                                           sampler_from_json(c.at("sampler"), dim),
                                           variant_from(c.at("variant").get<std::string>()),
                                           {real_at(c, "mu"), real_at(c, "delta"), p, real_at(c, "q")},
                                           ints_at(c, "depths"), int_at(c, "margin_cells"));
          }}},
        {"riesz",
         {[] {
              return Json{{"root", default_root()}, {"sampler", half_ball_indicator()}, {"alpha", 1.0}, {"mu", 0.0},
                          {"delta", 2.0}, {"p", 1.5}, {"q", 6.0}, {"depths", {4, 5, 6}}};
          },
          [](Json& c) {
              const auto root = root_from_json(c.at("root"));
              const double p = endpoint_or(c, root.dim);
              return riesz_boundedness_check(
                  sampler_from_json(c.at("sampler"), root.dim), root,
                  {real_at(c, "alpha"), real_at(c, "mu"), real_at(c, "delta"), p, real_at(c, "q")},
                  ints_at(c, "depths"));
          }}},
        {"maximal",
         {[] {
              return Json{{"root", default_root()}, {"sampler", half_ball_indicator()}, {"delta", 2.0}, {"mu", 0.0},
                          {"p", 1.5}, {"s", 1.5}, {"r", 1.5}, {"depths", {4, 5, 6}}};
          },
          [](Json& c) {
              const auto root = root_from_json(c.at("root"));
              const double p = endpoint_or(c, root.dim);
              return maximal_inequality_check(
                  sampler_from_json(c.at("sampler"), root.dim), root,
                  {real_at(c, "delta"), real_at(c, "mu"), p, real_at(c, "s"), real_at(c, "r")}, ints_at(c, "depths"));
          }}},
        {"hedberg",
         {[] {
              return Json{{"root", default_root()}, {"sampler", half_ball_indicator()}, {"alpha", 1.0}, {"mu", 0.0},
                          {"p", 1.5}, {"q", 1.5}, {"delta", 2.0}, {"depths", {5, 6, 7}}};
          },
          [](Json& c) {
              const auto root = root_from_json(c.at("root"));
              const double p = endpoint_or(c, root.dim);
              return hedberg_check(
                  sampler_from_json(c.at("sampler"), root.dim), root,
                  HedbergParams{real_at(c, "alpha"), real_at(c, "mu"), p, real_at(c, "q"), real_at(c, "delta")},
                  ints_at(c, "depths"));
          }}},
        {"sharpness_poincare",
         {[] {
              const SharpnessPoincareParams d;
              return Json{{"dim", d.dim},     {"delta", d.delta}, {"mu", d.mu},           {"p", d.p},
                          {"s", d.s},         {"q", d.q},         {"eta", d.eta},         {"q_tilde", d.q_tilde},
                          {"depth", d.depth}, {"eps", {0.25, 0.125, 0.0625, 0.03125}}};
          },
          [](Json& c) {
              SharpnessPoincareParams sp;
              sp.dim = int_at(c, "dim");
              sp.delta = real_at(c, "delta");
              sp.mu = real_at(c, "mu");
              sp.p = real_at(c, "p");
              sp.s = real_at(c, "s");
              sp.q = real_at(c, "q");
              sp.eta = real_at(c, "eta");
              sp.q_tilde = real_at(c, "q_tilde");
              sp.depth = int_at(c, "depth");
              return sharpness_poincare(sp, reals_at(c, "eps")).report;
          }}},
        {"sharpness_riesz",
         {[] {
              const SharpnessRieszParams d;
              return Json{{"dim", d.dim},   {"delta", d.delta},     {"mu", d.mu},       {"alpha", d.alpha},
                          {"p", d.p},       {"s", d.s},             {"q", d.q},         {"eta", d.eta},
                          {"q_tilde", d.q_tilde}, {"outer", d.outer}, {"depth", d.depth},
                          {"eps", {0.5, 0.25, 0.125, 0.0625}}};
          },
          [](Json& c) {
              SharpnessRieszParams sp;
              sp.dim = int_at(c, "dim");
              sp.delta = real_at(c, "delta");
              sp.mu = real_at(c, "mu");
              sp.alpha = real_at(c, "alpha");
              sp.p = real_at(c, "p");
              sp.s = real_at(c, "s");
              sp.q = real_at(c, "q");
              sp.eta = real_at(c, "eta");
              sp.q_tilde = real_at(c, "q_tilde");
              sp.outer = real_at(c, "outer");
              sp.depth = int_at(c, "depth");
              return sharpness_riesz(sp, reals_at(c, "eps")).report;
          }}},
        {"interp",
         {[] {
              return Json{{"p0", 1.0}, {"p1", 3.0}, {"delta", 1.5}, {"eta", 0.4}, {"q", 2.5}, {"depths", {5, 6}}};
          },
          [](Json& c) {
              return interp_comparability_check(
                  InterpPair{real_at(c, "p0"), real_at(c, "p1"), real_at(c, "delta"), real_at(c, "eta"),
                             real_at(c, "q")},
                  ints_at(c, "depths"));
          }}},
    };
    return table;
}

} // namespace detail

inline std::vector<std::string> experiment_names()
{
    std::vector<std::string> names;
    for (const auto& [name, e] : detail::experiments()) names.push_back(name);
    return names;
}

inline Json experiment_defaults(const std::string& name)
{
    const auto it = detail::experiments().find(name);
    if (it == detail::experiments().end()) throw UsageError("unknown experiment '" + name + "'");
    return it->second.defaults();
}

/// Runs an experiment on a resolved config; the report JSON carries the
/// config (with derived defaults such as an endpoint p filled in).
inline Json run_experiment(const std::string& name, Json config, bool* verdict = nullptr)
{
    const auto it = detail::experiments().find(name);
    if (it == detail::experiments().end()) throw UsageError("unknown experiment '" + name + "'");
    const auto report = it->second.run(config);
    if (verdict) *verdict = report.verdict;
    auto j = report.to_json();
    j["config"] = config;
    return j;
}

inline std::string report_csv(const Json& report)
{
    std::ostringstream out;
    out << "label,value\n";
    for (const auto& e : report.at("series")) {
        out << e.at("label").get<std::string>() << ',';
        const auto& v = e.at("value");
        if (v.is_string())
            out << v.get<std::string>();
        else
            out << v.dump();
        out << '\n';
    }
    return out.str();
}

inline std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

inline Json selftest(std::uint64_t seed, bool* passed)
{
    const std::vector<SuiteResult> suites{
        oracle_equivalence_suite(seed, 3, 10),  lebesgue_coincidence_suite(seed + 1, 60),
        subadditivity_suite(seed + 2, 60),      norm_identity_suite(seed + 3, 20),
        nonlinearity_suite(seed + 4, 40),
    };
    Json out{{"seed", seed}, {"suites", Json::array()}};
    bool ok = true;
    for (const auto& s : suites) {
        out["suites"].push_back(Json{{"name", s.name},
                                     {"passed", s.passed},
                                     {"cases", s.cases},
                                     {"failures", s.failures},
                                     {"worst", real_to_json(s.worst)},
                                     {"detail", s.detail}});
        ok = ok && s.passed;
    }
    out["verdict"] = ok ? "pass" : "fail";
    if (passed) *passed = ok;
    return out;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dyadic Hausdorff-content norms, operators and inequality checks", "capnorm"};
    app.require_subcommand(1);

    auto* content = app.add_subcommand("content", "Dyadic content of a cell set");
    std::string set_file, delta_text;
    content->add_option("--set", set_file, "cell-set JSON file")->required();
    content->add_option("--delta", delta_text, "content order")->required();

    auto* norm = app.add_subcommand("norm", "Choquet-Lorentz norm of a grid function");
    std::string fn_file, p_text, q_text;
    norm->add_option("--fn", fn_file, "grid-function JSON file")->required();
    norm->add_option("--p", p_text, "exponent p")->required();
    norm->add_option("--q", q_text, "second index q (default p; 'inf' allowed)");
    norm->add_option("--delta", delta_text, "content order")->required();

    auto* maximal_cmd = app.add_subcommand("maximal", "Fractional maximal function");
    std::string mu_text, out_file;
    maximal_cmd->add_option("--fn", fn_file, "grid-function JSON file")->required();
    maximal_cmd->add_option("--mu", mu_text, "order mu in [0, dim)")->required();
    maximal_cmd->add_option("--out", out_file, "write the result here instead of stdout");

    auto* riesz_cmd = app.add_subcommand("riesz", "Riesz potential");
    std::string alpha_text, method = "auto";
    riesz_cmd->add_option("--fn", fn_file, "grid-function JSON file")->required();
    riesz_cmd->add_option("--alpha", alpha_text, "order alpha in (0, dim)")->required();
    riesz_cmd->add_option("--method", method, "auto | direct | fft")
        ->check(CLI::IsMember({"auto", "direct", "fft"}));
    riesz_cmd->add_option("--out", out_file, "write the result here instead of stdout");

    auto* interp_cmd = app.add_subcommand("interp", "K-functional and interpolation norm");
    std::string p0_text, p1_text, eta_text;
    interp_cmd->add_option("--fn", fn_file, "grid-function JSON file")->required();
    interp_cmd->add_option("--p0", p0_text, "first exponent")->required();
    interp_cmd->add_option("--p1", p1_text, "second exponent")->required();
    interp_cmd->add_option("--eta", eta_text, "interpolation parameter in (0, 1)")->required();
    interp_cmd->add_option("--q", q_text, "second index")->required();
    interp_cmd->add_option("--delta", delta_text, "content order")->required();

    auto* verify_cmd = app.add_subcommand("verify", "Run an experiment and report a verdict");
    std::string experiment, config_file, csv_file;
    std::vector<std::string> params;
    bool list = false;
    verify_cmd->add_option("experiment", experiment, "experiment name");
    verify_cmd->add_option("--config", config_file, "JSON config file (keys override the defaults)");
    verify_cmd->add_option("--param", params, "key=value override, applied after the config file");
    verify_cmd->add_option("--out", out_file, "write the JSON report here instead of stdout");
    verify_cmd->add_option("--csv", csv_file, "also write the series as label,value CSV");
    verify_cmd->add_flag("--list", list, "print the experiment names with their default configs");

    auto* self_cmd = app.add_subcommand("selftest", "Oracle-equivalence and identity suites (reduced size)");
    std::uint64_t seed = 20240601;
    self_cmd->add_option("--seed", seed, "64-bit seed of the random suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "capnorm: " << e.what() << "\n";
        return exit_usage;
    }

    auto emit = [&](const Json& j) {
        if (out_file.empty())
            out << pretty(j);
        else
            write_text(out_file, pretty(j));
    };

    try {
        if (content->parsed()) {
            const double delta = parse_real(delta_text, "--delta");
            const auto set = cellset_from_json(read_json_file(set_file));
            const auto sol = dyadic_content(set, ContentParams{delta});
            const auto bracket = ball_cover_bracket(sol);
            auto j = cover_to_json(sol);
            j["bracket"] = Json{{"lower", real_to_json(bracket.lower)}, {"upper", real_to_json(bracket.upper)}};
            j["config"] = Json{{"set", set_file}, {"delta", real_to_json(delta)}};
            out << pretty(j);
            return exit_ok;
        }
        if (norm->parsed()) {
            const double p = parse_real(p_text, "--p");
            const double q = q_text.empty() ? p : parse_real(q_text, "--q");
            const double delta = parse_real(delta_text, "--delta");
            const auto f = function_from_json(read_json_file(fn_file));
            const LorentzExponents e{p, q, delta};
            Json j{{"norm", real_to_json(lorentz_norm(f, e))},
                   {"dyadic_norm", real_to_json(lorentz_norm_dyadic(f, e))},
                   {"choquet_integral", real_to_json(choquet_integral(f, delta))},
                   {"config", Json{{"fn", fn_file}, {"p", real_to_json(p)}, {"q", real_to_json(q)},
                                   {"delta", real_to_json(delta)}}}};
            out << pretty(j);
            return exit_ok;
        }
        if (maximal_cmd->parsed()) {
            const double mu = parse_real(mu_text, "--mu");
            const auto f = function_from_json(read_json_file(fn_file));
            const auto params = maximal_params(f.grid(), mu);
            emit(Json{{"function", function_to_json(maximal(f, params))},
                      {"radii", params.radii.size()},
                      {"config", Json{{"fn", fn_file}, {"mu", real_to_json(mu)}}}});
            return exit_ok;
        }
        if (riesz_cmd->parsed()) {
            const double alpha = parse_real(alpha_text, "--alpha");
            const auto f = function_from_json(read_json_file(fn_file));
            const auto rp = RieszParams::make(alpha, f.grid().dim());
            const SumMethod m = method == "direct" ? SumMethod::direct
                                : method == "fft"  ? SumMethod::fft
                                                   : SumMethod::automatic;
            emit(Json{{"function", function_to_json(riesz(f, rp, m))},
                      {"c_alpha", real_to_json(rp.c_alpha)},
                      {"config", Json{{"fn", fn_file}, {"alpha", real_to_json(alpha)}, {"method", method}}}});
            return exit_ok;
        }
        if (interp_cmd->parsed()) {
            const InterpPair pair{parse_real(p0_text, "--p0"), parse_real(p1_text, "--p1"),
                                  parse_real(delta_text, "--delta"), parse_real(eta_text, "--eta"),
                                  parse_real(q_text, "--q")};
            const auto f = function_from_json(read_json_file(fn_file));
            const auto r = interp_report(f, pair);
            Json t = Json::array(), k = Json::array();
            for (double v : r.t_grid) t.push_back(real_to_json(v));
            for (double v : r.k_values) k.push_back(real_to_json(v));
            out << pretty(Json{{"t_grid", t},
                               {"k_values", k},
                               {"interp_norm", real_to_json(r.interp_norm)},
                               {"direct_norm", real_to_json(r.direct_norm)},
                               {"ratio", real_to_json(r.ratio)},
                               {"config", Json{{"fn", fn_file},
                                               {"p0", real_to_json(pair.p0)},
                                               {"p1", real_to_json(pair.p1)},
                                               {"eta", real_to_json(pair.eta)},
                                               {"q", real_to_json(pair.q_interp)},
                                               {"delta", real_to_json(pair.delta)},
                                               {"p", real_to_json(pair.p())}}}});
            return exit_ok;
        }
        if (verify_cmd->parsed()) {
            if (list) {
                Json all;
                for (const auto& name : experiment_names()) all[name] = experiment_defaults(name);
                out << pretty(all);
                return exit_ok;
            }
            if (experiment.empty()) throw UsageError("verify: missing experiment name (see --list)");
            const Json defaults = experiment_defaults(experiment);
            const Json file = config_file.empty() ? Json() : read_json_file(config_file);
            const Json cfg = resolve_config(defaults, file, params, experiment);
            bool verdict = false;
            const Json report = run_experiment(experiment, cfg, &verdict);
            emit(report);
            if (!csv_file.empty()) write_text(csv_file, report_csv(report));
            return verdict ? exit_ok : exit_fail;
        }
        if (self_cmd->parsed()) {
            bool passed = false;
            out << pretty(selftest(seed, &passed));
            return passed ? exit_ok : exit_fail;
        }
    } catch (const NonFiniteValue& e) {
        err << "capnorm: " << e.what() << "\n";
        return exit_fail;
    } catch (const Error& e) {
        err << "capnorm: " << e.what() << "\n";
        return exit_usage;
    } catch (const Json::exception& e) {
        err << "capnorm: malformed config or input: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

} // namespace capnorm::cli
