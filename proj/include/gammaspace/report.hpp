#pragma once

// Config ingestion and report plumbing for the command-line front end.
//
// External formats (infinity travels as the string "inf"):
//   weight  {"b": number|"inf", "pieces": [{"lo", "hi", "coeff", "exp"}, ...]}
//   step    {"breaks": [0, ...], "values": [...]}
//   config  {"command", "p", "q", "weight", "weight2", "u", "v", "function",
//            "grid": {"decades_lo", "decades_hi", "points_per_decade"},
//            "tol", "seed", "budget"}
//
// A report carries the resolved config, a command-specific results payload,
// and a diagnostics block.  Objects serialize with sorted keys and shortest
// round-trip floats, so identical configs give byte-identical reports apart
// from the timing_ms field.

#include <gammaspace/functions.hpp>
#include <gammaspace/inequalities.hpp>
#include <gammaspace/util.hpp>
#include <gammaspace/weights.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gammaspace {

using json = nlohmann::json;

// Invalid configs and reports carry the offending field path in the message.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

inline json encode_real(double x) {
    if (x == inf) return "inf";
    if (x == -inf) return "-inf";
    return x;
}

inline std::string format_real(double x) {
    if (x == inf) return "inf";
    if (x == -inf) return "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace detail {

inline const json& require_field(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError(path + ": missing required field \"" + std::string(key) + "\"");
    return *it;
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path + ": expected a finite number");
    return x;
}

// A number or the string "inf".
inline double as_extended(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return inf;
        throw ConfigError(path + ": expected a number or \"inf\"");
    }
    return as_number(j, path);
}

inline long long as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned())
        throw ConfigError(path + ": expected an integer");
    return j.get<long long>();
}

inline void reject_unknown(const json& j, const std::set<std::string>& known,
                           const std::string& path) {
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw ConfigError(path + "." + item.key() + ": unknown field");
}

}  // namespace detail

// space_weight selects the full admissibility checks (head exponent > -1);
// multiplier weights for the inequality constants only need a sane layout.
inline PiecewisePowerWeight weight_from_json(const json& j, const std::string& path,
                                             bool space_weight = true) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    detail::reject_unknown(j, {"b", "pieces"}, path);
    PiecewisePowerWeight w;
    w.b = detail::as_extended(detail::require_field(j, "b", path), path + ".b");
    const json& pieces = detail::require_field(j, "pieces", path);
    if (!pieces.is_array() || pieces.empty())
        throw ConfigError(path + ".pieces: expected a nonempty array");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        std::string pp = path + ".pieces[" + std::to_string(i) + "]";
        const json& pj = pieces[i];
        if (!pj.is_object()) throw ConfigError(pp + ": expected an object");
        detail::reject_unknown(pj, {"lo", "hi", "coeff", "exp"}, pp);
        WeightPiece piece;
        piece.lo = detail::as_number(detail::require_field(pj, "lo", pp), pp + ".lo");
        piece.hi = detail::as_extended(detail::require_field(pj, "hi", pp), pp + ".hi");
        piece.coeff = detail::as_number(detail::require_field(pj, "coeff", pp), pp + ".coeff");
        piece.exp = detail::as_number(detail::require_field(pj, "exp", pp), pp + ".exp");
        w.pieces.push_back(piece);
    }
    try {
        if (space_weight)
            w.validate();
        else
            detail::check_weight_layout(w);
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return w;
}

inline json weight_to_json(const PiecewisePowerWeight& w) {
    json pieces = json::array();
    for (const WeightPiece& pc : w.pieces)
        pieces.push_back(
            {{"lo", pc.lo}, {"hi", encode_real(pc.hi)}, {"coeff", pc.coeff}, {"exp", pc.exp}});
    return {{"b", encode_real(w.b)}, {"pieces", pieces}};
}

inline StepFunction step_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    detail::reject_unknown(j, {"breaks", "values"}, path);
    const json& breaks = detail::require_field(j, "breaks", path);
    const json& values = detail::require_field(j, "values", path);
    if (!breaks.is_array()) throw ConfigError(path + ".breaks: expected an array");
    if (!values.is_array()) throw ConfigError(path + ".values: expected an array");
    StepFunction f;
    f.breaks.clear();
    for (std::size_t i = 0; i < breaks.size(); ++i)
        f.breaks.push_back(
            detail::as_number(breaks[i], path + ".breaks[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < values.size(); ++i)
        f.values.push_back(
            detail::as_number(values[i], path + ".values[" + std::to_string(i) + "]"));
    try {
        f.validate();
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return f;
}

inline json step_to_json(const StepFunction& f) {
    return {{"breaks", f.breaks}, {"values", f.values}};
}

struct GridSpec {
    double decades_lo = -8.0;
    double decades_hi = 8.0;
    int points_per_decade = 16;

    std::vector<double> points() const {
        int n = static_cast<int>(std::lround((decades_hi - decades_lo) * points_per_decade)) + 1;
        std::vector<double> t(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            t[static_cast<std::size_t>(i)] =
                std::pow(10.0, decades_lo + (decades_hi - decades_lo) * i / (n - 1));
        return t;
    }
};

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"validate", "dual-weight", "norm",
                                                   "dual-check", "embed", "hardy",
                                                   "stieltjes", "indices", "cz-check",
                                                   "report-all"};
    return names;
}

struct RunConfig {
    std::string command;
    std::optional<double> p, q;
    std::optional<PiecewisePowerWeight> weight, weight2, u, v;
    std::optional<StepFunction> function;
    GridSpec grid;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    int budget = 50;
};

inline RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected an object");
    detail::reject_unknown(j,
                           {"command", "p", "q", "weight", "weight2", "u", "v", "function",
                            "grid", "tol", "seed", "budget"},
                           "config");

    RunConfig cfg;
    const json& cmd = detail::require_field(j, "command", "config");
    if (!cmd.is_string()) throw ConfigError("config.command: expected a string");
    cfg.command = cmd.get<std::string>();
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), cfg.command) == names.end())
        throw ConfigError("config.command: unknown command \"" + cfg.command + "\"");

    auto exponent_field = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key)) return std::nullopt;
        double x = detail::as_number(j.at(key), std::string("config.") + key);
        if (!(x > 1.0))
            throw ConfigError(std::string("config.") + key + ": expected a number in (1, inf)");
        return x;
    };
    cfg.p = exponent_field("p");
    cfg.q = exponent_field("q");

    if (j.contains("weight")) cfg.weight = weight_from_json(j.at("weight"), "config.weight");
    if (j.contains("weight2")) cfg.weight2 = weight_from_json(j.at("weight2"), "config.weight2");
    if (j.contains("u")) cfg.u = weight_from_json(j.at("u"), "config.u", false);
    if (j.contains("v")) cfg.v = weight_from_json(j.at("v"), "config.v", false);
    if (j.contains("function")) cfg.function = step_from_json(j.at("function"), "config.function");

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (!g.is_object()) throw ConfigError("config.grid: expected an object");
        detail::reject_unknown(g, {"decades_lo", "decades_hi", "points_per_decade"},
                               "config.grid");
        if (g.contains("decades_lo"))
            cfg.grid.decades_lo = detail::as_number(g.at("decades_lo"), "config.grid.decades_lo");
        if (g.contains("decades_hi"))
            cfg.grid.decades_hi = detail::as_number(g.at("decades_hi"), "config.grid.decades_hi");
        if (g.contains("points_per_decade"))
            cfg.grid.points_per_decade = static_cast<int>(detail::as_integer(
                g.at("points_per_decade"), "config.grid.points_per_decade"));
        if (!(cfg.grid.decades_lo < cfg.grid.decades_hi))
            throw ConfigError("config.grid: decades_lo must be below decades_hi");
        if (cfg.grid.points_per_decade < 1 || cfg.grid.points_per_decade > 512)
            throw ConfigError("config.grid.points_per_decade: expected an integer in [1, 512]");
    }
    if (j.contains("tol")) {
        cfg.tol = detail::as_number(j.at("tol"), "config.tol");
        if (!(cfg.tol > 0.0) || cfg.tol > 0.1)
            throw ConfigError("config.tol: expected a number in (0, 0.1]");
    }
    if (j.contains("seed")) {
        long long s = detail::as_integer(j.at("seed"), "config.seed");
        if (s < 0) throw ConfigError("config.seed: expected a nonnegative integer");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("budget")) {
        long long b = detail::as_integer(j.at("budget"), "config.budget");
        if (b < 1 || b > 100000)
            throw ConfigError("config.budget: expected an integer in [1, 100000]");
        cfg.budget = static_cast<int>(b);
    }

    auto need = [&](bool present, const char* key) {
        if (!present)
            throw ConfigError("config." + std::string(key) + ": required for command \"" +
                              cfg.command + "\"");
    };
    const std::string& c = cfg.command;
    need(cfg.p.has_value(), "p");
    if (c == "hardy" || c == "stieltjes") {
        need(cfg.q.has_value(), "q");
        need(cfg.u.has_value(), "u");
        need(cfg.v.has_value(), "v");
    } else {
        need(cfg.weight.has_value(), "weight");
    }
    if (c == "embed") {
        need(cfg.q.has_value(), "q");
        need(cfg.weight2.has_value(), "weight2");
    }
    if (c == "norm") need(cfg.function.has_value(), "function");
    return cfg;
}

inline json config_to_json(const RunConfig& cfg) {
    json j = {{"command", cfg.command},
              {"grid",
               {{"decades_lo", cfg.grid.decades_lo},
                {"decades_hi", cfg.grid.decades_hi},
                {"points_per_decade", cfg.grid.points_per_decade}}},
              {"tol", cfg.tol},
              {"seed", cfg.seed},
              {"budget", cfg.budget}};
    if (cfg.p) j["p"] = *cfg.p;
    if (cfg.q) j["q"] = *cfg.q;
    if (cfg.weight) j["weight"] = weight_to_json(*cfg.weight);
    if (cfg.weight2) j["weight2"] = weight_to_json(*cfg.weight2);
    if (cfg.u) j["u"] = weight_to_json(*cfg.u);
    if (cfg.v) j["v"] = weight_to_json(*cfg.v);
    if (cfg.function) j["function"] = step_to_json(*cfg.function);
    return j;
}

// ---- report envelope ----

inline constexpr const char* kReportVersion = "0.1.0";

inline json make_diagnostics() {
    return {{"argmax", json::object()},
            {"endpoint_limits", json::object()},
            {"quadrature_max_rel_error", 0.0},
            {"warnings", json::array()}};
}

inline json make_report(const RunConfig& cfg, json results, json diagnostics,
                        double timing_ms) {
    return {{"version", kReportVersion}, {"command", cfg.command},
            {"config", config_to_json(cfg)}, {"results", std::move(results)},
            {"diagnostics", std::move(diagnostics)}, {"timing_ms", timing_ms}};
}

// Serialized report with the timing field removed: the determinism invariant
// compares these across runs.
inline std::string report_fingerprint(json report) {
    report.erase("timing_ms");
    return report.dump(2);
}

// ---- schema ----

// Subset of JSON Schema the report schema uses: type, const, enum, required,
// properties, additionalProperties (boolean), items, oneOf, minimum, and
// $ref into #/$defs.
namespace detail {

inline bool schema_type_matches(const std::string& t, const json& v) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
}

inline void schema_check(const json& schema, const json& root, const json& value,
                         const std::string& path, std::vector<std::string>& errors) {
    if (schema.contains("$ref")) {
        std::string ref = schema.at("$ref").get<std::string>();
        const std::string prefix = "#/$defs/";
        if (ref.rfind(prefix, 0) != 0) {
            errors.push_back(path + ": unsupported $ref " + ref);
            return;
        }
        std::string name = ref.substr(prefix.size());
        if (!root.contains("$defs") || !root.at("$defs").contains(name)) {
            errors.push_back(path + ": unresolved $ref " + ref);
            return;
        }
        schema_check(root.at("$defs").at(name), root, value, path, errors);
        return;
    }
    if (schema.contains("const")) {
        if (value != schema.at("const"))
            errors.push_back(path + ": expected constant " + schema.at("const").dump());
        return;
    }
    if (schema.contains("enum")) {
        const json& options = schema.at("enum");
        if (std::find(options.begin(), options.end(), value) == options.end())
            errors.push_back(path + ": value " + value.dump() + " not in enum");
        return;
    }
    if (schema.contains("oneOf")) {
        int hits = 0;
        for (const json& sub : schema.at("oneOf")) {
            std::vector<std::string> sub_errors;
            schema_check(sub, root, value, path, sub_errors);
            if (sub_errors.empty()) ++hits;
        }
        if (hits != 1)
            errors.push_back(path + ": expected exactly one matching oneOf branch, got " +
                             std::to_string(hits));
        return;
    }
    if (schema.contains("type")) {
        const json& t = schema.at("type");
        bool ok = t.is_array()
                      ? std::any_of(t.begin(), t.end(),
                                    [&](const json& s) {
                                        return schema_type_matches(s.get<std::string>(), value);
                                    })
                      : schema_type_matches(t.get<std::string>(), value);
        if (!ok) {
            errors.push_back(path + ": expected type " + t.dump());
            return;
        }
    }
    if (schema.contains("minimum") && value.is_number()) {
        if (value.get<double>() < schema.at("minimum").get<double>())
            errors.push_back(path + ": below minimum " + schema.at("minimum").dump());
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const json& key : schema.at("required"))
                if (!value.contains(key.get<std::string>()))
                    errors.push_back(path + ": missing required field \"" +
                                     key.get<std::string>() + "\"");
        const json* props = schema.contains("properties") ? &schema.at("properties") : nullptr;
        bool extra_ok = true;
        if (schema.contains("additionalProperties"))
            extra_ok = schema.at("additionalProperties").get<bool>();
        for (const auto& item : value.items()) {
            if (props && props->contains(item.key())) {
                schema_check(props->at(item.key()), root, item.value(),
                             path + "." + item.key(), errors);
            } else if (!extra_ok) {
                errors.push_back(path + "." + item.key() + ": field not allowed");
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i)
            schema_check(schema.at("items"), root, value[i],
                         path + "[" + std::to_string(i) + "]", errors);
    }
}

}  // namespace detail

inline std::vector<std::string> schema_validate(const json& schema, const json& value) {
    std::vector<std::string> errors;
    detail::schema_check(schema, schema, value, "$", errors);
    return errors;
}

// The published report schema; the copy shipped under schema/ must stay
// semantically identical (a test compares them).
inline const json& report_schema() {
    static const json schema = json::parse(R"raw({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "gammaspace report",
  "$defs": {
    "real": {"oneOf": [{"type": "number"}, {"const": "inf"}, {"const": "-inf"}]},
    "series": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    "weight": {
      "type": "object",
      "required": ["b", "pieces"],
      "additionalProperties": false,
      "properties": {
        "b": {"$ref": "#/$defs/real"},
        "pieces": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["lo", "hi", "coeff", "exp"],
            "additionalProperties": false,
            "properties": {
              "lo": {"type": "number"},
              "hi": {"$ref": "#/$defs/real"},
              "coeff": {"type": "number"},
              "exp": {"type": "number"}
            }
          }
        }
      }
    },
    "step": {
      "type": "object",
      "required": ["breaks", "values"],
      "additionalProperties": false,
      "properties": {
        "breaks": {"type": "array", "items": {"type": "number"}},
        "values": {"type": "array", "items": {"type": "number"}}
      }
    },
    "grid": {
      "type": "object",
      "required": ["decades_lo", "decades_hi", "points_per_decade"],
      "additionalProperties": false,
      "properties": {
        "decades_lo": {"type": "number"},
        "decades_hi": {"type": "number"},
        "points_per_decade": {"type": "integer", "minimum": 1}
      }
    }
  },
  "type": "object",
  "required": ["version", "command", "config", "results", "diagnostics", "timing_ms"],
  "additionalProperties": false,
  "properties": {
    "version": {"const": "0.1.0"},
    "command": {
      "enum": ["validate", "dual-weight", "norm", "dual-check", "embed", "hardy",
               "stieltjes", "indices", "cz-check", "report-all"]
    },
    "config": {
      "type": "object",
      "required": ["command", "grid", "tol", "seed", "budget"],
      "additionalProperties": false,
      "properties": {
        "command": {"type": "string"},
        "p": {"type": "number"},
        "q": {"type": "number"},
        "weight": {"$ref": "#/$defs/weight"},
        "weight2": {"$ref": "#/$defs/weight"},
        "u": {"$ref": "#/$defs/weight"},
        "v": {"$ref": "#/$defs/weight"},
        "function": {"$ref": "#/$defs/step"},
        "grid": {"$ref": "#/$defs/grid"},
        "tol": {"type": "number"},
        "seed": {"type": "integer", "minimum": 0},
        "budget": {"type": "integer", "minimum": 1}
      }
    },
    "results": {"type": "object"},
    "diagnostics": {
      "type": "object",
      "required": ["argmax", "endpoint_limits", "quadrature_max_rel_error", "warnings"],
      "additionalProperties": false,
      "properties": {
        "argmax": {"type": "object"},
        "endpoint_limits": {"type": "object"},
        "quadrature_max_rel_error": {"type": "number"},
        "warnings": {"type": "array", "items": {"type": "string"}}
      }
    },
    "timing_ms": {"type": "number"}
  }
})raw");
    return schema;
}

// ---- CSV ----

namespace detail {

// Fitted log-log slope of a positive sampled series by centered differences.
inline std::vector<double> local_slopes(const std::vector<std::pair<double, double>>& s) {
    std::vector<double> out(s.size(), 0.0);
    if (s.size() < 2) return out;
    auto slope = [&](std::size_t a, std::size_t b) {
        return (std::log(s[b].second) - std::log(s[a].second)) /
               (std::log(s[b].first) - std::log(s[a].first));
    };
    out.front() = slope(0, 1);
    out.back() = slope(s.size() - 2, s.size() - 1);
    for (std::size_t i = 1; i + 1 < s.size(); ++i) out[i] = slope(i - 1, i + 1);
    return out;
}

inline const json* find_series(const json& results, const char* key) {
    if (results.contains(key)) return &results.at(key);
    for (const auto& item : results.items())
        if (item.value().is_object() && item.value().contains(key))
            return &item.value().at(key);
    return nullptr;
}

}  // namespace detail

// dual-weight reports export t,psi,local_slope; indices reports export t,h.
// A report with an empty series yields the header row alone.
inline std::string csv_from_report(const json& report) {
    const json& results = report.at("results");
    if (const json* psi = detail::find_series(results, "psi_samples")) {
        std::vector<std::pair<double, double>> s;
        for (const json& row : *psi) s.emplace_back(row[0].get<double>(), row[1].get<double>());
        std::vector<double> slopes = detail::local_slopes(s);
        std::string out = "t,psi,local_slope\n";
        for (std::size_t i = 0; i < s.size(); ++i)
            out += format_real(s[i].first) + "," + format_real(s[i].second) + "," +
                   format_real(slopes[i]) + "\n";
        return out;
    }
    if (const json* h = detail::find_series(results, "h_samples")) {
        std::string out = "t,h\n";
        for (const json& row : *h)
            out += format_real(row[0].get<double>()) + "," + format_real(row[1].get<double>()) +
                   "\n";
        return out;
    }
    throw ConfigError("report has no sampled series (psi_samples or h_samples)");
}

inline void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw ConfigError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ConfigError("cannot move output into place: " + path);
}

inline void export_csv(const json& report, const std::string& path) {
    write_file_atomic(path, csv_from_report(report));
}

}  // namespace gammaspace
