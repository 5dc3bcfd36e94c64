#pragma once

// Command dispatch behind the gammaspace tool.  Each command handler turns a
// validated RunConfig into a results payload plus diagnostics; run() wraps
// dispatch with the exit-code contract:
//   0  success
//   2  validation failure (bad config, inadmissible weight, unmet precondition)
//   3  numeric failure (quadrature or ascent did not converge)
// A report is produced on every path so failures stay machine-readable.

#include <gammaspace/duality.hpp>
#include <gammaspace/indices.hpp>
#include <gammaspace/inequalities.hpp>
#include <gammaspace/norms.hpp>
#include <gammaspace/operators.hpp>
#include <gammaspace/random.hpp>
#include <gammaspace/report.hpp>

#include <chrono>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace gammaspace {

struct RunOutcome {
    json report;
    int exit_code = 0;
};

namespace detail {

struct Section {
    json results = json::object();
    json diag = make_diagnostics();
    int exit_code = 0;
};

inline json series_json(const std::vector<std::pair<double, double>>& s) {
    json out = json::array();
    for (const auto& [t, v] : s) out.push_back({t, v});
    return out;
}

inline Section cmd_validate(const RunConfig& cfg) {
    Section s;
    NontrivialityReport rep = validate_nontrivial(*cfg.weight, *cfg.p);
    s.results = {{"nontrivial", rep.nontrivial},
                 {"phi_integral_finite", rep.phi_integral_finite},
                 {"cz_hypothesis", rep.cz_hypothesis},
                 {"reason", rep.reason}};
    s.diag["endpoint_limits"] = {{"head_exponent", cfg.weight->pieces.front().exp},
                                 {"tail_exponent", cfg.weight->pieces.back().exp}};
    if (!rep.nontrivial) {
        s.diag["warnings"].push_back("weight rejected: " + rep.reason);
        s.exit_code = 2;
    }
    return s;
}

inline Section cmd_dual_weight(const RunConfig& cfg) {
    Section s;
    DualWeight psi(*cfg.p, *cfg.weight);
    double b = psi.domain_end();
    json samples = json::array();
    for (double t : cfg.grid.points())
        if (t < b) samples.push_back({t, psi(t)});
    s.results = {{"psi_samples", std::move(samples)}, {"conjugate", psi.conjugate()}};
    json ep = {{"zero_exponent", psi.asym_zero()}, {"zero_log", psi.log_at_zero()}};
    if (b == inf) {
        ep["inf_exponent"] = psi.asym_inf();
        ep["inf_log"] = psi.log_at_inf();
    }
    s.diag["endpoint_limits"] = std::move(ep);
    return s;
}

inline Section cmd_norm(const RunConfig& cfg) {
    Section s;
    NormInfo info = gamma_norm_info(*cfg.p, *cfg.weight, *cfg.function, cfg.tol);
    double rel = info.value > 0 ? info.abs_error / info.value : 0.0;
    if (!info.converged)
        throw QuadratureError("norm: quadrature did not reach tolerance", rel);
    s.results = {{"value", info.value}, {"abs_error", info.abs_error}, {"converged", true}};
    s.diag["quadrature_max_rel_error"] = rel;
    return s;
}

// The paired equivalence check: the brute-force associate norm against the
// dual-weight functional on a seeded batch of decreasing steps.  budget sets
// both the batch size and the ascent budget of the oracle.
inline Section cmd_dual_check(const RunConfig& cfg) {
    Section s;
    Rng rng(cfg.seed);
    double rmin = inf, rmax = -inf, rsum = 0.0;
    double worst_gap = -inf, worst_ratio = 1.0;
    int worst_index = -1;
    json families = json::object();
    for (int i = 0; i < cfg.budget; ++i) {
        DecreasingStep g = random_decreasing_step(rng);
        double dn = dual_norm(*cfg.p, *cfg.weight, g, cfg.tol);
        OracleResult oracle = associate_norm_oracle(*cfg.p, *cfg.weight, g, cfg.budget,
                                                    cfg.grid.points_per_decade);
        double ratio = oracle.value / dn;
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
        rsum += ratio;
        double gap = std::abs(std::log(ratio));
        if (gap > worst_gap) {
            worst_gap = gap;
            worst_ratio = ratio;
            worst_index = i;
        }
        std::string fam = oracle.family;
        families[fam] = families.value(fam, 0) + 1;
    }
    bool within = rmin >= 0.1 && rmax <= 100.0;
    s.results = {{"count", cfg.budget}, {"ratio_min", rmin},
                 {"ratio_max", rmax},  {"ratio_mean", rsum / cfg.budget},
                 {"within_band", within}, {"families", std::move(families)}};
    s.diag["argmax"] = {{"worst_sample", worst_index}, {"worst_ratio", worst_ratio}};
    if (!within)
        s.diag["warnings"].push_back("oracle/dual ratio left the band [0.1, 100]");
    return s;
}

inline Section cmd_embed(const RunConfig& cfg) {
    Section s;
    double value = embedding_norm(*cfg.p, *cfg.weight, *cfg.q, *cfg.weight2);
    s.results = {{"value", encode_real(value)}, {"finite", value < inf}};
    if (value < inf && *cfg.p <= *cfg.q) {
        // sup form: sweep the bracket ratio for the attaining t
        BracketCalculus c1(*cfg.weight, *cfg.p);
        BracketCalculus c2(*cfg.weight2, *cfg.q);
        double best = -inf, best_t = 1.0;
        for (double t : cfg.grid.points()) {
            double lt = std::log(t);
            double lr = c2.log_phi(lt) / *cfg.q - c1.log_phi(lt) / *cfg.p;
            if (lr > best) {
                best = lr;
                best_t = t;
            }
        }
        s.diag["argmax"] = {{"t", best_t}, {"ratio", std::exp(best)}};
        s.diag["endpoint_limits"] = {
            {"zero_exponent",
             c2.asym_zero().exponent / *cfg.q - c1.asym_zero().exponent / *cfg.p},
            {"inf_exponent",
             c2.asym_inf().exponent / *cfg.q - c1.asym_inf().exponent / *cfg.p}};
    }
    return s;
}

inline Section cmd_hardy(const RunConfig& cfg) {
    Section s;
    double b = cfg.u->b;
    double cP = hardy_P_constant(*cfg.p, *cfg.q, *cfg.u, *cfg.v, b);
    double cQ = hardy_Q_constant(*cfg.p, *cfg.q, *cfg.u, *cfg.v, b);
    s.results = {{"constant_P", encode_real(cP)}, {"constant_Q", encode_real(cQ)}};

    // locate the attaining split point of each bivariate objective
    double pp = *cfg.p / (*cfg.p - 1.0);
    PiecewisePowerWeight uqP = monomial_power(*cfg.u, *cfg.q, -1.0);
    PiecewisePowerWeight vmP = monomial_power(*cfg.v, -pp, 0.0);
    PiecewisePowerWeight uqQ = monomial_power(*cfg.u, *cfg.q, 0.0);
    PiecewisePowerWeight vmQ = monomial_power(*cfg.v, -pp, 1.0);
    json argmax = json::object();
    auto sweep = [&](const char* key, auto&& objective) {
        double best = -inf, best_r = 1.0;
        for (double r : cfg.grid.points()) {
            if (!(r < b)) continue;
            double f1 = 0, f2 = 0;
            objective(r, f1, f2);
            if (!(f1 > 0) || !(f2 > 0) || f1 == inf || f2 == inf) continue;
            double lv = std::log(f1) / *cfg.q + std::log(f2) / pp;
            if (lv > best) {
                best = lv;
                best_r = r;
            }
        }
        if (best > -inf) argmax[key] = {{"r", best_r}, {"value", std::exp(best)}};
    };
    sweep("P", [&](double r, double& f1, double& f2) {
        f1 = moment(uqP, r, b, 0.0);
        f2 = moment(vmP, 0.0, r, 0.0);
    });
    sweep("Q", [&](double r, double& f1, double& f2) {
        f1 = moment(uqQ, 0.0, r, 0.0);
        f2 = moment(vmQ, r, b, 0.0);
    });
    s.diag["argmax"] = std::move(argmax);
    return s;
}

inline Section cmd_stieltjes(const RunConfig& cfg) {
    Section s;
    double k = stieltjes_constant(*cfg.p, *cfg.q, *cfg.u, *cfg.v);
    s.results = {{"value", encode_real(k)}};
    if (k < inf && *cfg.p <= *cfg.q) {
        // coarse sweep of the exact-kernel objective, two points per decade
        double pp = *cfg.p / (*cfg.p - 1.0);
        PiecewisePowerWeight vm = monomial_power(*cfg.v, 1.0 - pp, 0.0);
        double best = -inf, best_t = 1.0;
        double l10 = std::log(10.0);
        for (double ly = cfg.grid.decades_lo * l10; ly <= cfg.grid.decades_hi * l10 + 1e-9;
             ly += l10 / 2) {
            double t = std::exp(ly);
            double f1 = stieltjes_u_factor(*cfg.u, *cfg.q, t, 1e-6);
            double f2 = stieltjes_v_factor(vm, pp, t, 1e-6);
            if (!(f1 > 0) || !(f2 > 0) || f1 == inf || f2 == inf) continue;
            double lv = std::log(f1) / *cfg.q + std::log(f2) / pp;
            if (lv > best) {
                best = lv;
                best_t = t;
            }
        }
        if (best > -inf) s.diag["argmax"] = {{"t", best_t}, {"value", std::exp(best)}};
    }
    return s;
}

inline Section cmd_indices(const RunConfig& cfg) {
    Section s;
    IndexReport rep = boyd_indices(*cfg.p, *cfg.weight);
    s.results = {{"i_lower", rep.i_lower},
                 {"I_upper", rep.I_upper},
                 {"fundamental_i", rep.fundamental_i},
                 {"fundamental_I", rep.fundamental_I},
                 {"fundamental_from_dilation", rep.fundamental_from_dilation},
                 {"slope_drift_lower", rep.slope_drift_lower},
                 {"slope_drift_upper", rep.slope_drift_upper},
                 {"h_samples", series_json(rep.h_samples)},
                 {"cz",
                  {{"admissible", rep.cz.admissible},
                   {"c_star", rep.cz.c_star ? json(*rep.cz.c_star) : json(nullptr)}}}};
    for (const std::string& msg : rep.warnings) s.diag["warnings"].push_back(msg);
    BracketCalculus calc(*cfg.weight, *cfg.p);
    s.diag["endpoint_limits"] = {{"zero_slope", calc.asym_zero().exponent / *cfg.p},
                                 {"inf_slope", calc.asym_inf().exponent / *cfg.p}};
    return s;
}

inline Section cmd_cz_check(const RunConfig& cfg) {
    Section s;
    CzReport rep = cz_admissible(*cfg.p, *cfg.weight);
    s.results = {{"admissible", rep.admissible},
                 {"c_star", rep.c_star ? json(*rep.c_star) : json(nullptr)}};
    if (!rep.admissible)
        s.diag["warnings"].push_back(
            "an endpoint ratio saturates: no contraction halves the bracket");
    return s;
}

inline void merge_section(Section& all, const std::string& name, const Section& part) {
    all.results[name] = part.results;
    if (!part.diag["argmax"].empty()) all.diag["argmax"][name] = part.diag["argmax"];
    if (!part.diag["endpoint_limits"].empty())
        all.diag["endpoint_limits"][name] = part.diag["endpoint_limits"];
    all.diag["quadrature_max_rel_error"] =
        std::max(all.diag["quadrature_max_rel_error"].get<double>(),
                 part.diag["quadrature_max_rel_error"].get<double>());
    for (const auto& w : part.diag["warnings"])
        all.diag["warnings"].push_back(name + ": " + w.get<std::string>());
}

// Everything applicable in one report.  The admissibility gate runs first;
// a trivial weight short-circuits with exit 2.  Failures in individual
// sections downgrade to warnings so one divergent constant cannot hide the
// rest of the report.
inline Section cmd_report_all(const RunConfig& cfg) {
    Section s;
    Section v = cmd_validate(cfg);
    merge_section(s, "validate", v);
    if (v.exit_code != 0) {
        s.diag["warnings"].push_back("weight is trivial: dependent sections skipped");
        s.exit_code = 2;
        return s;
    }
    auto attach = [&](const char* name, Section (*fn)(const RunConfig&)) {
        try {
            merge_section(s, name, fn(cfg));
        } catch (const std::exception& e) {
            s.diag["warnings"].push_back(std::string(name) + " skipped: " + e.what());
        }
    };
    attach("dual-weight", cmd_dual_weight);
    if (cfg.function) attach("norm", cmd_norm);
    attach("dual-check", cmd_dual_check);
    if (cfg.q && cfg.weight2) attach("embed", cmd_embed);
    if (cfg.q && cfg.u && cfg.v) {
        attach("hardy", cmd_hardy);
        attach("stieltjes", cmd_stieltjes);
    }
    attach("indices", cmd_indices);  // carries the contraction result
    return s;
}

inline Section dispatch(const RunConfig& cfg) {
    if (cfg.command == "validate") return cmd_validate(cfg);
    if (cfg.command == "dual-weight") return cmd_dual_weight(cfg);
    if (cfg.command == "norm") return cmd_norm(cfg);
    if (cfg.command == "dual-check") return cmd_dual_check(cfg);
    if (cfg.command == "embed") return cmd_embed(cfg);
    if (cfg.command == "hardy") return cmd_hardy(cfg);
    if (cfg.command == "stieltjes") return cmd_stieltjes(cfg);
    if (cfg.command == "indices") return cmd_indices(cfg);
    if (cfg.command == "cz-check") return cmd_cz_check(cfg);
    if (cfg.command == "report-all") return cmd_report_all(cfg);
    throw ConfigError("config.command: unknown command \"" + cfg.command + "\"");
}

}  // namespace detail

inline RunOutcome run(const RunConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    detail::Section s;
    try {
        s = detail::dispatch(cfg);
    } catch (const QuadratureError& e) {
        s = detail::Section{};
        s.results = {{"error", std::string(e.what())}};
        s.diag["warnings"].push_back(std::string(e.what()));
        s.diag["quadrature_max_rel_error"] = e.achieved;
        s.exit_code = 3;
    } catch (const std::invalid_argument& e) {
        s = detail::Section{};
        s.results = {{"error", std::string(e.what())}};
        s.diag["warnings"].push_back(std::string(e.what()));
        s.exit_code = 2;
    } catch (const std::domain_error& e) {
        s = detail::Section{};
        s.results = {{"error", std::string(e.what())}};
        s.diag["warnings"].push_back(std::string(e.what()));
        s.exit_code = 2;
    } catch (const std::exception& e) {
        s = detail::Section{};
        s.results = {{"error", std::string(e.what())}};
        s.diag["warnings"].push_back(std::string(e.what()));
        s.exit_code = 3;
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    return {make_report(cfg, std::move(s.results), std::move(s.diag), ms), s.exit_code};
}

}  // namespace gammaspace
