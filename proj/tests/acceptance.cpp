// Acceptance gate: ten checks with pinned tolerances, one line per check.
// Each runs against closed-form goldens or an independent evaluation path;
// runtime budgets are part of the pass condition.  Exit 0 only if all pass.

#include <gammaspace/cli.hpp>
#include <gammaspace/random.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace gammaspace;

namespace {

std::vector<std::string> notes;

bool expect(bool ok, const std::string& msg) {
    if (!ok) {
        if (notes.size() < 6)
            notes.push_back(msg);
        else if (notes.size() == 6)
            notes.push_back("(further failures suppressed)");
    }
    return ok;
}

std::string fmt(double x) {
    char b[64];
    std::snprintf(b, sizeof b, "%.10g", x);
    return b;
}

PiecewisePowerWeight power_weight(double alpha) {
    return PiecewisePowerWeight::power(1.0, alpha);
}

const double kPs[] = {1.5, 2.0, 3.0};

// ---- 1: dual-weight goldens ----

void dual_weight_goldens() {
    for (double p : kPs) {
        for (double alpha : {-0.5, 0.0, (p - 1.0) / 2.0}) {
            DualWeight psi(p, power_weight(alpha));
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const int n = 49;
            for (int k = 0; k < n; ++k) {
                double lt = std::log(1e-6) + k * (std::log(1e6) - std::log(1e-6)) / (n - 1);
                double lp = psi.log_eval(lt);
                sx += lt;
                sy += lp;
                sxx += lt * lt;
                sxy += lt * lp;
            }
            double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            double want = -alpha / (p - 1.0);
            expect(std::abs(slope - want) < 1e-6,
                   "psi slope off for p=" + fmt(p) + " alpha=" + fmt(alpha) + ": got " +
                       fmt(slope) + " want " + fmt(want));
        }
    }
    DualWeight flat(2.0, power_weight(0.0));
    for (int k = 0; k < 25; ++k) {
        double t = std::pow(10.0, -6.0 + k * 0.5);
        expect(std::abs(flat(t) - 0.125) < 1e-10,
               "flat psi(" + fmt(t) + ") = " + fmt(flat(t)) + ", want 0.125");
    }
}

// ---- 2: bracket identity ----

// t P(Q_p w)(t) = Phi_p(t): the left side through adaptive quadrature of the
// pointwise operator, the right side through exact moments.
void bracket_identity() {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        double p = rng.uniform(1.3, 3.5);
        PiecewisePowerWeight w = random_weight(rng, p, 4);
        double a0 = w.pieces.front().exp;
        auto logf = [&](double y) { return std::log(q_sub_p(w, p, std::exp(y))); };
        for (int j = 0; j < 100; ++j) {
            double t = rng.log_uniform(1e-5, 1e5);
            double lt = std::log(t);
            std::vector<double> cuts;
            for (const WeightPiece& pc : w.pieces)
                if (pc.lo > 0 && pc.lo < t) cuts.push_back(std::log(pc.lo));
            QuadResult q = integrate_head(logf, cuts.empty() ? lt : cuts.front(), 1e-11,
                                          EndHint{a0, 0.0});
            double prev = cuts.empty() ? lt : cuts.front();
            for (std::size_t k = 1; k < cuts.size(); ++k) {
                q += integrate_log(logf, prev, cuts[k], 1e-11);
                prev = cuts[k];
            }
            if (prev < lt) q += integrate_log(logf, prev, lt, 1e-11);
            double rhs = phi_bracket(w, p, t);
            expect(std::abs(q.value - rhs) <= 1e-9 * rhs,
                   "bracket identity off at weight " + std::to_string(i) + ", t=" + fmt(t) +
                       ": lhs " + fmt(q.value) + " rhs " + fmt(rhs));
        }
    }
}

// ---- 3: associate-norm equivalence ----

void associate_equivalence() {
    StepFunction chi;
    chi.breaks = {0.0, 1.0};
    chi.values = {1.0};
    OracleResult gold = associate_norm_oracle(2.0, power_weight(0.0), chi, 50, 16);
    expect(std::abs(gold.value - 1.0 / std::sqrt(2.0)) < 1e-6,
           "golden oracle value " + fmt(gold.value) + ", want 1/sqrt(2)");
    double gold_dual = dual_norm(2.0, power_weight(0.0), chi);
    expect(std::abs(gold_dual - 0.5) < 1e-6,
           "golden dual functional " + fmt(gold_dual) + ", want 0.5");

    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        double p = rng.uniform(1.4, 3.2);
        PiecewisePowerWeight w = random_weight(rng, p, 3);
        for (int j = 0; j < 20; ++j) {
            DecreasingStep g = random_decreasing_step(rng);
            double d = dual_norm(p, w, g);
            double v16 = associate_norm_oracle(p, w, g, 50, 16).value;
            double v32 = associate_norm_oracle(p, w, g, 50, 32).value;
            double ratio = v16 / d;
            expect(ratio >= 0.1 && ratio <= 100.0,
                   "ratio " + fmt(ratio) + " out of band at pair " + std::to_string(i) +
                       " sample " + std::to_string(j));
            expect(std::abs(v32 / v16 - 1.0) < 0.05,
                   "oracle moved " + fmt(100.0 * std::abs(v32 / v16 - 1.0)) +
                       "% under grid doubling at pair " + std::to_string(i) + " sample " +
                       std::to_string(j));
        }
    }
}

// ---- 4: sandwich between the averaging pair ----

void sandwich_bounds() {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        StepFunction f = random_step(rng);
        AveragedStep a = averaged(f);
        TailAverage q = tail_average(f);
        for (int j = 0; j < 20; ++j) {
            double t = rng.log_uniform(1e-4, 1e4);
            double pf = a(t), qf = q(t), sf = stieltjes(f, t);
            double slack = 1e-12 * std::max(1.0, pf + qf);
            expect(sf - 0.5 * (pf + qf) >= -slack,
                   "lower sandwich violated at sample " + std::to_string(i) + ", t=" + fmt(t));
            expect((pf + qf) - sf >= -slack,
                   "upper sandwich violated at sample " + std::to_string(i) + ", t=" + fmt(t));
        }
    }
}

// ---- 5: operator constants and sampled envelope ----

void operator_envelope() {
    PiecewisePowerWeight one = power_weight(0.0);
    double cp = hardy_P_constant(2.0, 2.0, one, one, inf);
    double cq = hardy_Q_constant(2.0, 2.0, one, one, inf);
    double ks = stieltjes_constant(2.0, 2.0, one, one);
    expect(std::abs(cp - 1.0) < 1e-6, "hardy P constant " + fmt(cp) + ", want 1");
    expect(std::abs(cq - 1.0) < 1e-6, "hardy Q constant " + fmt(cq) + ", want 1");
    expect(std::abs(ks - 1.0) < 1e-3, "stieltjes constant " + fmt(ks) + ", want 1");

    // LHS <= 64 B RHS with B = 1 on the unit data, 500 draws per operator
    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        DecreasingStep f = random_decreasing_step(rng, 5);
        double rhs = weighted_lp_norm(2.0, one, f);
        AveragedStep a = averaged(f);
        TailAverage q = tail_average(f);
        double send = f.support_end();

        auto logP = [&](double y) {
            double v = a(std::exp(y));
            return v > 0 ? 2.0 * std::log(v) : -inf;
        };
        double lp = std::sqrt(
            integrate_full(logP, f.breaks, inf, 1e-6, EndHint{0.0, 0.0}, EndHint{-2.0, 0.0})
                .value);
        expect(lp <= 64.0 * cp * rhs,
               "P envelope broken at sample " + std::to_string(i) + ": " + fmt(lp) + " vs " +
                   fmt(rhs));

        auto logQ = [&](double y) {
            double v = q(std::exp(y));
            return v > 0 ? 2.0 * std::log(v) : -inf;
        };
        double lq = std::sqrt(
            integrate_full(logQ, f.breaks, send, 1e-6, EndHint{0.0, -2.0}, EndHint{}).value);
        expect(lq <= 64.0 * cq * rhs,
               "Q envelope broken at sample " + std::to_string(i) + ": " + fmt(lq) + " vs " +
                   fmt(rhs));

        auto logS = [&](double y) {
            double v = stieltjes(f, std::exp(y));
            return v > 0 ? 2.0 * std::log(v) : -inf;
        };
        double ls = std::sqrt(
            integrate_full(logS, f.breaks, inf, 1e-6, EndHint{0.0, -2.0}, EndHint{-2.0, 0.0})
                .value);
        expect(ls <= 64.0 * ks * rhs,
               "S envelope broken at sample " + std::to_string(i) + ": " + fmt(ls) + " vs " +
                   fmt(rhs));
    }
}

// ---- 6: embedding goldens ----

void embedding_goldens() {
    PiecewisePowerWeight one = power_weight(0.0);
    expect(embedding_norm(2.0, one, 2.0, one) == 1.0, "identical flat spaces must give 1");
    PiecewisePowerWeight tp;
    tp.pieces = {WeightPiece{0.0, 1.0, 1.0, 0.25}, WeightPiece{1.0, inf, 1.0, -0.5}};
    tp.validate();
    expect(embedding_norm(2.2, tp, 2.2, tp) == 1.0, "identical two-piece spaces must give 1");

    double golden = std::pow(4.0 / 3.0, 1.0 / 3.0) / std::sqrt(2.0);
    double got = embedding_norm(2.0, one, 3.0, power_weight(0.5));
    expect(std::abs(got - golden) < 1e-6,
           "embedding golden " + fmt(got) + ", want " + fmt(golden));
    expect(embedding_norm(2.0, one, 3.0, one) == inf,
           "mismatched exponents must give an infinite norm");
}

// ---- 7: growth indices ----

void chain(const IndexReport& rep, const std::string& tag) {
    expect(0.0 <= rep.i_lower && rep.i_lower <= rep.fundamental_i &&
               rep.fundamental_i <= rep.fundamental_I && rep.fundamental_I <= rep.I_upper &&
               rep.I_upper <= 1.0,
           "index chain broken for " + tag);
}

void boyd_battery() {
    for (double p : kPs) {
        for (double alpha : {-0.5, 0.0, (p - 1.0) / 2.0}) {
            IndexReport rep = boyd_indices(p, power_weight(alpha));
            double want = (alpha + 1.0) / p;
            expect(std::abs(rep.i_lower - want) < 1e-3 && std::abs(rep.I_upper - want) < 1e-3,
                   "power indices off for p=" + fmt(p) + " alpha=" + fmt(alpha) + ": [" +
                       fmt(rep.i_lower) + ", " + fmt(rep.I_upper) + "] want " + fmt(want));
            chain(rep, "p=" + fmt(p) + " alpha=" + fmt(alpha));
        }
    }
    Rng rng(17);
    for (int i = 0; i < 4; ++i) {
        double p = rng.uniform(1.5, 3.0);
        PiecewisePowerWeight w = random_weight(rng, p, 3);
        chain(boyd_indices(p, w), "random weight " + std::to_string(i));
    }

    PiecewisePowerWeight two;
    two.pieces = {WeightPiece{0.0, 1.0, 1.0, 0.0}, WeightPiece{1.0, inf, 1.0, 0.5}};
    two.validate();
    const PiecewisePowerWeight hs[] = {power_weight(0.0), power_weight(0.5), two};
    for (const PiecewisePowerWeight& w : hs) {
        for (int k = 0; k < 30; ++k) {
            double t1 = rng.log_uniform(1e-3, 1e3);
            double t2 = rng.log_uniform(1e-3, 1e3);
            double lhs = dilation_norm(2.0, w, t1 * t2);
            double rhs = dilation_norm(2.0, w, t1) * dilation_norm(2.0, w, t2);
            expect(lhs <= rhs * 1.01, "submultiplicativity broken at t1=" + fmt(t1) +
                                          " t2=" + fmt(t2) + ": " + fmt(lhs) + " vs " + fmt(rhs));
        }
    }
}

// ---- 8: contraction admissibility ----

void cz_goldens() {
    CzReport rep = cz_admissible(2.0, power_weight(0.0));
    expect(rep.admissible, "flat weight must be admissible");
    expect(rep.c_star.has_value() && std::abs(*rep.c_star - 0.61803) < 1e-3,
           "flat c_star " + (rep.c_star ? fmt(*rep.c_star) : std::string("none")) +
               ", want 0.61803");

    PiecewisePowerWeight bad;
    bad.pieces = {WeightPiece{0.0, 1.0, 1.0, 0.0}, WeightPiece{1.0, inf, 1.0, 1.0}};
    bad.validate();
    bool threw = false;
    try {
        cz_admissible(2.0, bad);
    } catch (const std::domain_error&) {
        threw = true;
    }
    expect(threw, "hypothesis violation must raise a precondition error");
}

// ---- 9: dual-weight balance ----

void balance_consistency() {
    for (double p : kPs) {
        for (double alpha : {-0.5, 0.0, (p - 1.0) / 2.0}) {
            PiecewisePowerWeight w = power_weight(alpha);
            for (int k = 0; k < 25; ++k) {
                double t = std::pow(10.0, -6.0 + k * 0.5);
                BalanceReport b = dual_weight_balance(p, w, t);
                expect(b.kernel_product >= 0.1 && b.kernel_product <= 10.0,
                       "two-kernel product " + fmt(b.kernel_product) + " out of [0.1, 10] at p=" +
                           fmt(p) + " alpha=" + fmt(alpha) + " t=" + fmt(t));
                expect(b.domination_ok, "tail domination failed at p=" + fmt(p) +
                                            " alpha=" + fmt(alpha) + " t=" + fmt(t));
            }
        }
    }
}

// ---- 10: determinism and schema ----

void determinism_and_schema() {
    const char* flat = R"({"b": "inf", "pieces": [{"lo": 0, "hi": "inf", "coeff": 1, "exp": 0}]})";
    const char* sqrtw =
        R"({"b": "inf", "pieces": [{"lo": 0, "hi": "inf", "coeff": 1, "exp": 0.5}]})";
    const char* linear =
        R"({"b": "inf", "pieces": [{"lo": 0, "hi": "inf", "coeff": 1, "exp": 1}]})";
    json w = json::parse(flat);
    std::vector<json> cfgs;
    cfgs.push_back({{"command", "dual-weight"},
                    {"p", 2.0},
                    {"weight", w},
                    {"grid", {{"decades_lo", -4.0}, {"decades_hi", 4.0}, {"points_per_decade", 4}}}});
    cfgs.push_back({{"command", "indices"}, {"p", 2.0}, {"weight", w}});
    cfgs.push_back({{"command", "cz-check"}, {"p", 2.0}, {"weight", w}});
    cfgs.push_back({{"command", "validate"}, {"p", 2.0}, {"weight", json::parse(linear)}});
    cfgs.push_back({{"command", "norm"},
                    {"p", 2.0},
                    {"weight", w},
                    {"function", {{"breaks", {0.0, 1.0}}, {"values", {1.0}}}}});
    cfgs.push_back({{"command", "dual-check"},
                    {"p", 2.0},
                    {"weight", w},
                    {"seed", 7},
                    {"budget", 6},
                    {"grid", {{"decades_lo", -6.0}, {"decades_hi", 6.0}, {"points_per_decade", 8}}}});
    cfgs.push_back({{"command", "embed"},
                    {"p", 2.0},
                    {"q", 3.0},
                    {"weight", w},
                    {"weight2", json::parse(sqrtw)}});
    cfgs.push_back({{"command", "hardy"}, {"p", 2.0}, {"q", 2.0}, {"u", w}, {"v", w}});
    cfgs.push_back({{"command", "stieltjes"}, {"p", 2.0}, {"q", 2.0}, {"u", w}, {"v", w}});
    cfgs.push_back({{"command", "report-all"},
                    {"p", 2.0},
                    {"q", 3.0},
                    {"weight", w},
                    {"weight2", json::parse(sqrtw)},
                    {"u", w},
                    {"v", w},
                    {"function", {{"breaks", {0.0, 1.0}}, {"values", {1.0}}}},
                    {"seed", 1},
                    {"budget", 4},
                    {"grid", {{"decades_lo", -3.0}, {"decades_hi", 3.0}, {"points_per_decade", 4}}}});

    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        RunConfig cfg = parse_config(cfgs[i]);
        RunOutcome a = run(cfg);
        RunOutcome b = run(cfg);
        expect(report_fingerprint(a.report) == report_fingerprint(b.report),
               "repeated run differs for command " + cfg.command);
        auto errors = schema_validate(report_schema(), a.report);
        expect(errors.empty(), "schema violation for command " + cfg.command + ": " +
                                   (errors.empty() ? "" : errors.front()));
    }
}

struct Criterion {
    const char* name;
    void (*body)();
    double budget_s;  // 0 means no pinned budget
};

}  // namespace

int main() {
    const Criterion crits[] = {
        {"dual-weight goldens: power-law slopes and the flat constant", dual_weight_goldens, 5.0},
        {"bracket identity against independent quadrature", bracket_identity, 5.0},
        {"associate norm: oracle and dual functional agree within band", associate_equivalence,
         120.0},
        {"combined operator sandwiched by the averaging pair", sandwich_bounds, 10.0},
        {"operator constants: unit goldens and sampled envelope", operator_envelope, 60.0},
        {"embedding norm goldens", embedding_goldens, 10.0},
        {"growth indices: power battery, chain, submultiplicativity", boyd_battery, 30.0},
        {"contraction admissibility: golden threshold and precondition", cz_goldens, 30.0},
        {"dual-weight balance: two-kernel product and tail domination", balance_consistency,
         60.0},
        {"determinism and report schema", determinism_and_schema, 0.0},
    };
    int failed = 0;
    int idx = 0;
    for (const Criterion& c : crits) {
        ++idx;
        notes.clear();
        auto t0 = std::chrono::steady_clock::now();
        try {
            c.body();
        } catch (const std::exception& e) {
            expect(false, std::string("unexpected exception: ") + e.what());
        }
        double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && dt > c.budget_s)
            expect(false, "runtime " + fmt(dt) + " s exceeded budget " + fmt(c.budget_s) + " s");
        bool ok = notes.empty();
        std::printf("%2d %s %s (%.2f s)\n", idx, ok ? "PASS" : "FAIL", c.name, dt);
        for (const std::string& note : notes) std::printf("      - %s\n", note.c_str());
        if (!ok) ++failed;
    }
    if (failed > 0) std::printf("%d of 10 checks failed\n", failed);
    return failed == 0 ? 0 : 1;
}
