#pragma once

// Best-constant formulas for weighted inequalities: the sup-form constants
// for the averaging operators P and Q, the Stieltjes constant in both
// exponent ranges, and the norm of the embedding between two spaces built
// from averaged decreasing rearrangements.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "duality.hpp"
#include "functions.hpp"
#include "norms.hpp"
#include "operators.hpp"
#include "quadrature.hpp"
#include "random.hpp"
#include "util.hpp"
#include "weights.hpp"

namespace gammaspace {

namespace detail {

// Pieces of (w(t) t^s)^r. The result is a formal piecewise-power object:
// its head exponent may drop to -1 or below, so it is never validate()d,
// only fed to moment() and log_value().
inline PiecewisePowerWeight monomial_power(const PiecewisePowerWeight& w, double r, double s) {
    PiecewisePowerWeight out;
    out.b = w.b;
    out.pieces.reserve(w.pieces.size());
    for (const WeightPiece& pc : w.pieces)
        out.pieces.push_back({pc.lo, pc.hi, std::pow(pc.coeff, r), (pc.exp + s) * r});
    return out;
}

inline void push_break_logs(const PiecewisePowerWeight& w, std::vector<double>& out) {
    for (const WeightPiece& pc : w.pieces)
        if (pc.lo > 0 && std::isfinite(pc.lo)) out.push_back(std::log(pc.lo));
}

inline void push_breaks(const PiecewisePowerWeight& w, std::vector<double>& out) {
    for (const WeightPiece& pc : w.pieces)
        if (pc.lo > 0 && std::isfinite(pc.lo)) out.push_back(pc.lo);
}

// Inequality weights are arbitrary positive piecewise powers: unlike space
// weights they may fail local integrability at 0, so only the layout is
// checked, not the head exponent.
inline void check_weight_layout(const PiecewisePowerWeight& w) {
    if (!(w.b > 0)) throw std::invalid_argument("weight: b must be positive");
    if (w.pieces.empty()) throw std::invalid_argument("weight: no pieces");
    if (w.pieces.front().lo != 0.0 || w.pieces.back().hi != w.b)
        throw std::invalid_argument("weight: pieces must tile (0, b)");
    for (std::size_t i = 0; i < w.pieces.size(); ++i) {
        const WeightPiece& pc = w.pieces[i];
        if (!(pc.lo < pc.hi)) throw std::invalid_argument("weight: piece bounds must increase");
        if (i + 1 < w.pieces.size() && w.pieces[i + 1].lo != pc.hi)
            throw std::invalid_argument("weight: pieces must tile without gaps");
        if (!(pc.coeff > 0) || !std::isfinite(pc.coeff) || !std::isfinite(pc.exp))
            throw std::invalid_argument("weight: coeff must be positive, exponents finite");
    }
}

// ∫_0^∞ (t/(s+t))^q u(s) ds with the exact kernel.
inline double stieltjes_u_factor(const PiecewisePowerWeight& u, double q, double t,
                                 double rel_tol) {
    double lt = std::log(t);
    std::vector<double> cuts{t};
    push_breaks(u, cuts);
    auto logf = [&](double ly) { return u.log_value(ly) + q * (lt - log_sum_exp(ly, lt)); };
    EndHint head{u.pieces.front().exp, 0.0};
    EndHint tail{u.pieces.back().exp - q, 0.0};
    return integrate_full(logf, cuts, inf, rel_tol, head, tail).value;
}

// ∫_0^∞ m(s) (s+t)^{-pp} ds for a formal piecewise-power m.
inline double stieltjes_v_factor(const PiecewisePowerWeight& m, double pp, double t,
                                 double rel_tol) {
    double lt = std::log(t);
    std::vector<double> cuts{t};
    push_breaks(m, cuts);
    auto logf = [&](double ly) { return m.log_value(ly) - pp * log_sum_exp(ly, lt); };
    EndHint head{m.pieces.front().exp, 0.0};
    EndHint tail{m.pieces.back().exp - pp, 0.0};
    return integrate_full(logf, cuts, inf, rel_tol, head, tail).value;
}

}  // namespace detail

// Least constant in (∫ (u Pf)^q)^{1/q} <= C (∫ (v f)^p)^{1/p} on (0, b):
// sup over 0 < r < b of (∫_r^b (u/t)^q)^{1/q} (∫_0^r v^{-p'})^{1/p'}.
// The sup of the product of monotone power-piece integrals is located on a
// log grid; divergent or finite endpoint limits come from the exponents.
inline double hardy_P_constant(double p, double q, const PiecewisePowerWeight& u,
                               const PiecewisePowerWeight& v, double b) {
    if (!(p > 1) || !std::isfinite(p) || !std::isfinite(q))
        throw std::invalid_argument("hardy constant: require 1 < p <= q < inf");
    if (!(q >= p)) throw std::invalid_argument("hardy constant: range p > q is not supported");
    detail::check_weight_layout(u);
    detail::check_weight_layout(v);
    if (u.b != b || v.b != b)
        throw std::invalid_argument("hardy constant: weights must live on (0, b)");
    double pp = p / (p - 1.0);
    PiecewisePowerWeight uq = detail::monomial_power(u, q, -1.0);
    PiecewisePowerWeight vm = detail::monomial_power(v, -pp, 0.0);

    double k2z = vm.pieces.front().exp + 1.0;
    if (!(k2z > 0)) return inf;  // second factor infinite for every r
    double k1I = uq.pieces.back().exp + 1.0;
    if (b == inf && !(k1I < 0)) return inf;  // first factor infinite for every r

    double endpoint = 0.0;
    double k1z = uq.pieces.front().exp + 1.0;
    if (k1z < 0) {  // first factor blows up as r -> 0
        double zeta = k1z / q + k2z / pp;
        if (zeta < -1e-12) return inf;
        if (zeta <= 1e-12) {
            double c1 = uq.pieces.front().coeff / (-k1z);
            double c2 = vm.pieces.front().coeff / k2z;
            endpoint = std::pow(c1, 1.0 / q) * std::pow(c2, 1.0 / pp);
        }
    }
    if (b == inf) {
        double k2I = vm.pieces.back().exp + 1.0;
        if (k2I > 0) {  // second factor grows as r -> inf
            double zeta = k1I / q + k2I / pp;
            if (zeta > 1e-12) return inf;
            if (zeta >= -1e-12) {
                double c1 = uq.pieces.back().coeff / (-k1I);
                double c2 = vm.pieces.back().coeff / k2I;
                endpoint = std::max(endpoint,
                                    std::pow(c1, 1.0 / q) * std::pow(c2, 1.0 / pp));
            }
        }
    }

    double r_hi = (b == inf) ? 1e8 : b * (1.0 - 1e-12);
    double r_lo = std::min(1e-8, r_hi * 1e-6);
    std::vector<double> extra;
    detail::push_break_logs(u, extra);
    detail::push_break_logs(v, extra);
    auto logf = [&](double ly) {
        double r = std::exp(ly);
        double f1 = moment(uq, r, b, 0.0);
        double f2 = moment(vm, 0.0, r, 0.0);
        if (!(f1 > 0) || !(f2 > 0)) return -inf;
        return std::log(f1) / q + std::log(f2) / pp;
    };
    SupResult sup = log_grid_sup(logf, std::log(r_lo), std::log(r_hi), 16, extra);
    return std::max(endpoint, sup.value);
}

// Least constant in (∫ (u Qf)^q)^{1/q} <= C (∫ (v f)^p)^{1/p} on (0, b):
// sup over 0 < r < b of (∫_0^r u^q)^{1/q} (∫_r^b (t v)^{-p'})^{1/p'}.
inline double hardy_Q_constant(double p, double q, const PiecewisePowerWeight& u,
                               const PiecewisePowerWeight& v, double b) {
    if (!(p > 1) || !std::isfinite(p) || !std::isfinite(q))
        throw std::invalid_argument("hardy constant: require 1 < p <= q < inf");
    if (!(q >= p)) throw std::invalid_argument("hardy constant: range p > q is not supported");
    detail::check_weight_layout(u);
    detail::check_weight_layout(v);
    if (u.b != b || v.b != b)
        throw std::invalid_argument("hardy constant: weights must live on (0, b)");
    double pp = p / (p - 1.0);
    PiecewisePowerWeight uq = detail::monomial_power(u, q, 0.0);
    PiecewisePowerWeight vm = detail::monomial_power(v, -pp, 1.0);

    double k1z = uq.pieces.front().exp + 1.0;
    if (!(k1z > 0)) return inf;
    double k2I = vm.pieces.back().exp + 1.0;
    if (b == inf && !(k2I < 0)) return inf;

    double endpoint = 0.0;
    double k2z = vm.pieces.front().exp + 1.0;
    if (k2z < 0) {  // second factor blows up as r -> 0
        double zeta = k1z / q + k2z / pp;
        if (zeta < -1e-12) return inf;
        if (zeta <= 1e-12) {
            double c1 = uq.pieces.front().coeff / k1z;
            double c2 = vm.pieces.front().coeff / (-k2z);
            endpoint = std::pow(c1, 1.0 / q) * std::pow(c2, 1.0 / pp);
        }
    }
    if (b == inf) {
        double k1I = uq.pieces.back().exp + 1.0;
        if (k1I > 0) {  // first factor grows as r -> inf
            double zeta = k1I / q + k2I / pp;
            if (zeta > 1e-12) return inf;
            if (zeta >= -1e-12) {
                double c1 = uq.pieces.back().coeff / k1I;
                double c2 = vm.pieces.back().coeff / (-k2I);
                endpoint = std::max(endpoint,
                                    std::pow(c1, 1.0 / q) * std::pow(c2, 1.0 / pp));
            }
        }
    }

    double r_hi = (b == inf) ? 1e8 : b * (1.0 - 1e-12);
    double r_lo = std::min(1e-8, r_hi * 1e-6);
    std::vector<double> extra;
    detail::push_break_logs(u, extra);
    detail::push_break_logs(v, extra);
    auto logf = [&](double ly) {
        double r = std::exp(ly);
        double f1 = moment(uq, 0.0, r, 0.0);
        double f2 = moment(vm, r, b, 0.0);
        if (!(f1 > 0) || !(f2 > 0)) return -inf;
        return std::log(f1) / q + std::log(f2) / pp;
    };
    SupResult sup = log_grid_sup(logf, std::log(r_lo), std::log(r_hi), 16, extra);
    return std::max(endpoint, sup.value);
}

// Least constant in (∫ (Sf)^q u)^{1/q} <= K (∫ f^p v)^{1/p} on (0, ∞);
// here u and v enter as measures. For p <= q this is the sup over t of
//   A(t) = (∫ (t/(s+t))^q u(s) ds)^{1/q} (∫ v^{1-p'}(s) (s+t)^{-p'} ds)^{1/p'},
// located first through the split surrogate max(s,t) ~ s+t (exact moments,
// off by at most a factor 2 per bracket) and then refined on the exact
// kernel. For q < p it is the integral form
//   [∫ (F1^{1/p} F2^{1/p'})^{pq/(p-q)} u dt]^{1/q - 1/p}
// with the same two brackets, evaluated by nested quadrature.
inline double stieltjes_constant(double p, double q, const PiecewisePowerWeight& u,
                                 const PiecewisePowerWeight& v) {
    if (!(p > 1) || !(q > 1) || !std::isfinite(p) || !std::isfinite(q))
        throw std::invalid_argument("stieltjes constant: require p, q in (1, inf)");
    detail::check_weight_layout(u);
    detail::check_weight_layout(v);
    if (u.b != inf || v.b != inf)
        throw std::domain_error("stieltjes constant: requires b = inf");
    double pp = p / (p - 1.0);
    PiecewisePowerWeight vm = detail::monomial_power(v, 1.0 - pp, 0.0);

    double eu0 = u.pieces.front().exp, euI = u.pieces.back().exp;
    double ev0 = vm.pieces.front().exp, evI = vm.pieces.back().exp;
    // Either bracket infinite at one t is infinite at every t.
    if (!(eu0 > -1.0) || !(euI < q - 1.0)) return inf;
    if (!(ev0 > -1.0) || !(evI < pp - 1.0)) return inf;

    // Power behavior of the brackets at the ends.
    double x1z = std::min(eu0 + 1.0, q), x2z = std::min(ev0 + 1.0, pp) - pp;
    double x1I = std::max(euI + 1.0, 0.0), x2I = std::max(evI + 1.0, 0.0) - pp;

    if (p <= q) {
        double zeta0 = x1z / q + x2z / pp;
        double zetaI = x1I / q + x2I / pp;
        if (zeta0 < -1e-12 || zetaI > 1e-12) return inf;

        std::vector<double> extra;
        detail::push_break_logs(u, extra);
        detail::push_break_logs(v, extra);
        auto log_sur = [&](double ly) {
            double t = std::exp(ly);
            double f1 = moment(u, 0.0, t, 0.0) + std::pow(t, q) * moment(u, t, inf, -q);
            double f2 = std::pow(t, -pp) * moment(vm, 0.0, t, 0.0) + moment(vm, t, inf, -pp);
            if (!(f1 > 0) || !(f2 > 0)) return -inf;
            return std::log(f1) / q + std::log(f2) / pp;
        };
        SupResult sur = log_grid_sup(log_sur, std::log(1e-8), std::log(1e8), 16, extra);

        auto log_exact = [&](double ly) {
            double t = std::exp(ly);
            double f1 = detail::stieltjes_u_factor(u, q, t, 1e-8);
            double f2 = detail::stieltjes_v_factor(vm, pp, t, 1e-8);
            if (!(f1 > 0) || !(f2 > 0)) return -inf;
            return std::log(f1) / q + std::log(f2) / pp;
        };
        // Coarse exact sweep plus a dense window around the surrogate argmax;
        // the surrogate locates the sup within a bounded factor.
        std::vector<double> ys;
        for (double ly = std::log(1e-8); ly <= std::log(1e8) + 1e-9; ly += std::log(10.0) / 2)
            ys.push_back(ly);
        for (int j = -9; j <= 9; ++j)
            ys.push_back(sur.argmax + j * std::log(10.0) / 8);
        for (double e : extra) ys.push_back(e);
        if (std::abs(zeta0) <= 1e-12) {
            ys.push_back(std::log(1e-9));
            ys.push_back(std::log(1e-11));
        }
        if (std::abs(zetaI) <= 1e-12) {
            ys.push_back(std::log(1e9));
            ys.push_back(std::log(1e11));
        }
        double best = -inf, best_y = sur.argmax;
        for (double ly : ys) {
            double val = log_exact(ly);
            if (val > best) {
                best = val;
                best_y = ly;
            }
        }
        double step = std::log(10.0) / 8;
        SupResult fine = log_grid_sup(log_exact, best_y - step, best_y + step, 16);
        return std::max(std::exp(best), fine.value);
    }

    // q < p
    double r = p * q / (p - q);
    double eh = r * (x1z / p + x2z / pp) + eu0;
    double eT = r * (x1I / p + x2I / pp) + euI;
    if (!(eh > -1.0)) return inf;
    if (!(eT < -1.0)) return inf;
    std::vector<double> cuts;
    detail::push_breaks(u, cuts);
    detail::push_breaks(v, cuts);
    auto logf = [&](double ly) {
        double t = std::exp(ly);
        double f1 = detail::stieltjes_u_factor(u, q, t, 1e-7);
        double f2 = detail::stieltjes_v_factor(vm, pp, t, 1e-7);
        if (!(f1 > 0) || !(f2 > 0)) return -inf;
        return r * (std::log(f1) / p + std::log(f2) / pp) + u.log_value(ly);
    };
    QuadResult total = integrate_full(logf, cuts, inf, 1e-6, {eh, 0.0}, {eT, 0.0});
    if (!total.converged)
        throw QuadratureError("stieltjes constant: outer quadrature did not converge",
                              total.value > 0 ? total.abs_error / total.value : inf);
    return std::pow(total.value, 1.0 / q - 1.0 / p);
}

// Norm of the inclusion of the (p, w1) space into the (q, w2) space over
// (0, ∞), expressed through the two averaging brackets. For p <= q it is
// sup_t Phi2(t)^{1/q} / Phi1(t)^{1/p}; for q < p it is
// [∫ (Phi2/Phi1)^{q/(p-q)} w2 dt]^{1/q - 1/p}. Requires the source weight
// admissible for p with divergent integral; +inf when the spaces do not nest.
inline double embedding_norm(double p, const PiecewisePowerWeight& w1, double q,
                             const PiecewisePowerWeight& w2) {
    if (!(p > 1) || !(q > 1) || !std::isfinite(p) || !std::isfinite(q))
        throw std::invalid_argument("embedding norm: require p, q in (1, inf)");
    w1.validate();
    w2.validate();
    if (w1.b != inf || w2.b != inf)
        throw std::domain_error("embedding norm: requires b = inf");
    NontrivialityReport rep = validate_nontrivial(w1, p);
    if (!rep.nontrivial)
        throw std::domain_error("embedding norm: source weight inadmissible: " + rep.reason);
    if (rep.phi_integral_finite)
        throw std::domain_error("embedding norm: source weight must have divergent integral");

    if (p == q && w1.pieces.size() == w2.pieces.size()) {
        bool same = true;
        for (std::size_t i = 0; i < w1.pieces.size(); ++i) {
            const WeightPiece& a = w1.pieces[i];
            const WeightPiece& c = w2.pieces[i];
            same = same && a.lo == c.lo && a.hi == c.hi && a.coeff == c.coeff && a.exp == c.exp;
        }
        if (same) return 1.0;  // identical spaces
    }

    double e2I = w2.pieces.back().exp;
    if (!(e2I < q - 1.0)) return inf;  // target bracket infinite, target space trivial
    BracketCalculus c1(w1, p), c2(w2, q);
    PowerAsym a1z = c1.asym_zero(), a2z = c2.asym_zero();
    PowerAsym a1I = c1.asym_inf(), a2I = c2.asym_inf();

    if (p <= q) {
        double best = 0.0;
        double zeta0 = a2z.exponent / q - a1z.exponent / p;
        if (zeta0 < -1e-12) return inf;
        if (zeta0 <= 1e-12) {
            double ld = (a2z.has_log ? 1.0 / q : 0.0) - (a1z.has_log ? 1.0 / p : 0.0);
            if (ld > 0) return inf;
            if (ld == 0.0)
                best = std::pow(a2z.coeff, 1.0 / q) / std::pow(a1z.coeff, 1.0 / p);
        }
        double zetaI = a2I.exponent / q - a1I.exponent / p;
        if (zetaI > 1e-12) return inf;
        if (zetaI >= -1e-12) {
            double ld = (a2I.has_log ? 1.0 / q : 0.0) - (a1I.has_log ? 1.0 / p : 0.0);
            if (ld > 0) return inf;
            if (ld == 0.0)
                best = std::max(best,
                                std::pow(a2I.coeff, 1.0 / q) / std::pow(a1I.coeff, 1.0 / p));
        }
        std::vector<double> extra;
        detail::push_break_logs(w1, extra);
        detail::push_break_logs(w2, extra);
        auto logR = [&](double ly) { return c2.log_phi(ly) / q - c1.log_phi(ly) / p; };
        SupResult sup = log_grid_sup(logR, std::log(1e-8), std::log(1e8), 16, extra);
        return std::max(best, sup.value);
    }

    // q < p: marginal endpoint logs are not modeled; the exponent test is strict.
    double r = q / (p - q);
    double eh = (a2z.exponent - a1z.exponent) * r + w2.pieces.front().exp;
    double eT = (a2I.exponent - a1I.exponent) * r + e2I;
    if (!(eh > -1.0)) return inf;
    if (!(eT < -1.0)) return inf;
    std::vector<double> cuts;
    detail::push_breaks(w1, cuts);
    detail::push_breaks(w2, cuts);
    auto logf = [&](double ly) {
        return r * (c2.log_phi(ly) - c1.log_phi(ly)) + w2.log_value(ly);
    };
    QuadResult total = integrate_full(logf, cuts, inf, 1e-9, {eh, 0.0}, {eT, 0.0});
    if (!total.converged)
        throw QuadratureError("embedding norm: quadrature did not converge",
                              total.value > 0 ? total.abs_error / total.value : inf);
    return std::pow(total.value, 1.0 / q - 1.0 / p);
}

// Empirical counterpart of embedding_norm: the largest ratio of the target
// norm to the source norm over seeded random step functions. Requires a
// finite embedding norm; identical spaces give exactly 1.
inline double embedding_empirical_check(double p, const PiecewisePowerWeight& w1, double q,
                                        const PiecewisePowerWeight& w2, std::size_t samples) {
    double norm = embedding_norm(p, w1, q, w2);
    if (!std::isfinite(norm))
        throw std::domain_error("embedding check: embedding norm must be finite");
    Rng rng(0x11d5eedULL);
    double best = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        StepFunction f = random_step(rng);
        if (f.integral() == 0.0) continue;
        double den = gamma_norm(p, w1, f);
        if (!(den > 0) || !std::isfinite(den)) continue;
        best = std::max(best, gamma_norm(q, w2, f) / den);
    }
    return best;
}

// Ratio carried by the reduced transfer inequality behind embedding_norm:
//   (∫ (Sh)^q w2)^{1/q} / (∫ h^p psi1^{1-p})^{1/p}
// with psi1 the dual weight of (p, w1). The sup of this ratio over h is
// comparable to the embedding norm.
inline double stieltjes_form_ratio(double p, const PiecewisePowerWeight& w1, double q,
                                   const PiecewisePowerWeight& w2, const StepFunction& h,
                                   double rel_tol = 1e-8) {
    if (!(q > 1) || !std::isfinite(q))
        throw std::invalid_argument("transfer ratio: require q in (1, inf)");
    w2.validate();
    if (w2.b != inf) throw std::domain_error("transfer ratio: requires b = inf");
    h.validate();
    if (h.integral() == 0.0) return 0.0;
    DualWeight psi = dual_weight(p, w1);

    double e20 = w2.pieces.front().exp, e2I = w2.pieces.back().exp;
    std::vector<double> cuts(h.breaks.begin() + 1, h.breaks.end());
    detail::push_breaks(w2, cuts);
    auto lognum = [&](double ly) {
        double s = stieltjes(h, std::exp(ly));
        if (!(s > 0)) return -inf;
        return q * std::log(s) + w2.log_value(ly);
    };
    QuadResult num = integrate_full(lognum, cuts, inf, rel_tol, {e20, 0.0}, {e2I - q, 0.0});

    // h has bounded support, so the denominator integral truncates there.
    std::vector<double> seg{h.breaks.begin() + 1, h.breaks.end()};
    detail::push_breaks(w1, seg);
    std::sort(seg.begin(), seg.end());
    double end = h.support_end();
    QuadResult den;
    double prev = 0.0;
    for (double c : seg) {
        if (!(c > prev) || c > end) continue;
        double hv = h(0.5 * (std::max(prev, c / 2) + c));
        if (hv > 0) {
            auto logseg = [&](double ly) {
                return p * std::log(h(std::exp(ly))) + (1.0 - p) * psi.log_eval(ly);
            };
            if (prev == 0.0) {
                den += integrate_head(logseg, std::log(c), rel_tol,
                                      {(1.0 - p) * psi.asym_zero(), 0.0});
            } else {
                den += integrate_log(logseg, std::log(prev), std::log(c), rel_tol);
            }
        }
        prev = c;
    }
    if (!(den.value > 0)) return inf;
    return std::pow(num.value, 1.0 / q) / std::pow(den.value, 1.0 / p);
}

}  // namespace gammaspace
