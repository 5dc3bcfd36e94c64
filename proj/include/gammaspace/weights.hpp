#pragma once

// Piecewise-power weights on (0, b) and the exact moment calculus the rest of
// the library is built on.  Every weight is a finite list of pieces c*t^e, so
// all one-dimensional moments have closed forms; quadrature only ever enters
// through composite integrands.

#include <gammaspace/util.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gammaspace {

struct WeightPiece {
    double lo = 0.0;
    double hi = inf;
    double coeff = 1.0;
    double exp = 0.0;
};

struct PiecewisePowerWeight {
    double b = inf;                    // right end of the domain (0, b)
    std::vector<WeightPiece> pieces;   // tile (0, b) in order

    // Invariants: pieces tile (0,b) contiguously, breaks strictly increase,
    // coeff > 0, exponents finite, head exponent > -1 (local integrability).
    void validate() const {
        if (!(b > 0)) throw std::invalid_argument("weight: b must be positive");
        if (pieces.empty()) throw std::invalid_argument("weight: no pieces");
        if (pieces.front().lo != 0.0)
            throw std::invalid_argument("weight: first piece must start at 0");
        if (pieces.back().hi != b)
            throw std::invalid_argument("weight: last piece must end at b");
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const WeightPiece& pc = pieces[i];
            if (!(pc.lo < pc.hi))
                throw std::invalid_argument("weight: piece bounds must increase");
            if (i + 1 < pieces.size() && pieces[i + 1].lo != pc.hi)
                throw std::invalid_argument("weight: pieces must tile without gaps");
            if (!(pc.coeff > 0) || !std::isfinite(pc.coeff))
                throw std::invalid_argument("weight: coeff must be positive and finite");
            if (!std::isfinite(pc.exp))
                throw std::invalid_argument("weight: exponent must be finite");
        }
        if (!(pieces.front().exp > -1.0))
            throw std::invalid_argument("weight: head exponent must exceed -1");
    }

    static PiecewisePowerWeight power(double coeff, double e, double b_ = inf) {
        PiecewisePowerWeight w;
        w.b = b_;
        w.pieces = {WeightPiece{0.0, b_, coeff, e}};
        w.validate();
        return w;
    }

    const WeightPiece& piece_at(double t) const {
        for (const WeightPiece& pc : pieces)
            if (t <= pc.hi || &pc == &pieces.back()) return pc;
        return pieces.back();
    }

    double operator()(double t) const {
        const WeightPiece& pc = piece_at(t);
        return pc.coeff * std::pow(t, pc.exp);
    }

    double log_value(double log_t) const {
        const WeightPiece& pc = piece_at(std::exp(log_t));
        return std::log(pc.coeff) + pc.exp * log_t;
    }
};

// Pointwise power of a weight stays in the class: (c t^e)^s = c^s t^{e s}.
inline PiecewisePowerWeight pow_weight(const PiecewisePowerWeight& w, double s) {
    PiecewisePowerWeight out;
    out.b = w.b;
    out.pieces.reserve(w.pieces.size());
    for (const WeightPiece& pc : w.pieces)
        out.pieces.push_back(WeightPiece{pc.lo, pc.hi, std::pow(pc.coeff, s), pc.exp * s});
    // A power can push the head exponent to -1 or below; the result is then a
    // legitimate non-integrable density, so skip validate() and let moment()
    // report divergences as +inf.
    return out;
}

namespace detail {

// ∫_{lo}^{hi} c t^{e} dt over one piece, exact.  Divergence returns +inf.
inline double piece_moment(double c, double e, double lo, double hi) {
    double kappa = e + 1.0;
    if (lo == hi) return 0.0;
    if (lo == 0.0) {
        if (!(kappa > 0)) return inf;
        if (hi == inf) return inf;
        return c * std::exp(kappa * std::log(hi)) / kappa;
    }
    if (hi == inf) {
        if (!(kappa < 0)) return inf;
        return -c * std::exp(kappa * std::log(lo)) / kappa;
    }
    double lr = std::log(hi / lo);
    if (kappa == 0.0) return c * lr;
    // c*(hi^k - lo^k)/k written to avoid cancellation for k*lr near 0.
    return c * std::exp(kappa * std::log(lo)) * std::expm1(kappa * lr) / kappa;
}

}  // namespace detail

// ∫_{a0}^{a1} w(t) t^{r} dt, exact per piece.  Divergent integrals return
// +inf; arguments outside [0, b] or out of order are domain errors.
inline double moment(const PiecewisePowerWeight& w, double a0, double a1, double r) {
    if (std::isnan(a0) || std::isnan(a1) || a0 < 0 || a1 > w.b || a0 > a1)
        throw std::domain_error("moment: require 0 <= a0 <= a1 <= b");
    if (a0 == a1) return 0.0;
    double total = 0.0;
    for (const WeightPiece& pc : w.pieces) {
        double lo = std::max(a0, pc.lo), hi = std::min(a1, pc.hi);
        if (!(lo < hi)) continue;
        total += detail::piece_moment(pc.coeff, pc.exp + r, lo, hi);
        if (total == inf) return inf;
    }
    return total;
}

struct NontrivialityReport {
    bool nontrivial = false;          // weight admissible for this exponent
    bool phi_integral_finite = false;  // ∫_0^b w < ∞
    bool cz_hypothesis = false;        // ∫ w min(1,s^-p) < ∞ and ∫ w max(1,s^-p) = ∞
    std::string reason;                // names the failing condition when !nontrivial
};

// Admissibility of w for exponent p: the averaging bracket must be finite at
// every t (tail moment converges when b = ∞) yet blow up as a whole
// (∫_0^b w t^{-p} = ∞), otherwise the space degenerates.
inline NontrivialityReport validate_nontrivial(const PiecewisePowerWeight& w, double p) {
    w.validate();
    if (!(p > 1) || !std::isfinite(p))
        throw std::invalid_argument("validate_nontrivial: p must lie in (1, inf)");
    NontrivialityReport rep;
    rep.phi_integral_finite = moment(w, 0, w.b, 0) < inf;

    double mid = std::min(1.0, w.b);
    bool tail_ok = true;
    if (w.b == inf) tail_ok = moment(w, 1.0, inf, -p) < inf;
    bool head_div = moment(w, 0, mid, -p) == inf;
    bool total_div = head_div || (w.b < inf ? moment(w, 0, w.b, -p) == inf : false);

    double cz_fin = moment(w, 0, mid, 0) + (w.b > 1 ? moment(w, 1.0, w.b, -p) : 0.0);
    double cz_div = moment(w, 0, mid, -p);
    if (w.b > 1 && cz_div < inf) cz_div += moment(w, 1.0, w.b, 0);
    rep.cz_hypothesis = (cz_fin < inf) && (cz_div == inf);

    if (!tail_ok) {
        rep.reason = "tail moment of w(t) t^-p over (1, inf) diverges";
    } else if (!total_div) {
        rep.reason = "moment of w(t) t^-p over (0, b) converges";
    } else {
        rep.nontrivial = true;
    }
    return rep;
}

// The averaging bracket: Phi_p(t) = ∫_0^t w + t^p ∫_t^b w(s) s^{-p} ds.
inline double phi_bracket(const PiecewisePowerWeight& w, double p, double t) {
    if (!(t > 0) || !(t < w.b))
        throw std::domain_error("phi_bracket: require 0 < t < b");
    double tail = moment(w, t, w.b, -p);
    if (tail == inf)
        throw std::domain_error("phi_bracket: tail moment diverges, weight is trivial");
    return moment(w, 0, t, 0) + std::pow(t, p) * tail;
}

// Leading power behavior at an endpoint: value ~ coeff * t^exponent, with an
// optional logarithmic correction in the marginal case.
struct PowerAsym {
    double exponent = 0.0;
    double coeff = 0.0;
    bool has_log = false;
};

// Evaluates the bracket and its two halves in log space so that extreme
// arguments (far outside the break window) stay representable.
class BracketCalculus {
  public:
    BracketCalculus(PiecewisePowerWeight w_, double p_) : w(std::move(w_)), p(p_) {
        w.validate();
        c0 = w.pieces.front().coeff;
        a0 = w.pieces.front().exp;
        cI = w.pieces.back().coeff;
        aI = w.pieces.back().exp;
        t_first = w.pieces.front().hi;
        if (t_first == inf) t_first = 1.0;  // single piece on (0, inf)
        t_last = w.pieces.back().lo;
        if (t_last == 0.0) t_last = t_first;
        // Reference values for the asymptotic corrections.
        A_first = moment(w, 0, t_first, 0);
        B_first = moment(w, t_first, w.b, -p);
        if (w.b == inf) A_last = moment(w, 0, t_last, 0);
    }

    const PiecewisePowerWeight& weight() const { return w; }
    double exponent_p() const { return p; }

    double A(double t) const { return moment(w, 0, std::min(t, w.b), 0); }
    double B(double t) const {
        if (t >= w.b) return 0.0;
        return moment(w, t, w.b, -p);
    }
    double phi(double t) const {
        double tail = B(t);
        double tp = std::pow(t, p);
        return A(t) + (tail == 0.0 ? 0.0 : tp * tail);
    }

    double logA(double lt) const {
        double t = std::exp(lt);
        if (t > 0 && t < inf) {
            double a = A(t);
            if (a > 0 && a < inf) return std::log(a);
        }
        double kap = a0 + 1.0;
        if (t <= t_first) return std::log(c0 / kap) + kap * lt;  // exact head power
        // Tail branch (b = inf or overflow at huge t inside (0,b)).
        double kI = aI + 1.0;
        if (kI > 0) {
            double lead = cI / kI;
            double D = A_last - lead * std::exp(kI * std::log(t_last));
            return std::log(lead) + kI * lt + std::log1p(D / lead * std::exp(-kI * lt));
        }
        if (kI == 0.0) return std::log(A_last + cI * (lt - std::log(t_last)));
        double Ainf = A_last + (cI / (-kI)) * std::exp(kI * std::log(t_last));
        return std::log(Ainf) + std::log1p((cI / kI) * std::exp(kI * lt) / Ainf);
    }

    double logB(double lt) const {
        double t = std::exp(lt);
        if (t > 0 && t < inf && t < w.b) {
            double bb = B(t);
            if (bb == inf) return inf;
            if (bb > 0 && bb < inf) return std::log(bb);
        }
        if (t >= w.b) return -inf;
        if (t >= t_last) {  // b = inf single-tail region
            double dI = p - aI - 1.0;
            if (!(dI > 0)) return inf;
            return std::log(cI / dI) - dI * lt;
        }
        double d0 = p - a0 - 1.0;
        if (d0 > 0) {
            double lead = c0 / d0;
            double E = B_first - lead * std::exp(-d0 * std::log(t_first));
            return std::log(lead) - d0 * lt + std::log1p(E / lead * std::exp(d0 * lt));
        }
        if (d0 == 0.0) return std::log(B_first + c0 * (std::log(t_first) - lt));
        double kB = -d0;  // head-convergent: B(0+) finite
        double B0 = B_first + (c0 / kB) * std::exp(kB * std::log(t_first));
        return std::log(B0) + std::log1p(-(c0 / kB) * std::exp(kB * lt) / B0);
    }

    double log_phi(double lt) const {
        double lb = logB(lt);
        if (lb == inf) return inf;
        return log_sum_exp(logA(lt), p * lt + lb);
    }

    // Phi_p(t) ~ coeff * t^exponent as t -> 0+.
    PowerAsym asym_zero() const {
        double kap = a0 + 1.0, del = p - kap;
        if (del > 0) return {kap, c0 * (1.0 / kap + 1.0 / del), false};
        if (del == 0.0) return {p, c0, true};  // Phi ~ c0 t^p log(1/t)
        return {p, moment(w, 0, w.b, -p), false};
    }

    // Phi_p(t) ~ coeff * t^exponent as t -> inf (requires b = inf, tail convergent).
    PowerAsym asym_inf() const {
        if (w.b < inf) throw std::domain_error("asym_inf: requires b = inf");
        double kI = aI + 1.0, dI = p - kI;
        if (kI > 0) {
            if (!(dI > 0)) throw std::domain_error("asym_inf: tail moment diverges");
            return {kI, cI * (1.0 / kI + 1.0 / dI), false};
        }
        if (kI == 0.0) return {0.0, cI, true};  // Phi ~ cI log t
        return {0.0, moment(w, 0, inf, 0), false};
    }

  private:
    PiecewisePowerWeight w;
    double p;
    double c0, a0, cI, aI;
    double t_first, t_last;
    double A_first = 0, B_first = 0, A_last = 0;
};

struct GammaSpace {
    double p;
    double pprime;
    PiecewisePowerWeight weight;
    NontrivialityReport flags;

    GammaSpace(double p_, PiecewisePowerWeight w) : p(p_), weight(std::move(w)) {
        if (!(p > 1) || !std::isfinite(p))
            throw std::invalid_argument("GammaSpace: p must lie in (1, inf)");
        pprime = p / (p - 1.0);
        flags = validate_nontrivial(weight, p);
    }
};

}  // namespace gammaspace
