#pragma once

// The associate space machinery: the dual weight
//
//   psi(t) = t^{p + p' - 1} A(t) B(t) / Phi_p(t)^{p'+1},
//
// the two-term associate norm it induces, a brute-force lower oracle for the
// true associate norm, and the pointwise identities that tie the dual weight
// back to the averaging operators.

#include <gammaspace/norms.hpp>
#include <gammaspace/operators.hpp>
#include <gammaspace/quadrature.hpp>
#include <gammaspace/weights.hpp>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace gammaspace {

class DualWeight {
  public:
    DualWeight(double p_, PiecewisePowerWeight w_) : p(p_), calc(std::move(w_), p_) {
        if (!(p > 1) || !std::isfinite(p))
            throw std::invalid_argument("dual weight: p must lie in (1, inf)");
        pp = p / (p - 1.0);
        auto flags = validate_nontrivial(calc.weight(), p);
        if (!flags.nontrivial)
            throw std::domain_error("dual weight: weight is trivial (" + flags.reason + ")");

        double a0 = calc.weight().pieces.front().exp;
        log0 = (a0 == p - 1.0);
        e0 = log0 ? -1.0 : -a0 * (pp - 1.0);
        if (calc.weight().b == inf) {
            double aI = calc.weight().pieces.back().exp;
            logI = (aI == -1.0);
            if (logI) {
                eI = pp - 1.0;
            } else if (aI > -1.0) {
                eI = -aI * (pp - 1.0);
            } else {
                eI = pp + aI;
            }
        }
    }

    double exponent() const { return p; }
    double conjugate() const { return pp; }
    const PiecewisePowerWeight& base_weight() const { return calc.weight(); }
    const BracketCalculus& bracket() const { return calc; }
    double domain_end() const { return calc.weight().b; }

    // psi ~ C t^{asym_zero} as t -> 0 (log correction when marginal).
    double asym_zero() const { return e0; }
    bool log_at_zero() const { return log0; }
    double asym_inf() const {
        if (calc.weight().b < inf) throw std::domain_error("asym_inf: requires b = inf");
        return eI;
    }
    bool log_at_inf() const { return logI; }

    double log_eval(double lt) const {
        return (p + pp - 1.0) * lt + calc.logA(lt) + calc.logB(lt) -
               (pp + 1.0) * calc.log_phi(lt);
    }

    double operator()(double t) const {
        if (!(t > 0) || !(t < calc.weight().b))
            throw std::domain_error("dual weight: require 0 < t < b");
        return std::exp(log_eval(std::log(t)));
    }

    // Hints for integrands psi(t) t^r at the two ends.
    EndHint hint_zero(double r) const { return {e0 + r, log0 ? pp : 0.0}; }
    EndHint hint_inf(double r) const { return {eI + r, logI ? pp : 0.0}; }

    // ∫_0^t psi(s) s^r ds.
    QuadResult head_integral(double t, double r, double tol) const {
        auto logf = [this, r](double y) { return log_eval(y) + r * y; };
        std::vector<double> cuts;
        for (const auto& pc : base_weight().pieces)
            if (pc.lo > 0 && pc.lo < t) cuts.push_back(std::log(pc.lo));
        double lt = std::log(t);
        QuadResult q = integrate_head(logf, cuts.empty() ? lt : cuts.front(), tol, hint_zero(r));
        double prev = cuts.empty() ? lt : cuts.front();
        for (std::size_t i = 1; i < cuts.size(); ++i) {
            q += integrate_log(logf, prev, cuts[i], tol);
            prev = cuts[i];
        }
        if (prev < lt) q += integrate_log(logf, prev, lt, tol);
        return q;
    }

    // ∫_t^b psi(s) s^r ds.
    QuadResult tail_integral(double t, double r, double tol) const {
        auto logf = [this, r](double y) { return log_eval(y) + r * y; };
        double b = domain_end();
        std::vector<double> cuts;
        for (const auto& pc : base_weight().pieces)
            if (pc.lo > t && pc.lo < b) cuts.push_back(std::log(pc.lo));
        double lt = std::log(t);
        QuadResult q;
        double prev = lt;
        for (double c : cuts) {
            q += integrate_log(logf, prev, c, tol);
            prev = c;
        }
        if (b == inf) {
            q += integrate_tail(logf, prev, tol, hint_inf(r));
        } else if (std::exp(prev) < b) {
            q += integrate_log(logf, prev, std::log(b), tol);
        }
        return q;
    }

  private:
    double p, pp;
    BracketCalculus calc;
    double e0 = 0.0, eI = 0.0;
    bool log0 = false, logI = false;
};

inline DualWeight dual_weight(double p, const PiecewisePowerWeight& w) {
    return DualWeight(p, w);
}

namespace detail {

// ∫_0^b (P g)(t)^q psi(t) dt for an arbitrary step g; the running average is
// affine in 1/t on each cell and constant beyond the support, so only the
// dual weight needs quadrature.
inline QuadResult average_power_integral(const DualWeight& psi, double q,
                                         const StepFunction& g, double tol) {
    QuadResult out;
    if (g.values.empty()) return out;
    auto avg = averaged(g);
    if (avg.total == 0.0) return out;
    double b = psi.domain_end();

    if (g.values[0] > 0.0) {
        double x1 = std::min(g.breaks[1], b);
        auto head = psi.head_integral(x1, 0.0, tol);
        double s = std::pow(g.values[0], q);
        head.value *= s;
        head.abs_error *= s;
        out += head;
    }

    for (std::size_t i = 1; i < g.values.size(); ++i) {
        double lo = g.breaks[i];
        if (lo >= b) break;
        double hi = std::min(g.breaks[i + 1], b);
        double A = avg.A[i], B = avg.B[i];
        if (A == 0.0 && B == 0.0) continue;
        auto logf = [&](double y) {
            return q * std::log(A + B * std::exp(-y)) + psi.log_eval(y);
        };
        std::vector<double> cuts = {lo};
        for (const auto& pc : psi.base_weight().pieces)
            if (pc.lo > lo && pc.lo < hi) cuts.push_back(pc.lo);
        cuts.push_back(hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
            out += integrate_log(logf, std::log(cuts[k]), std::log(cuts[k + 1]), tol);
    }

    double X = g.breaks.back();
    if (X < b) {
        auto tail = psi.tail_integral(X, -q, tol);
        double s = std::pow(avg.total, q);
        tail.value *= s;
        tail.abs_error *= s;
        out += tail;
    }
    return out;
}

// Gamma norm with exponent q and the dual weight as the measure; for a
// decreasing profile the level average equals the running average.
inline NormInfo dual_gamma_part(const DualWeight& psi, double q, const DecreasingStep& g,
                                double tol) {
    auto sum = average_power_integral(psi, q, g, tol);
    NormInfo out;
    out.value = std::pow(sum.value, 1.0 / q);
    out.abs_error = (sum.value > 0) ? out.value * (sum.abs_error / sum.value) / q : 0.0;
    out.converged = sum.converged;
    return out;
}

}  // namespace detail

// Two-term associate norm: the gamma norm against the dual weight with the
// conjugate exponent, plus the L1 correction when the base weight is
// integrable.
inline double dual_norm(double p, const PiecewisePowerWeight& w, const StepFunction& g,
                        double tol = 1e-9) {
    DualWeight psi(p, w);
    auto gs = rearrange(w.b < inf ? clip_to(g, w.b) : g);
    if (gs.values.empty()) return 0.0;
    auto part = detail::dual_gamma_part(psi, psi.conjugate(), gs, tol);
    if (!part.converged)
        throw QuadratureError("dual norm: quadrature did not reach tolerance",
                              part.value > 0 ? part.abs_error / part.value : inf);
    double total_phi = moment(w, 0, w.b, 0);
    double corr = (total_phi < inf) ? gs.integral() / std::pow(total_phi, 1.0 / p) : 0.0;
    return part.value + corr;
}

struct OracleResult {
    double value = 0.0;
    std::string family;  // which candidate family attained the value
};

namespace detail {

// Fixed-break gamma norm evaluator for the ascent loop: the break set is
// frozen once, so each evaluation is a cumulative sum plus GL7 panels with
// precomputed nodes and weight values.
class FixedGridNorm {
  public:
    FixedGridNorm(const PiecewisePowerWeight& w, double p_, std::vector<double> breaks)
        : p(p_), x(std::move(breaks)) {
        n = x.size() - 1;
        head_moment = moment(w, 0, std::min(x[1], w.b), 0);
        tail_moment = (x[n] < w.b) ? moment(w, x[n], w.b, -p) : 0.0;
        static constexpr double gn[7] = {-0.9491079123427585, -0.7415311855993945,
                                         -0.4058451513773972, 0.0,
                                         0.4058451513773972,  0.7415311855993945,
                                         0.9491079123427585};
        static constexpr double gw[7] = {0.1294849661688697, 0.2797053914892766,
                                         0.3818300505051189, 0.4179591836734694,
                                         0.3818300505051189, 0.2797053914892766,
                                         0.1294849661688697};
        nodes.resize(n * 7);
        factors.resize(n * 7, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            if (x[i] >= w.b) break;
            double la = std::log(x[i]), lb = std::log(std::min(x[i + 1], w.b));
            double mid = 0.5 * (la + lb), half = 0.5 * (lb - la);
            for (int k = 0; k < 7; ++k) {
                double y = mid + half * gn[k];
                double t = std::exp(y);
                nodes[i * 7 + k] = t;
                factors[i * 7 + k] = gw[k] * half * w(t) * t;  // dt = t dy
            }
        }
    }

    // Norm^p of the decreasing profile v (one value per cell).
    double power_sum(const std::vector<double>& v) const {
        double sum = std::pow(v[0], p) * head_moment;
        double cum = v[0] * (x[1] - x[0]);
        for (std::size_t i = 1; i < n; ++i) {
            double A = v[i], B = cum - v[i] * x[i];
            for (int k = 0; k < 7; ++k) {
                double f = factors[i * 7 + k];
                if (f != 0.0) sum += f * std::pow(A + B / nodes[i * 7 + k], p);
            }
            cum += v[i] * (x[i + 1] - x[i]);
        }
        sum += std::pow(cum, p) * tail_moment;
        return sum;
    }

    const std::vector<double>& breaks() const { return x; }

  private:
    double p;
    std::vector<double> x;
    std::size_t n;
    double head_moment, tail_moment;
    std::vector<double> nodes, factors;
};

}  // namespace detail

// Brute-force lower bound for the associate norm sup ∫ f g / rho(f) over
// decreasing step profiles f.  Combines exact indicator candidates, the
// near-extremal profile from the dual-weight construction, the flat-profile
// limit, and budgeted coordinate ascent; every reported value is a genuine
// ratio, so the result never exceeds the true associate norm (up to the
// norm quadrature tolerance).
inline OracleResult associate_norm_oracle(double p, const PiecewisePowerWeight& w,
                                          const StepFunction& g, int budget = 50,
                                          int per_decade = 16) {
    auto flags = validate_nontrivial(w, p);
    if (!flags.nontrivial)
        throw std::domain_error("oracle: weight is trivial (" + flags.reason + ")");
    if (per_decade < 1) throw std::invalid_argument("oracle: per_decade must be positive");
    auto gs = rearrange(w.b < inf ? clip_to(g, w.b) : g);
    if (gs.values.empty()) return {0.0, "zero"};

    OracleResult best{0.0, "none"};
    double X = gs.support_end();
    DualWeight psi(p, w);
    double pp = psi.conjugate();

    // Candidate grid: per_decade points per decade over [1e-6 X, 1e3 X] plus
    // the breaks of g*.
    std::vector<double> grid;
    {
        double lo = std::log(1e-6 * X), hi = std::log(std::min(1e3 * X, 0.999999 * w.b));
        int npts = static_cast<int>(std::ceil((hi - lo) / std::log(10.0) * per_decade)) + 1;
        for (int i = 0; i < npts; ++i) grid.push_back(std::exp(lo + (hi - lo) * i / (npts - 1)));
        for (std::size_t i = 1; i < gs.breaks.size(); ++i)
            if (gs.breaks[i] < w.b) grid.push_back(gs.breaks[i]);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }

    // Family (a): indicators, exact in both numerator and denominator.
    double best_s = grid.front();
    for (double s : grid) {
        double ratio = gs.integral_to(s) / std::pow(phi_bracket(w, p, s), 1.0 / p);
        if (ratio > best.value) {
            best = {ratio, "indicator"};
            best_s = s;
        }
    }

    // Flat-profile limit s -> b when the weight is integrable.
    double total_phi = moment(w, 0, w.b, 0);
    if (total_phi < inf) {
        double ratio = gs.integral() / std::pow(total_phi, 1.0 / p);
        if (ratio > best.value) best = {ratio, "flat-limit"};
    }

    // Family (b): discretize f = Q h0 with h0 = (P g*)^{p'-1} psi.
    auto Pg = averaged(gs);
    StepFunction h0;
    h0.breaks = {0.0};
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double tm = std::sqrt(grid[i] * grid[i + 1]);
        double v = std::pow(Pg(tm), pp - 1.0) * std::exp(psi.log_eval(std::log(tm)));
        h0.values.push_back(std::isfinite(v) ? v : 0.0);
        h0.breaks.push_back(grid[i + 1]);
    }
    DecreasingStep fb;
    {
        auto q = tail_average(h0);
        fb.breaks = {0.0};
        double prev = inf;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            double tm = std::sqrt(grid[i] * grid[i + 1]);
            double v = std::min(q(tm), prev);
            prev = v;
            fb.values.push_back(v);
            fb.breaks.push_back(grid[i + 1]);
        }
        while (!fb.values.empty() && fb.values.back() <= 0.0) {
            fb.values.pop_back();
            fb.breaks.pop_back();
        }
    }
    if (!fb.values.empty() && fb.values.front() > 0.0) {
        double num = step_pair(fb, gs);
        double den = gamma_norm(p, w, fb);
        if (den > 0 && num / den > best.value) best = {num / den, "extremal-profile"};
    }

    // Family (d): coordinate ascent over decreasing profiles on a coarser grid.
    if (budget > 0) {
        std::vector<double> abreaks = {0.0};
        {
            double lo = std::log(1e-6 * X), hi = std::log(std::min(1e3 * X, 0.999999 * w.b));
            double dens = std::max(1, per_decade / 4);
            int npts = static_cast<int>(std::ceil((hi - lo) / std::log(10.0) * dens)) + 1;
            for (int i = 0; i < npts; ++i)
                abreaks.push_back(std::exp(lo + (hi - lo) * i / (npts - 1)));
            for (std::size_t i = 1; i < gs.breaks.size(); ++i)
                if (gs.breaks[i] < w.b) abreaks.push_back(gs.breaks[i]);
            for (const auto& pc : w.pieces)
                if (pc.lo > std::exp(lo) && pc.lo < std::exp(hi)) abreaks.push_back(pc.lo);
            std::sort(abreaks.begin(), abreaks.end());
            abreaks.erase(std::unique(abreaks.begin(), abreaks.end()), abreaks.end());
        }
        detail::FixedGridNorm cheap(w, p, abreaks);
        std::size_t n = abreaks.size() - 1;

        std::vector<double> gmass(n);  // ∫ g* over each cell
        for (std::size_t i = 0; i < n; ++i)
            gmass[i] = gs.integral_to(abreaks[i + 1]) - gs.integral_to(abreaks[i]);

        std::vector<double> v(n);  // start from the best candidate so far
        for (std::size_t i = 0; i < n; ++i) v[i] = (abreaks[i] < best_s) ? 1.0 : 0.0;
        if (!fb.values.empty() && best.family == "extremal-profile") {
            v[0] = fb(0.5 * abreaks[1]);
            for (std::size_t i = 1; i < n; ++i)
                v[i] = fb(std::sqrt(abreaks[i] * abreaks[i + 1]));
        }
        double vmax = 0.0;
        for (double vi : v) vmax = std::max(vmax, vi);
        if (vmax == 0.0)
            for (std::size_t i = 0; i < n; ++i) v[i] = (abreaks[i] < X) ? 1.0 : 0.0;

        auto objective = [&](const std::vector<double>& prof) {
            double num = 0.0;
            for (std::size_t i = 0; i < n; ++i) num += prof[i] * gmass[i];
            double den = std::pow(cheap.power_sum(prof), 1.0 / p);
            return (den > 0) ? num / den : 0.0;
        };

        double cur = objective(v);
        for (int sweep = 0; sweep < budget; ++sweep) {
            bool improved = false;
            for (std::size_t i = 0; i < n; ++i) {
                double lo = (i + 1 < n) ? v[i + 1] : 0.0;
                double hi = (i > 0) ? v[i - 1] : std::max(v[0] * 16.0, 1e-12);
                if (!(hi > lo)) continue;
                const double gr = 0.6180339887498949;
                double a = lo, b2 = hi;
                double c = b2 - gr * (b2 - a), d = a + gr * (b2 - a);
                double save = v[i];
                v[i] = c;
                double fc = objective(v);
                v[i] = d;
                double fd = objective(v);
                for (int it = 0; it < 6; ++it) {
                    if (fc > fd) {
                        b2 = d; d = c; fd = fc;
                        c = b2 - gr * (b2 - a);
                        v[i] = c; fc = objective(v);
                    } else {
                        a = c; c = d; fc = fd;
                        d = a + gr * (b2 - a);
                        v[i] = d; fd = objective(v);
                    }
                }
                double cand = std::max(fc, fd), vstar = (fc > fd) ? c : d;
                if (cand > cur * (1.0 + 1e-12)) {
                    v[i] = vstar;
                    cur = cand;
                    improved = true;
                } else {
                    v[i] = save;
                }
            }
            if (!improved) break;
        }

        // Accurate re-evaluation of the ascent winner.
        DecreasingStep fd_step;
        fd_step.breaks = {0.0};
        double prev = inf;
        for (std::size_t i = 0; i < n; ++i) {
            double vi = std::min(v[i], prev);
            prev = vi;
            fd_step.values.push_back(vi);
            fd_step.breaks.push_back(abreaks[i + 1]);
        }
        while (!fd_step.values.empty() && fd_step.values.back() <= 0.0) {
            fd_step.values.pop_back();
            fd_step.breaks.pop_back();
        }
        if (!fd_step.values.empty() && fd_step.values.front() > 0.0) {
            double num = step_pair(fd_step, gs);
            double den = gamma_norm(p, w, fd_step);
            if (den > 0 && num / den > best.value) best = {num / den, "ascent"};
        }
    }

    return best;
}

// Conjugate-exponent bracket of the dual weight, normalized by the base
// bracket: [t^{-p'} ∫_0^t psi + ∫_t^b psi s^{-p'}] Phi_p(t)^{p'-1}.
// Bounded above and below for every admissible weight.
inline double phps_ratio(double p, const PiecewisePowerWeight& w, double t,
                         double tol = 1e-9) {
    if (w.b < inf) throw std::domain_error("phps_ratio: requires b = inf");
    DualWeight psi(p, w);
    if (!(t > 0)) throw std::domain_error("phps_ratio: require t > 0");
    double pp = psi.conjugate();
    auto head = psi.head_integral(t, 0.0, tol);
    auto tail = psi.tail_integral(t, -pp, tol);
    if (!head.converged || !tail.converged)
        throw QuadratureError("phps_ratio: quadrature did not reach tolerance", inf);
    double num = std::pow(t, -pp) * head.value + tail.value;
    double lphi = psi.bracket().log_phi(std::log(t));
    return num * std::exp((pp - 1.0) * lphi);
}

// Weighted bilinear bounds for the averaging kernels.  side 1 pairs a
// nonincreasing f against the kernel (A/Phi)^{1+1/p'}; side 2 pairs a
// nondecreasing f against the complementary kernel (p t^p B/Phi)^{1+1/p'}.
// Returns (lhs, rhs) with the constant folded into rhs.
inline std::pair<double, double> monotone_kernel_bounds(double p,
                                                        const PiecewisePowerWeight& w,
                                                        const StepFunction& f,
                                                        const StepFunction& g, int side,
                                                        double tol = 1e-9) {
    if (side != 1 && side != 2)
        throw std::invalid_argument("monotone_kernel_bounds: side is 1 or 2");
    f.validate();
    g.validate();
    DualWeight psi(p, w);
    double pp = psi.conjugate();
    BracketCalculus const& calc = psi.bracket();
    double kernel_pow = 1.0 + 1.0 / pp;

    for (std::size_t i = 0; i + 1 < f.values.size(); ++i) {
        if (side == 1 && f.values[i] < f.values[i + 1])
            throw std::invalid_argument("monotone_kernel_bounds side 1: f must be nonincreasing");
        if (side == 2 && f.values[i] > f.values[i + 1])
            throw std::invalid_argument("monotone_kernel_bounds side 2: f must be nondecreasing");
    }

    auto logk = [&](double y) {
        double lphi = calc.log_phi(y);
        double lnum = (side == 1) ? calc.logA(y) : std::log(p) + p * y + calc.logB(y);
        return kernel_pow * (lnum - lphi);
    };
    // Kernel behavior at 0 for the head cell of the lhs integral.
    EndHint khead{0.0, 0.0};
    if (side == 1) {
        double d0 = p - (w.pieces.front().exp + 1.0);
        if (d0 < 0) khead.power = -d0 * kernel_pow;
        if (d0 == 0) khead.log_power = kernel_pow;
    }

    // lhs = ∫ f g K over the common support, split at all breaks.
    std::vector<double> cuts;
    for (double c : f.breaks) cuts.push_back(c);
    for (double c : g.breaks) cuts.push_back(c);
    for (const auto& pc : w.pieces) cuts.push_back(pc.lo);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double lhs = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double lo = cuts[k], hi = cuts[k + 1];
        if (hi > w.b) break;
        double mid = 0.5 * (lo + hi);
        double vf = f(mid), vg = g(mid);
        if (vf == 0.0 || vg == 0.0) continue;
        QuadResult r = (lo == 0.0) ? integrate_head(logk, std::log(hi), tol, khead)
                                   : integrate_log(logk, std::log(lo), std::log(hi), tol);
        lhs += vf * vg * r.value;
    }

    double cstar = 10.0 * (p + 1.0) * (p + 1.0);
    double rhs;
    if (side == 1) {
        double t1 = weighted_lp_norm(p, w, f);
        auto part = detail::average_power_integral(psi, pp, g, tol);
        double total_phi = moment(w, 0, w.b, 0);
        double corr = (total_phi < inf) ? g.integral() / std::pow(total_phi, 1.0 / p) : 0.0;
        rhs = cstar * t1 * (std::pow(part.value, 1.0 / pp) + corr);
    } else {
        double t1 = weighted_lp_norm(p, w, f, -p);
        // ∫_0^b (∫_t^b g)^{p'} psi(t) dt with the inner integral affine per cell.
        double total = g.integral();
        auto logf2 = [&](double y) {
            double tg = std::max(0.0, total - g.integral_to(std::exp(y)));
            return (tg > 0 ? pp * std::log(tg) : -inf) + psi.log_eval(y);
        };
        std::vector<double> c2;
        for (double c : g.breaks)
            if (c > 0 && c < w.b) c2.push_back(c);
        for (const auto& pc : w.pieces)
            if (pc.lo > 0 && pc.lo < g.support_end()) c2.push_back(pc.lo);
        std::sort(c2.begin(), c2.end());
        c2.erase(std::unique(c2.begin(), c2.end()), c2.end());
        double hi_end = std::min(g.support_end(), w.b);
        double start = c2.empty() ? hi_end : c2.front();
        QuadResult q = integrate_head(logf2, std::log(start), tol, psi.hint_zero(0.0));
        double prev = start;
        for (double c : c2) {
            if (c > prev) q += integrate_log(logf2, std::log(prev), std::log(c), tol);
            prev = std::max(prev, c);
        }
        if (prev < hi_end) q += integrate_log(logf2, std::log(prev), std::log(hi_end), tol);
        rhs = cstar * t1 * std::pow(q.value, 1.0 / pp);
    }
    return {lhs, rhs};
}

// Ratio of the best pairing sup_h ∫ (P h) g / rho(h) over decreasing step
// profiles h to the dual-weight norm of the symmetrized average
// (∫ (S g)^{p'} psi)^{1/p'}.  Defined for non-integrable weights only; both
// sides scale linearly in g, and the ratio is pinned near 1 up to fixed
// constants.
inline double omega_duality_ratio(double p, const PiecewisePowerWeight& w,
                                  const StepFunction& g, int per_decade = 16,
                                  double tol = 1e-9) {
    auto flags = validate_nontrivial(w, p);
    if (!flags.nontrivial)
        throw std::domain_error("omega duality: weight is trivial (" + flags.reason + ")");
    if (moment(w, 0, w.b, 0) < inf)
        throw std::domain_error("omega duality: requires a non-integrable weight");
    g.validate();
    if (g.integral() == 0.0) return 1.0;

    DualWeight psi(p, w);
    double pp = psi.conjugate();

    // rhs = (∫ (S g)^{p'} psi)^{1/p'}.
    auto logS = [&](double y) {
        double s = stieltjes(g, std::exp(y));
        return (s > 0 ? pp * std::log(s) : -inf) + psi.log_eval(y);
    };
    std::vector<double> cuts;
    for (double c : g.breaks)
        if (c > 0 && c < w.b) cuts.push_back(c);
    for (const auto& pc : w.pieces)
        if (pc.lo > 0) cuts.push_back(pc.lo);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double anchor = cuts.empty() ? g.support_end() : cuts.front();
    QuadResult q = integrate_head(logS, std::log(anchor), tol, psi.hint_zero(0.0));
    double prev = anchor;
    for (double c : cuts) {
        if (c > prev) q += integrate_log(logS, std::log(prev), std::log(c), tol);
        prev = std::max(prev, c);
    }
    q += integrate_tail(logS, std::log(prev), tol, psi.hint_inf(-pp));
    if (!q.converged)
        throw QuadratureError("omega duality: rhs quadrature did not reach tolerance",
                              q.value > 0 ? q.abs_error / q.value : inf);
    double rhs = std::pow(q.value, 1.0 / pp);

    // lhs: best pairing ratio over indicators (exact closed form) and the
    // discretized near-extremal profile.
    double X = g.support_end();
    std::vector<double> grid;
    {
        double lo = std::log(1e-6 * X), hi = std::log(std::min(1e3 * X, 0.999999 * w.b));
        int npts = static_cast<int>(std::ceil((hi - lo) / std::log(10.0) * per_decade)) + 1;
        for (int i = 0; i < npts; ++i) grid.push_back(std::exp(lo + (hi - lo) * i / (npts - 1)));
        for (std::size_t i = 1; i < g.breaks.size(); ++i)
            if (g.breaks[i] < w.b) grid.push_back(g.breaks[i]);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    auto Qg = tail_average(g);
    double lhs = 0.0;
    for (double s : grid) {
        double num = g.integral_to(s) + s * Qg(s);  // ∫ g · P(indicator)
        double ratio = num / std::pow(phi_bracket(w, p, s), 1.0 / p);
        lhs = std::max(lhs, ratio);
    }

    auto Pg = averaged(g);
    StepFunction h0;
    h0.breaks = {0.0};
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double tm = std::sqrt(grid[i] * grid[i + 1]);
        double v = std::pow(Pg(tm) + Qg(tm), pp - 1.0) * std::exp(psi.log_eval(std::log(tm)));
        h0.values.push_back(std::isfinite(v) ? v : 0.0);
        h0.breaks.push_back(grid[i + 1]);
    }
    DecreasingStep h;
    {
        auto qa = tail_average(h0);
        h.breaks = {0.0};
        double hp = inf;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            double tm = std::sqrt(grid[i] * grid[i + 1]);
            double v = std::min(qa(tm), hp);
            hp = v;
            h.values.push_back(v);
            h.breaks.push_back(grid[i + 1]);
        }
        while (!h.values.empty() && h.values.back() <= 0.0) {
            h.values.pop_back();
            h.breaks.pop_back();
        }
    }
    if (!h.values.empty() && h.values.front() > 0.0) {
        double num = pair_with_average(h, g);
        double den = gamma_norm(p, w, h);
        if (den > 0) lhs = std::max(lhs, num / den);
    }
    return lhs / rhs;
}

struct BalanceReport {
    double kernel_product = 0.0;  // F1^{1/p} F2^{1/p'}, pinned away from 0 and inf
    double residual = 0.0;        // kernel_product - 1
    double phihat_value = 0.0;    // t^{p'} w(t) / Phi_p(t)^{p'}
    double domination_lhs = 0.0;
    double domination_rhs = 0.0;
    bool domination_ok = false;
};

// Pointwise checks behind the dual-weight construction at a fixed t: the
// two-kernel product that must stay pinned away from 0 and inf uniformly in
// t, the normalized local slope of the base weight, and the tail domination
// ∫_t^b y^{-p'} p psi(y) dy >= (1/p') ∫_t^b w(y) Phi_p(y)^{-p'} dy.
inline BalanceReport dual_weight_balance(double p, const PiecewisePowerWeight& w, double t,
                                        double tol = 1e-9) {
    if (w.b < inf) throw std::domain_error("dual_weight_balance: requires b = inf");
    DualWeight psi(p, w);
    if (!(t > 0)) throw std::domain_error("dual_weight_balance: require t > 0");
    double pp = psi.conjugate();
    BracketCalculus const& calc = psi.bracket();
    double lt = std::log(t);
    double a0 = w.pieces.front().exp;
    double aI = w.pieces.back().exp;
    BalanceReport out;

    auto integrate_with_cuts = [&](auto&& logf, EndHint hz, EndHint hi_hint) {
        std::vector<double> cs;
        for (const auto& pc : w.pieces)
            if (pc.lo > 0) cs.push_back(pc.lo);
        cs.push_back(t);
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        QuadResult q = integrate_head(logf, std::log(cs.front()), tol, hz);
        double prev = cs.front();
        for (double c : cs) {
            if (c > prev) q += integrate_log(logf, std::log(prev), std::log(c), tol);
            prev = std::max(prev, c);
        }
        q += integrate_tail(logf, std::log(prev), tol, hi_hint);
        return q;
    };

    // F1 = ∫ w(s) (s+t)^{-p} ds.
    auto logf1 = [&](double y) { return w.log_value(y) - p * log_sum_exp(y, lt); };
    auto F1 = integrate_with_cuts(logf1, EndHint{a0, 0.0}, EndHint{aI - p, 0.0});

    // F2 = ∫ (t/(s+t))^{p'} psibar^{1-p'}(s) ds with
    // psibar^{1-p'} = (P phi)(Q_p phi) / ((P phi) + (Q_p phi))^{p'+1}.
    auto log_psibar = [&](double y) {
        double lP = calc.logA(y) - y;
        double lQ = std::log(p) + (p - 1.0) * y + calc.logB(y);
        return lP + lQ - (pp + 1.0) * log_sum_exp(lP, lQ);
    };
    auto logf2 = [&](double y) {
        return pp * (lt - log_sum_exp(y, lt)) + log_psibar(y);
    };
    EndHint f2z = (a0 == p - 1.0) ? EndHint{-1.0, pp} : EndHint{a0 * (1.0 - pp), 0.0};
    EndHint f2i{aI, 0.0};
    if (aI > -1.0)
        f2i = {aI * (1.0 - pp) - pp, 0.0};
    else if (aI == -1.0)
        f2i = {-1.0, pp};
    auto F2 = integrate_with_cuts(logf2, f2z, f2i);
    out.kernel_product = std::pow(F1.value, 1.0 / p) * std::pow(F2.value, 1.0 / pp);
    out.residual = out.kernel_product - 1.0;

    out.phihat_value = std::exp(pp * lt + std::log(w(t)) - pp * calc.log_phi(lt));

    // Tail domination, both sides integrated from t to b.
    auto dlhs = psi.tail_integral(t, -pp, tol);
    out.domination_lhs = p * dlhs.value;
    auto logr = [&](double y) { return w.log_value(y) - pp * calc.log_phi(y); };
    double kI = aI + 1.0;
    EndHint ri{aI, 0.0};
    if (kI > 0)
        ri = {aI - kI * pp, 0.0};
    else if (kI == 0)
        ri = {-1.0, pp};
    std::vector<double> rc;
    for (const auto& pc : w.pieces)
        if (pc.lo > t) rc.push_back(pc.lo);
    QuadResult rhsq;
    double prev = t;
    for (double c : rc) {
        rhsq += integrate_log(logr, std::log(prev), std::log(c), tol);
        prev = c;
    }
    rhsq += integrate_tail(logr, std::log(prev), tol, ri);
    out.domination_rhs = rhsq.value / pp;
    out.domination_ok = dlhs.converged && rhsq.converged &&
                        out.domination_lhs >= out.domination_rhs * (1.0 - 1e-7);
    return out;
}

}  // namespace gammaspace
