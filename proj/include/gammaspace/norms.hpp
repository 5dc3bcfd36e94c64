#pragma once

// The gamma norm rho(f) = (∫_0^b (f**)^p w)^{1/p} for step functions.  The
// head cell (where f** is constant) and the region past the support (where
// f** = total/t) reduce to exact moments; only the interior cells, where
// f** = A + B/t, use quadrature.

#include <gammaspace/operators.hpp>
#include <gammaspace/quadrature.hpp>
#include <gammaspace/weights.hpp>

#include <cmath>

namespace gammaspace {

struct NormInfo {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
};

inline NormInfo gamma_norm_info(double p, const PiecewisePowerWeight& w,
                                const StepFunction& f, double tol = 1e-9) {
    auto flags = validate_nontrivial(w, p);
    if (!flags.nontrivial)
        throw std::domain_error("gamma norm: weight is trivial for this exponent (" +
                                flags.reason + ")");
    auto g = rearrange(w.b < inf ? clip_to(f, w.b) : f);
    NormInfo out;
    if (g.values.empty()) return out;
    auto avg = averaged(g);

    double x1 = std::min(g.breaks[1], w.b);
    double sum = std::pow(g.values[0], p) * moment(w, 0, x1, 0);
    double err = 0.0;
    bool conv = true;

    for (std::size_t i = 1; i < g.values.size(); ++i) {
        double lo = g.breaks[i];
        if (lo >= w.b) break;
        double hi = std::min(g.breaks[i + 1], w.b);
        double A = avg.A[i], B = avg.B[i];
        for (const WeightPiece& pc : w.pieces) {
            double s0 = std::max(lo, pc.lo), s1 = std::min(hi, pc.hi);
            if (!(s0 < s1)) continue;
            double lc = std::log(pc.coeff), e = pc.exp;
            auto logf = [&](double y) {
                return p * std::log(A + B * std::exp(-y)) + lc + e * y;
            };
            auto r = integrate_log(logf, std::log(s0), std::log(s1), tol);
            sum += r.value;
            err += r.abs_error;
            conv = conv && r.converged;
        }
    }

    double X = g.breaks.back();
    if (X < w.b) sum += std::pow(avg.total, p) * moment(w, X, w.b, -p);

    out.value = std::pow(sum, 1.0 / p);
    out.abs_error = (sum > 0) ? out.value * (err / sum) / p : 0.0;
    out.converged = conv;
    return out;
}

inline double gamma_norm(double p, const PiecewisePowerWeight& w, const StepFunction& f,
                         double tol = 1e-9) {
    auto info = gamma_norm_info(p, w, f, tol);
    if (!info.converged)
        throw QuadratureError("gamma norm: quadrature did not reach tolerance",
                              info.value > 0 ? info.abs_error / info.value : inf);
    return info.value;
}

// (∫ f(t)^p w(t) t^{shift} dt)^{1/p}, exact for steps; +inf on divergence.
inline double weighted_lp_norm(double p, const PiecewisePowerWeight& w, const StepFunction& f,
                               double shift = 0.0) {
    f.validate();
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (f.values[i] == 0.0) continue;
        double lo = std::min(f.breaks[i], w.b), hi = std::min(f.breaks[i + 1], w.b);
        if (!(lo < hi)) break;
        double m = moment(w, lo, hi, shift);
        if (m == inf) return inf;
        s += std::pow(f.values[i], p) * m;
    }
    return std::pow(s, 1.0 / p);
}

}  // namespace gammaspace
