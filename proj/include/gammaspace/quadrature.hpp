#pragma once

// Quadrature engine.  Integrands are supplied in log form, logf(y) = log F(e^y),
// and integrated in y = log t, so power-law singularities at 0 and slow decay
// at infinity become well-behaved exponentials.  Finite windows use composite
// Gauss-Legendre with panel doubling; the two half-lines use fixed-width
// expanding panels plus an analytic remainder driven by the integrand's known
// endpoint power behavior.

#include <gammaspace/util.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace gammaspace {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
    int levels = 0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        abs_error += o.abs_error;
        converged = converged && o.converged;
        levels = std::max(levels, o.levels);
        return *this;
    }
};

// Endpoint behavior F(t) ~ C t^power (log t)^{-log_power} used to bound the
// un-integrated remainder.  power = NaN means "unknown, detect geometrically".
struct EndHint {
    double power = std::numeric_limits<double>::quiet_NaN();
    double log_power = 0.0;
};

namespace detail {

inline constexpr std::array<double, 15> kGlNode = {
    -0.9879925180204854, -0.9372733924007059, -0.8482065834104272,
    -0.7244177313601700, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                  0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
    0.8482065834104272,  0.9372733924007059,  0.9879925180204854};

inline constexpr std::array<double, 15> kGlWeight = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

// Single GL15 panel of ∫ e^{y + logf(y)} dy over [ya, yb].
template <typename LogF>
double gl_panel(LogF&& logf, double ya, double yb) {
    double mid = 0.5 * (ya + yb), half = 0.5 * (yb - ya);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) {
        double y = mid + half * kGlNode[i];
        double le = y + logf(y);
        if (le == -inf) continue;
        s += kGlWeight[i] * std::exp(le);
    }
    return s * half;
}

}  // namespace detail

// ∫_{e^{la}}^{e^{lc}} F(t) dt with F smooth on the interior of the window.
template <typename LogF>
QuadResult integrate_log(LogF&& logf, double la, double lc, double rel_tol, int max_doubles = 12) {
    QuadResult r;
    if (!(la < lc)) return r;
    int n = std::max(1, static_cast<int>(std::ceil((lc - la) / 1.5)));
    double prev = 0.0;
    for (int level = 0;; ++level) {
        double h = (lc - la) / n, sum = 0.0;
        for (int k = 0; k < n; ++k)
            sum += detail::gl_panel(logf, la + k * h, la + (k + 1) * h);
        r.value = sum;
        r.levels = level;
        if (level > 0) {
            double diff = std::abs(sum - prev);
            r.abs_error = diff;
            if (diff <= rel_tol * std::max(std::abs(sum), 1e-300) ||
                (sum == 0.0 && prev == 0.0)) {
                r.converged = true;
                return r;
            }
        }
        if (level >= max_doubles || n > (1 << 16)) {
            r.converged = false;
            return r;
        }
        prev = sum;
        n *= 2;
    }
}

namespace detail {

// Remainder of ∫ F over the unintegrated end, from a sample F(t_edge) and the
// endpoint hint.  side = -1 for the head (toward 0), +1 for the tail.
inline double hint_remainder(double f_edge, double y_edge, const EndHint& h, int side) {
    if (f_edge == 0.0) return 0.0;
    double t = std::exp(y_edge);
    if (std::isnan(h.power)) return inf;  // no hint
    if (side < 0) {
        if (h.power > -1.0) return f_edge * t / (h.power + 1.0);
        if (h.power == -1.0 && h.log_power > 1.0)
            return f_edge * t * (-y_edge) / (h.log_power - 1.0);
        return inf;
    }
    if (h.power < -1.0) return f_edge * t / (-1.0 - h.power);
    if (h.power == -1.0 && h.log_power > 1.0)
        return f_edge * t * y_edge / (h.log_power - 1.0);
    return inf;
}

using LogIntegrand = std::function<double(double)>;

QuadResult integrate_halfline(const LogIntegrand& logf, double ly0, double rel_tol,
                              EndHint hint, int side);

// End where F ~ C t^{-1} |log t|^{-m}: substitute u = |log t| so the integral
// becomes ∫_{u0}^∞ G(u) du with G(u) = t F(t) ~ C u^{-m}, a pure-power tail
// that expanding panels in log u resolve geometrically.
inline QuadResult integrate_marginal_end(const LogIntegrand& logf, double ly0, double rel_tol,
                                         EndHint hint, int side) {
    QuadResult pre;
    double ly_in = ly0;
    if (side < 0 && ly0 > -1.0) {
        pre = integrate_log(logf, -1.0, ly0, rel_tol);
        ly_in = -1.0;
    } else if (side > 0 && ly0 < 1.0) {
        pre = integrate_log(logf, ly0, 1.0, rel_tol);
        ly_in = 1.0;
    }
    LogIntegrand logG = [&logf, side](double v) {
        double u = std::exp(v);
        double y = (side < 0) ? -u : u;
        return logf(y) + y;  // log of G(u) = F(e^y) e^y
    };
    QuadResult r = integrate_halfline(logG, std::log(std::abs(ly_in)), rel_tol,
                                      EndHint{-hint.log_power, 0.0}, +1);
    r += pre;
    return r;
}

inline QuadResult integrate_halfline(const LogIntegrand& logf, double ly0, double rel_tol,
                                     EndHint hint, int side) {
    if (!std::isnan(hint.power) && hint.power == -1.0 && hint.log_power > 1.0)
        return integrate_marginal_end(logf, ly0, rel_tol, hint, side);

    const double W = std::log(4.0);
    const int max_panels = 420;
    QuadResult r;
    double prev_contrib = inf, rem_prev = inf;
    int small_streak = 0, defect_streak = 0;
    for (int k = 0; k < max_panels; ++k) {
        double ya = (side < 0) ? ly0 - (k + 1) * W : ly0 + k * W;
        double yb = ya + W;
        double c = gl_panel(logf, ya, yb);
        r.value += c;
        r.levels = k + 1;
        double y_edge = (side < 0) ? ya : yb;
        double lf = logf(y_edge);
        double f_edge = (lf == -inf) ? 0.0 : std::exp(lf);
        double rem = hint_remainder(f_edge, y_edge, hint, side);
        double scale = std::max(r.value + (rem < inf ? rem : 0.0), 1e-300);
        if (rem <= 0.2 * rel_tol * scale) {  // asymptotic end is already negligible
            r.abs_error += rem;
            r.value += rem;
            return r;
        }
        if (rem < inf) {
            // The remainder formula is exact for a pure power end; its defect
            // across one panel measures how far F still is from that regime.
            if (rem_prev < inf) {
                double defect = std::abs(rem_prev - (c + rem));
                if (defect <= 0.1 * rel_tol * scale) {
                    if (++defect_streak >= 2) {
                        r.value += rem;
                        r.abs_error += 10.0 * defect + 1e-16 * rem;
                        return r;
                    }
                } else {
                    defect_streak = 0;
                }
            }
            rem_prev = rem;
        } else if (std::isnan(hint.power)) {  // geometric detection fallback
            if (c <= 0.05 * rel_tol * scale && c <= prev_contrib) {
                if (++small_streak >= 3) {
                    double ratio = (prev_contrib > 0) ? std::min(0.9, c / prev_contrib) : 0.5;
                    double rem2 = c * ratio / (1.0 - ratio);
                    r.abs_error += rem2 + c;
                    return r;
                }
            } else {
                small_streak = 0;
            }
        }
        prev_contrib = c;
    }
    r.converged = false;
    r.abs_error = inf;
    return r;
}

}  // namespace detail

// ∫_0^{e^{ly0}} F(t) dt; hint describes F near 0.
template <typename LogF>
QuadResult integrate_head(LogF&& logf, double ly0, double rel_tol, EndHint hint = {}) {
    return detail::integrate_halfline(logf, ly0, rel_tol, hint, -1);
}

// ∫_{e^{ly0}}^∞ F(t) dt; hint describes F near infinity.
template <typename LogF>
QuadResult integrate_tail(LogF&& logf, double ly0, double rel_tol, EndHint hint = {}) {
    return detail::integrate_halfline(logf, ly0, rel_tol, hint, +1);
}

// ∫_0^b F(t) dt with F smooth away from the given interior cut points.
template <typename LogF>
QuadResult integrate_full(LogF&& logf, std::vector<double> cuts, double b, double rel_tol,
                          EndHint head_hint = {}, EndHint tail_hint = {}) {
    std::vector<double> ly;
    for (double c : cuts)
        if (c > 0 && c < b && std::isfinite(c)) ly.push_back(std::log(c));
    std::sort(ly.begin(), ly.end());
    ly.erase(std::unique(ly.begin(), ly.end()), ly.end());
    if (ly.empty()) ly.push_back(b == inf ? 0.0 : std::log(b) - std::log(2.0));

    QuadResult r;
    r += integrate_head(logf, ly.front(), rel_tol, head_hint);
    for (std::size_t i = 0; i + 1 < ly.size(); ++i)
        r += integrate_log(logf, ly[i], ly[i + 1], rel_tol);
    if (b == inf) {
        r += integrate_tail(logf, ly.back(), rel_tol, tail_hint);
    } else if (std::exp(ly.back()) < b) {
        r += integrate_log(logf, ly.back(), std::log(b), rel_tol);
    }
    return r;
}

struct SupResult {
    double value = -inf;     // supremum found (exp of the log objective)
    double log_value = -inf;
    double argmax = 0.0;
    bool at_lower_edge = false;
    bool at_upper_edge = false;
};

// Maximize exp(logf(y)) over y in [ly_lo, ly_hi]: dense log grid followed by
// golden-section polish around the best grid point.
template <typename LogF>
SupResult log_grid_sup(LogF&& logf, double ly_lo, double ly_hi, int per_decade = 16,
                       const std::vector<double>& extra = {}) {
    SupResult best;
    double span = ly_hi - ly_lo;
    int n = std::max(2, static_cast<int>(std::ceil(span / std::log(10.0) * per_decade)) + 1);
    std::vector<double> ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ys[static_cast<std::size_t>(i)] = ly_lo + span * i / (n - 1);
    for (double e : extra)
        if (e >= ly_lo && e <= ly_hi) ys.push_back(e);
    std::sort(ys.begin(), ys.end());

    std::size_t best_i = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        double v = logf(ys[i]);
        if (v > best.log_value) {
            best.log_value = v;
            best.argmax = ys[i];
            best_i = i;
        }
    }
    double lo = (best_i == 0) ? ys.front() : ys[best_i - 1];
    double hi = (best_i + 1 >= ys.size()) ? ys.back() : ys[best_i + 1];
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = logf(c), fd = logf(d);
    for (int it = 0; it < 80 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = logf(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = logf(d);
        }
    }
    double ymid = 0.5 * (a + b), fmid = logf(ymid);
    if (fmid > best.log_value) {
        best.log_value = fmid;
        best.argmax = ymid;
    }
    best.value = std::exp(best.log_value);
    best.at_lower_edge = best.argmax <= ly_lo + 1e-12 * std::max(1.0, std::abs(ly_lo));
    best.at_upper_edge = best.argmax >= ly_hi - 1e-12 * std::max(1.0, std::abs(ly_hi));
    best.argmax = std::exp(best.argmax);
    return best;
}

}  // namespace gammaspace
