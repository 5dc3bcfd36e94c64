#pragma once

// Averaging operators on step functions.  For a step f the average
// (Pf)(t) = t^{-1}∫_0^t f is A_i + B_i/t cellwise, and the dual
// (Qf)(t) = ∫_t^b f(s)/s ds is a sum of logarithms; both are kept in closed
// form so pairings and norms can reuse them exactly.

#include <gammaspace/functions.hpp>
#include <gammaspace/weights.hpp>

#include <cmath>
#include <functional>

namespace gammaspace {

struct EvaluableFunction {
    std::function<double(double)> fn;
    double domain_end = inf;
    double operator()(double t) const { return fn(t); }
};

// (Pf)(t) = A_i + B_i / t on (x_{i-1}, x_i], = total/t beyond the support.
struct AveragedStep {
    std::vector<double> breaks;
    std::vector<double> A, B;
    double total = 0.0;

    double operator()(double t) const {
        if (!(t > 0)) throw std::domain_error("averaged step: require t > 0");
        if (t > breaks.back()) return total / t;
        auto it = std::lower_bound(breaks.begin() + 1, breaks.end(), t);
        std::size_t i = static_cast<std::size_t>(it - breaks.begin()) - 1;
        return A[i] + B[i] / t;
    }

    // ∫_{lo}^{hi} (Pf)(t) dt within one cell or beyond the support, exact.
    // The head cell has B = 0, so lo = 0 is fine there.
    double cell_integral(std::size_t i, double lo, double hi) const {
        if (i < A.size()) {
            double s = A[i] * (hi - lo);
            if (B[i] != 0.0) s += B[i] * std::log(hi / lo);
            return s;
        }
        return total * std::log(hi / lo);
    }
};

inline AveragedStep averaged(const StepFunction& f) {
    f.validate();
    AveragedStep a;
    a.breaks = f.breaks;
    auto cum = f.cumulative();
    a.total = cum.back();
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        a.A.push_back(f.values[i]);
        a.B.push_back(cum[i] - f.values[i] * f.breaks[i]);
    }
    return a;
}

inline EvaluableFunction hardy_P(const StepFunction& f) {
    auto a = averaged(f);
    return {[a](double t) { return a(t); }, inf};
}

// (Qf)(t) = ∫_t^∞ f(s) s^{-1} ds, exact over the step cells.
struct TailAverage {
    std::vector<double> breaks;
    std::vector<double> values;

    double operator()(double t) const {
        if (!(t > 0)) throw std::domain_error("tail average: require t > 0");
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (breaks[i + 1] <= t) continue;
            s += values[i] * std::log(breaks[i + 1] / std::max(t, breaks[i]));
        }
        return s;
    }
};

inline TailAverage tail_average(const StepFunction& f) {
    f.validate();
    return {f.breaks, f.values};
}

inline EvaluableFunction hardy_Q(const StepFunction& f) {
    auto q = tail_average(f);
    return {[q](double t) { return q(t); }, inf};
}

// ∫_a^c (Qf)(t) dt = c (Qf)(c) - a (Qf)(a) + ∫_a^c f, by parts, exact.
// a = 0 is allowed: t (Qf)(t) -> 0 since Qf grows at most logarithmically.
inline double integral_of_tail_average(const StepFunction& f, double a, double c) {
    if (!(a >= 0) || !(a <= c)) throw std::domain_error("integral bounds out of order");
    if (a == c) return 0.0;
    TailAverage q = tail_average(f);
    double upper = (c == inf) ? 0.0 : c * q(c);
    double lower = (a == 0.0) ? 0.0 : a * q(a);
    double mid = (c == inf) ? f.integral() - f.integral_to(a) : f.integral_to(c) - f.integral_to(a);
    return upper - lower + mid;
}

// ∫ g (Pf), exact: the averaged form integrates to A len + B log(hi/lo) per cell.
inline double pair_with_average(const StepFunction& f, const StepFunction& g) {
    auto a = averaged(f);
    double s = 0.0;
    for (std::size_t j = 0; j < g.values.size(); ++j) {
        if (g.values[j] == 0.0) continue;
        double lo = g.breaks[j], hi = g.breaks[j + 1];
        for (std::size_t i = 0; i <= a.A.size(); ++i) {  // split the g-cell at f's breaks
            double cell_lo = a.breaks[std::min(i, a.breaks.size() - 1)];
            double cell_hi = (i < a.A.size()) ? a.breaks[i + 1] : inf;
            double s0 = std::max(lo, cell_lo), s1 = std::min(hi, cell_hi);
            if (s0 < s1) s += g.values[j] * a.cell_integral(i, s0, s1);
        }
    }
    return s;
}

// ∫ f (Qg), exact through the by-parts form cell by cell.
inline double pair_with_tail_average(const StepFunction& f, const StepFunction& g) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        if (f.values[j] == 0.0) continue;
        s += f.values[j] * integral_of_tail_average(g, f.breaks[j], f.breaks[j + 1]);
    }
    return s;
}

// (Q_p w)(t) = p t^{p-1} ∫_t^b w(s) s^{-p} ds; divergence is a domain error.
inline double q_sub_p(const PiecewisePowerWeight& w, double p, double t) {
    if (!(t > 0) || !(t < w.b)) throw std::domain_error("q_sub_p: require 0 < t < b");
    double tail = moment(w, t, w.b, -p);
    if (tail == inf) throw std::domain_error("q_sub_p: tail moment diverges");
    return p * std::pow(t, p - 1.0) * tail;
}

// (Sf)(t) = ∫_0^b f(s)/(s+t) ds, exact for steps.
inline double stieltjes(const StepFunction& f, double t) {
    if (!(t > 0)) throw std::domain_error("stieltjes: require t > 0");
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (f.values[i] == 0.0) continue;
        s += f.values[i] * (std::log1p(f.breaks[i + 1] / t) - std::log1p(f.breaks[i] / t));
    }
    return s;
}

}  // namespace gammaspace
