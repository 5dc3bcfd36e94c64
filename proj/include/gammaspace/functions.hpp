#pragma once

// Nonnegative step functions, their decreasing rearrangements, and the level
// averages f**.  Everything here is exact rational arithmetic over the break
// structure; no quadrature.

#include <gammaspace/util.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gammaspace {

struct StepFunction {
    std::vector<double> breaks{0.0};  // breaks[0] == 0, strictly increasing, finite
    std::vector<double> values;       // values[i] on (breaks[i], breaks[i+1]], >= 0

    void validate() const {
        if (breaks.empty() || breaks.front() != 0.0)
            throw std::invalid_argument("step: breaks must start at 0");
        if (values.size() + 1 != breaks.size())
            throw std::invalid_argument("step: need one value per cell");
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
            if (!(breaks[i] < breaks[i + 1]) || !std::isfinite(breaks[i + 1]))
                throw std::invalid_argument("step: breaks must strictly increase and stay finite");
        for (double v : values)
            if (!(v >= 0) || !std::isfinite(v))
                throw std::invalid_argument("step: values must be finite and nonnegative");
    }

    double support_end() const { return breaks.back(); }

    double operator()(double t) const {
        if (!(t > 0) || t > breaks.back()) return 0.0;
        auto it = std::lower_bound(breaks.begin() + 1, breaks.end(), t);
        return values[static_cast<std::size_t>(it - breaks.begin()) - 1];
    }

    double integral() const {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            s += values[i] * (breaks[i + 1] - breaks[i]);
        return s;
    }

    // Prefix integrals at the breaks: cum[i] = ∫_0^{breaks[i]} f.
    std::vector<double> cumulative() const {
        std::vector<double> cum(breaks.size(), 0.0);
        for (std::size_t i = 0; i < values.size(); ++i)
            cum[i + 1] = cum[i] + values[i] * (breaks[i + 1] - breaks[i]);
        return cum;
    }

    double integral_to(double t) const {
        if (!(t > 0)) return 0.0;
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            double hi = std::min(t, breaks[i + 1]);
            if (hi <= breaks[i]) break;
            s += values[i] * (hi - breaks[i]);
        }
        return s;
    }

    static StepFunction box(double lo, double hi, double v = 1.0) {
        if (!(0 <= lo && lo < hi) || !std::isfinite(hi))
            throw std::invalid_argument("box: require 0 <= lo < hi < inf");
        StepFunction f;
        if (lo == 0.0) {
            f.breaks = {0.0, hi};
            f.values = {v};
        } else {
            f.breaks = {0.0, lo, hi};
            f.values = {0.0, v};
        }
        f.validate();
        return f;
    }

    static StepFunction indicator(double a) { return box(0.0, a); }
};

// A step function whose values are nonincreasing (a rearranged profile).
struct DecreasingStep : StepFunction {
    void validate() const {
        StepFunction::validate();
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            if (values[i] < values[i + 1])
                throw std::invalid_argument("decreasing step: values must be nonincreasing");
    }
};

// |{ f > lambda }|.  Negative thresholds see the whole half line.
inline double distribution(const StepFunction& f, double lambda) {
    if (lambda < 0) return inf;
    double m = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (f.values[i] > lambda) m += f.breaks[i + 1] - f.breaks[i];
    return m;
}

// Decreasing rearrangement: sort cells by value, merge ties, drop zeros.
inline DecreasingStep rearrange(const StepFunction& f) {
    f.validate();
    std::vector<std::pair<double, double>> cells;  // (value, length)
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (f.values[i] > 0.0) cells.emplace_back(f.values[i], f.breaks[i + 1] - f.breaks[i]);
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    DecreasingStep g;
    g.breaks = {0.0};
    for (const auto& [v, len] : cells) {
        if (!g.values.empty() && g.values.back() == v) {
            g.breaks.back() += len;
        } else {
            g.values.push_back(v);
            g.breaks.push_back(g.breaks.back() + len);
        }
    }
    g.validate();
    return g;
}

// f**(t) = t^{-1} ∫_0^t f*.  The profile must already be decreasing.
inline double double_star(const DecreasingStep& g, double t) {
    if (!(t > 0)) throw std::domain_error("double_star: require t > 0");
    return g.integral_to(t) / t;
}

inline double double_star(const StepFunction& f, double t) {
    return double_star(rearrange(f), t);
}

inline StepFunction add(const StepFunction& f, const StepFunction& g) {
    f.validate();
    g.validate();
    std::vector<double> cuts;
    cuts.reserve(f.breaks.size() + g.breaks.size());
    cuts.insert(cuts.end(), f.breaks.begin(), f.breaks.end());
    cuts.insert(cuts.end(), g.breaks.begin(), g.breaks.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    StepFunction h;
    h.breaks = {0.0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        h.values.push_back(f(mid) + g(mid));
        h.breaks.push_back(cuts[i + 1]);
    }
    while (!h.values.empty() && h.values.back() == 0.0) {
        h.values.pop_back();
        h.breaks.pop_back();
    }
    if (h.values.empty()) h.breaks = {0.0};
    return h;
}

inline StepFunction scale(const StepFunction& f, double c) {
    if (!(c >= 0) || !std::isfinite(c))
        throw std::invalid_argument("scale: factor must be finite and nonnegative");
    StepFunction g = f;
    for (double& v : g.values) v *= c;
    return g;
}

// f**(t) + g**(t) - (f+g)**(t); nonnegative up to roundoff.
inline double subadditivity_gap(const StepFunction& f, const StepFunction& g, double t) {
    return double_star(f, t) + double_star(g, t) - double_star(add(f, g), t);
}

// Restriction to (0, b): cells beyond b are dropped.
inline StepFunction clip_to(const StepFunction& f, double b) {
    if (f.support_end() <= b) return f;
    StepFunction g;
    g.breaks = {0.0};
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (f.breaks[i] >= b) break;
        g.values.push_back(f.values[i]);
        g.breaks.push_back(std::min(f.breaks[i + 1], b));
    }
    while (!g.values.empty() && g.values.back() == 0.0) {
        g.values.pop_back();
        g.breaks.pop_back();
    }
    if (g.values.empty()) g.breaks = {0.0};
    return g;
}

// ∫ f g, exact over the merged break structure.
inline double step_pair(const StepFunction& f, const StepFunction& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (f.values[i] == 0.0) continue;
        for (std::size_t j = 0; j < g.values.size(); ++j) {
            if (g.values[j] == 0.0) continue;
            double lo = std::max(f.breaks[i], g.breaks[j]);
            double hi = std::min(f.breaks[i + 1], g.breaks[j + 1]);
            if (lo < hi) s += f.values[i] * g.values[j] * (hi - lo);
        }
    }
    return s;
}

}  // namespace gammaspace
