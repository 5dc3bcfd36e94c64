#pragma once

// Deterministic generators for property tests and empirical sweeps.

#include <gammaspace/functions.hpp>
#include <gammaspace/util.hpp>
#include <gammaspace/weights.hpp>

#include <algorithm>
#include <vector>

namespace gammaspace {

// Random admissible weight for exponent p: the head exponent keeps the moment
// ∫ w t^{-p} divergent at 0, the tail exponent keeps it convergent at inf.
inline PiecewisePowerWeight random_weight(Rng& rng, double p, int max_pieces = 4,
                                          double b = inf) {
    int n = rng.uniform_int(1, max_pieces);
    std::vector<double> cuts;
    double hi_cut = (b == inf) ? 1e3 : 0.9 * b;
    for (int i = 0; i < n - 1; ++i) cuts.push_back(rng.log_uniform(1e-3, hi_cut));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    PiecewisePowerWeight w;
    w.b = b;
    double lo = 0.0;
    for (std::size_t i = 0; i <= cuts.size(); ++i) {
        double hi = (i < cuts.size()) ? cuts[i] : b;
        double e;
        if (i == 0) {
            e = rng.uniform(-0.9, p - 1.1);  // forces divergence at 0
        } else if (i == cuts.size() && b == inf) {
            e = rng.uniform(-0.95, p - 1.1);  // keeps the tail moment finite
        } else {
            e = rng.uniform(-0.9, p + 1.0);
        }
        w.pieces.push_back(WeightPiece{lo, hi, rng.log_uniform(0.1, 10.0), e});
        lo = hi;
    }
    w.validate();
    return w;
}

// Random nonnegative step function with support inside (0, span].
inline StepFunction random_step(Rng& rng, int max_cells = 6, double span_lo = 1e-2,
                                double span_hi = 1e2) {
    int n = rng.uniform_int(1, max_cells);
    std::vector<double> cuts = {0.0};
    for (int i = 0; i < n; ++i) cuts.push_back(rng.log_uniform(span_lo, span_hi));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    StepFunction f;
    f.breaks = cuts;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        f.values.push_back(rng.next_double() < 0.15 ? 0.0 : rng.log_uniform(0.05, 20.0));
    if (std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; }))
        f.values.back() = 1.0;
    f.validate();
    return f;
}

inline DecreasingStep random_decreasing_step(Rng& rng, int max_cells = 6,
                                             double span_lo = 1e-2, double span_hi = 1e2) {
    return rearrange(random_step(rng, max_cells, span_lo, span_hi));
}

}  // namespace gammaspace
