#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ets {

// Bracketing and refinement control for the 1-D cost minimizations.
struct OptimizerConfig {
    double lambda_lo = 1e-2;
    double lambda_hi = 1e2;
    int grid_points = 400;
    double rel_tol = 1e-8;

    void validate() const {
        if (!(lambda_lo > 0.0 && lambda_hi > lambda_lo))
            throw std::invalid_argument("need 0 < lambda_lo < lambda_hi");
        if (grid_points < 3) throw std::invalid_argument("grid_points must be >= 3");
        if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    }
};

struct ScanMinimum {
    double x = 0.0;       // grid argmin
    double value = 0.0;   // objective there
    int scan_index = 0;
    bool interior = false;  // argmin away from both grid ends
    bool unimodal = true;   // exactly one descent-to-ascent switch along the scan
};

inline std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1.0);
    return xs;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1.0));
    return xs;
}

template <class F>
ScanMinimum scan_minimum(F&& f, const std::vector<double>& xs) {
    if (xs.size() < 3) throw std::invalid_argument("scan grid needs >= 3 points");
    ScanMinimum out;
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]);
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (ys[i] < ys[best]) best = i;
    int switches = 0;
    bool descending = ys[1] < ys[0];
    for (std::size_t i = 2; i < xs.size(); ++i) {
        const bool desc = ys[i] < ys[i - 1];
        if (desc != descending) {
            if (!desc) ++switches;  // turned from descent to ascent
            descending = desc;
        }
    }
    out.x = xs[best];
    out.value = ys[best];
    out.scan_index = static_cast<int>(best);
    out.interior = best > 0 && best + 1 < xs.size();
    out.unimodal = switches <= 1;
    return out;
}

// Golden-section search on [a, b]; f must be unimodal there. Returns the
// midpoint of the final bracket once its width drops below rel_tol * |x|.
template <class F>
double golden_minimum(F&& f, double a, double b, double rel_tol) {
    if (!(b > a)) throw std::invalid_argument("golden_minimum needs a < b");
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > rel_tol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace ets
