#pragma once

#include "ets/models.hpp"

namespace ets {

// Discretization of the normalized-horizon OU solvers. x_half_width <= 0
// selects an automatic extent (5 horizon widths, widened to 5 stationary
// standard deviations when the drift is stable and slow).
struct GridSpec {
    int m_time = 2000;
    double x_half_width = 0.0;
    int n_x = 401;

    void validate() const;  // m_time >= 100, n_x odd and >= 201
    double resolved_half_width(double a) const;
};

// Time x state surface with an extracted per-time threshold curve.
struct ValueGrid {
    Eigen::VectorXd times;
    Eigen::VectorXd states;
    Eigen::MatrixXd values;      // (times) x (states)
    Eigen::VectorXd thresholds;  // per time
};

// E[int_0^u e_s^2 ds] for the OU error started at e_0 = 0:
// (exp(2au) - 1 - 2au)/(4a^2), continuous through a = 0.
double ou_free_distortion(double a, double u);

// int_0^u exp(2as) ds: the weight a unit of squared error at the start of a
// length-u sample-free window contributes to the distortion.
double ou_error_gain(double a, double u);

// Uniform sampling at i*T/(N+1); absolute distortion of the best
// deterministic schedule. a = 0 reduces to T^2/(2(N+1)).
double ou_deterministic(double a, double T, int N);

// Backward parabolic solve of w_t + (1/2)w_xx + a x w_x + exp(-2at) = 0 on
// [-delta, delta] x [0, 1] with zero boundary and terminal data. The center
// column w(0, t) carries the single-stage threshold performance.
ValueGrid ou_delta_pde(double a, double delta, const GridSpec& grid = {});

// Absolute distortion on the unit horizon of the constant-level policy that
// samples whenever |e| = delta, with N samples budgeted.
double ou_delta_distortion(double a, double delta, const GridSpec& grid = {}, int N = 1);

struct OuDeltaResult {
    PolicyArtifact policy;             // gridded thresholds, stage-fixed monitoring
    Eigen::VectorXd delta_star;        // optimal level per budget, at start time 0
    Eigen::VectorXd stage_distortion;  // optimal absolute distortion per budget
    bool scan_unimodal = true;
};

// Optimal threshold level per remaining budget and start time, by scanning
// delta over [0.05, 3.0] against the stagewise PDE costs.
OuDeltaResult ou_delta_optimize(double a, int N, const GridSpec& grid = {});

struct OuDpResult {
    PolicyArtifact policy;              // gridded thresholds, grid-time monitoring
    double distortion = 0.0;            // absolute, top budget
    Eigen::VectorXd budget_distortion;  // per budget 1..N
    ValueGrid value;                    // top-budget sampling-gain surface
};

// Backward-induction optimum on the exact AR(1) time discretization; the
// value iterated is the sampling gain S so that distortion = R0(1) - S(0,0).
OuDpResult ou_dp_optimal(double a, int N, const GridSpec& grid = {});

}  // namespace ets
