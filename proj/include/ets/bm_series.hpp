#pragma once

#include "ets/models.hpp"

namespace ets {

// Dimensionless threshold parameter lambda = T*pi^2/(8*delta^2) for a
// symmetric two-sided level delta watched over a horizon T. All hitting
// functionals below are evaluated in this parameterization.
struct LambdaParam {
    double lambda;
    explicit LambdaParam(double l);  // throws std::invalid_argument unless l > 0
};

double lambda_from_delta(double delta, double T);
double delta_from_lambda(double lambda, double T);

// Partial sum of sum_k (-1)^k exp(-(2k+1)^2 lambda) / (2k+1)^power.
double theta_series(int power, double lambda, const SeriesConfig& cfg = {});

// Expected distortion of one sample at the level crossing, as a coefficient
// of T^2/2. Minimized near lambda = 1.4 where it reaches about 0.3953.
double phi(LambdaParam lambda, const SeriesConfig& cfg = {});

// Sensitivity of the two-sample cost to the continuation coefficient: the
// cost with kappa = 0.5 - c_prev is phi(lambda) + kappa*psi(lambda), again
// as a coefficient of T^2/2. Ranges over (-2, 0).
double psi(LambdaParam lambda, const SeriesConfig& cfg = {});

// E[(T - tau)^+] and E[((T - tau)^+)^2] for the first exit time tau of a
// standard Brownian motion from (-delta, delta).
double residual_moment_1(double delta, double T, const SeriesConfig& cfg = {});
double residual_moment_2(double delta, double T, const SeriesConfig& cfg = {});

// P[tau <= T] for the same exit time.
double firing_probability(LambdaParam lambda, const SeriesConfig& cfg = {});

// E[exp(-s*tau)] started from w0 inside the band:
// cosh(w0*sqrt(2s))/cosh(delta*sqrt(2s)), overflow-guarded.
double mgf_first_hitting(double s, double delta, double w0);

// sum_k (-1)^k/(2k+1)^power for power in {1, 3, 5}. The power = 1 case is
// Euler-accelerated; 3 and 5 are summed directly to the configured cutoff.
double alternating_series_constant(int power, const SeriesConfig& cfg = {});

}  // namespace ets
