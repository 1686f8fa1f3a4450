#pragma once

#include "ets/minimize.hpp"
#include "ets/models.hpp"

namespace ets {

// A Brownian-motion sampling policy together with its analytic cost.
// analytic_distortion is the dimensionless coefficient multiplying T^2/2.
struct BmPolicyResult {
    PolicyArtifact policy;
    double analytic_distortion = 0.0;
    double expected_samples = 0.0;
};

// Uniform sampling at i*T/(N+1); the best deterministic schedule. Cost
// coefficient 1/(N+1).
BmPolicyResult deterministic_policy(double T, int N);

// Level-triggered sampling: per-budget cost coefficients c_k from the
// nested minimization c_k = inf_lambda { phi + (0.5 - c_{k-1}) psi } seeded
// at c_0 = 0.5, with threshold coefficients rho_k = pi/(2*sqrt(2*lambda_k)).
BmPolicyResult delta_recursion(int N, const SeriesConfig& scfg = {},
                               const OptimizerConfig& ocfg = {});

// Expected number of thresholds actually hit before the horizon, per
// budget level 1..N, from the firing-probability chain.
Eigen::VectorXd delta_expected_samples(int N, const Eigen::VectorXd& lambda_stars,
                                       const SeriesConfig& cfg = {});

// Root A(beta) of 2A^2 - (5+beta)A + 3 = 0 in (0, 1); the one-step contraction
// of the envelope recursion. Also checks the perfect-square identity
// 4(A-1)^2 = (4/3)A(A-1+beta) behind the closed form.
double snell_constant(double beta);

// Optimal stopping envelopes: theta_k = 1 - A(theta_{k-1}) from theta_0 = 1,
// gamma_k = sqrt(3(theta_{k-1}-theta_k)/(1-theta_k)); the k-th chronological
// sample fires on e^2 >= gamma_{N-k+1}(T-t).
BmPolicyResult optimal_envelope_recursion(int N);

}  // namespace ets
