#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace ets {

// ----- process models -----

enum class ProcessKind { BrownianMotion, OrnsteinUhlenbeck };

// Scalar diffusion dx = a x dt + dW with unit diffusion coefficient.
// BrownianMotion is the a = 0 special case and must carry drift_a = 0.
// Signals with diffusion b != 1 are handled by rescaling time before entry.
struct ProcessModel {
    ProcessKind kind = ProcessKind::BrownianMotion;
    double drift_a = 0.0;
    double horizon_T = 1.0;
    double initial_state = 0.0;

    void validate() const;  // throws std::invalid_argument on a bad record
};

ProcessModel brownian_motion(double horizon_T, double initial_state = 0.0);
ProcessModel ornstein_uhlenbeck(double drift_a, double horizon_T,
                                double initial_state = 0.0);

// Horizon normalization: t -> t/T maps the pair (a, T) onto (a*T, 1).
// Distortions computed on the unit horizon scale back by T^2.
double normalize_ou(double a, double T);

// ----- sampling policies -----

enum class PolicyKind {
    UniformDeterministic,
    DeltaThresholds,
    OptimalEnvelope,
    GriddedThresholds,
};

// How a gridded policy is monitored when simulated: only at its own grid
// times (discrete policies produced by backward induction), or with the
// stage threshold frozen at stage entry and watched continuously (threshold
// tables produced by the level-scan optimizer).
enum class GridMonitoring { GridTimes, StageFixed };

struct PolicyArtifact {
    PolicyKind kind = PolicyKind::UniformDeterministic;
    int budget_N = 1;

    // UniformDeterministic: strictly increasing sample times in (0, T].
    Eigen::VectorXd times;

    // DeltaThresholds: rho[m-1] is the threshold coefficient applied while
    // m samples remain; the running threshold is rho[m-1]*sqrt(T - zeta)
    // with zeta the previous sample time. c and lambda_star carry the
    // per-budget cost coefficients and minimizers for reporting.
    Eigen::VectorXd rho;
    Eigen::VectorXd c;
    Eigen::VectorXd lambda_star;

    // OptimalEnvelope: theta has N+1 entries with theta[0] = 1; the k-th
    // chronological sample fires when e^2 >= gamma[N-k] * (T - t).
    Eigen::VectorXd theta;
    Eigen::VectorXd gamma;

    // GriddedThresholds: thresholds(i, m-1) is the |e| threshold at
    // time_grid[i] while m samples remain.
    Eigen::VectorXd time_grid;
    Eigen::MatrixXd thresholds;
    GridMonitoring monitoring = GridMonitoring::GridTimes;

    void validate(double horizon_T) const;

    std::string to_json() const;
    static PolicyArtifact from_json(const std::string& text);
};

// ----- simulation reports -----

struct SimulationReport {
    double mean_distortion = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    double mean_samples_used = 0.0;  // samples fired strictly before T
    std::uint64_t seed = 0;
    std::string policy_id;

    std::string to_json() const;
};

// ----- series evaluation control -----

// Truncation control for every infinite-series evaluation in the library.
struct SeriesConfig {
    double abs_tol = 1e-12;
    int max_terms = 200;

    void validate() const;
};

// ----- estimator reconstruction -----

// MMSE estimate of the signal at time t given the samples taken so far
// (sorted (time, value) pairs, all times <= t). Brownian motion holds the
// last sample; OU decays it by exp(a*(t - tau)). Before the first sample
// the initial state plays the role of a sample at time zero.
double mmse_reconstruct(const ProcessModel& model,
                        const std::vector<std::pair<double, double>>& samples,
                        double t);

}  // namespace ets
