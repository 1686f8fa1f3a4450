#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ets/models.hpp"

namespace ets {

// Monte Carlo execution settings. Paths are independent work units with
// per-path generator streams derived from (seed, path index), so results
// are bitwise identical for any worker count.
struct SimConfig {
    std::int64_t n_paths = 100000;
    double dt = 1e-4;
    std::uint64_t seed = 12345;
    bool antithetic = false;
    int workers = 0;         // 0: one per hardware thread
    std::string trace_path;  // when set, path 0 dumps t, x, xhat, cumulative distortion

    void validate(double horizon_T) const;  // dt <= T/100 and sane counts
};

// Estimate E[int_0^T (x - xhat)^2 dt] under the policy. Increments are exact
// in distribution; threshold crossings inside a step are refined by linear
// interpolation at endpoint exceedance and by a Brownian-bridge exceedance
// draw otherwise.
SimulationReport simulate_policy(const ProcessModel& model, const PolicyArtifact& policy,
                                 const SimConfig& cfg);

// First-exit statistics of a standard Brownian motion from (-delta, delta),
// all from one path ensemble: firing probability by T, both moments of the
// leftover time (T - tau)^+, and E[exp(-s tau)].
struct HittingStatistics {
    double p_fire = 0.0, p_fire_se = 0.0;
    double mean_residual = 0.0, mean_residual_se = 0.0;
    double mean_residual_sq = 0.0, mean_residual_sq_se = 0.0;
    double mgf_at_s = 0.0, mgf_at_s_se = 0.0;
};

HittingStatistics simulate_hitting_statistics(double delta, double T, double s,
                                              const SimConfig& cfg);

// Counting-process demonstration: sampling at every jump keeps the error
// identically zero at an average rate equal to the jump rate, while
// period-1/rate sampling with the linear-drift estimate pays a strictly
// positive distortion. Distortions are integrated exactly between events.
struct PoissonPathRow {
    std::int64_t path = 0;
    double adaptive_distortion = 0.0;
    double adaptive_rate = 0.0;
    double deterministic_distortion = 0.0;
};

struct PoissonDemoResult {
    double adaptive_distortion = 0.0;  // identically zero by construction
    double adaptive_rate = 0.0, adaptive_rate_se = 0.0;
    double deterministic_distortion = 0.0, deterministic_distortion_se = 0.0;
    std::int64_t n_paths = 0;
};

PoissonDemoResult poisson_demo(double rate, double T, const SimConfig& cfg,
                               std::vector<PoissonPathRow>* rows_out = nullptr);

}  // namespace ets
