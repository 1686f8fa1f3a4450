#include "ets/simulator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ets/models.hpp"

namespace ets {
namespace {

// ----- per-path random streams -----

// Each path owns an engine seeded from (seed, path index) through a splitmix
// chain, so the draw sequence of a path never depends on how paths are
// distributed over workers.
std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t path) {
    std::uint64_t x = seed ^ (path * 0x632BE59BD9B4E019ULL + 0xD1B54A32D192ED03ULL);
    std::uint32_t words[8];
    for (int i = 0; i < 4; ++i) {
        std::uint64_t v = splitmix64(x);
        words[2 * i] = static_cast<std::uint32_t>(v);
        words[2 * i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(words, words + 8);
    return std::mt19937_64(seq);
}

// Draw source with optional record/replay. An antithetic partner consumes its
// twin's draws with normals negated and uniforms reused; if the partner's
// trajectory ever needs more draws than were recorded it falls back to fresh
// draws from its own engine, which keeps the path marginally exact.
struct PathRng {
    std::mt19937_64 eng;
    std::normal_distribution<double> normal{0.0, 1.0};
    std::uniform_real_distribution<double> unif{0.0, 1.0};
    std::vector<double>* rec_normals = nullptr;
    std::vector<double>* rec_uniforms = nullptr;
    const std::vector<double>* play_normals = nullptr;
    const std::vector<double>* play_uniforms = nullptr;
    std::size_t next_normal = 0, next_uniform = 0;

    double gauss() {
        if (play_normals != nullptr && next_normal < play_normals->size())
            return -(*play_normals)[next_normal++];
        double z = normal(eng);
        if (rec_normals != nullptr) rec_normals->push_back(z);
        return z;
    }
    double uniform() {
        if (play_uniforms != nullptr && next_uniform < play_uniforms->size())
            return (*play_uniforms)[next_uniform++];
        double u = unif(eng);
        if (rec_uniforms != nullptr) rec_uniforms->push_back(u);
        return u;
    }
};

// ----- deterministic reductions -----

struct KahanSum {
    double sum = 0.0, carry = 0.0;
    void add(double v) {
        double y = v - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

template <int K>
struct EnsembleStats {
    double mean[K] = {};
    double se[K] = {};
    std::int64_t units = 0;  // independent samples: paths, or pairs when antithetic
    std::int64_t paths = 0;
};

// Runs fn over every path in fixed 4096-path chunks. Within a chunk paths are
// accumulated in index order with compensated summation; chunk partials are
// folded in chunk order afterwards, so the result is bitwise identical for
// any worker count. fn(path, rng, trace) returns K statistics per path.
template <int K, class PathFn>
EnsembleStats<K> run_ensemble(const SimConfig& cfg, PathFn&& fn, std::string* trace_out,
                              std::vector<std::array<double, K>>* per_path = nullptr) {
    std::int64_t n = cfg.n_paths;
    if (cfg.antithetic && (n % 2) != 0) ++n;  // pairs need an even path count
    const std::int64_t chunk = 4096;
    const std::int64_t n_chunks = (n + chunk - 1) / chunk;

    struct ChunkOut {
        double sum[K] = {};
        double sumsq[K] = {};
        std::int64_t units = 0;
        std::string trace;
    };
    std::vector<ChunkOut> outs(static_cast<std::size_t>(n_chunks));
    if (per_path != nullptr) per_path->resize(static_cast<std::size_t>(n));

    std::atomic<std::int64_t> next{0};
    auto work = [&]() {
        std::vector<double> recn, recu;
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= n_chunks) break;
            ChunkOut& out = outs[static_cast<std::size_t>(c)];
            KahanSum sums[K], sqs[K];
            const std::int64_t lo = c * chunk, hi = std::min(n, lo + chunk);
            for (std::int64_t pid = lo; pid < hi;) {
                std::array<double, K> unit;
                if (!cfg.antithetic) {
                    PathRng rng{make_engine(cfg.seed, static_cast<std::uint64_t>(pid))};
                    std::string* tb = (pid == 0 && trace_out != nullptr) ? &out.trace : nullptr;
                    unit = fn(pid, rng, tb);
                    if (per_path != nullptr) (*per_path)[static_cast<std::size_t>(pid)] = unit;
                    ++pid;
                } else {
                    recn.clear();
                    recu.clear();
                    PathRng r0{make_engine(cfg.seed, static_cast<std::uint64_t>(pid))};
                    r0.rec_normals = &recn;
                    r0.rec_uniforms = &recu;
                    std::string* tb = (pid == 0 && trace_out != nullptr) ? &out.trace : nullptr;
                    const std::array<double, K> v0 = fn(pid, r0, tb);
                    PathRng r1{make_engine(cfg.seed, static_cast<std::uint64_t>(pid + 1))};
                    r1.play_normals = &recn;
                    r1.play_uniforms = &recu;
                    const std::array<double, K> v1 = fn(pid + 1, r1, nullptr);
                    for (int k = 0; k < K; ++k) unit[k] = 0.5 * (v0[k] + v1[k]);
                    if (per_path != nullptr) {
                        (*per_path)[static_cast<std::size_t>(pid)] = v0;
                        (*per_path)[static_cast<std::size_t>(pid + 1)] = v1;
                    }
                    pid += 2;
                }
                for (int k = 0; k < K; ++k) {
                    sums[k].add(unit[k]);
                    sqs[k].add(unit[k] * unit[k]);
                }
                ++out.units;
            }
            for (int k = 0; k < K; ++k) {
                out.sum[k] = sums[k].sum;
                out.sumsq[k] = sqs[k].sum;
            }
        }
    };

    int workers = cfg.workers > 0
                      ? cfg.workers
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<std::int64_t>(workers, n_chunks));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    EnsembleStats<K> st;
    KahanSum tot[K], totsq[K];
    for (const auto& out : outs) {
        for (int k = 0; k < K; ++k) {
            tot[k].add(out.sum[k]);
            totsq[k].add(out.sumsq[k]);
        }
        st.units += out.units;
        if (trace_out != nullptr && !out.trace.empty()) *trace_out += out.trace;
    }
    st.paths = n;
    for (int k = 0; k < K; ++k) {
        const double m = tot[k].sum / static_cast<double>(st.units);
        double var = 0.0;
        if (st.units > 1) {
            var = (totsq[k].sum - static_cast<double>(st.units) * m * m) /
                  static_cast<double>(st.units - 1);
            var = std::max(0.0, var);
        }
        st.mean[k] = m;
        st.se[k] = std::sqrt(var / static_cast<double>(st.units));
    }
    return st;
}

// ----- error-process stepping -----

double phi1(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

// One exact-in-distribution transition of de = a e dt + dW over a step h:
// e' = e exp(a h) + sd(h) Z with sd(h)^2 the exact conditional variance.
struct Stepper {
    double a = 0.0;
    double dt = 0.0, alpha_dt = 1.0, sd_dt = 0.0;

    Stepper(double a_, double dt_) : a(a_), dt(dt_) {
        alpha_dt = std::exp(a * dt);
        sd_dt = std::sqrt(dt * phi1(2.0 * a * dt));
    }
    void coeffs(double h, double& alpha, double& sd) const {
        if (h == dt) {
            alpha = alpha_dt;
            sd = sd_dt;
            return;
        }
        alpha = std::exp(a * h);
        sd = std::sqrt(h * phi1(2.0 * a * h));
    }
};

// Path-zero debugging trace. Rows reconstruct the observable pair from the
// error process: the estimate decays deterministically between samples and
// jumps onto the state at each sample, so x = xhat + e at all times.
struct Trace {
    std::string* buf = nullptr;
    double a = 0.0, xhat = 0.0, last_t = 0.0;

    void row(double t, double e, double cum) {
        if (buf == nullptr) return;
        xhat *= std::exp(a * (t - last_t));
        last_t = t;
        char line[128];
        std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.10g\n", t, xhat + e, xhat, cum);
        *buf += line;
    }
    void sample(double e_before) {
        if (buf != nullptr) xhat += e_before;
    }
};

struct PathCtx {
    const Stepper& st;
    PathRng& rng;
    Trace& tr;
};

constexpr double kTimeEps = 1e-12;

// Unmonitored diffusion from t to t_end, accumulating the trapezoid of e^2.
void free_run(PathCtx& c, double& t, double& e, double t_end, double& acc) {
    for (;;) {
        const double remaining = t_end - t;
        if (remaining <= kTimeEps) {
            t = t_end;
            return;
        }
        const double h = std::min(c.st.dt, remaining);
        double alpha, sd;
        c.st.coeffs(h, alpha, sd);
        const double e1 = alpha * e + sd * c.rng.gauss();
        acc += 0.5 * (e * e + e1 * e1) * h;
        e = e1;
        t += h;
        c.tr.row(t, e, acc);
    }
}

struct Crossing {
    bool fired = false;
    double tau = 0.0;
};

// Advance under a constant two-sided threshold until |e| reaches it or t_end
// arrives. Endpoint exceedance is refined by linear interpolation of the
// first crossing inside the step; interior crossings are recovered with a
// Brownian-bridge exceedance draw placed at the step midpoint. The exp calls
// are skipped when both one-sided exponents exceed 35, where the bridge
// probability is below 4e-31 and no uniform needs to be drawn.
Crossing walk_const(PathCtx& c, double thr, double& t, double& e, double t_end, double& acc) {
    if (e >= thr || e <= -thr) return {true, t};
    for (;;) {
        const double remaining = t_end - t;
        if (remaining <= kTimeEps) {
            t = t_end;
            return {};
        }
        const double h = std::min(c.st.dt, remaining);
        double alpha, sd;
        c.st.coeffs(h, alpha, sd);
        const double e1 = alpha * e + sd * c.rng.gauss();
        if (e1 >= thr || e1 <= -thr) {
            const double target = e1 >= thr ? thr : -thr;
            double u = (target - e) / (e1 - e);
            u = std::min(1.0, std::max(0.0, u));
            acc += 0.5 * (e * e + thr * thr) * (u * h);
            t += u * h;
            e = target;
            return {true, t};
        }
        const double v = sd * sd;
        const double dup = (thr - e) * (thr - e1);
        const double ddn = (thr + e) * (thr + e1);
        const double lim = 17.5 * v;
        if (dup < lim || ddn < lim) {
            const double p_up = std::exp(-2.0 * dup / v);
            const double p_dn = std::exp(-2.0 * ddn / v);
            const double u = c.rng.uniform();
            if (u < std::min(1.0, p_up + p_dn)) {
                acc += 0.5 * (e * e + thr * thr) * (0.5 * h);
                t += 0.5 * h;
                e = u < p_up ? thr : -thr;
                return {true, t};
            }
        }
        acc += 0.5 * (e * e + e1 * e1) * h;
        e = e1;
        t += h;
        c.tr.row(t, e, acc);
    }
}

// Advance under the square-root envelope |e| >= sqrt(g (T - t)). The level is
// linearized inside each step for the endpoint refinement and frozen at the
// step midpoint for the bridge draw.
Crossing walk_env(PathCtx& c, double g, double T, double& t, double& e, double& acc) {
    for (;;) {
        const double remaining = T - t;
        if (remaining <= kTimeEps) {
            t = T;
            return {};
        }
        const double h = std::min(c.st.dt, remaining);
        const double thr0 = std::sqrt(g * remaining);
        const double thr1 = std::sqrt(g * std::max(0.0, remaining - h));
        if (e >= thr0 || e <= -thr0) return {true, t};
        double alpha, sd;
        c.st.coeffs(h, alpha, sd);
        const double e1 = alpha * e + sd * c.rng.gauss();
        const double side = e1 >= thr1 ? 1.0 : (e1 <= -thr1 ? -1.0 : 0.0);
        if (side != 0.0) {
            const double b0 = side * thr0, b1 = side * thr1;
            const double denom = (e1 - e) - (b1 - b0);
            double u = denom != 0.0 ? (b0 - e) / denom : 1.0;
            u = std::min(1.0, std::max(0.0, u));
            const double thr_u = thr0 + u * (thr1 - thr0);
            acc += 0.5 * (e * e + thr_u * thr_u) * (u * h);
            t += u * h;
            e = side * thr_u;
            return {true, t};
        }
        const double thr_m = std::sqrt(g * std::max(0.0, remaining - 0.5 * h));
        const double v = sd * sd;
        const double dup = (thr_m - e) * (thr_m - e1);
        const double ddn = (thr_m + e) * (thr_m + e1);
        if (dup <= 0.0 || ddn <= 0.0) {
            // endpoint already beyond the midstep level: treat as a midstep hit
            acc += 0.5 * (e * e + thr_m * thr_m) * (0.5 * h);
            t += 0.5 * h;
            e = (dup <= 0.0 ? 1.0 : -1.0) * thr_m;
            return {true, t};
        }
        const double lim = 17.5 * v;
        if (dup < lim || ddn < lim) {
            const double p_up = std::exp(-2.0 * dup / v);
            const double p_dn = std::exp(-2.0 * ddn / v);
            const double u = c.rng.uniform();
            if (u < std::min(1.0, p_up + p_dn)) {
                acc += 0.5 * (e * e + thr_m * thr_m) * (0.5 * h);
                t += 0.5 * h;
                e = u < p_up ? thr_m : -thr_m;
                return {true, t};
            }
        }
        acc += 0.5 * (e * e + e1 * e1) * h;
        e = e1;
        t += h;
        c.tr.row(t, e, acc);
    }
}

// ----- policy executors -----

double interp_col(const Eigen::VectorXd& tg, const Eigen::MatrixXd& thr, int col, double t) {
    const Eigen::Index M = tg.size();
    if (t <= tg[0]) return thr(0, col);
    if (t >= tg[M - 1]) return thr(M - 1, col);
    Eigen::Index lo = 0, hi = M - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (tg[mid] <= t) lo = mid;
        else hi = mid;
    }
    const double w = (t - tg[lo]) / (tg[hi] - tg[lo]);
    return (1.0 - w) * thr(lo, col) + w * thr(hi, col);
}

struct SimPlan {
    double a = 0.0, T = 1.0, x0 = 0.0;
    PolicyKind kind = PolicyKind::UniformDeterministic;
    GridMonitoring monitoring = GridMonitoring::GridTimes;
    int N = 0;
    const PolicyArtifact* pol = nullptr;
    std::vector<double> g_alpha, g_sd, g_dt;  // grid-time monitoring coefficients
    std::string policy_id;
};

// Simulates one path of the error process under the policy and returns
// {integrated squared error, samples fired strictly before T}.
std::array<double, 2> run_policy_path(const SimPlan& plan, const Stepper& st, PathRng& rng,
                                      std::string* tbuf) {
    Trace tr;
    tr.a = plan.a;
    tr.xhat = plan.x0;
    if (tbuf != nullptr) {
        tr.buf = tbuf;
        tr.row(0.0, 0.0, 0.0);
    }
    PathCtx c{st, rng, tr};
    double t = 0.0, e = 0.0, acc = 0.0, used = 0.0;

    switch (plan.kind) {
        case PolicyKind::UniformDeterministic: {
            const Eigen::VectorXd& times = plan.pol->times;
            for (Eigen::Index i = 0; i < times.size(); ++i) {
                free_run(c, t, e, times[i], acc);
                tr.sample(e);
                e = 0.0;
                tr.row(t, 0.0, acc);
                if (times[i] < plan.T - kTimeEps) used += 1.0;
            }
            free_run(c, t, e, plan.T, acc);
            break;
        }
        case PolicyKind::DeltaThresholds: {
            const Eigen::VectorXd& rho = plan.pol->rho;
            // the k-th chronological stage rescales by the remaining horizon
            for (int k = 1; k <= plan.N; ++k) {
                const double thr = rho[plan.N - k] * std::sqrt(std::max(0.0, plan.T - t));
                if (thr <= 0.0) break;
                const Crossing cr = walk_const(c, thr, t, e, plan.T, acc);
                if (!cr.fired) break;
                tr.sample(e);
                e = 0.0;
                tr.row(t, 0.0, acc);
                used += 1.0;
            }
            free_run(c, t, e, plan.T, acc);
            break;
        }
        case PolicyKind::OptimalEnvelope: {
            const Eigen::VectorXd& gamma = plan.pol->gamma;
            for (int k = 1; k <= plan.N; ++k) {
                const Crossing cr = walk_env(c, gamma[plan.N - k], plan.T, t, e, acc);
                if (!cr.fired) break;
                tr.sample(e);
                e = 0.0;
                tr.row(t, 0.0, acc);
                used += 1.0;
            }
            free_run(c, t, e, plan.T, acc);
            break;
        }
        case PolicyKind::GriddedThresholds: {
            const Eigen::VectorXd& tg = plan.pol->time_grid;
            const Eigen::MatrixXd& thr = plan.pol->thresholds;
            int m = plan.N;
            if (plan.monitoring == GridMonitoring::GridTimes) {
                // the policy is defined at its own grid times only: monitor,
                // then propagate exactly across the interval, no bridge
                for (Eigen::Index i = 0; i + 1 < tg.size(); ++i) {
                    while (m >= 1 && std::abs(e) >= thr(i, m - 1)) {
                        tr.sample(e);
                        e = 0.0;
                        tr.row(tg[i], 0.0, acc);
                        used += 1.0;
                        --m;
                    }
                    const double e1 =
                        plan.g_alpha[static_cast<std::size_t>(i)] * e +
                        plan.g_sd[static_cast<std::size_t>(i)] * rng.gauss();
                    acc += 0.5 * (e * e + e1 * e1) * plan.g_dt[static_cast<std::size_t>(i)];
                    e = e1;
                    tr.row(tg[i + 1], e, acc);
                }
                // the last grid point sits at the horizon where a sample is worthless
            } else {
                // stage-fixed: freeze the current budget's level at stage entry
                // and watch it continuously until it fires
                while (m >= 1 && t < plan.T - kTimeEps) {
                    const double d = interp_col(tg, thr, m - 1, t);
                    if (d <= 0.0) {
                        tr.sample(e);
                        e = 0.0;
                        used += 1.0;
                        --m;
                        continue;
                    }
                    const Crossing cr = walk_const(c, d, t, e, plan.T, acc);
                    if (!cr.fired) break;
                    tr.sample(e);
                    e = 0.0;
                    tr.row(t, 0.0, acc);
                    used += 1.0;
                    --m;
                }
                free_run(c, t, e, plan.T, acc);
            }
            break;
        }
    }
    return {acc, used};
}

std::string policy_tag(const PolicyArtifact& p) {
    const char* k = "";
    switch (p.kind) {
        case PolicyKind::UniformDeterministic: k = "uniform_deterministic"; break;
        case PolicyKind::DeltaThresholds: k = "delta_thresholds"; break;
        case PolicyKind::OptimalEnvelope: k = "optimal_envelope"; break;
        case PolicyKind::GriddedThresholds:
            k = p.monitoring == GridMonitoring::GridTimes ? "gridded_thresholds"
                                                          : "stage_thresholds";
            break;
    }
    return std::string(k) + "/N=" + std::to_string(p.budget_N);
}

// Smallest threshold the policy applies near the horizon, evaluated at
// t = T - 100 dt. Used only to warn when dt cannot resolve the final levels.
double near_horizon_threshold(const PolicyArtifact& p, double T, double dt) {
    const double t_star = T - 100.0 * dt;
    if (t_star <= 0.0) return std::numeric_limits<double>::infinity();
    switch (p.kind) {
        case PolicyKind::DeltaThresholds:
            return p.rho.minCoeff() * std::sqrt(T - t_star);
        case PolicyKind::OptimalEnvelope:
            return std::sqrt(p.gamma.minCoeff() * (T - t_star));
        case PolicyKind::GriddedThresholds: {
            double best = std::numeric_limits<double>::infinity();
            for (int m = 1; m <= p.budget_N; ++m) {
                const double v = interp_col(p.time_grid, p.thresholds, m - 1, t_star);
                if (v > 0.0) best = std::min(best, v);
            }
            return best;
        }
        case PolicyKind::UniformDeterministic: break;
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace

// ----- configuration -----

void SimConfig::validate(double horizon_T) const {
    if (n_paths < 1) throw std::invalid_argument("SimConfig: n_paths must be at least 1");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("SimConfig: dt must be positive");
    if (dt > horizon_T / 100.0)
        throw std::invalid_argument("SimConfig: dt must not exceed T/100");
    if (workers < 0) throw std::invalid_argument("SimConfig: workers must be nonnegative");
}

// ----- policy simulation -----

SimulationReport simulate_policy(const ProcessModel& model, const PolicyArtifact& policy,
                                 const SimConfig& cfg) {
    model.validate();
    policy.validate(model.horizon_T);
    cfg.validate(model.horizon_T);
    if ((policy.kind == PolicyKind::DeltaThresholds ||
         policy.kind == PolicyKind::OptimalEnvelope) &&
        model.kind != ProcessKind::BrownianMotion)
        throw std::invalid_argument(
            "simulate_policy: threshold-coefficient policies assume a driftless model; "
            "use a gridded policy for a drifted process");
    if (policy.kind == PolicyKind::GriddedThresholds) {
        const double t_last = policy.time_grid[policy.time_grid.size() - 1];
        if (std::abs(t_last - model.horizon_T) > 1e-9 * std::max(1.0, model.horizon_T))
            throw std::invalid_argument(
                "simulate_policy: policy time grid does not end at the model horizon");
    }

    const double thr_min = near_horizon_threshold(policy, model.horizon_T, cfg.dt);
    if (std::isfinite(thr_min) && thr_min > 0.0 && cfg.dt > thr_min * thr_min)
        std::fprintf(stderr,
                     "warning: dt = %g is coarse against the smallest threshold near the "
                     "horizon (dt/thr^2 = %.3g at t = T - 100 dt); crossings there may be "
                     "resolved late\n",
                     cfg.dt, cfg.dt / (thr_min * thr_min));

    SimPlan plan;
    plan.a = model.kind == ProcessKind::OrnsteinUhlenbeck ? model.drift_a : 0.0;
    plan.T = model.horizon_T;
    plan.x0 = model.initial_state;
    plan.kind = policy.kind;
    plan.monitoring = policy.monitoring;
    plan.N = policy.budget_N;
    plan.pol = &policy;
    plan.policy_id = policy_tag(policy);
    if (policy.kind == PolicyKind::GriddedThresholds &&
        policy.monitoring == GridMonitoring::GridTimes) {
        const Eigen::Index M = policy.time_grid.size();
        plan.g_alpha.resize(static_cast<std::size_t>(M - 1));
        plan.g_sd.resize(static_cast<std::size_t>(M - 1));
        plan.g_dt.resize(static_cast<std::size_t>(M - 1));
        for (Eigen::Index i = 0; i + 1 < M; ++i) {
            const double h = policy.time_grid[i + 1] - policy.time_grid[i];
            plan.g_dt[static_cast<std::size_t>(i)] = h;
            plan.g_alpha[static_cast<std::size_t>(i)] = std::exp(plan.a * h);
            plan.g_sd[static_cast<std::size_t>(i)] = std::sqrt(h * phi1(2.0 * plan.a * h));
        }
    }

    const Stepper st(plan.a, cfg.dt);
    std::string trace;
    std::string* tptr = cfg.trace_path.empty() ? nullptr : &trace;
    auto fn = [&](std::int64_t, PathRng& rng, std::string* tb) {
        return run_policy_path(plan, st, rng, tb);
    };
    const EnsembleStats<2> stn = run_ensemble<2>(cfg, fn, tptr);

    if (tptr != nullptr) {
        std::ofstream out(cfg.trace_path);
        if (!out)
            throw std::runtime_error("simulate_policy: cannot write trace file " +
                                     cfg.trace_path);
        out << "t,x,xhat,cumulative_distortion\n" << trace;
    }

    SimulationReport rep;
    rep.mean_distortion = stn.mean[0];
    rep.std_error = stn.se[0];
    rep.n_paths = stn.paths;
    rep.mean_samples_used = stn.mean[1];
    rep.seed = cfg.seed;
    rep.policy_id = plan.policy_id;
    return rep;
}

// ----- first-exit statistics -----

HittingStatistics simulate_hitting_statistics(double delta, double T, double s,
                                              const SimConfig& cfg) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("simulate_hitting_statistics: delta must be positive");
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("simulate_hitting_statistics: horizon must be positive");
    if (!(s >= 0.0) || !std::isfinite(s))
        throw std::invalid_argument(
            "simulate_hitting_statistics: transform parameter s must be nonnegative");
    cfg.validate(T);

    // Stopping at T alone would bias E[exp(-s tau)] because paths still alive
    // carry weight between exp(-s t_cap) and exp(-s T). The run is extended
    // until the discarded tail weighs less than exp(-40) or the exit has
    // become essentially certain; survivors contribute their cap weight.
    double cap = T;
    if (s > 0.0) cap = std::max(T, std::min(16.0 * delta * delta, T + 40.0 / s));

    const Stepper st(0.0, cfg.dt);
    auto fn = [&](std::int64_t, PathRng& rng, std::string*) -> std::array<double, 4> {
        Trace tr;
        PathCtx c{st, rng, tr};
        double t = 0.0, e = 0.0, acc = 0.0;
        const Crossing cr = walk_const(c, delta, t, e, cap, acc);
        double pf = 0.0, r1 = 0.0, r2 = 0.0;
        double m;
        if (cr.fired) {
            if (cr.tau <= T) {
                pf = 1.0;
                const double r = T - cr.tau;
                r1 = r;
                r2 = r * r;
            }
            m = std::exp(-s * cr.tau);
        } else {
            m = std::exp(-s * cap);
        }
        return {pf, r1, r2, m};
    };
    const EnsembleStats<4> stn = run_ensemble<4>(cfg, fn, nullptr);

    HittingStatistics h;
    h.p_fire = stn.mean[0];
    h.p_fire_se = stn.se[0];
    h.mean_residual = stn.mean[1];
    h.mean_residual_se = stn.se[1];
    h.mean_residual_sq = stn.mean[2];
    h.mean_residual_sq_se = stn.se[2];
    h.mgf_at_s = stn.mean[3];
    h.mgf_at_s_se = stn.se[3];
    return h;
}

// ----- counting-process demonstration -----

PoissonDemoResult poisson_demo(double rate, double T, const SimConfig& cfg,
                               std::vector<PoissonPathRow>* rows_out) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("poisson_demo: rate must be positive");
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("poisson_demo: horizon must be positive");
    cfg.validate(T);

    auto fn = [&](std::int64_t, PathRng& rng, std::string*) -> std::array<double, 3> {
        // one jump realization drives both schemes; between events the
        // periodic scheme's error n_since - rate (t - d_last) is linear, so
        // its squared integral is accumulated exactly piece by piece
        double t_prev = 0.0, d_last = 0.0, acc = 0.0, n_since = 0.0;
        double next_jump = -std::log1p(-rng.uniform()) / rate;
        double next_sample = 1.0 / rate;
        std::int64_t jumps = 0, j = 1;
        for (;;) {
            const double t_now = std::min(T, std::min(next_jump, next_sample));
            const double w1 = t_prev - d_last, w2 = t_now - d_last;
            acc += n_since * n_since * (w2 - w1) - n_since * rate * (w2 * w2 - w1 * w1) +
                   rate * rate * (w2 * w2 * w2 - w1 * w1 * w1) / 3.0;
            t_prev = t_now;
            if (t_now >= T) break;
            if (next_jump <= next_sample) {
                jumps += 1;
                n_since += 1.0;
                next_jump += -std::log1p(-rng.uniform()) / rate;
            } else {
                d_last = next_sample;
                n_since = 0.0;
                j += 1;
                next_sample = static_cast<double>(j) / rate;
            }
        }
        // sampling at every jump reproduces the path identically, so the
        // adaptive distortion is zero by construction, not by cancellation
        return {0.0, static_cast<double>(jumps) / T, acc};
    };

    std::vector<std::array<double, 3>> per_path;
    const EnsembleStats<3> stn =
        run_ensemble<3>(cfg, fn, nullptr, rows_out != nullptr ? &per_path : nullptr);

    PoissonDemoResult r;
    r.adaptive_distortion = stn.mean[0];
    r.adaptive_rate = stn.mean[1];
    r.adaptive_rate_se = stn.se[1];
    r.deterministic_distortion = stn.mean[2];
    r.deterministic_distortion_se = stn.se[2];
    r.n_paths = stn.paths;
    if (rows_out != nullptr) {
        rows_out->clear();
        rows_out->reserve(per_path.size());
        for (std::size_t i = 0; i < per_path.size(); ++i)
            rows_out->push_back({static_cast<std::int64_t>(i), per_path[i][0], per_path[i][1],
                                 per_path[i][2]});
    }
    return r;
}

}  // namespace ets
