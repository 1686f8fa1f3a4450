#include "ets/models.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ets {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

bool finite_nonneg(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]) || v[i] < 0.0) return false;
    return true;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

const char* kind_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::UniformDeterministic: return "uniform_deterministic";
        case PolicyKind::DeltaThresholds: return "delta_thresholds";
        case PolicyKind::OptimalEnvelope: return "optimal_envelope";
        case PolicyKind::GriddedThresholds: return "gridded_thresholds";
    }
    throw std::invalid_argument("unknown policy kind");
}

PolicyKind kind_from_name(const std::string& s) {
    if (s == "uniform_deterministic") return PolicyKind::UniformDeterministic;
    if (s == "delta_thresholds") return PolicyKind::DeltaThresholds;
    if (s == "optimal_envelope") return PolicyKind::OptimalEnvelope;
    if (s == "gridded_thresholds") return PolicyKind::GriddedThresholds;
    throw std::invalid_argument("unknown policy kind: " + s);
}

}  // namespace

void ProcessModel::validate() const {
    require(std::isfinite(horizon_T) && horizon_T > 0.0, "horizon_T must be positive");
    require(std::isfinite(drift_a), "drift_a must be finite");
    require(std::isfinite(initial_state), "initial_state must be finite");
    if (kind == ProcessKind::BrownianMotion)
        require(drift_a == 0.0, "BrownianMotion requires drift_a = 0");
}

ProcessModel brownian_motion(double horizon_T, double initial_state) {
    ProcessModel m{ProcessKind::BrownianMotion, 0.0, horizon_T, initial_state};
    m.validate();
    return m;
}

ProcessModel ornstein_uhlenbeck(double drift_a, double horizon_T, double initial_state) {
    ProcessModel m{ProcessKind::OrnsteinUhlenbeck, drift_a, horizon_T, initial_state};
    m.validate();
    return m;
}

double normalize_ou(double a, double T) {
    require(std::isfinite(a) && std::isfinite(T) && T > 0.0, "normalize_ou requires finite a and T > 0");
    return a * T;
}

void PolicyArtifact::validate(double horizon_T) const {
    require(budget_N >= 1, "budget_N must be >= 1");
    require(std::isfinite(horizon_T) && horizon_T > 0.0, "horizon_T must be positive");
    switch (kind) {
        case PolicyKind::UniformDeterministic: {
            require(times.size() == budget_N, "uniform policy needs budget_N sample times");
            for (Eigen::Index i = 0; i < times.size(); ++i) {
                require(std::isfinite(times[i]) && times[i] > 0.0 && times[i] <= horizon_T,
                        "sample times must lie in (0, T]");
                if (i > 0) require(times[i] > times[i - 1], "sample times must be strictly increasing");
            }
            break;
        }
        case PolicyKind::DeltaThresholds: {
            require(rho.size() == budget_N, "delta policy needs budget_N threshold coefficients");
            require(finite_nonneg(rho), "threshold coefficients must be finite and >= 0");
            if (c.size() > 0) require(c.size() == budget_N && finite_nonneg(c), "bad cost coefficients");
            if (lambda_star.size() > 0)
                require(lambda_star.size() == budget_N && finite_nonneg(lambda_star), "bad minimizers");
            break;
        }
        case PolicyKind::OptimalEnvelope: {
            require(theta.size() == budget_N + 1, "envelope policy needs N+1 theta entries");
            require(theta[0] == 1.0, "theta[0] must be 1");
            for (Eigen::Index i = 1; i < theta.size(); ++i)
                require(std::isfinite(theta[i]) && theta[i] > 0.0 && theta[i] < theta[i - 1],
                        "theta must be positive and strictly decreasing");
            require(gamma.size() == budget_N && finite_nonneg(gamma), "bad envelope coefficients");
            break;
        }
        case PolicyKind::GriddedThresholds: {
            require(time_grid.size() >= 2, "gridded policy needs at least two grid times");
            for (Eigen::Index i = 0; i < time_grid.size(); ++i) {
                require(std::isfinite(time_grid[i]) && time_grid[i] >= 0.0 && time_grid[i] <= horizon_T,
                        "grid times must lie in [0, T]");
                if (i > 0) require(time_grid[i] > time_grid[i - 1], "grid times must be strictly increasing");
            }
            require(thresholds.rows() == time_grid.size() && thresholds.cols() == budget_N,
                    "threshold table must be (grid times) x (budget levels)");
            for (Eigen::Index m = 0; m < thresholds.cols(); ++m) {
                for (Eigen::Index i = 0; i < thresholds.rows(); ++i) {
                    const double v = thresholds(i, m);
                    require(std::isfinite(v) && v >= 0.0, "thresholds must be finite and >= 0");
                    // envelopes shrink toward the horizon; allow rounding slack
                    if (i > 0)
                        require(v <= thresholds(i - 1, m) + 1e-9, "threshold rows must be non-increasing in time");
                }
            }
            break;
        }
    }
}

std::string PolicyArtifact::to_json() const {
    json j;
    j["kind"] = kind_name(kind);
    j["budget"] = budget_N;
    json coeff = json::object();
    json grid;
    switch (kind) {
        case PolicyKind::UniformDeterministic:
            coeff["times"] = vector_to_json(times);
            break;
        case PolicyKind::DeltaThresholds:
            coeff["rho"] = vector_to_json(rho);
            coeff["c"] = vector_to_json(c);
            coeff["lambda_star"] = vector_to_json(lambda_star);
            break;
        case PolicyKind::OptimalEnvelope:
            coeff["theta"] = vector_to_json(theta);
            coeff["gamma"] = vector_to_json(gamma);
            break;
        case PolicyKind::GriddedThresholds: {
            grid = json::object();
            grid["times"] = vector_to_json(time_grid);
            json rows = json::array();
            for (Eigen::Index i = 0; i < thresholds.rows(); ++i) {
                json row = json::array();
                for (Eigen::Index m = 0; m < thresholds.cols(); ++m) row.push_back(thresholds(i, m));
                rows.push_back(std::move(row));
            }
            grid["thresholds"] = std::move(rows);
            grid["monitoring"] = monitoring == GridMonitoring::GridTimes ? "grid_times" : "stage_fixed";
            break;
        }
    }
    j["coefficients"] = std::move(coeff);
    j["grid"] = std::move(grid);  // null unless gridded
    return j.dump(2);
}

PolicyArtifact PolicyArtifact::from_json(const std::string& text) {
    json j = json::parse(text);
    PolicyArtifact p;
    p.kind = kind_from_name(j.at("kind").get<std::string>());
    p.budget_N = j.at("budget").get<int>();
    const json& coeff = j.at("coefficients");
    switch (p.kind) {
        case PolicyKind::UniformDeterministic:
            p.times = vector_from_json(coeff.at("times"));
            break;
        case PolicyKind::DeltaThresholds:
            p.rho = vector_from_json(coeff.at("rho"));
            if (coeff.contains("c")) p.c = vector_from_json(coeff.at("c"));
            if (coeff.contains("lambda_star")) p.lambda_star = vector_from_json(coeff.at("lambda_star"));
            break;
        case PolicyKind::OptimalEnvelope:
            p.theta = vector_from_json(coeff.at("theta"));
            p.gamma = vector_from_json(coeff.at("gamma"));
            break;
        case PolicyKind::GriddedThresholds: {
            const json& grid = j.at("grid");
            p.time_grid = vector_from_json(grid.at("times"));
            const json& rows = grid.at("thresholds");
            const Eigen::Index nt = static_cast<Eigen::Index>(rows.size());
            const Eigen::Index nm = nt > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
            p.thresholds.resize(nt, nm);
            for (Eigen::Index i = 0; i < nt; ++i) {
                if (static_cast<Eigen::Index>(rows[i].size()) != nm)
                    throw std::invalid_argument("ragged threshold table");
                for (Eigen::Index m = 0; m < nm; ++m) p.thresholds(i, m) = rows[i][m].get<double>();
            }
            const std::string mon = grid.value("monitoring", "grid_times");
            if (mon == "grid_times") p.monitoring = GridMonitoring::GridTimes;
            else if (mon == "stage_fixed") p.monitoring = GridMonitoring::StageFixed;
            else throw std::invalid_argument("unknown monitoring mode: " + mon);
            break;
        }
    }
    return p;
}

std::string SimulationReport::to_json() const {
    json j;
    j["mean_distortion"] = mean_distortion;
    j["std_error"] = std_error;
    j["n_paths"] = n_paths;
    j["mean_samples_used"] = mean_samples_used;
    j["seed"] = seed;
    j["policy_id"] = policy_id;
    return j.dump(2);
}

void SeriesConfig::validate() const {
    require(std::isfinite(abs_tol) && abs_tol > 0.0, "abs_tol must be positive");
    require(max_terms >= 1, "max_terms must be >= 1");
}

double mmse_reconstruct(const ProcessModel& model,
                        const std::vector<std::pair<double, double>>& samples, double t) {
    model.validate();
    require(std::isfinite(t) && t >= 0.0 && t <= model.horizon_T, "t must lie in [0, T]");
    double tau = 0.0, value = model.initial_state;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        require(samples[i].first >= 0.0 && samples[i].first <= t, "sample times must lie in [0, t]");
        if (i > 0) require(samples[i].first >= samples[i - 1].first, "sample times must be sorted");
        tau = samples[i].first;
        value = samples[i].second;
    }
    if (model.kind == ProcessKind::BrownianMotion) return value;
    return value * std::exp(model.drift_a * (t - tau));
}

}  // namespace ets
