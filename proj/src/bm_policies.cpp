#include "ets/bm_policies.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ets/bm_series.hpp"

namespace ets {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// One stage of the threshold cost: minimize phi + kappa*psi over lambda.
// Grid scan brackets the minimum, golden section refines it; the argmin is
// rejected if it sits on the bracket edge (flat or out-of-range objective).
void minimize_stage(double kappa, const SeriesConfig& scfg, const OptimizerConfig& ocfg,
                    double& lambda_out, double& value_out) {
    const auto cost = [&](double l) {
        return phi(LambdaParam(l), scfg) + kappa * psi(LambdaParam(l), scfg);
    };
    const auto xs = log_grid(ocfg.lambda_lo, ocfg.lambda_hi, ocfg.grid_points);
    const ScanMinimum scan = scan_minimum(cost, xs);
    if (!scan.interior) {
        std::ostringstream os;
        os << "stage cost has no interior minimum on lambda bracket [" << ocfg.lambda_lo
           << ", " << ocfg.lambda_hi << "] (objective flat or minimized at the edge)";
        throw std::runtime_error(os.str());
    }
    const double lo = xs[static_cast<std::size_t>(scan.scan_index - 1)];
    const double hi = xs[static_cast<std::size_t>(scan.scan_index + 1)];
    lambda_out = golden_minimum(cost, lo, hi, ocfg.rel_tol);
    value_out = cost(lambda_out);
}

}  // namespace

BmPolicyResult deterministic_policy(double T, int N) {
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    BmPolicyResult out;
    out.policy.kind = PolicyKind::UniformDeterministic;
    out.policy.budget_N = N;
    out.policy.times.resize(N);
    for (int i = 1; i <= N; ++i) out.policy.times[i - 1] = T * i / (N + 1.0);
    out.policy.validate(T);
    out.analytic_distortion = 1.0 / (N + 1.0);
    out.expected_samples = N;
    return out;
}

BmPolicyResult delta_recursion(int N, const SeriesConfig& scfg, const OptimizerConfig& ocfg) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    scfg.validate();
    ocfg.validate();
    BmPolicyResult out;
    out.policy.kind = PolicyKind::DeltaThresholds;
    out.policy.budget_N = N;
    out.policy.rho.resize(N);
    out.policy.c.resize(N);
    out.policy.lambda_star.resize(N);
    double c_prev = 0.5;  // seed: the psi term vanishes for the first stage
    for (int k = 1; k <= N; ++k) {
        double lambda = 0.0, value = 0.0;
        minimize_stage(0.5 - c_prev, scfg, ocfg, lambda, value);
        out.policy.lambda_star[k - 1] = lambda;
        out.policy.c[k - 1] = value;
        out.policy.rho[k - 1] = kPi / (2.0 * std::sqrt(2.0 * lambda));
        c_prev = value;
    }
    out.policy.validate(1.0);
    out.analytic_distortion = out.policy.c[N - 1];
    const Eigen::VectorXd xi = delta_expected_samples(N, out.policy.lambda_star, scfg);
    out.expected_samples = xi[N - 1];
    return out;
}

Eigen::VectorXd delta_expected_samples(int N, const Eigen::VectorXd& lambda_stars,
                                       const SeriesConfig& cfg) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (lambda_stars.size() < N) throw std::invalid_argument("need a lambda per budget level");
    Eigen::VectorXd xi(N);
    double prev = 0.0;
    for (int k = 1; k <= N; ++k) {
        const double p = firing_probability(LambdaParam(lambda_stars[k - 1]), cfg);
        xi[k - 1] = (1.0 + prev) * p;
        prev = xi[k - 1];
    }
    return xi;
}

double snell_constant(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
    const double radicand = (5.0 + beta) * (5.0 + beta) - 24.0;
    if (!(radicand > 0.0)) throw std::runtime_error("degenerate envelope root");  // impossible on (0,1]
    const double a = ((5.0 + beta) - std::sqrt(radicand)) / 4.0;
    // the closed form is valid only if the matched quartic is a perfect
    // square; its discriminant must vanish
    const double residual = 4.0 * (a - 1.0) * (a - 1.0) - (4.0 / 3.0) * a * (a - 1.0 + beta);
    if (std::abs(residual) > 1e-12)
        throw std::runtime_error("envelope discriminant check failed");
    return a;
}

BmPolicyResult optimal_envelope_recursion(int N) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    BmPolicyResult out;
    out.policy.kind = PolicyKind::OptimalEnvelope;
    out.policy.budget_N = N;
    out.policy.theta.resize(N + 1);
    out.policy.gamma.resize(N);
    out.policy.theta[0] = 1.0;
    for (int k = 1; k <= N; ++k) {
        const double prev = out.policy.theta[k - 1];
        const double theta = 1.0 - snell_constant(prev);
        out.policy.theta[k] = theta;
        out.policy.gamma[k - 1] = std::sqrt(3.0 * (prev - theta) / (1.0 - theta));
    }
    out.policy.validate(1.0);
    out.analytic_distortion = out.policy.theta[N];
    out.expected_samples = N;  // shrinking envelopes are hit almost surely
    return out;
}

}  // namespace ets
