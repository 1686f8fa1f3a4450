#include "ets/ou_policies.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ets/minimize.hpp"

namespace ets {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// (exp(z) - 1)/z, continuous at 0
double phi1(double z) {
    if (z == 0.0) return 1.0;
    return std::expm1(z) / z;
}

// (exp(z) - 1 - z)/z^2; Taylor below 1e-3 to dodge the cancellation
double phi2(double z) {
    if (std::abs(z) < 1e-3)
        return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
    return (std::expm1(z) - z) / (z * z);
}

// ----- Crank-Nicolson backward solver -----
//
// w_t + (1/2) w_xx + a x w_x + f(t) = 0 on [-delta, delta] x [0, 1],
// w(+-delta, t) = b(t), w(x, 1) = 0. Boundary and source are sampled on the
// uniform time grid; on_slice(j, w) receives every solved slice, j = m..0.
// The implicit tridiagonal factor is constant in time, so the Thomas
// elimination coefficients are precomputed once.
void cn_backward(double a, double delta, int m_time, int n_x,
                 const Eigen::VectorXd* source_mid,  // size m_time, f(t_{j+1/2}); null = 0
                 const Eigen::VectorXd* boundary,    // size m_time+1, b(t_j); null = 0
                 const std::function<void(int, const Eigen::VectorXd&)>& on_slice) {
    const int m = m_time, n = n_x;
    const double dt = 1.0 / m;
    const double h = 2.0 * delta / (n - 1);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = -delta + h * i;

    // interior operator L: lo w_{i-1} + di w_i + up w_{i+1}
    Eigen::VectorXd lo(n), up(n);
    const double di = -1.0 / (h * h);
    for (int i = 1; i < n - 1; ++i) {
        lo[i] = 0.5 / (h * h) - a * x[i] / (2.0 * h);
        up[i] = 0.5 / (h * h) + a * x[i] / (2.0 * h);
    }

    // Thomas factorization of I - (dt/2) L over the n-2 interior nodes
    const double diag = 1.0 - 0.5 * dt * di;
    Eigen::VectorXd cp(n), den(n);
    den[1] = diag;
    cp[1] = -0.5 * dt * up[1] / den[1];
    for (int i = 2; i < n - 1; ++i) {
        den[i] = diag - (-0.5 * dt * lo[i]) * cp[i - 1];
        cp[i] = -0.5 * dt * up[i] / den[i];
    }

    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);  // terminal slice
    if (boundary) w[0] = w[n - 1] = (*boundary)[m];
    on_slice(m, w);

    Eigen::VectorXd rhs(n), wn(n);
    for (int j = m - 1; j >= 0; --j) {
        const double b_new = boundary ? (*boundary)[j] : 0.0;
        const double f_mid = source_mid ? (*source_mid)[j] : 0.0;
        // explicit half step (I + dt/2 L) w^{j+1} + dt f
        for (int i = 1; i < n - 1; ++i)
            rhs[i] = w[i] + 0.5 * dt * (lo[i] * w[i - 1] + di * w[i] + up[i] * w[i + 1]) + dt * f_mid;
        // implicit-side boundary values move to the right-hand side
        rhs[1] += 0.5 * dt * lo[1] * b_new;
        rhs[n - 2] += 0.5 * dt * up[n - 2] * b_new;
        // Thomas forward/backward sweeps
        rhs[1] /= den[1];
        for (int i = 2; i < n - 1; ++i) rhs[i] = (rhs[i] - (-0.5 * dt * lo[i]) * rhs[i - 1]) / den[i];
        wn[n - 2] = rhs[n - 2];
        for (int i = n - 3; i >= 1; --i) wn[i] = rhs[i] - cp[i] * wn[i + 1];
        wn[0] = wn[n - 1] = b_new;
        w.swap(wn);
        if (!(w.cwiseAbs().maxCoeff() < 1e12)) {
            std::ostringstream os;
            os << "parabolic solve blew up on grid m_time=" << m << ", n_x=" << n
               << "; increase m_time";
            throw std::runtime_error(os.str());
        }
        on_slice(j, w);
    }
}

// center column w(0, t_j) for all j
Eigen::VectorXd cn_center_curve(double a, double delta, const GridSpec& grid,
                                const Eigen::VectorXd* source_mid, const Eigen::VectorXd* boundary) {
    Eigen::VectorXd curve(grid.m_time + 1);
    const int center = (grid.n_x - 1) / 2;
    cn_backward(a, delta, grid.m_time, grid.n_x, source_mid, boundary,
                [&](int j, const Eigen::VectorXd& w) { curve[j] = w[center]; });
    return curve;
}

// stagewise threshold costs: given the optimal continuation curve
// J_prev(t_j) for m-1 remaining samples, the cost-to-go with m remaining and
// level delta is J_m(t) = R0(1-t) - delta^2 v(0,t) - B(0,t), where v and B
// solve the homogeneous equation with boundaries g(1-t) and
// R0(1-t) - J_prev(t) respectively.
struct StageCurves {
    Eigen::VectorXd r0;  // R0(1 - t_j)
    Eigen::VectorXd g;   // g(1 - t_j)
};

StageCurves stage_curves(double a, const GridSpec& grid) {
    StageCurves sc;
    const int m = grid.m_time;
    sc.r0.resize(m + 1);
    sc.g.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double u = 1.0 - static_cast<double>(j) / m;
        sc.r0[j] = ou_free_distortion(a, u);
        sc.g[j] = ou_error_gain(a, u);
    }
    return sc;
}

Eigen::VectorXd stage_cost_curve(double a, double delta, const GridSpec& grid,
                                 const StageCurves& sc, const Eigen::VectorXd& v_center,
                                 const Eigen::VectorXd& j_prev) {
    const Eigen::VectorXd b = sc.r0 - j_prev;
    const Eigen::VectorXd bc = cn_center_curve(a, delta, grid, nullptr, &b);
    return sc.r0 - delta * delta * v_center - bc;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

}  // namespace

void GridSpec::validate() const {
    if (m_time < 100) throw std::invalid_argument("m_time must be >= 100");
    if (n_x < 201 || n_x % 2 == 0) throw std::invalid_argument("n_x must be odd and >= 201");
}

double GridSpec::resolved_half_width(double a) const {
    if (x_half_width > 0.0) return x_half_width;
    double w = 5.0;
    if (a < 0.0) w = std::max(w, 5.0 / std::sqrt(-2.0 * a));
    return w;
}

double ou_free_distortion(double a, double u) {
    if (!(u >= 0.0)) throw std::invalid_argument("u must be >= 0");
    return u * u * phi2(2.0 * a * u);
}

double ou_error_gain(double a, double u) {
    if (!(u >= 0.0)) throw std::invalid_argument("u must be >= 0");
    return u * phi1(2.0 * a * u);
}

double ou_deterministic(double a, double T, int N) {
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    const double u = T / (N + 1.0);
    return (N + 1.0) * ou_free_distortion(a, u);
}

ValueGrid ou_delta_pde(double a, double delta, const GridSpec& grid) {
    grid.validate();
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    const int m = grid.m_time, n = grid.n_x;
    ValueGrid out;
    out.times.resize(m + 1);
    for (int j = 0; j <= m; ++j) out.times[j] = static_cast<double>(j) / m;
    out.states.resize(n);
    const double h = 2.0 * delta / (n - 1);
    for (int i = 0; i < n; ++i) out.states[i] = -delta + h * i;
    out.values.resize(m + 1, n);
    out.thresholds = Eigen::VectorXd::Constant(m + 1, delta);

    Eigen::VectorXd source(m);
    for (int j = 0; j < m; ++j) source[j] = std::exp(-2.0 * a * (j + 0.5) / m);
    cn_backward(a, delta, m, n, &source, nullptr,
                [&](int j, const Eigen::VectorXd& w) { out.values.row(j) = w.transpose(); });
    return out;
}

double ou_delta_distortion(double a, double delta, const GridSpec& grid, int N) {
    grid.validate();
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    const StageCurves sc = stage_curves(a, grid);
    const Eigen::VectorXd vc = cn_center_curve(a, delta, grid, nullptr, &sc.g);
    Eigen::VectorXd j_prev = sc.r0;
    for (int stage = 1; stage <= N; ++stage)
        j_prev = stage_cost_curve(a, delta, grid, sc, vc, j_prev);
    return j_prev[0];
}

OuDeltaResult ou_delta_optimize(double a, int N, const GridSpec& grid) {
    grid.validate();
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    const int m = grid.m_time;
    const StageCurves sc = stage_curves(a, grid);

    const double d_lo = 0.05, d_hi = 3.0, d_step = 0.025;
    const int nd = static_cast<int>(std::lround((d_hi - d_lo) / d_step)) + 1;
    std::vector<double> deltas(nd);
    for (int i = 0; i < nd; ++i) deltas[static_cast<std::size_t>(i)] = d_lo + d_step * i;

    // v solves are budget-independent; do them once per level
    Eigen::MatrixXd vc(nd, m + 1);
    for (int i = 0; i < nd; ++i)
        vc.row(i) = cn_center_curve(a, deltas[static_cast<std::size_t>(i)], grid, nullptr, &sc.g).transpose();

    OuDeltaResult out;
    out.delta_star.resize(N);
    out.stage_distortion.resize(N);
    Eigen::MatrixXd thr(m + 1, N);
    Eigen::VectorXd j_prev = sc.r0;

    Eigen::MatrixXd cost(nd, m + 1);
    for (int stage = 1; stage <= N; ++stage) {
        for (int i = 0; i < nd; ++i) {
            const Eigen::VectorXd vrow = vc.row(i).transpose();
            cost.row(i) = stage_cost_curve(a, deltas[static_cast<std::size_t>(i)], grid, sc, vrow, j_prev)
                              .transpose();
        }
        Eigen::VectorXd j_star(m + 1);
        for (int j = 0; j <= m; ++j) {
            int best = 0;
            for (int i = 1; i < nd; ++i)
                if (cost(i, j) < cost(best, j)) best = i;
            double dstar = deltas[static_cast<std::size_t>(best)];
            double vstar = cost(best, j);
            if (best > 0 && best < nd - 1) {
                // parabolic vertex through the three bracketing scan points
                const double ca = cost(best - 1, j), cb = cost(best, j), cc = cost(best + 1, j);
                const double curv = ca - 2.0 * cb + cc;
                if (curv > 0.0) {
                    const double off = 0.5 * d_step * (ca - cc) / curv;
                    if (std::abs(off) <= d_step) {
                        dstar += off;
                        vstar = cb - (ca - cc) * (ca - cc) / (8.0 * curv);
                    }
                }
            }
            thr(j, stage - 1) = dstar;
            j_star[j] = vstar;
        }

        // start-time entry: check scan shape, then refine by golden section
        {
            std::vector<double> col0(static_cast<std::size_t>(nd));
            for (int i = 0; i < nd; ++i) col0[static_cast<std::size_t>(i)] = cost(i, 0);
            int best = 0;
            for (int i = 1; i < nd; ++i)
                if (col0[static_cast<std::size_t>(i)] < col0[static_cast<std::size_t>(best)]) best = i;
            int switches = 0;
            bool descending = col0[1] < col0[0];
            for (int i = 2; i < nd; ++i) {
                const bool desc = col0[static_cast<std::size_t>(i)] < col0[static_cast<std::size_t>(i - 1)];
                if (desc != descending) {
                    if (!desc) ++switches;
                    descending = desc;
                }
            }
            if (switches > 1) {
                out.scan_unimodal = false;
                std::cerr << "warning: threshold scan not unimodal at budget " << stage
                          << "; keeping the global minimum\n";
            }
            if (best == 0 || best == nd - 1) {
                std::cerr << "warning: threshold scan minimum at grid edge delta="
                          << deltas[static_cast<std::size_t>(best)] << " for budget " << stage << "\n";
            } else {
                const auto cost0 = [&](double d) {
                    const Eigen::VectorXd vrow = cn_center_curve(a, d, grid, nullptr, &sc.g);
                    return stage_cost_curve(a, d, grid, sc, vrow, j_prev)[0];
                };
                const double d_ref = golden_minimum(cost0, deltas[static_cast<std::size_t>(best - 1)],
                                                    deltas[static_cast<std::size_t>(best + 1)], 1e-5);
                const double v_ref = cost0(d_ref);
                if (v_ref <= j_star[0]) {
                    thr(0, stage - 1) = d_ref;
                    j_star[0] = v_ref;
                }
            }
        }

        thr(m, stage - 1) = 0.0;  // firing at the horizon is free and worthless
        for (int j = m - 1; j >= 0; --j)  // guard monotonicity against scan noise
            thr(j, stage - 1) = std::max(thr(j, stage - 1), thr(j + 1, stage - 1));

        out.delta_star[stage - 1] = thr(0, stage - 1);
        out.stage_distortion[stage - 1] = j_star[0];
        j_prev = j_star;
    }

    out.policy.kind = PolicyKind::GriddedThresholds;
    out.policy.budget_N = N;
    out.policy.monitoring = GridMonitoring::StageFixed;
    out.policy.time_grid.resize(m + 1);
    for (int j = 0; j <= m; ++j) out.policy.time_grid[j] = static_cast<double>(j) / m;
    out.policy.thresholds = thr;
    out.policy.validate(1.0);
    return out;
}

OuDpResult ou_dp_optimal(double a, int N, const GridSpec& grid) {
    grid.validate();
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    const int m = grid.m_time, n = grid.n_x;
    const double half = grid.resolved_half_width(a);
    const double dt = 1.0 / m;
    const double h = 2.0 * half / (n - 1);
    const int center = (n - 1) / 2;

    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = -half + h * i;

    // exact one-step AR(1) transition, row-normalized midpoint kernel
    const double alpha = std::exp(a * dt);
    const double sigma = std::sqrt(dt * phi1(2.0 * a * dt));
    Eigen::MatrixXd kernel(n, n);
    for (int i = 0; i < n; ++i) {
        const double mean = alpha * x[i];
        double raw = 0.0;
        for (int j = 0; j < n; ++j) {
            kernel(i, j) = h * normal_pdf((x[j] - mean) / sigma) / sigma;
            raw += kernel(i, j);
        }
        if (std::abs(mean) <= half - 6.0 * sigma && std::abs(raw - 1.0) > 1e-3) {
            std::ostringstream os;
            os << "transition kernel loses mass (row sum " << raw << " at x=" << x[i]
               << "); increase x_half_width";
            throw std::runtime_error(os.str());
        }
        kernel.row(i) /= raw;
    }

    Eigen::VectorXd gain(m + 1);
    for (int j = 0; j <= m; ++j) gain[j] = ou_error_gain(a, 1.0 - static_cast<double>(j) / m);

    OuDpResult out;
    out.value.times.resize(m + 1);
    for (int j = 0; j <= m; ++j) out.value.times[j] = static_cast<double>(j) / m;
    out.value.states = x;
    out.value.values.resize(m + 1, n);
    Eigen::MatrixXd thr = Eigen::MatrixXd::Zero(m + 1, N);
    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(N + 1, m + 1);

    Eigen::VectorXd s(n), cont(n), stop(n);
    for (int k = 1; k <= N; ++k) {
        s.setZero();  // sampling at the horizon saves nothing
        if (k == N) out.value.values.row(m).setZero();
        for (int tn = m - 1; tn >= 0; --tn) {
            cont.noalias() = kernel * s;
            const double resample = centers(k - 1, tn);
            for (int i = 0; i < n; ++i) stop[i] = x[i] * x[i] * gain[tn] + resample;
            // ties break toward sampling
            double thr_here = half;
            bool found = false;
            if (stop[center] - cont[center] >= 0.0) {
                thr_here = 0.0;
                found = true;
            } else {
                for (int i = center + 1; i < n; ++i) {
                    const double d1 = stop[i] - cont[i];
                    if (d1 >= 0.0) {
                        const double d0 = stop[i - 1] - cont[i - 1];
                        thr_here = x[i - 1] + h * (-d0) / (d1 - d0);
                        found = true;
                        break;
                    }
                }
            }
            (void)found;  // no crossing: threshold capped at the grid edge
            thr(tn, k - 1) = thr_here;
            for (int i = 0; i < n; ++i) s[i] = std::max(stop[i], cont[i]);
            centers(k, tn) = s[center];
            if (k == N) out.value.values.row(tn) = s.transpose();
        }
        for (int j = m - 1; j >= 0; --j) thr(j, k - 1) = std::max(thr(j, k - 1), thr(j + 1, k - 1));
    }

    const double r0 = ou_free_distortion(a, 1.0);
    out.budget_distortion.resize(N);
    for (int k = 1; k <= N; ++k) out.budget_distortion[k - 1] = r0 - centers(k, 0);
    out.distortion = out.budget_distortion[N - 1];
    out.value.thresholds = thr.col(N - 1);

    out.policy.kind = PolicyKind::GriddedThresholds;
    out.policy.budget_N = N;
    out.policy.monitoring = GridMonitoring::GridTimes;
    out.policy.time_grid = out.value.times;
    out.policy.thresholds = thr;
    out.policy.validate(1.0);
    return out;
}

}  // namespace ets
