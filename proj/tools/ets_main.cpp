// Command-line front end: policy construction, analytic tables, and Monte
// Carlo checks behind a handful of subcommands. Every run writes its outputs
// into --out-dir and finishes with a manifest listing what was produced, so
// a run can be audited or re-executed byte for byte.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ets/bm_policies.hpp"
#include "ets/bm_series.hpp"
#include "ets/models.hpp"
#include "ets/ou_policies.hpp"
#include "ets/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// ----- formatting helpers -----

std::string fmt_num(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.12g", v);
    return b;
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    q += '"';
    return q;
}

// Tabular output that renders as CSV or as a JSON array of row objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    void add_row(std::vector<json> cells) { rows.push_back(std::move(cells)); }

    std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i > 0) out += ',';
            out += csv_cell(columns[i]);
        }
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i > 0) out += ',';
                if (row[i].is_number_float())
                    out += csv_cell(fmt_num(row[i].get<double>()));
                else if (row[i].is_number_integer())
                    out += csv_cell(std::to_string(row[i].get<std::int64_t>()));
                else
                    out += csv_cell(row[i].get<std::string>());
            }
            out += '\n';
        }
        return out;
    }

    std::string to_json_text() const {
        json arr = json::array();
        for (const auto& row : rows) {
            json obj;
            for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i)
                obj[columns[i]] = row[i];
            arr.push_back(obj);
        }
        return arr.dump(2) + "\n";
    }
};

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

// ----- run context -----

struct Globals {
    std::uint64_t seed = 12345;
    std::int64_t paths = 100000;
    double dt = 1e-4;
    std::string out_dir = ".";
    std::string format = "csv";
    int workers = 0;
    bool antithetic = false;
    ets::SeriesConfig series{};
    ets::GridSpec grid{};
};

// Defaults file: flag > config file > built-in. Only known keys are accepted
// so a typo fails loudly instead of being silently ignored.
void load_config(const std::string& path, Globals& g) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not readable: " + path);
    json doc = json::parse(in);
    if (!doc.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    for (const auto& [key, val] : doc.items()) {
        if (key == "seed") g.seed = val.get<std::uint64_t>();
        else if (key == "paths") g.paths = val.get<std::int64_t>();
        else if (key == "dt") g.dt = val.get<double>();
        else if (key == "out_dir") g.out_dir = val.get<std::string>();
        else if (key == "format") g.format = val.get<std::string>();
        else if (key == "workers") g.workers = val.get<int>();
        else if (key == "antithetic") g.antithetic = val.get<bool>();
        else if (key == "series_abs_tol") g.series.abs_tol = val.get<double>();
        else if (key == "series_max_terms") g.series.max_terms = val.get<int>();
        else if (key == "grid_m_time") g.grid.m_time = val.get<int>();
        else if (key == "grid_half_width") g.grid.x_half_width = val.get<double>();
        else if (key == "grid_n_x") g.grid.n_x = val.get<int>();
        else throw std::invalid_argument("unknown config key: " + key);
    }
}

ets::SimConfig sim_config(const Globals& g, const std::string& trace_path = "") {
    ets::SimConfig cfg;
    cfg.n_paths = g.paths;
    cfg.dt = g.dt;
    cfg.seed = g.seed;
    cfg.antithetic = g.antithetic;
    cfg.workers = g.workers;
    cfg.trace_path = trace_path;
    return cfg;
}

// Every command funnels its outputs through here: files first, manifest last
// and atomically, so a manifest on disk always describes finished artifacts.
struct RunOutput {
    const Globals& g;
    std::string command;
    std::map<std::string, std::string> parameters;
    std::vector<std::string> artifacts;

    explicit RunOutput(const Globals& g_, std::string cmd) : g(g_), command(std::move(cmd)) {
        fs::create_directories(g.out_dir);
        parameters["seed"] = std::to_string(g.seed);
        parameters["paths"] = std::to_string(g.paths);
        parameters["dt"] = fmt_num(g.dt);
        parameters["out_dir"] = g.out_dir;
        parameters["format"] = g.format;
        parameters["workers"] = std::to_string(g.workers);
        parameters["antithetic"] = g.antithetic ? "true" : "false";
    }

    fs::path dir() const { return fs::path(g.out_dir); }

    void write_file(const std::string& basename, const std::string& content) {
        write_atomic(dir() / basename, content);
        artifacts.push_back(basename);
    }

    void write_table(const std::string& stem, const Table& table) {
        if (g.format == "json") write_file(stem + ".json", table.to_json_text());
        else write_file(stem + ".csv", table.to_csv());
    }

    void finish() {
        json manifest;
        manifest["command"] = command;
        manifest["parameters"] = parameters;
        manifest["artifacts"] = artifacts;
        manifest["tool_version"] = kVersion;
        manifest["seed"] = g.seed;
        std::string base = command;
        for (char& ch : base)
            if (ch == '-') ch = '_';
        write_atomic(dir() / (base + ".manifest.json"), manifest.dump(2) + "\n");
    }
};

// ----- policy helpers -----

ets::PolicyArtifact prefix_policy(const ets::PolicyArtifact& full, int m) {
    ets::PolicyArtifact p = full;
    p.budget_N = m;
    switch (full.kind) {
        case ets::PolicyKind::UniformDeterministic:
            break;  // rebuilt per budget instead
        case ets::PolicyKind::DeltaThresholds:
            p.rho = full.rho.head(m);
            if (full.c.size() >= m) p.c = full.c.head(m);
            if (full.lambda_star.size() >= m) p.lambda_star = full.lambda_star.head(m);
            break;
        case ets::PolicyKind::OptimalEnvelope:
            p.theta = full.theta.head(m + 1);
            p.gamma = full.gamma.head(m);
            break;
        case ets::PolicyKind::GriddedThresholds:
            p.thresholds = full.thresholds.leftCols(m);
            break;
    }
    return p;
}

// OU threshold tables are solved on the unit horizon with drift a*T; mapping
// back multiplies times by T and levels by sqrt(T), while distortions pick up
// a factor T^2.
void rescale_grid_policy(ets::PolicyArtifact& p, double T) {
    if (T == 1.0) return;
    p.time_grid *= T;
    p.thresholds *= std::sqrt(T);
}

// ----- subcommands -----

void run_table1(const Globals& g, int n_max) {
    RunOutput out(g, "table1");
    out.parameters["n_max"] = std::to_string(n_max);

    const ets::BmPolicyResult delta = ets::delta_recursion(n_max, g.series);
    const Eigen::VectorXd xi_series =
        ets::delta_expected_samples(n_max, delta.policy.lambda_star, g.series);
    // historical reference row for the expected sample count; kept alongside
    // the series values because the two disagree and the simulator arbitrates
    static const double kReferenceXi[5] = {0.9767, 1.9306, 2.8622, 3.7541, 4.4803};
    const std::string footnote =
        "expected sample counts from the hitting-probability series disagree with the "
        "tabulated reference row E_Xi_reference; the Monte Carlo column supports the "
        "series values";

    const ets::ProcessModel model = ets::brownian_motion(1.0);
    Table t;
    t.columns = {"N", "c_N", "rho_N", "E_Xi_series", "E_Xi_montecarlo", "E_Xi_reference",
                 "footnote"};
    for (int N = 1; N <= n_max; ++N) {
        const ets::PolicyArtifact sub = prefix_policy(delta.policy, N);
        const ets::SimulationReport rep = ets::simulate_policy(model, sub, sim_config(g));
        std::vector<json> row;
        row.push_back(N);
        row.push_back(delta.policy.c[N - 1]);
        row.push_back(delta.policy.rho[N - 1]);
        row.push_back(xi_series[N - 1]);
        row.push_back(rep.mean_samples_used);
        if (N <= 5) row.push_back(kReferenceXi[N - 1]);
        else row.push_back(std::string());
        row.push_back(N == 1 ? footnote : std::string());
        t.add_row(std::move(row));
    }
    out.write_table("table1", t);
    out.finish();
    std::cout << "table1: wrote " << n_max << " rows to " << (out.dir() / "table1").string()
              << (g.format == "json" ? ".json" : ".csv") << "\n";
}

void run_compare(const Globals& g, const std::string& process, double a, int n_max) {
    RunOutput out(g, "compare");
    out.parameters["process"] = process;
    out.parameters["a"] = fmt_num(a);
    out.parameters["n_max"] = std::to_string(n_max);

    Table t;
    t.columns = {"N",
                 "deterministic",
                 "delta",
                 "optimal",
                 "deterministic_abs",
                 "delta_abs",
                 "optimal_abs",
                 "deterministic_mc",
                 "deterministic_mc_se",
                 "delta_mc",
                 "delta_mc_se",
                 "optimal_mc",
                 "optimal_mc_se"};

    const double T = 1.0;
    const auto mc = [&](const ets::ProcessModel& model, const ets::PolicyArtifact& pol) {
        const ets::SimulationReport rep = ets::simulate_policy(model, pol, sim_config(g));
        // report in coefficient-of-T^2/2 units to match the analytic columns
        return std::pair<double, double>(2.0 * rep.mean_distortion / (T * T),
                                         2.0 * rep.std_error / (T * T));
    };

    if (process == "bm") {
        if (a != 0.0)
            throw std::invalid_argument("compare: --a must be 0 for the driftless process");
        const ets::ProcessModel model = ets::brownian_motion(T);
        const ets::BmPolicyResult delta = ets::delta_recursion(n_max, g.series);
        const ets::BmPolicyResult env = ets::optimal_envelope_recursion(n_max);
        for (int N = 1; N <= n_max; ++N) {
            const double det_c = 1.0 / (N + 1);
            const double del_c = delta.policy.c[N - 1];
            const double opt_c = env.policy.theta[N];
            const auto [det_mc, det_se] = mc(model, ets::deterministic_policy(T, N).policy);
            const auto [del_mc, del_se] = mc(model, prefix_policy(delta.policy, N));
            const auto [opt_mc, opt_se] = mc(model, prefix_policy(env.policy, N));
            t.add_row({N, det_c, del_c, opt_c, det_c * T * T / 2.0, del_c * T * T / 2.0,
                       opt_c * T * T / 2.0, det_mc, det_se, del_mc, del_se, opt_mc, opt_se});
        }
    } else if (process == "ou") {
        const ets::ProcessModel model = ets::ornstein_uhlenbeck(a, T);
        const ets::OuDeltaResult delta = ets::ou_delta_optimize(a, n_max, g.grid);
        const ets::OuDpResult dp = ets::ou_dp_optimal(a, n_max, g.grid);
        for (int N = 1; N <= n_max; ++N) {
            const double det_a = ets::ou_deterministic(a, T, N);
            const double del_a = delta.stage_distortion[N - 1];
            const double opt_a = dp.budget_distortion[N - 1];
            const auto [det_mc, det_se] = mc(model, ets::deterministic_policy(T, N).policy);
            const auto [del_mc, del_se] = mc(model, prefix_policy(delta.policy, N));
            const auto [opt_mc, opt_se] = mc(model, prefix_policy(dp.policy, N));
            t.add_row({N, 2.0 * det_a, 2.0 * del_a, 2.0 * opt_a, det_a, del_a, opt_a, det_mc,
                       det_se, del_mc, del_se, opt_mc, opt_se});
        }
    } else {
        throw std::invalid_argument("compare: process must be bm or ou");
    }

    out.write_table("compare", t);
    out.finish();
    std::cout << "compare: wrote " << n_max << " rows for process " << process << "\n";
}

void run_policy(const Globals& g, const std::string& process, const std::string& family,
                int n, double a, double T) {
    RunOutput out(g, "policy");
    out.parameters["process"] = process;
    out.parameters["family"] = family;
    out.parameters["n"] = std::to_string(n);
    out.parameters["a"] = fmt_num(a);
    out.parameters["T"] = fmt_num(T);

    ets::PolicyArtifact pol;
    std::string note;
    if (process == "bm") {
        if (a != 0.0)
            throw std::invalid_argument("policy: --a must be 0 for the driftless process");
        if (family == "uniform") {
            const auto r = ets::deterministic_policy(T, n);
            pol = r.policy;
            note = "coefficient " + fmt_num(r.analytic_distortion);
        } else if (family == "delta") {
            const auto r = ets::delta_recursion(n, g.series);
            pol = r.policy;
            note = "coefficient " + fmt_num(r.analytic_distortion);
        } else {
            const auto r = ets::optimal_envelope_recursion(n);
            pol = r.policy;
            note = "coefficient " + fmt_num(r.analytic_distortion);
        }
    } else if (process == "ou") {
        const double a_norm = ets::normalize_ou(a, T);
        if (family == "uniform") {
            const auto r = ets::deterministic_policy(T, n);
            pol = r.policy;
            note = "absolute " + fmt_num(ets::ou_deterministic(a, T, n));
        } else if (family == "delta") {
            auto r = ets::ou_delta_optimize(a_norm, n, g.grid);
            rescale_grid_policy(r.policy, T);
            pol = r.policy;
            note = "absolute " + fmt_num(r.stage_distortion[n - 1] * T * T);
        } else {
            auto r = ets::ou_dp_optimal(a_norm, n, g.grid);
            rescale_grid_policy(r.policy, T);
            pol = r.policy;
            note = "absolute " + fmt_num(r.budget_distortion[n - 1] * T * T);
        }
    } else {
        throw std::invalid_argument("policy: process must be bm or ou");
    }

    out.write_file("policy.json", pol.to_json());
    out.finish();
    std::cout << "policy: " << family << " budget " << n << ", nominal distortion " << note
              << ", wrote " << (out.dir() / "policy.json").string() << "\n";
}

void run_simulate(const Globals& g, const std::string& process, const std::string& policy_file,
                  double a, double T, const std::string& trace) {
    RunOutput out(g, "simulate");
    out.parameters["process"] = process;
    out.parameters["policy"] = policy_file;
    out.parameters["a"] = fmt_num(a);
    out.parameters["T"] = fmt_num(T);
    if (!trace.empty()) out.parameters["trace"] = trace;

    std::ifstream in(policy_file);
    if (!in) throw std::invalid_argument("simulate: policy file not readable: " + policy_file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const ets::PolicyArtifact pol = ets::PolicyArtifact::from_json(text);

    ets::ProcessModel model;
    if (process == "bm") {
        if (a != 0.0)
            throw std::invalid_argument("simulate: --a must be 0 for the driftless process");
        model = ets::brownian_motion(T);
    } else if (process == "ou") {
        model = ets::ornstein_uhlenbeck(a, T);
    } else {
        throw std::invalid_argument("simulate: process must be bm or ou");
    }

    std::string trace_path;
    if (!trace.empty()) trace_path = (out.dir() / trace).string();
    const ets::SimulationReport rep = ets::simulate_policy(model, pol, sim_config(g, trace_path));
    out.write_file("report.json", rep.to_json());
    if (!trace.empty()) out.artifacts.push_back(trace);
    out.finish();
    std::cout << "simulate: mean distortion " << fmt_num(rep.mean_distortion)
              << " (coefficient " << fmt_num(2.0 * rep.mean_distortion / (T * T)) << ") +/- "
              << fmt_num(rep.std_error) << " over " << rep.n_paths << " paths, "
              << fmt_num(rep.mean_samples_used) << " samples used on average\n";
}

void run_poisson_demo(const Globals& g, double rate, double horizon) {
    RunOutput out(g, "poisson-demo");
    out.parameters["rate"] = fmt_num(rate);
    out.parameters["horizon"] = fmt_num(horizon);

    std::vector<ets::PoissonPathRow> rows;
    const ets::PoissonDemoResult res = ets::poisson_demo(rate, horizon, sim_config(g), &rows);

    Table t;
    t.columns = {"path", "adaptive_distortion", "adaptive_rate", "deterministic_distortion"};
    for (const auto& row : rows)
        t.add_row({row.path, row.adaptive_distortion, row.adaptive_rate,
                   row.deterministic_distortion});
    out.write_table("poisson_demo", t);
    out.finish();
    std::cout << "poisson-demo: adaptive distortion " << fmt_num(res.adaptive_distortion)
              << ", adaptive rate " << fmt_num(res.adaptive_rate) << " +/- "
              << fmt_num(res.adaptive_rate_se) << ", deterministic distortion "
              << fmt_num(res.deterministic_distortion) << " +/- "
              << fmt_num(res.deterministic_distortion_se) << "\n";
}

void run_hitting_stats(const Globals& g, double delta, double T, double s) {
    RunOutput out(g, "hitting-stats");
    out.parameters["delta"] = fmt_num(delta);
    out.parameters["T"] = fmt_num(T);
    out.parameters["s"] = fmt_num(s);

    const ets::HittingStatistics h = ets::simulate_hitting_statistics(delta, T, s, sim_config(g));
    const ets::LambdaParam lam(ets::lambda_from_delta(delta, T));

    Table t;
    t.columns = {"statistic", "analytic", "montecarlo", "montecarlo_se"};
    t.add_row({std::string("p_fire"), ets::firing_probability(lam, g.series), h.p_fire,
               h.p_fire_se});
    t.add_row({std::string("mean_residual"), ets::residual_moment_1(delta, T, g.series),
               h.mean_residual, h.mean_residual_se});
    t.add_row({std::string("mean_residual_sq"), ets::residual_moment_2(delta, T, g.series),
               h.mean_residual_sq, h.mean_residual_sq_se});
    t.add_row({std::string("mgf_at_s"), ets::mgf_first_hitting(s, delta, 0.0), h.mgf_at_s,
               h.mgf_at_s_se});
    out.write_table("hitting_stats", t);
    out.finish();
    std::cout << "hitting-stats: p_fire " << fmt_num(h.p_fire) << " +/- " << fmt_num(h.p_fire_se)
              << ", mgf " << fmt_num(h.mgf_at_s) << " +/- " << fmt_num(h.mgf_at_s_se) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    Globals g;

    // the config file provides defaults, so it must be read before the parse;
    // a flag given on the command line then overrides the file
    try {
        std::string config_path;
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
            else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
        }
        if (!config_path.empty()) load_config(config_path, g);
    } catch (const json::exception& e) {
        std::cerr << "error: bad config file: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"analytic policies and Monte Carlo checks for budgeted sampling of diffusions"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_dummy;
    app.add_option("--config", config_dummy, "JSON file with default settings");
    app.add_option("--seed", g.seed, "base seed for all per-path generator streams");
    app.add_option("--paths", g.paths, "Monte Carlo path count")->check(CLI::PositiveNumber);
    app.add_option("--dt", g.dt, "simulation step size")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", g.out_dir, "directory for output artifacts");
    app.add_option("--format", g.format, "tabular output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--workers", g.workers, "worker threads (0: hardware count)")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--antithetic", g.antithetic, "pair paths with negated increments");

    int t1_nmax = 5;
    CLI::App* t1 = app.add_subcommand("table1", "threshold-coefficient table with sample counts");
    t1->fallthrough();
    t1->add_option("--n-max", t1_nmax, "largest budget row")->check(CLI::Range(1, 200));

    std::string cmp_process = "bm";
    double cmp_a = 0.0;
    int cmp_nmax = 3;
    CLI::App* cmp = app.add_subcommand("compare", "distortion of the three policy families");
    cmp->fallthrough();
    cmp->add_option("process", cmp_process, "bm or ou")->required();
    cmp->add_option("--a", cmp_a, "drift coefficient (ou only)");
    cmp->add_option("--n-max", cmp_nmax, "largest budget row")->check(CLI::Range(1, 64));

    std::string pol_process = "bm";
    int pol_n = 1;
    double pol_a = 0.0, pol_T = 1.0;
    bool pol_uniform = false, pol_delta = false, pol_optimal = false;
    CLI::App* pol = app.add_subcommand("policy", "construct a sampling policy artifact");
    pol->fallthrough();
    pol->add_option("process", pol_process, "bm or ou")->required();
    auto* fam = pol->add_option_group("family", "policy family");
    fam->add_flag("--uniform", pol_uniform, "evenly spaced deterministic times");
    fam->add_flag("--delta", pol_delta, "level-triggered thresholds");
    fam->add_flag("--optimal", pol_optimal, "exact optimum for the process");
    fam->require_option(1);
    pol->add_option("--n", pol_n, "sample budget")->check(CLI::Range(1, 200));
    pol->add_option("--a", pol_a, "drift coefficient (ou only)");
    pol->add_option("--T", pol_T, "horizon")->check(CLI::PositiveNumber);

    std::string sim_process = "bm", sim_policy_file, sim_trace;
    double sim_a = 0.0, sim_T = 1.0;
    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo run of a policy artifact");
    sim->fallthrough();
    sim->add_option("process", sim_process, "bm or ou")->required();
    sim->add_option("--policy", sim_policy_file, "policy artifact file")->required();
    sim->add_option("--a", sim_a, "drift coefficient (ou only)");
    sim->add_option("--T", sim_T, "horizon")->check(CLI::PositiveNumber);
    sim->add_option("--trace", sim_trace, "per-step trace of path 0 (file name in out-dir)");

    double pd_rate = 1.0, pd_horizon = 1.0;
    CLI::App* pd = app.add_subcommand("poisson-demo", "jump-triggered vs periodic sampling");
    pd->fallthrough();
    pd->add_option("--rate", pd_rate, "jump rate")->check(CLI::PositiveNumber);
    pd->add_option("--horizon", pd_horizon, "horizon")->check(CLI::PositiveNumber);

    double hs_delta = 1.0, hs_T = 1.0, hs_s = 1.0;
    CLI::App* hs = app.add_subcommand("hitting-stats", "first-exit statistics vs series values");
    hs->fallthrough();
    hs->add_option("--delta", hs_delta, "threshold level")->check(CLI::PositiveNumber);
    hs->add_option("--T", hs_T, "horizon")->check(CLI::PositiveNumber);
    hs->add_option("--s", hs_s, "transform parameter")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*t1) run_table1(g, t1_nmax);
        else if (*cmp) run_compare(g, cmp_process, cmp_a, cmp_nmax);
        else if (*pol) {
            const std::string family = pol_uniform ? "uniform" : (pol_delta ? "delta" : "optimal");
            run_policy(g, pol_process, family, pol_n, pol_a, pol_T);
        } else if (*sim) {
            run_simulate(g, sim_process, sim_policy_file, sim_a, sim_T, sim_trace);
        } else if (*pd) {
            run_poisson_demo(g, pd_rate, pd_horizon);
        } else if (*hs) {
            run_hitting_stats(g, hs_delta, hs_T, hs_s);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
