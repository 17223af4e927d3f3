// Command-line front end: runs scenarios end to end and emits CSV/JSON
// artifacts. Exit codes: 0 ok, 2 usage, 3 config validation, 4 numerical
// non-convergence, 5 coverage.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrad/qrad.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::string out = ".";
    int threads = 0;
    bool lax = false;
    bool stamp = false;
};

std::string now_stamp()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string out_path(const GlobalOpts& g, const std::string& name)
{
    fs::create_directories(g.out);
    return (fs::path(g.out) / name).string();
}

void write_json(const GlobalOpts& g, const std::string& name, const json& j,
                std::vector<std::string>& outputs)
{
    const std::string path = out_path(g, name);
    std::ofstream f(path);
    if (!f) throw qrad::validation_error("cannot write output file: " + path);
    f << j.dump(2) << "\n";
    outputs.push_back(path);
}

void write_manifest(const GlobalOpts& g, qrad::RunManifest man,
                    std::chrono::steady_clock::time_point start)
{
    man.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string path = out_path(g, "manifest.json");
    std::ofstream f(path);
    if (!f) throw qrad::validation_error("cannot write output file: " + path);
    f << man.to_json().dump(2) << "\n";
}

qrad::AngularKernel parse_kernel(const std::string& s)
{
    if (s == "summed") return qrad::AngularKernel::Summed;
    if (s == "per-polarization") return qrad::AngularKernel::PerPolarization;
    throw CLI::ValidationError("--kernel must be 'summed' or 'per-polarization'");
}

std::vector<double> log_spaced(double lo, double hi, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return v;
}

// Shared heavy path: table + energies + fit for one scenario.
struct EnergyRun {
    qrad::SpectralTable table;
    qrad::MomentSeries moments;
    qrad::EnergySeriesResult series;
    qrad::EnergyQuadratureResult quadrature;
    qrad::LowOmegaFit fit;
};

EnergyRun run_energy(const qrad::ScenarioConfig& cfg, int threads, int n_max = 2,
                     qrad::TableGrids grids = {})
{
    EnergyRun r;
    r.table = qrad::build_spectral_table(cfg, grids, threads);
    r.moments = qrad::mellin_moments(cfg, n_max);
    const auto gnm = qrad::build_gnm_table(n_max, cfg.epsilon_inf);
    r.series = qrad::energy_series(r.moments, gnm);
    r.quadrature = qrad::energy_quadrature(r.table, cfg.epsilon_inf, cfg.cutoff_k,
                                           cfg.quadrature);
    const auto w = qrad::default_fit_window(cfg);
    const auto e = qrad::spectral_density(r.table, w, cfg.epsilon_inf, cfg.quadrature);
    const double scale =
        std::max(cfg.time_scale(), cfg.max_radius() * std::sqrt(cfg.epsilon_inf));
    r.fit = qrad::low_omega_fit(w, e, scale);
    return r;
}

json summary_json(const qrad::ScenarioConfig& cfg, const EnergyRun& r)
{
    json breakdown = json::array();
    for (int n = 0; n <= r.series.n_max; ++n)
        for (int m = 0; m <= r.series.n_max; ++m)
            breakdown.push_back({{"n", n}, {"m", m}, {"E_nm", r.series.contributions[n][m]}});
    return {{"scenario_hash", qrad::scenario_hash(cfg)},
            {"total_energy_series", r.series.energy},
            {"total_energy_quadrature", r.quadrature.energy},
            {"quadrature_err_estimate", r.quadrature.err_estimate},
            {"relative_difference",
             std::abs(r.series.energy - r.quadrature.energy)
                 / std::max(r.quadrature.energy, 1e-300)},
            {"low_omega_exponent", r.fit.exponent},
            {"low_omega_sigma", r.fit.sigma},
            {"fit_window_ok", r.fit.window_ok},
            {"series_n_max", r.series.n_max},
            {"e00_share", r.series.contributions[0][0] / std::max(r.series.energy, 1e-300)},
            {"table_err_estimate", r.table.err_estimate},
            {"table_warning", r.table.warning},
            {"units", "energies in inverse length (natural units)"}};
}

void write_breakdown_csv(const GlobalOpts& g, const qrad::ScenarioConfig& cfg,
                         const qrad::EnergySeriesResult& series, const std::string& stamp,
                         std::vector<std::string>& outputs)
{
    qrad::CsvWriter csv(qrad::scenario_hash(cfg),
                        "n:1, m:1, E_nm:1/length", stamp);
    csv.columns({"n", "m", "E_nm"});
    for (int n = 0; n <= series.n_max; ++n)
        for (int m = 0; m <= series.n_max; ++m)
            csv.row({static_cast<double>(n), static_cast<double>(m),
                     series.contributions[n][m]});
    const std::string path = out_path(g, "breakdown.csv");
    csv.write(path);
    outputs.push_back(path);
}

int cmd_spectrum(const GlobalOpts& g, const std::string& scenario_path,
                 const std::string& kernel_name, int n_points, const qrad::TableGrids& grids)
{
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = qrad::load_scenario(scenario_path, g.lax);
    const auto kernel = parse_kernel(kernel_name);
    const std::string stamp = g.stamp ? now_stamp() : "";
    EnergyRun r = run_energy(cfg, g.threads, 2, grids);

    const double sqrt_eps = std::sqrt(cfg.epsilon_inf);
    const double scale =
        std::max(cfg.time_scale(), cfg.max_radius() * sqrt_eps);
    const auto omega_grid = log_spaced(0.01 / scale, cfg.cutoff_k / sqrt_eps, n_points);
    std::vector<double> e_err;
    const auto e = qrad::spectral_density(r.table, omega_grid, cfg.epsilon_inf,
                                          cfg.quadrature, kernel, &e_err);

    const auto k_grid = log_spaced(cfg.cutoff_k / 100.0, cfg.cutoff_k, 20);
    std::vector<double> nk(k_grid.size()), nk_err(k_grid.size());
    for (std::size_t i = 0; i < k_grid.size(); ++i)
        nk[i] = qrad::n_per_mode(r.table, k_grid[i], kernel, cfg.epsilon_inf, cfg.quadrature,
                                 &nk_err[i]);

    std::vector<std::string> outputs;
    {
        qrad::CsvWriter csv(qrad::scenario_hash(cfg),
                            "omega:1/length, e:1 (energy per unit frequency), err:1", stamp);
        csv.columns({"omega", "e", "err"});
        for (std::size_t i = 0; i < omega_grid.size(); ++i)
            csv.row({omega_grid[i], e[i], e_err[i]});
        const std::string path = out_path(g, "spectrum.csv");
        csv.write(path);
        outputs.push_back(path);
    }
    {
        qrad::CsvWriter csv(qrad::scenario_hash(cfg),
                            "k:1/length, n_density:length^3 (V*N_k), err:length^3", stamp);
        csv.columns({"k", "n_density", "err"});
        for (std::size_t i = 0; i < k_grid.size(); ++i)
            csv.row({k_grid[i], nk[i], nk_err[i]});
        const std::string path = out_path(g, "modes.csv");
        csv.write(path);
        outputs.push_back(path);
    }
    write_breakdown_csv(g, cfg, r.series, stamp, outputs);
    json summary = summary_json(cfg, r);
    summary["kernel"] = kernel_name;
    write_json(g, "summary.json", summary, outputs);
    std::cout << summary.dump(2) << "\n";

    qrad::RunManifest man{"spectrum", qrad::scenario_hash(cfg), qrad::scenario_to_json(cfg),
                          outputs};
    write_manifest(g, man, start);
    return 0;
}

int cmd_energy(const GlobalOpts& g, const std::string& scenario_path)
{
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = qrad::load_scenario(scenario_path, g.lax);
    const std::string stamp = g.stamp ? now_stamp() : "";
    EnergyRun r = run_energy(cfg, g.threads);
    std::vector<std::string> outputs;
    write_breakdown_csv(g, cfg, r.series, stamp, outputs);
    const json summary = summary_json(cfg, r);
    write_json(g, "summary.json", summary, outputs);
    std::cout << summary.dump(2) << "\n";
    qrad::RunManifest man{"energy", qrad::scenario_hash(cfg), qrad::scenario_to_json(cfg),
                          outputs};
    write_manifest(g, man, start);
    return 0;
}

int cmd_gnm(const GlobalOpts& g, int n_max, double epsilon_inf)
{
    const auto start = std::chrono::steady_clock::now();
    const auto table = qrad::build_gnm_table(n_max, epsilon_inf);
    const std::string stamp = g.stamp ? now_stamp() : "";
    qrad::CsvWriter csv("none",
                        "n:1, m:1, kernel_num:1, kernel_den:1, value_at_epsilon:1", stamp);
    csv.columns({"n", "m", "kernel_num", "kernel_den", "value_at_epsilon"});
    for (int n = 0; n <= n_max; ++n) {
        for (int m = 0; m <= n_max; ++m) {
            const auto& k = table.kernel(n, m);
            std::ostringstream line;
            line << n << "," << m << "," << boost::multiprecision::numerator(k) << ","
                 << boost::multiprecision::denominator(k) << "," << std::setprecision(17)
                 << table.value(n, m);
            csv.raw_row(line.str());
            std::cout << "G(" << n << "," << m << ") kernel = "
                      << boost::multiprecision::numerator(k) << "/"
                      << boost::multiprecision::denominator(k)
                      << "  value(eps=" << epsilon_inf << ") = " << std::setprecision(12)
                      << table.value(n, m) << "\n";
        }
    }
    std::vector<std::string> outputs;
    const std::string path = out_path(g, "gnm.csv");
    csv.write(path);
    outputs.push_back(path);
    qrad::RunManifest man{"gnm", "none",
                          json{{"n_max", n_max}, {"epsilon_inf", epsilon_inf}}, outputs};
    write_manifest(g, man, start);
    return 0;
}

int cmd_velocity(const GlobalOpts& g, const std::string& scenario_path)
{
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = qrad::load_scenario(scenario_path, g.lax);
    if (!cfg.velocity)
        throw qrad::validation_error("scenario has no velocity profile");
    const std::string stamp = g.stamp ? now_stamp() : "";
    const auto diag = qrad::classify_profile(cfg);

    std::vector<std::string> outputs;
    qrad::CsvWriter csv(qrad::scenario_hash(cfg),
                        "k:1/length, abs_ft:length^3*time, err:length^3*time", stamp);
    csv.columns({"k", "abs_ft", "err"});
    for (std::size_t i = 0; i < diag.k_samples.size(); ++i)
        csv.row({diag.k_samples[i], diag.ft_magnitudes[i], diag.ft_errors[i]});
    const std::string path = out_path(g, "velocity.csv");
    csv.write(path);
    outputs.push_back(path);

    json j = {{"scenario_hash", qrad::scenario_hash(cfg)},
              {"classification", qrad::to_string(diag.classification)},
              {"low_k_exponent", diag.low_k_exponent},
              {"omega4_prediction", diag.omega4_prediction},
              {"magnitude_scale", diag.magnitude_scale},
              {"order_note", diag.order_note},
              {"truncation_sweep", diag.truncation_sweep}};
    write_json(g, "velocity.json", j, outputs);
    std::cout << j.dump(2) << "\n";
    qrad::RunManifest man{"velocity", qrad::scenario_hash(cfg), qrad::scenario_to_json(cfg),
                          outputs};
    write_manifest(g, man, start);
    return 0;
}

int cmd_potential(const GlobalOpts& g, const std::string& scenario_path)
{
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = qrad::load_scenario(scenario_path, g.lax);
    if (cfg.potential_probe.is_null())
        throw qrad::validation_error("scenario has no potential_probe block");
    const json& p = cfg.potential_probe;
    const std::string stamp = g.stamp ? now_stamp() : "";

    const double t = p.value("time", cfg.pulse_center());
    const double L = p.value("L", 10.0 * cfg.support_radius());
    const int n_cells = p.value("n_cells", 400);
    const double tol = p.value("tol", 1e-8);

    std::function<double(double)> source = [](double) { return 0.0; };
    if (p.contains("source")) {
        const json& s = p["source"];
        const std::string kind = s.value("kind", "gaussian");
        if (kind == "gaussian") {
            const double amp = s.value("amp", 1.0);
            const double center = s.value("center", 0.0);
            const double width = s.value("width", 1.0);
            source = [amp, center, width](double r) {
                const double u = (r - center) / width;
                return amp * std::exp(-u * u);
            };
        } else if (kind == "none") {
            // keep zero source
        } else {
            throw qrad::parse_error("unknown potential source kind '" + kind + "'");
        }
    }

    qrad::RadialEllipticProblem prob;
    prob.r = (cfg.profile.kind == qrad::ProfileKind::SmoothBubble)
                 ? qrad::wall_clustered_nodes(L, n_cells, cfg.profile.track.radius(t),
                                              cfg.profile.wall_width)
                 : qrad::uniform_nodes(L, n_cells);
    prob.eps = [&cfg, t](double r) { return cfg.epsilon_at(r, t); };
    prob.source = source;
    prob.tol = tol;
    const auto sol = qrad::solve_radial_potential(prob);
    const auto decay = qrad::far_field_decay_check(sol, cfg.support_radius());

    std::vector<std::string> outputs;
    qrad::CsvWriter csv(qrad::scenario_hash(cfg),
                        "r:length, phi:1 (potential), residual:flux defect", stamp);
    csv.columns({"r", "phi", "residual"});
    for (std::size_t i = 0; i < sol.r.size(); ++i)
        csv.row({sol.r[i], sol.phi[i], i < sol.residual.size() ? sol.residual[i] : 0.0});
    const std::string path = out_path(g, "potential.csv");
    csv.write(path);
    outputs.push_back(path);

    json j = {{"scenario_hash", qrad::scenario_hash(cfg)},
              {"residual_norm", sol.residual_norm},
              {"decay_exponent", decay.exponent},
              {"trivial_solution", decay.trivial},
              {"domain_note",
               "far-field condition imposed as Phi(L) = 0 on a truncated domain; "
               "L is a convention, not derived"},
              {"L", L}};
    write_json(g, "potential.json", j, outputs);
    std::cout << j.dump(2) << "\n";
    qrad::RunManifest man{"potential", qrad::scenario_hash(cfg), qrad::scenario_to_json(cfg),
                          outputs};
    write_manifest(g, man, start);
    return 0;
}

int cmd_estimate(const GlobalOpts& g, const qrad::BoundInputs& in)
{
    const auto start = std::chrono::steady_clock::now();
    json j = {{"note", "order-of-magnitude bound"},
              {"inputs",
               {{"r_max", in.r_max},
                {"t_max", in.t_max},
                {"k_c", in.k_c},
                {"c_order", in.c_order}}},
              {"energy_bound", qrad::energy_bound(in)},
              {"units", "energy in inverse length (natural units)"}};
    if (in.v_quant > 0.0) {
        j["inputs"]["v_quant"] = in.v_quant;
        j["per_mode_bound"] = qrad::per_mode_bound(in);
    }
    std::vector<std::string> outputs;
    write_json(g, "estimate.json", j, outputs);
    std::cout << j.dump(2) << "\n";
    qrad::RunManifest man{"estimate", "none", j["inputs"], outputs};
    write_manifest(g, man, start);
    return 0;
}

int cmd_scaling(const GlobalOpts& g, const std::string& scenario_path, double factor)
{
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = qrad::load_scenario(scenario_path, g.lax);
    const auto scaled = qrad::rescale_scenario(cfg, factor);
    EnergyRun base = run_energy(cfg, g.threads);
    EnergyRun resc = run_energy(scaled, g.threads);
    json j = {{"scenario_hash", qrad::scenario_hash(cfg)},
              {"factor", factor},
              {"base_energy_quadrature", base.quadrature.energy},
              {"scaled_energy_quadrature", resc.quadrature.energy},
              {"base_energy_series", base.series.energy},
              {"scaled_energy_series", resc.series.energy},
              {"measured_ratio", resc.quadrature.energy / base.quadrature.energy},
              {"predicted_ratio", 1.0 / factor}};
    std::vector<std::string> outputs;
    write_json(g, "scaling.json", j, outputs);
    std::cout << j.dump(2) << "\n";
    qrad::RunManifest man{"scaling", qrad::scenario_hash(cfg), qrad::scenario_to_json(cfg),
                          outputs};
    write_manifest(g, man, start);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"quantum radiation from localized dielectric disturbances"};
    app.require_subcommand(1);
    app.fallthrough(); // let subcommands accept the global flags below

    GlobalOpts g;
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker thread cap (0 = auto)");
    app.add_flag("--lax", g.lax, "ignore unknown scenario keys");
    app.add_flag("--stamp", g.stamp, "add a timestamp to CSV headers");

    std::string scenario_path, kernel_name = "summed";
    int n_points = 40;
    auto* spectrum = app.add_subcommand("spectrum", "spectral density, mode densities, energies");
    spectrum->add_option("scenario", scenario_path, "scenario file")->required();
    spectrum->add_option("--kernel", kernel_name, "summed | per-polarization")
        ->check(CLI::IsMember({"summed", "per-polarization"}));
    spectrum->add_option("--points", n_points, "spectrum grid size")->check(CLI::Range(4, 4096));
    qrad::TableGrids grids;
    spectrum->add_option("--table-qmax", grids.q_max,
                         "override the table's wavenumber coverage (default 2 K_c)");
    spectrum->add_option("--table-omegamax", grids.omega_max,
                         "override the table's frequency coverage");

    auto* energy = app.add_subcommand("energy", "total energy: series and quadrature paths");
    energy->add_option("scenario", scenario_path, "scenario file")->required();

    int n_max = 3;
    double epsilon_inf = 1.0;
    auto* gnm = app.add_subcommand("gnm", "exact geometry-independent matrix");
    gnm->add_option("--nmax", n_max, "table order")->check(CLI::Range(0, 16));
    gnm->add_option("--epsilon", epsilon_inf, "medium constant for the numeric column")
        ->check(CLI::Range(1.0, 1e6));

    auto* velocity = app.add_subcommand("velocity", "velocity-profile diagnostics");
    velocity->add_option("scenario", scenario_path, "scenario file")->required();

    auto* potential = app.add_subcommand("potential", "radial constraint-potential solve");
    potential->add_option("scenario", scenario_path, "scenario file with potential_probe")
        ->required();

    qrad::BoundInputs bounds;
    auto* estimate = app.add_subcommand("estimate", "order-of-magnitude bounds");
    estimate->add_option("--rmax", bounds.r_max, "maximal length scale")->required();
    estimate->add_option("--tmax", bounds.t_max, "disturbance duration")->required();
    estimate->add_option("--kc", bounds.k_c, "frequency cutoff")->required();
    estimate->add_option("--volume", bounds.v_quant, "quantization volume (per-mode bound)");
    estimate->add_option("--c", bounds.c_order, "O(1) prefactor");

    double factor = 2.0;
    auto* scaling = app.add_subcommand("scaling", "scale-covariance check (E -> E/s)");
    scaling->add_option("scenario", scenario_path, "scenario file")->required();
    scaling->add_option("--factor", factor, "length/time rescale factor")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (*spectrum) return cmd_spectrum(g, scenario_path, kernel_name, n_points, grids);
        if (*energy) return cmd_energy(g, scenario_path);
        if (*gnm) return cmd_gnm(g, n_max, epsilon_inf);
        if (*velocity) return cmd_velocity(g, scenario_path);
        if (*potential) return cmd_potential(g, scenario_path);
        if (*estimate) return cmd_estimate(g, bounds);
        if (*scaling) return cmd_scaling(g, scenario_path, factor);
    } catch (const qrad::parse_error& e) {
        std::cerr << "error (config): " << e.what() << "\n";
        return 3;
    } catch (const qrad::validation_error& e) {
        std::cerr << "error (validation): " << e.what() << "\n";
        return 3;
    } catch (const qrad::convergence_error& e) {
        std::cerr << "error (non-convergence): " << e.what() << "\n";
        return 4;
    } catch (const qrad::coverage_error& e) {
        std::cerr << "error (coverage): " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
