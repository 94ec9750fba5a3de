// Command-line front end: one scenario per invocation, a JSON config
// document, and a handful of override flags for quick parameter scans.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lhsm/errors.hpp"
#include "lhsm/scenario.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw lhsm::config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lhsm-qed: giant atoms coupled to a left-handed superlattice "
        "metamaterial"};
    app.get_formatter()->column_width(26);

    std::string scenario_arg, config_path, out_dir;
    int workers = 0, n_modes = 0, d_s = 0, D_q = 0;
    double epsilon = 0, g = 0, omega_q = 0, k_r = 0, t_max = 0, dt = 0;
    bool seedless = false;

    app.add_option("scenario", scenario_arg,
                   "dispersion | decay_sweep | bound_state_sweep | "
                   "detuning_sweep | two_atom_rabi | "
                   "two_atom_distance_sweep")
        ->required();
    app.add_option("--config", config_path, "JSON config document")
        ->required();
    auto* o_out = app.add_option("--out", out_dir,
                                 "output directory (default: "
                                 "$LHSM_QED_OUT, then config)");
    auto* o_workers =
        app.add_option("--workers", workers, "sweep-point thread count");
    auto* o_modes = app.add_option("--n-modes", n_modes,
                                   "modes per band (even)");
    app.add_flag("--seedless", seedless,
                 "omit the timestamp so outputs are bitwise reproducible");
    auto* o_eps = app.add_option("--epsilon", epsilon,
                                 "impedance mismatch C_J/C = L/L_J");
    auto* o_g = app.add_option("--g", g, "per-point coupling (omega_r)");
    auto* o_ds = app.add_option("--ds", d_s,
                                "coupling-point separation (cells)");
    auto* o_dq = app.add_option("--dq", D_q, "atom separation (cells)");
    auto* o_wq = app.add_option("--omega-q", omega_q,
                                "atom frequency (omega_r)");
    auto* o_kr = app.add_option("--k-r", k_r,
                                "resonant wavevector for decay runs");
    auto* o_tmax = app.add_option("--t-max", t_max,
                                  "evolution horizon (1/omega_r)");
    auto* o_dt = app.add_option("--dt", dt, "integrator step (1/omega_r)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        lhsm::run::ScenarioConfig cfg =
            lhsm::run::config_from_json(slurp(config_path));
        cfg.scenario = lhsm::run::scenario_from_name(scenario_arg);
        if (*o_workers) cfg.workers = workers;
        if (*o_modes) cfg.n_modes = n_modes;
        if (seedless) cfg.seedless = true;
        if (*o_eps) cfg.lattice.epsilon = epsilon;
        if (*o_g) cfg.g = g;
        if (*o_ds) cfg.d_s = d_s;
        if (*o_dq) cfg.D_q = D_q;
        if (*o_wq) cfg.omega_q = omega_q;
        if (*o_kr) cfg.k_r = k_r;
        if (*o_tmax) cfg.t_max = t_max;
        if (*o_dt) cfg.dt = dt;

        std::string dir = cfg.output_dir;
        if (const char* env = std::getenv("LHSM_QED_OUT"); env && *env)
            dir = env;
        if (*o_out)
            dir = out_dir;

        const lhsm::run::ResultSet rs = lhsm::run::run_scenario(cfg);
        lhsm::run::write_result_set(rs, dir);
        std::cout << rs.scenario << ": wrote " << rs.tables.size()
                  << " table(s), " << rs.plots.size() << " plot(s) to "
                  << dir << "\n";
        return 0;
    } catch (const lhsm::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const lhsm::physics_error& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return 3;
    } catch (const lhsm::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
