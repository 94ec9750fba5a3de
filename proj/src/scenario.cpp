#include "lhsm/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <thread>

#include <json.hpp>

#include "lhsm/errors.hpp"
#include "lhsm/svg.hpp"
#include "lhsm/table.hpp"

namespace lhsm::run {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string normalized(const std::string& name) {
    std::string out;
    for (char c : name)
        if (std::isalnum(static_cast<unsigned char>(c)))
            out += char(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

Scenario scenario_from_name(const std::string& name) {
    const std::string n = normalized(name);
    if (n == "dispersion") return Scenario::Dispersion;
    if (n == "decaysweep") return Scenario::DecaySweep;
    if (n == "boundstatesweep") return Scenario::BoundStateSweep;
    if (n == "detuningsweep") return Scenario::DetuningSweep;
    if (n == "twoatomrabi") return Scenario::TwoAtomRabi;
    if (n == "twoatomdistancesweep") return Scenario::TwoAtomDistanceSweep;
    throw config_error("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Dispersion: return "dispersion";
        case Scenario::DecaySweep: return "decay_sweep";
        case Scenario::BoundStateSweep: return "bound_state_sweep";
        case Scenario::DetuningSweep: return "detuning_sweep";
        case Scenario::TwoAtomRabi: return "two_atom_rabi";
        case Scenario::TwoAtomDistanceSweep: return "two_atom_distance_sweep";
    }
    throw config_error("unhandled scenario value");
}

EdgeSide edge_side_from_name(const std::string& name) {
    const std::string n = normalized(name);
    if (n == "upperpi") return EdgeSide::UpperPi;
    if (n == "lowerpi") return EdgeSide::LowerPi;
    if (n == "lowerzero") return EdgeSide::LowerZero;
    throw config_error("unknown edge side: " + name +
                       " (use upper_pi, lower_pi, lower_zero)");
}

std::string edge_side_name(EdgeSide e) {
    switch (e) {
        case EdgeSide::UpperPi: return "upper_pi";
        case EdgeSide::LowerPi: return "lower_pi";
        case EdgeSide::LowerZero: return "lower_zero";
    }
    throw config_error("unhandled edge side value");
}

void ScenarioConfig::validate() const {
    lattice.validate();
    if (n_modes < 2 || n_modes % 2 != 0)
        throw config_error("n_modes must be even and >= 2");
    if (!(upper_cutoff > 0))
        throw config_error("upper_cutoff must be positive");
    if (!(g >= 0))
        throw config_error("g must be >= 0");
    if (d_s < 0)
        throw config_error("d_s must be >= 0");
    if (D_q < 1)
        throw config_error("D_q must be >= 1");
    if (omega_q < 0)
        throw config_error("omega_q must be >= 0 (0 = derived)");
    if (!(k_r > -kPi && k_r <= kPi))
        throw config_error("k_r must lie in (-pi, pi]");
    if (delta0 < 0)
        throw config_error("delta0 must be >= 0 (0 = use delta0_fraction)");
    if (!(delta0_fraction > 0 && delta0_fraction < 0.95))
        throw config_error("delta0_fraction must lie in (0, 0.95)");
    if (t_max < 0 || dt < 0)
        throw config_error("t_max and dt must be >= 0");
    if (!(norm_tolerance > 0))
        throw config_error("norm_tolerance must be positive");
    if (record_stride < 0)
        throw config_error("record_stride must be >= 0");
    if (workers < 1 || workers > 256)
        throw config_error("workers must lie in [1, 256]");
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k)
                known = true;
        if (!known)
            throw config_error("unknown config key " + where + "." + it.key());
    }
}

template <typename T>
void load(const json& obj, const char* key, T& into) {
    if (!obj.contains(key))
        return;
    try {
        into = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(std::string("bad value for config key ") + key +
                           ": " + e.what());
    }
}

} // namespace

ScenarioConfig config_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") +
                           e.what());
    }
    if (!j.is_object())
        throw config_error("config root must be a JSON object");
    reject_unknown(j,
                   {"scenario", "lattice", "n_modes", "upper_cutoff", "g",
                    "d_s", "D_q", "omega_q", "k_r", "band", "edge", "delta0",
                    "delta0_fraction", "sweep_values", "t_max", "dt",
                    "norm_tolerance", "record_stride", "workers", "seedless",
                    "output_dir"},
                   "config");

    ScenarioConfig cfg;
    if (j.contains("scenario"))
        cfg.scenario = scenario_from_name(j.at("scenario").get<std::string>());
    if (j.contains("lattice")) {
        const json& l = j.at("lattice");
        if (!l.is_object())
            throw config_error("config.lattice must be an object");
        reject_unknown(l, {"capacitance", "inductance", "epsilon",
                           "cell_length"},
                       "config.lattice");
        load(l, "capacitance", cfg.lattice.capacitance);
        load(l, "inductance", cfg.lattice.inductance);
        load(l, "epsilon", cfg.lattice.epsilon);
        load(l, "cell_length", cfg.lattice.cell_length);
    }
    load(j, "n_modes", cfg.n_modes);
    load(j, "upper_cutoff", cfg.upper_cutoff);
    load(j, "g", cfg.g);
    load(j, "d_s", cfg.d_s);
    load(j, "D_q", cfg.D_q);
    load(j, "omega_q", cfg.omega_q);
    load(j, "k_r", cfg.k_r);
    if (j.contains("band")) {
        const std::string b = normalized(j.at("band").get<std::string>());
        if (b == "upper")
            cfg.which_band = band::Band::Upper;
        else if (b == "lower")
            cfg.which_band = band::Band::Lower;
        else
            throw config_error("config.band must be 'upper' or 'lower'");
    }
    if (j.contains("edge"))
        cfg.edge = edge_side_from_name(j.at("edge").get<std::string>());
    load(j, "delta0", cfg.delta0);
    load(j, "delta0_fraction", cfg.delta0_fraction);
    load(j, "sweep_values", cfg.sweep_values);
    load(j, "t_max", cfg.t_max);
    load(j, "dt", cfg.dt);
    load(j, "norm_tolerance", cfg.norm_tolerance);
    load(j, "record_stride", cfg.record_stride);
    load(j, "workers", cfg.workers);
    load(j, "seedless", cfg.seedless);
    load(j, "output_dir", cfg.output_dir);
    return cfg;
}

std::string canonical_json(const ScenarioConfig& cfg) {
    json j;
    j["scenario"] = scenario_name(cfg.scenario);
    j["lattice"] = {{"capacitance", cfg.lattice.capacitance},
                    {"inductance", cfg.lattice.inductance},
                    {"epsilon", cfg.lattice.epsilon},
                    {"cell_length", cfg.lattice.cell_length}};
    j["n_modes"] = cfg.n_modes;
    j["upper_cutoff"] = cfg.upper_cutoff;
    j["g"] = cfg.g;
    j["d_s"] = cfg.d_s;
    j["D_q"] = cfg.D_q;
    j["omega_q"] = cfg.omega_q;
    j["k_r"] = cfg.k_r;
    j["band"] = cfg.which_band == band::Band::Upper ? "upper" : "lower";
    j["edge"] = edge_side_name(cfg.edge);
    j["delta0"] = cfg.delta0;
    j["delta0_fraction"] = cfg.delta0_fraction;
    j["sweep_values"] = cfg.sweep_values;
    j["t_max"] = cfg.t_max;
    j["dt"] = cfg.dt;
    j["norm_tolerance"] = cfg.norm_tolerance;
    j["record_stride"] = cfg.record_stride;
    j["workers"] = cfg.workers;
    j["seedless"] = cfg.seedless;
    j["output_dir"] = cfg.output_dir;
    return j.dump();
}

// ---- measurement policies ---------------------------------------------

double revival_horizon(int n_modes, double speed) {
    if (!(std::abs(speed) > 0))
        throw config_error("revival horizon needs a nonzero speed");
    return 0.85 * double(n_modes) / std::abs(speed);
}

an::SelfEnergyContext edge_context(const band::LatticeParams& params,
                                   EdgeSide side, double delta0, int d_s,
                                   double g, int n_modes) {
    if (!(delta0 > 0))
        throw config_error("edge detuning delta0 must be positive");
    const band::BandEdges edges = band::band_edges(params);
    if (side != EdgeSide::LowerZero && delta0 >= edges.gap_width)
        throw config_error("delta0 places omega_q outside the band gap");

    band::Band which = band::Band::Lower;
    double k0 = kPi, omega_q = 0;
    switch (side) {
        case EdgeSide::UpperPi:
            which = band::Band::Upper;
            k0 = kPi;
            omega_q = edges.omega_upper_pi - delta0;
            break;
        case EdgeSide::LowerPi:
            which = band::Band::Lower;
            k0 = kPi;
            omega_q = edges.omega_lower_pi + delta0;
            break;
        case EdgeSide::LowerZero:
            which = band::Band::Lower;
            k0 = 0;
            omega_q = edges.omega_lower_zero - delta0;
            break;
    }
    if (!(omega_q > 0))
        throw config_error("delta0 pushes omega_q below zero frequency");
    ham::GiantAtom atom{omega_q, d_s, g, 0};
    return an::make_context(params, which, k0, atom, n_modes);
}

DecayPoint measure_decay(const band::LatticeParams& params, int n_modes,
                         double g, int d_s, double k_r,
                         band::Band which_band, double upper_cutoff,
                         double t_max_override, double dt) {
    DecayPoint out;
    const double omega_q = band::omega(k_r, which_band, params);
    const double vg = band::group_velocity(k_r, which_band, params);
    out.gamma_analytic =
        an::markov_decay_rate(params, ham::GiantAtom{omega_q, d_s, g, 0},
                              k_r, which_band, n_modes);

    const double t_horizon = revival_horizon(n_modes, vg);
    const double gamma_scale =
        8.0 * n_modes * g * g / std::abs(vg);  // d_s = 0 reference rate
    const bool at_zero = out.gamma_analytic < 1e-6 * gamma_scale;

    double t1, t0;
    if (at_zero) {
        t1 = t_horizon;
        t0 = 0.25 * t1;
    } else {
        t1 = std::min(2.5 / out.gamma_analytic, t_horizon);
        t0 = std::min(0.5 / out.gamma_analytic, 0.25 * t1);
    }
    double t_max = (t_max_override > 0)
                       ? std::min(t_max_override, t_horizon)
                       : t1;
    t1 = std::min(t1, t_max);
    out.window_t0 = t0;
    out.window_t1 = t1;
    out.t_max = t_max;

    const ham::ModeGrid grid = ham::mode_grid(n_modes, params, upper_cutoff);
    const ham::GiantAtom atom{omega_q, d_s, g, 0};
    const ham::ArrowheadHamiltonian h =
        ham::build_hamiltonian(atom, grid, ham::Frame::Rotating);

    dyn::EvolveConfig ecfg;
    ecfg.dt = dt;
    ecfg.t_max = t_max;
    ecfg.frame = ham::Frame::Rotating;
    const dyn::Trajectory traj = dyn::evolve(h, dyn::AtomExcited{0}, ecfg);

    if (at_zero) {
        out.gamma_num = std::max(0.0, -dyn::log_slope(traj, t0, t1));
        out.lenient = true;
        return out;
    }
    try {
        const dyn::DecayFit fit = dyn::fit_decay_rate(traj, t0, t1);
        out.gamma_num = fit.rate;
        out.residual_rms = fit.residual_rms;
    } catch (const physics_error&) {
        // Oscillatory window (suppressed decay): report the raw slope.
        out.gamma_num = std::max(0.0, -dyn::log_slope(traj, t0, t1));
        out.lenient = true;
    }
    return out;
}

namespace {

// Slowest speed at which emitted radiation leaves the atom: group
// velocity a distance delta0 into the band from the relevant edge(s),
// v = 2 sqrt(alpha delta0) in the quadratic model.
double slowest_emission_speed(const band::LatticeParams& params,
                              EdgeSide side, double delta0) {
    const band::BandEdges edges = band::band_edges(params);
    auto edge_speed = [&](band::Band b, double k0, double det) {
        const band::QuadraticBandEdge e = band::quadratic_band_edge(b, k0, params);
        return 2.0 * std::sqrt(e.alpha * det);
    };
    switch (side) {
        case EdgeSide::UpperPi:
            return std::min(
                edge_speed(band::Band::Upper, kPi, delta0),
                edge_speed(band::Band::Lower, kPi,
                           edges.gap_width - delta0));
        case EdgeSide::LowerPi:
            return std::min(
                edge_speed(band::Band::Lower, kPi, delta0),
                edge_speed(band::Band::Upper, kPi,
                           edges.gap_width - delta0));
        case EdgeSide::LowerZero:
            return edge_speed(band::Band::Lower, 0, delta0);
    }
    throw config_error("unhandled edge side value");
}

} // namespace

GapPoint measure_gap_population(const band::LatticeParams& params,
                                int n_modes, double g, int d_s,
                                EdgeSide side, double delta0,
                                double upper_cutoff, double t_max_override,
                                double dt) {
    GapPoint out;
    const an::SelfEnergyContext ctx =
        edge_context(params, side, delta0, d_s, g, n_modes);
    const an::BoundStateResult bs = an::bound_state_pole(ctx);
    out.population_residue = bs.steady_population;
    out.pole_x = -bs.pole_s0.imag();
    out.bound_length = bs.bound_length;

    const double t_horizon = revival_horizon(
        n_modes, slowest_emission_speed(params, side, delta0));
    double t_max = (t_max_override > 0)
                       ? std::min(t_max_override, t_horizon)
                       : std::min(std::max(2000.0, 40.0 / delta0), t_horizon);

    const ham::ModeGrid grid = ham::mode_grid(n_modes, params, upper_cutoff);
    const ham::ArrowheadHamiltonian h =
        ham::build_hamiltonian(ctx.atom, grid, ham::Frame::Rotating);
    dyn::EvolveConfig ecfg;
    ecfg.dt = dt;
    ecfg.t_max = t_max;
    ecfg.frame = ham::Frame::Rotating;
    const dyn::Trajectory traj = dyn::evolve(h, dyn::AtomExcited{0}, ecfg);
    out.population_dynamics = dyn::steady_population(traj, 0.2);
    return out;
}

// ---- sweep machinery ----------------------------------------------------

namespace {

template <typename Fn>
std::vector<std::vector<std::string>> parallel_rows(int n, int workers,
                                                    Fn&& fn) {
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(n));
    workers = std::clamp(workers, 1, std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i)
            rows[i] = fn(i);
        return rows;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = next++; i < n; i = next++)
                    rows[std::size_t(i)] = fn(i);
            } catch (...) {
                errors[std::size_t(w)] = std::current_exception();
            }
        });
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return rows;
}

std::string fmt(double v) { return io::format_double(v); }

std::vector<double> default_sweep(Scenario s,
                                  const band::BandEdges& edges) {
    std::vector<double> v;
    switch (s) {
        case Scenario::DecaySweep:
            for (int d = 0; d <= 12; ++d)
                v.push_back(d);
            break;
        case Scenario::BoundStateSweep:
            for (int d = 1; d <= 10; ++d)
                v.push_back(d);
            break;
        case Scenario::DetuningSweep:
            for (int i = 1; i <= 10; ++i)
                v.push_back(0.05 * i * edges.gap_width);
            break;
        case Scenario::TwoAtomDistanceSweep:
            for (int d = 4; d <= 14; ++d)
                v.push_back(d);
            break;
        default:
            break;
    }
    return v;
}

std::string iso_timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Assembler {
    ResultSet rs;
    std::uint64_t hash = 0;

    Assembler(const ScenarioConfig& cfg) {
        const std::string canon = canonical_json(cfg);
        hash = io::fnv1a(canon);
        rs.scenario = scenario_name(cfg.scenario);
        rs.config_hash = hash;
        json m;
        m["scenario"] = rs.scenario;
        m["config"] = json::parse(canon);
        m["config_hash"] = io::hex64(hash);
        m["version"] = kVersion;
        if (!cfg.seedless)
            m["timestamp"] = iso_timestamp_utc();
        rs.manifest = m.dump(2) + "\n";
    }

    void table(const std::string& name, const io::Table& t) {
        rs.tables.emplace_back(name, io::render_csv(t, hash));
    }
    void plot(const std::string& name, const io::PlotSpec& spec,
              const std::vector<io::Series>& series) {
        rs.plots.emplace_back(name, io::render_line_plot(spec, series));
    }
};

double resolve_delta0(const ScenarioConfig& cfg,
                      const band::BandEdges& edges) {
    if (cfg.delta0 > 0)
        return cfg.delta0;
    const double base = cfg.edge == EdgeSide::LowerZero ? edges.lower_width
                                                        : edges.gap_width;
    return cfg.delta0_fraction * base;
}

double mid_gap_omega(const band::BandEdges& edges) {
    return 0.5 * (edges.omega_upper_pi + edges.omega_lower_pi);
}

ResultSet run_dispersion(const ScenarioConfig& cfg) {
    Assembler a(cfg);
    const int n = 1000;
    io::Table t;
    t.columns = {"k", "omega_upper", "omega_lower", "vg_upper", "vg_lower"};
    io::Series su{"upper band", {}, {}}, sl{"lower band", {}, {}};
    io::Series vu{"upper band", {}, {}}, vl{"lower band", {}, {}};
    for (int i = 0; i < n; ++i) {
        // Half-offset grid: keeps k = 0 (divergent upper branch) and the
        // zone edge off the sample set.
        const double k = -kPi + (i + 0.5) * (2 * kPi / n);
        const double wu = band::omega(k, band::Band::Upper, cfg.lattice);
        const double wl = band::omega(k, band::Band::Lower, cfg.lattice);
        const double gu = band::group_velocity(k, band::Band::Upper,
                                               cfg.lattice);
        const double gl = band::group_velocity(k, band::Band::Lower,
                                               cfg.lattice);
        t.add_row({fmt(k), fmt(wu), fmt(wl), fmt(gu), fmt(gl)});
        su.x.push_back(k);
        su.y.push_back(wu);
        sl.x.push_back(k);
        sl.y.push_back(wl);
        vu.x.push_back(k);
        vu.y.push_back(gu);
        vl.x.push_back(k);
        vl.y.push_back(gl);
    }
    a.table("dispersion.csv", t);

    const band::BandEdges edges = band::band_edges(cfg.lattice);
    io::PlotSpec bands;
    bands.title = "Band structure, epsilon = " +
                  io::format_double(cfg.lattice.epsilon);
    bands.x_label = "k (1/cell)";
    bands.y_label = "omega (omega_r)";
    bands.y_min = 0;
    bands.y_max = 3.0 * edges.omega_upper_pi;
    a.plot("bands.svg", bands, {su, sl});

    io::PlotSpec vel;
    vel.title = "Group velocity";
    vel.x_label = "k (1/cell)";
    vel.y_label = "v_g (cells * omega_r)";
    a.plot("group_velocity.svg", vel, {vu, vl});
    return std::move(a.rs);
}

ResultSet run_decay_sweep(const ScenarioConfig& cfg) {
    Assembler a(cfg);
    const band::BandEdges edges = band::band_edges(cfg.lattice);
    std::vector<double> values = cfg.sweep_values;
    if (values.empty())
        values = default_sweep(cfg.scenario, edges);

    io::Table t;
    t.columns = {"d_s",       "gamma_num", "gamma_analytic",
                 "residual_rms", "window_t0", "window_t1",
                 "lenient",   "error"};
    auto rows = parallel_rows(int(values.size()), cfg.workers, [&](int i) {
        const int d_s = int(std::llround(values[std::size_t(i)]));
        std::vector<std::string> row{fmt(d_s), "", "", "", "", "", "", ""};
        try {
            const DecayPoint p = measure_decay(
                cfg.lattice, cfg.n_modes, cfg.g, d_s, cfg.k_r,
                cfg.which_band, cfg.upper_cutoff, cfg.t_max, cfg.dt);
            row[1] = fmt(p.gamma_num);
            row[2] = fmt(p.gamma_analytic);
            row[3] = fmt(p.residual_rms);
            row[4] = fmt(p.window_t0);
            row[5] = fmt(p.window_t1);
            row[6] = p.lenient ? "1" : "0";
        } catch (const physics_error& e) {
            row[7] = e.what();
        } catch (const numerical_error& e) {
            row[7] = e.what();
        }
        return row;
    });
    io::Series num{"fitted", {}, {}}, ana{"analytic", {}, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.add_row(rows[i]);
        if (rows[i][7].empty()) {
            num.x.push_back(values[i]);
            num.y.push_back(std::stod(rows[i][1]));
            ana.x.push_back(values[i]);
            ana.y.push_back(std::stod(rows[i][2]));
        }
    }
    a.table("decay_rates.csv", t);
    io::PlotSpec spec;
    spec.title = "Spontaneous decay vs coupling-point separation";
    spec.x_label = "d_s (cells)";
    spec.y_label = "Gamma (omega_r)";
    spec.markers = true;
    a.plot("decay_rates.svg", spec, {num, ana});
    return std::move(a.rs);
}

ResultSet run_bound_state_sweep(const ScenarioConfig& cfg) {
    Assembler a(cfg);
    const band::BandEdges edges = band::band_edges(cfg.lattice);
    const double delta0 = resolve_delta0(cfg, edges);
    std::vector<double> values = cfg.sweep_values;
    if (values.empty())
        values = default_sweep(cfg.scenario, edges);

    io::Table t;
    t.columns = {"d_s",   "population_residue", "population_dynamics",
                 "rel_diff", "pole_x",          "bound_length",
                 "error"};
    auto rows = parallel_rows(int(values.size()), cfg.workers, [&](int i) {
        const int d_s = int(std::llround(values[std::size_t(i)]));
        std::vector<std::string> row{fmt(d_s), "", "", "", "", "", ""};
        try {
            const GapPoint p = measure_gap_population(
                cfg.lattice, cfg.n_modes, cfg.g, d_s, cfg.edge, delta0,
                cfg.upper_cutoff, cfg.t_max, cfg.dt);
            const double rel =
                std::abs(p.population_residue - p.population_dynamics) /
                std::max(p.population_dynamics, 1e-300);
            row[1] = fmt(p.population_residue);
            row[2] = fmt(p.population_dynamics);
            row[3] = fmt(rel);
            row[4] = fmt(p.pole_x);
            row[5] = fmt(p.bound_length);
        } catch (const physics_error& e) {
            row[6] = e.what();
        } catch (const numerical_error& e) {
            row[6] = e.what();
        }
        return row;
    });
    io::Series res{"residue", {}, {}}, dy{"dynamics", {}, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.add_row(rows[i]);
        if (rows[i][6].empty()) {
            res.x.push_back(values[i]);
            res.y.push_back(std::stod(rows[i][1]));
            dy.x.push_back(values[i]);
            dy.y.push_back(std::stod(rows[i][2]));
        }
    }
    a.table("bound_state.csv", t);
    io::PlotSpec spec;
    spec.title = "Trapped population vs d_s (" + edge_side_name(cfg.edge) +
                 ", delta0 = " + io::format_double(delta0) + ")";
    spec.x_label = "d_s (cells)";
    spec.y_label = "steady |c_e|^2";
    spec.markers = true;
    a.plot("bound_state.svg", spec, {res, dy});
    return std::move(a.rs);
}

ResultSet run_detuning_sweep(const ScenarioConfig& cfg) {
    Assembler a(cfg);
    const band::BandEdges edges = band::band_edges(cfg.lattice);
    std::vector<double> values = cfg.sweep_values;
    if (values.empty())
        values = default_sweep(cfg.scenario, edges);

    io::Table t;
    t.columns = {"delta0",
                 "pop_residue_upper",
                 "pop_dynamics_upper",
                 "pop_residue_lower",
                 "pop_dynamics_lower",
                 "error"};
    auto rows = parallel_rows(int(values.size()), cfg.workers, [&](int i) {
        const double delta0 = values[std::size_t(i)];
        std::vector<std::string> row{fmt(delta0), "", "", "", "", ""};
        try {
            const GapPoint up = measure_gap_population(
                cfg.lattice, cfg.n_modes, cfg.g, cfg.d_s, EdgeSide::UpperPi,
                delta0, cfg.upper_cutoff, cfg.t_max, cfg.dt);
            const GapPoint lo = measure_gap_population(
                cfg.lattice, cfg.n_modes, cfg.g, cfg.d_s, EdgeSide::LowerPi,
                delta0, cfg.upper_cutoff, cfg.t_max, cfg.dt);
            row[1] = fmt(up.population_residue);
            row[2] = fmt(up.population_dynamics);
            row[3] = fmt(lo.population_residue);
            row[4] = fmt(lo.population_dynamics);
        } catch (const physics_error& e) {
            row[5] = e.what();
        } catch (const numerical_error& e) {
            row[5] = e.what();
        }
        return row;
    });
    io::Series ru{"upper edge, residue", {}, {}},
        du{"upper edge, dynamics", {}, {}},
        rl{"lower edge, residue", {}, {}},
        dl{"lower edge, dynamics", {}, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.add_row(rows[i]);
        if (rows[i][5].empty()) {
            ru.x.push_back(values[i]);
            ru.y.push_back(std::stod(rows[i][1]));
            du.x.push_back(values[i]);
            du.y.push_back(std::stod(rows[i][2]));
            rl.x.push_back(values[i]);
            rl.y.push_back(std::stod(rows[i][3]));
            dl.x.push_back(values[i]);
            dl.y.push_back(std::stod(rows[i][4]));
        }
    }
    a.table("detuning.csv", t);
    io::PlotSpec spec;
    spec.title = "Steady population vs gap detuning (d_s = " +
                 std::to_string(cfg.d_s) + ")";
    spec.x_label = "delta0 (omega_r)";
    spec.y_label = "steady |c_e|^2";
    spec.markers = true;
    a.plot("detuning.svg", spec, {ru, du, rl, dl});
    return std::move(a.rs);
}

ResultSet run_two_atom_rabi(const ScenarioConfig& cfg) {
    Assembler a(cfg);
    const band::BandEdges edges = band::band_edges(cfg.lattice);
    const double omega_q =
        cfg.omega_q > 0 ? cfg.omega_q : mid_gap_omega(edges);
    const double d_up = edges.omega_upper_pi - omega_q;
    const double d_lo = omega_q - edges.omega_lower_pi;
    if (!(d_up > 0) || !(d_lo > 0))
        throw config_error("two-atom scenarios need omega_q inside the gap");

    const ham::GiantAtom atom{omega_q, cfg.d_s, cfg.g, 0};
    const ham::AtomPair pair{atom, atom, cfg.D_q};
    const an::SelfEnergyContext cu = edge_context(
        cfg.lattice, EdgeSide::UpperPi, d_up, cfg.d_s, cfg.g, cfg.n_modes);
    const an::SelfEnergyContext cl = edge_context(
        cfg.lattice, EdgeSide::LowerPi, d_lo, cfg.d_s, cfg.g, cfg.n_modes);
    const double j_up = an::dipole_coupling(pair, cu, an::Method::ClosedForm);
    const double j_lo = an::dipole_coupling(pair, cl, an::Method::ClosedForm);
    const ham::ModeGrid grid =
        ham::mode_grid(cfg.n_modes, cfg.lattice, cfg.upper_cutoff);
    const double j_exact = an::exact_coupling_sum(pair, grid);

    const double v_slow =
        std::min(slowest_emission_speed(cfg.lattice, EdgeSide::UpperPi, d_up),
                 slowest_emission_speed(cfg.lattice, EdgeSide::LowerPi, d_lo));
    const double t_horizon = revival_horizon(cfg.n_modes, v_slow);
    const double t_max = (cfg.t_max > 0) ? std::min(cfg.t_max, t_horizon)
                                         : t_horizon;

    const ham::ArrowheadHamiltonian h =
        ham::build_hamiltonian(pair, grid, ham::Frame::Rotating);
    dyn::EvolveConfig ecfg;
    ecfg.dt = cfg.dt;
    ecfg.t_max = t_max;
    ecfg.frame = ham::Frame::Rotating;
    ecfg.record_stride = cfg.record_stride;
    const dyn::Trajectory traj = dyn::evolve(h, dyn::AtomExcited{0}, ecfg);

    io::Table traj_t;
    traj_t.columns = {"t", "pop_a", "pop_b", "mode_pop", "norm"};
    io::Series pa{"|c_a|^2", {}, {}}, pb{"|c_b|^2", {}, {}};
    double contrast_max = 0, contrast_min = 1;
    for (int i = 0; i < traj.n_samples(); ++i) {
        const double p0 = std::norm(traj.atom_amplitudes[0][std::size_t(i)]);
        const double p1 = std::norm(traj.atom_amplitudes[1][std::size_t(i)]);
        traj_t.add_row({fmt(traj.t_grid[std::size_t(i)]), fmt(p0), fmt(p1),
                        fmt(traj.mode_population_total[std::size_t(i)]),
                        fmt(traj.norm_series[std::size_t(i)])});
        pa.x.push_back(traj.t_grid[std::size_t(i)]);
        pa.y.push_back(p0);
        pb.x.push_back(traj.t_grid[std::size_t(i)]);
        pb.y.push_back(p1);
        contrast_max = std::max(contrast_max, p1);
        contrast_min = std::min(contrast_min, p1);
    }
    a.table("trajectory.csv", traj_t);

    io::Table s;
    s.columns = {"omega_q",
                 "contrast",
                 "rabi_frequency",
                 "two_J_closed_upper",
                 "two_J_closed_lower",
                 "two_J_closed_total",
                 "two_J_exact_sum",
                 "t_max",
                 "error"};
    std::string rabi_cell, err_cell;
    try {
        rabi_cell = fmt(dyn::rabi_frequency(traj, 1));
    } catch (const physics_error& e) {
        err_cell = e.what();
    }
    s.add_row({fmt(omega_q), fmt(contrast_max - contrast_min), rabi_cell,
               fmt(2 * std::abs(j_up)), fmt(2 * std::abs(j_lo)),
               fmt(2 * std::abs(j_up + j_lo)), fmt(2 * std::abs(j_exact)),
               fmt(t_max), err_cell});
    a.table("summary.csv", s);

    io::PlotSpec spec;
    spec.title = "Two-atom exchange (d_s = " + std::to_string(cfg.d_s) +
                 ", D_q = " + std::to_string(cfg.D_q) + ")";
    spec.x_label = "t (1/omega_r)";
    spec.y_label = "population";
    a.plot("rabi.svg", spec, {pa, pb});
    return std::move(a.rs);
}

ResultSet run_two_atom_distance_sweep(const ScenarioConfig& cfg) {
    Assembler a(cfg);
    const band::BandEdges edges = band::band_edges(cfg.lattice);
    const double omega_q =
        cfg.omega_q > 0 ? cfg.omega_q : mid_gap_omega(edges);
    const double d_up = edges.omega_upper_pi - omega_q;
    const double d_lo = omega_q - edges.omega_lower_pi;
    if (!(d_up > 0) || !(d_lo > 0))
        throw config_error("two-atom scenarios need omega_q inside the gap");
    std::vector<double> values = cfg.sweep_values;
    if (values.empty())
        values = default_sweep(cfg.scenario, edges);

    const ham::ModeGrid grid =
        ham::mode_grid(cfg.n_modes, cfg.lattice, cfg.upper_cutoff);
    io::Table t;
    t.columns = {"D_q",
                 "J_closed_upper",
                 "J_closed_lower",
                 "J_closed_total",
                 "J_quad_upper",
                 "J_exact_sum",
                 "error"};
    auto rows = parallel_rows(int(values.size()), cfg.workers, [&](int i) {
        const int dq = int(std::llround(values[std::size_t(i)]));
        std::vector<std::string> row{fmt(dq), "", "", "", "", "", ""};
        try {
            const ham::GiantAtom atom{omega_q, cfg.d_s, cfg.g, 0};
            const ham::AtomPair pair{atom, atom, dq};
            const an::SelfEnergyContext cu =
                edge_context(cfg.lattice, EdgeSide::UpperPi, d_up, cfg.d_s,
                             cfg.g, cfg.n_modes);
            const an::SelfEnergyContext cl =
                edge_context(cfg.lattice, EdgeSide::LowerPi, d_lo, cfg.d_s,
                             cfg.g, cfg.n_modes);
            const double ju =
                an::dipole_coupling(pair, cu, an::Method::ClosedForm);
            const double jl =
                an::dipole_coupling(pair, cl, an::Method::ClosedForm);
            const double jq =
                an::dipole_coupling(pair, cu, an::Method::Quadrature);
            const double je = an::exact_coupling_sum(pair, grid);
            row[1] = fmt(ju);
            row[2] = fmt(jl);
            row[3] = fmt(ju + jl);
            row[4] = fmt(jq);
            row[5] = fmt(je);
        } catch (const physics_error& e) {
            row[6] = e.what();
        } catch (const numerical_error& e) {
            row[6] = e.what();
        }
        return row;
    });
    io::Series sc{"closed form, upper edge", {}, {}},
        sq{"quadrature, upper edge", {}, {}}, se{"exact grid sum", {}, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.add_row(rows[i]);
        if (rows[i][6].empty()) {
            sc.x.push_back(values[i]);
            sc.y.push_back(std::abs(std::stod(rows[i][1])));
            sq.x.push_back(values[i]);
            sq.y.push_back(std::abs(std::stod(rows[i][4])));
            se.x.push_back(values[i]);
            se.y.push_back(std::abs(std::stod(rows[i][5])));
        }
    }
    a.table("dipole_coupling.csv", t);
    io::PlotSpec spec;
    spec.title = "Exchange coupling vs atom separation (d_s = " +
                 std::to_string(cfg.d_s) + ")";
    spec.x_label = "D_q (cells)";
    spec.y_label = "|J12| (omega_r)";
    spec.log_y = true;
    spec.markers = true;
    a.plot("dipole_coupling.svg", spec, {sc, sq, se});
    return std::move(a.rs);
}

} // namespace

ResultSet run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    switch (cfg.scenario) {
        case Scenario::Dispersion: return run_dispersion(cfg);
        case Scenario::DecaySweep: return run_decay_sweep(cfg);
        case Scenario::BoundStateSweep: return run_bound_state_sweep(cfg);
        case Scenario::DetuningSweep: return run_detuning_sweep(cfg);
        case Scenario::TwoAtomRabi: return run_two_atom_rabi(cfg);
        case Scenario::TwoAtomDistanceSweep:
            return run_two_atom_distance_sweep(cfg);
    }
    throw config_error("unhandled scenario value");
}

void write_result_set(const ResultSet& rs, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw config_error("cannot create output directory " + dir + ": " +
                           ec.message());
    io::write_file(dir + "/manifest.json", rs.manifest);
    for (const auto& [name, bytes] : rs.tables)
        io::write_file(dir + "/" + name, bytes);
    for (const auto& [name, bytes] : rs.plots)
        io::write_file(dir + "/" + name, bytes);
}

} // namespace lhsm::run
