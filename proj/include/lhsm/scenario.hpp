#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lhsm/analytics.hpp"
#include "lhsm/bandstructure.hpp"
#include "lhsm/dynamics.hpp"
#include "lhsm/hamiltonian.hpp"

namespace lhsm::run {

inline constexpr const char* kVersion = "0.1.0";

enum class Scenario {
    Dispersion,
    DecaySweep,
    BoundStateSweep,
    DetuningSweep,
    TwoAtomRabi,
    TwoAtomDistanceSweep,
};

// Which band edge an in-gap (or below-band) atom is referenced to.
enum class EdgeSide { UpperPi, LowerPi, LowerZero };

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);
EdgeSide edge_side_from_name(const std::string& name);
std::string edge_side_name(EdgeSide e);

// One flat config drives every scenario; fields irrelevant to a given
// scenario are ignored but still hashed, so reruns of the same document
// are bitwise reproducible. All frequencies in omega_r units, k in
// 1/cell units.
struct ScenarioConfig {
    Scenario scenario = Scenario::Dispersion;
    band::LatticeParams lattice;
    int n_modes = 2000;
    double upper_cutoff = 10.0;
    double g = 1e-4;
    int d_s = 4;
    int D_q = 6;
    double omega_q = 0;          // 0 = scenario picks it (resonance/detuning)
    double k_r = 1.5707963267948966;  // resonant wavevector for decay runs
    band::Band which_band = band::Band::Upper;
    EdgeSide edge = EdgeSide::UpperPi;
    double delta0 = 0;           // explicit gap detuning; 0 = use fraction
    double delta0_fraction = 0.2;  // of the gap (or lower bandwidth)
    std::vector<double> sweep_values;  // scenario-dependent axis
    double t_max = 0;            // 0 = policy default per scenario
    double dt = 0;               // 0 = stability-guard maximum
    double norm_tolerance = 1e-6;
    int record_stride = 0;       // 0 = auto
    int workers = 1;
    bool seedless = false;       // omit the timestamp from the manifest
    std::string output_dir = ".";

    void validate() const;
};

// JSON document -> config (unknown keys rejected), and the canonical
// serialization that gets hashed into every output file.
ScenarioConfig config_from_json(const std::string& json_text);
std::string canonical_json(const ScenarioConfig& cfg);

struct ResultSet {
    std::string scenario;
    std::uint64_t config_hash = 0;
    std::string manifest;  // JSON bytes
    std::vector<std::pair<std::string, std::string>> tables;  // name, bytes
    std::vector<std::pair<std::string, std::string>> plots;   // name, bytes
};

ResultSet run_scenario(const ScenarioConfig& cfg);
void write_result_set(const ResultSet& rs, const std::string& dir);

// ---- shared measurement policies -------------------------------------
// These are used both by the sweep scenarios and by the acceptance suite,
// so the two always agree on windows and horizons.

// Trajectories are only trusted before the emitted wavepacket wraps the
// ring: t < N * cell / |v|. A 15% margin keeps the fit window clear of
// the wraparound.
double revival_horizon(int n_modes, double speed);

struct DecayPoint {
    double gamma_num = 0;
    double gamma_analytic = 0;
    double residual_rms = 0;
    double window_t0 = 0, window_t1 = 0, t_max = 0;
    bool lenient = false;  // plain log-slope at an interference zero
};

// Resonant decay measurement: places omega_q on the band at k_r, evolves
// in the rotating frame, fits ln|c_e|^2 over [t0, t1] with
//   t1 = min(2.5/Gamma_est, 0.85 * t_revival)
//   t0 = min(0.5/Gamma_est, 0.25 * t1)
// skipping the early quadratic transient. At interference zeros
// (Gamma_est = 0) the plain log-slope is reported instead, clamped at 0.
DecayPoint measure_decay(const band::LatticeParams& params, int n_modes,
                         double g, int d_s, double k_r,
                         band::Band which_band, double upper_cutoff = 10.0,
                         double t_max_override = 0, double dt = 0);

struct GapPoint {
    double population_residue = 0;
    double population_dynamics = 0;
    double pole_x = 0;        // bound-state frequency relative to omega_q
    double bound_length = 0;  // 1/beta
};

// Bound-state population measured both ways: residue of the dressed pole
// and the tail average of a full evolution. delta0 > 0 places omega_q a
// distance delta0 into the gap from the chosen edge (below the band for
// LowerZero).
GapPoint measure_gap_population(const band::LatticeParams& params,
                                int n_modes, double g, int d_s,
                                EdgeSide side, double delta0,
                                double upper_cutoff = 10.0,
                                double t_max_override = 0, double dt = 0);

// omega_q and the self-energy context for an atom referenced to a band
// edge at detuning delta0.
an::SelfEnergyContext edge_context(const band::LatticeParams& params,
                                   EdgeSide side, double delta0, int d_s,
                                   double g, int n_modes);

} // namespace lhsm::run
