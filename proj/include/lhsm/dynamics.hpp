#pragma once

#include <complex>
#include <vector>

#include "lhsm/errors.hpp"
#include "lhsm/hamiltonian.hpp"

namespace lhsm::dyn {

// Sampled single-excitation evolution. t_grid is uniformly spaced
// (record stride * dt); amplitudes are stored per atom. norm_series
// should sit at 1 up to integrator error, energy_series at <psi|H|psi>
// of the initial state.
struct Trajectory {
    std::vector<double> t_grid;
    std::vector<std::vector<std::complex<double>>> atom_amplitudes;
    std::vector<double> mode_population_total;
    std::vector<double> norm_series;
    std::vector<double> energy_series;

    int n_samples() const { return int(t_grid.size()); }
};

struct EvolveConfig {
    double dt = 0;           // step in 1/omega_r; 0 = auto from the guard
    double t_max = 0;        // horizon in 1/omega_r
    double tolerance = 1e-6; // allowed |norm - 1|
    ham::Frame frame = ham::Frame::Rotating; // must match the Hamiltonian
    int record_stride = 0;   // sample every this many steps; 0 = auto
};

struct AtomExcited {
    int index = 0;
};

// Fixed-step classic 4th-order integration of i d(psi)/dt = H psi from
// |e_index, vacuum>. The step must satisfy dt * max|diag(H)| <= 0.1.
// Throws numerical_error on norm drift beyond cfg.tolerance or on a
// non-finite state.
Trajectory evolve(const ham::ArrowheadHamiltonian& h, AtomExcited initial,
                  const EvolveConfig& cfg);

struct DecayFit {
    double rate = 0;         // Gamma with |c_e(t)|^2 = exp(-Gamma t)
    double residual_rms = 0; // rms of ln|c_e|^2 about the fitted line
    int n_points = 0;
};

// Least-squares slope of ln|c_e(t)|^2 over [t0, t1], negated into the
// population-rate convention |c_e(t)|^2 = exp(-Gamma t). Requires |c_e|
// strictly decreasing and > 1e-6 on the window; refusal signals a
// non-Markovian (or underflowed) regime.
DecayFit fit_decay_rate(const Trajectory& traj, double t0, double t1,
                        int atom = 0);

// Same least-squares slope of ln|c_e|^2, without the monotonicity and
// underflow preconditions. For sweep points where the decay is
// interference-suppressed and |c_e|^2 only wiggles, the fitted slope is
// an honest "rate consistent with zero" readout where fit_decay_rate
// would refuse. Returns the raw slope (any sign).
double log_slope(const Trajectory& traj, double t0, double t1, int atom = 0);

// Mean of |c_e|^2 over the final tail_fraction of the trajectory.
// Fails (numerical_error) if doubling the tail window moves the mean by
// more than 1%: the plateau has not converged.
double steady_population(const Trajectory& traj, double tail_fraction = 0.2,
                         int atom = 0);

// Dominant angular frequency of |c_e(t)|^2 for the given atom: coarse
// windowed-DFT peak, then a golden-section refinement of the windowed
// DTFT magnitude. Requires peak-to-trough contrast > 0.5 and a dominant
// nonzero-frequency peak. For pure two-atom exchange the population
// oscillates at 2|J12|.
double rabi_frequency(const Trajectory& traj, int atom = 1);

} // namespace lhsm::dyn
