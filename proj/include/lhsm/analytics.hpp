#pragma once

#include <complex>

#include "lhsm/bandstructure.hpp"
#include "lhsm/errors.hpp"
#include "lhsm/hamiltonian.hpp"

namespace lhsm::an {

// Near a quadratic band edge the mode continuum seen by an atom detuned
// into the gap is summarized by the edge expansion omega(k0 + dk) =
// edge +/- alpha*dk^2. Everything in this module lives in that
// approximation; the full grid sum is available through exact_coupling_sum
// as a cross-check. All rates scale as N*g^2, with the same N as the
// simulation grid so analytic and numeric results stay comparable.

enum class Method { Quadrature, ClosedForm };

struct SelfEnergyContext {
    band::QuadraticBandEdge edge;
    ham::GiantAtom atom;
    double detuning_Delta0 = 0;  // |omega_q - edge_freq|, > 0 in the gap
    int n_modes_N = 0;

    // +1 when the band lies above omega_q (Minimum edge), -1 below.
    double sigma() const {
        return edge.orientation == band::EdgeOrientation::Minimum ? 1.0 : -1.0;
    }
    double beta() const;  // sqrt(Delta0 / alpha), inverse bound-state length
    void validate() const;
};

// Builds the context for an atom detuned into the gap (or below the
// lower band) next to the given edge; checks omega_q sits on the gap
// side of that edge.
SelfEnergyContext make_context(const band::LatticeParams& params,
                               band::Band which_band, double k0,
                               const ham::GiantAtom& atom, int n_modes);

// Markovian decay rate at resonance omega_q = omega_band(k_r):
//   Gamma = 4 N g^2 (1 + cos(k_r d_s)) / |v_g(k_r)|.
// The group velocity enters by magnitude; a left-handed band decays just
// as fast as a right-handed one. Refuses k_r closer than 0.1 to a band
// edge in k, where the Markov assumption has no window to hold.
double markov_decay_rate(const band::LatticeParams& params,
                         const ham::GiantAtom& atom, double k_r,
                         band::Band which_band, int n_modes);

// Self-energy of the excited atom near one band edge.
// Quadrature: (N g^2 / pi) * integral over dk of
//   [1 + cos(d_s (k0 + dk))] / (s + i*sigma*(Delta0 + alpha dk^2)),
// taken over a window of 200 half-widths sqrt((Delta0-u)/alpha), wide
// enough (truncated tail < 0.4%) to stand in for the full-line integral
// that the closed form solves exactly:
// ClosedForm: with s = -i x and u = sigma*x,
//   Sigma = -i sigma N g^2 [1 + cos(d_s k0) e^{-d_s sqrt((Delta0-u)/alpha)}]
//           / sqrt(alpha (Delta0 - u)).
// The two routes agree within 2% and check each other's algebra; the
// finite-zone, exact-dispersion cross-check is exact_coupling_sum.
std::complex<double> self_energy(std::complex<double> s,
                                 const SelfEnergyContext& ctx, Method method);

struct BoundStateResult {
    std::complex<double> pole_s0;  // purely imaginary
    std::complex<double> residue;
    double steady_population = 0;  // |residue|^2
    double bound_length = 0;       // 1/beta in cell units
};

// Solves s + Sigma(s) = 0 on the imaginary axis. In the variable
// u = sigma * x (s = -i x) the root always sits at u < 0: the band
// repels the dressed state away from itself, so the bound state lies
// below omega_q when the band is above and vice versa. Residual after
// the solve is below 1e-12.
BoundStateResult bound_state_pole(const SelfEnergyContext& ctx,
                                  Method method = Method::ClosedForm);

// |1/(1 + dSigma/ds)|^2 at the pole, the long-time excited population.
// The derivative is a central finite difference along the imaginary
// axis (step 1e-6 * Delta0), Richardson-extrapolated, evaluated with
// the same self-energy method that located the pole.
double residue_population(const SelfEnergyContext& ctx,
                          std::complex<double> pole_s0,
                          Method method = Method::ClosedForm);

// Gap-mediated exchange coupling between the two atoms of a pair, from
// the modes of the edge described by ctx, in the convention
//   J12 = sum_k g_k1 conj(g_k2) / (omega_q - omega_k).
// Quadrature integrates (N g^2 / pi) cos(k D_q)(1 + cos(k d_s)) /
// (-sigma (Delta0 + alpha dk^2)) over the same wide dk window as
// self_energy, k = k0 + dk.
// ClosedForm resolves the product into three cosines and integrates
// each over the infinite edge expansion:
//   J12 = -sigma (N g^2 / (alpha beta)) * [ cos(k0 D) e^{-D beta}
//         + cos(k0 (D+d)) e^{-(D+d) beta} / 2
//         + cos(k0 (D-d)) e^{-|D-d| beta} / 2 ].
// At k0 = pi the sign alternates with the parity of D_q and |J12| falls
// off as e^{-beta D_q} once D_q > d_s.
double dipole_coupling(const ham::AtomPair& pair,
                       const SelfEnergyContext& ctx, Method method);

// Exact single-edge-free cross-check on the discrete grid the dynamics
// actually uses: J12 = sum over both bands and all grid k of
// 2 g^2 (1 + cos(k d_s)) cos(k D_q) / (omega_q - omega_k).
double exact_coupling_sum(const ham::AtomPair& pair,
                          const ham::ModeGrid& grid);

} // namespace lhsm::an
