#pragma once

#include <vector>

#include "lhsm/errors.hpp"

namespace lhsm::band {

// Superlattice of alternating LC cells with impedance ratio epsilon.
// Dispersion (in units of omega_r = 1/sqrt(C*L), cell length dX = 1):
//
//   omega_pm(k) = 1 / sqrt( (1+eps)^2/2 -+ sqrt( (1+eps)^4/4 + eps^2*(2cos k - 2) ) )
//
// The branch with the minus sign inside the outer radical is the *upper*
// band: it runs from the zone-edge infrared cutoff omega_+(pi) up to a
// divergence at k = 0 and has negative group velocity on (0, pi)
// (left-handed). The plus branch is the lower (Bragg) band, increasing
// from omega_-(0) = 1/(1+eps) to omega_-(pi). Between omega_-(pi) and
// omega_+(pi) lies an asymmetric gap that closes at eps = 1.

struct LatticeParams {
    double capacitance = 2.5e-11;  // farad
    double inductance = 2e-10;     // henry
    double epsilon = 1.4;          // impedance ratio of the two sub-cells
    double cell_length = 1.0;      // dX, sets the k unit

    double omega_r() const;        // 1/sqrt(C*L), rad/s
    void validate() const;         // throws config_error
};

enum class Band { Upper, Lower };

struct BandEdges {
    double omega_upper_pi = 0;
    double omega_lower_pi = 0;
    double omega_lower_zero = 0;
    double gap_width = 0;    // omega_upper_pi - omega_lower_pi
    double lower_width = 0;  // omega_lower_pi - omega_lower_zero
};

enum class EdgeOrientation { Minimum, Maximum };

// Quadratic model of a band edge: E(k0 + dk) = edge_freq +/- alpha*dk^2
// (+ for Minimum, - for Maximum). alpha is the coefficient that makes the
// residual against the exact dispersion O(dk^4); numerically it equals
// |omega''(k0)|/2 from a Richardson-extrapolated central second difference.
struct QuadraticBandEdge {
    Band band = Band::Upper;
    double k0 = 0;               // 0 or pi
    double edge_freq = 0;        // omega_r units
    double alpha = 0;            // omega_r * dX^2 units, > 0
    EdgeOrientation orientation = EdgeOrientation::Minimum;
};

// All frequencies in omega_r units, k in (-pi, pi]. k = -pi is accepted and
// treated as the same zone-edge point as +pi.
double omega(double k, Band band, const LatticeParams& params);

// d(omega)/dk, analytic derivative of the dispersion. Zero at k = 0, +-pi.
double group_velocity(double k, Band band, const LatticeParams& params);

BandEdges band_edges(const LatticeParams& params);

// Supported (band, k0) pairs: (Upper, pi), (Lower, pi), (Lower, 0).
QuadraticBandEdge quadratic_band_edge(Band band, double k0,
                                      const LatticeParams& params);

// Independent route to the spectrum: build the site-space capacitance
// Laplacian C_hat (bond capacitances alternate C, eps*C around the ring)
// and the shunt matrix Linv = diag(1/(eps*L), 1/L, ...), then solve the
// symmetric eigenproblem they define. For a periodic ring of n_cells
// two-site cells the uniform flux pattern is a zero mode of C_hat and
// corresponds to the divergent k = 0 limit of the upper band, so the
// returned spectrum holds 2*n_cells - 1 finite frequencies, sorted
// ascending, in omega_r units. They match {omega_pm(2*pi*j/n_cells)} with
// the upper-band k = 0 entry excluded.
std::vector<double> realspace_spectrum(const LatticeParams& params,
                                       int n_cells);

} // namespace lhsm::band
