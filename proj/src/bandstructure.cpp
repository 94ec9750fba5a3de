#include "lhsm/bandstructure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace lhsm::band {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Inner radical of the dispersion: R(k) = sqrt((1+e)^4/4 + e^2(2cos k - 2)).
// Nonnegative for all k: at k = pi it reduces to sqrt(((1+e)^2/2)^2 - 4e^2)
// = sqrt((1+e^2+4e)(1-e)^2)/2... >= 0, vanishing only in degenerate limits.
double inner_radical(double k, double eps) {
    double a = (1.0 + eps) * (1.0 + eps);
    double r2 = a * a / 4.0 + eps * eps * (2.0 * std::cos(k) - 2.0);
    return std::sqrt(std::max(r2, 0.0));
}

void check_bz(double k) {
    if (!(std::abs(k) <= kPi + 1e-12))
        throw config_error("k = " + std::to_string(k) +
                           " outside the first Brillouin zone (-pi, pi]");
}

} // namespace

double LatticeParams::omega_r() const {
    return 1.0 / std::sqrt(capacitance * inductance);
}

void LatticeParams::validate() const {
    if (!(capacitance > 0))
        throw config_error("lattice capacitance must be > 0");
    if (!(inductance > 0))
        throw config_error("lattice inductance must be > 0");
    if (!(epsilon > 0))
        throw config_error("lattice epsilon must be > 0");
    if (!(cell_length > 0))
        throw config_error("lattice cell_length must be > 0");
}

double omega(double k, Band band, const LatticeParams& params) {
    params.validate();
    check_bz(k);
    double eps = params.epsilon;
    double a = (1.0 + eps) * (1.0 + eps) / 2.0;
    double r = inner_radical(k, eps);
    if (band == Band::Upper) {
        double d = a - r;
        // d -> 0 as k -> 0: the left-handed band has no upper bound there.
        if (d <= 0 || !(std::sqrt(d) * 1e14 > 1.0))
            throw physics_error(
                "upper band diverges at k = 0; frequency not defined");
        return 1.0 / std::sqrt(d);
    }
    return 1.0 / std::sqrt(a + r);
}

double group_velocity(double k, Band band, const LatticeParams& params) {
    params.validate();
    check_bz(k);
    double eps = params.epsilon;
    double a = (1.0 + eps) * (1.0 + eps) / 2.0;
    double r = inner_radical(k, eps);
    double s = std::sin(k);
    // d(omega)/dk for omega = (a -+ r)^(-1/2), with
    // dr/dk = -eps^2 sin k / r. The lower band's sign comes out positive on
    // (0, pi); the upper band's negative (anomalous dispersion).
    if (band == Band::Upper) {
        if (std::abs(k) < 1e-14)
            throw physics_error(
                "upper band group velocity undefined at k = 0");
        double d = a - r;
        if (d <= 0)
            throw physics_error(
                "upper band group velocity undefined at k = 0");
        return -eps * eps * s / (2.0 * r * std::pow(d, 1.5));
    }
    return eps * eps * s / (2.0 * r * std::pow(a + r, 1.5));
}

BandEdges band_edges(const LatticeParams& params) {
    BandEdges e;
    e.omega_upper_pi = omega(kPi, Band::Upper, params);
    e.omega_lower_pi = omega(kPi, Band::Lower, params);
    e.omega_lower_zero = omega(0.0, Band::Lower, params);
    e.gap_width = e.omega_upper_pi - e.omega_lower_pi;
    e.lower_width = e.omega_lower_pi - e.omega_lower_zero;
    return e;
}

QuadraticBandEdge quadratic_band_edge(Band band, double k0,
                                      const LatticeParams& params) {
    bool at_pi = std::abs(k0 - kPi) < 1e-12;
    bool at_zero = std::abs(k0) < 1e-12;
    if (!((band == Band::Upper && at_pi) || (band == Band::Lower && at_pi) ||
          (band == Band::Lower && at_zero)))
        throw config_error(
            "quadratic band edge supported only at (Upper, pi), (Lower, pi), "
            "(Lower, 0)");

    double kc = at_pi ? kPi : 0.0;
    double f0 = omega(kc, band, params);

    // omega depends on k only through cos k, so it is even about both k = 0
    // and k = pi; fold the outside stencil point back into the zone and use
    // a central second difference, Richardson-extrapolated h -> h/2.
    auto second_diff = [&](double h) {
        double fp = omega(at_pi ? kc - h : h, band, params);
        return 2.0 * (fp - f0) / (h * h);
    };
    double h = 1e-4;
    double d2 = (4.0 * second_diff(h / 2.0) - second_diff(h)) / 3.0;

    QuadraticBandEdge edge;
    edge.band = band;
    edge.k0 = kc;
    edge.edge_freq = f0;
    edge.alpha = std::abs(d2) / 2.0;  // model coefficient, not the bare f''
    edge.orientation = d2 > 0 ? EdgeOrientation::Minimum : EdgeOrientation::Maximum;
    return edge;
}

std::vector<double> realspace_spectrum(const LatticeParams& params,
                                       int n_cells) {
    params.validate();
    if (n_cells < 8 || n_cells % 2 != 0)
        throw config_error("realspace_spectrum requires even n_cells >= 8");

    int m = 2 * n_cells;  // sites around the ring
    double eps = params.epsilon;

    // Site j couples to j+1 through eps*C for even j, C for odd j; even
    // sites carry shunt inductance eps*L, odd sites L (working in C = L = 1
    // units, frequencies come out in omega_r). Scale the capacitance
    // Laplacian on both sides by sqrt(L_j): S = Lhalf * C_hat * Lhalf, and
    // the eigenvalues of S are 1/omega^2.
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> bond(m), lhalf(m);
    for (int j = 0; j < m; ++j) {
        bond[j] = (j % 2 == 0) ? eps : 1.0;           // bond (j, j+1 mod m)
        lhalf[j] = (j % 2 == 0) ? std::sqrt(eps) : 1.0;
    }
    for (int j = 0; j < m; ++j) {
        int jn = (j + 1) % m;
        s(j, j) += bond[j] * lhalf[j] * lhalf[j];
        s(jn, jn) += bond[j] * lhalf[jn] * lhalf[jn];
        s(j, jn) -= bond[j] * lhalf[j] * lhalf[jn];
        s(jn, j) -= bond[j] * lhalf[j] * lhalf[jn];
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    if (solver.info() != Eigen::Success)
        throw numerical_error("realspace_spectrum: eigensolver failed");

    // The ring Laplacian has exactly one zero mode (uniform flux); it maps
    // to the divergent upper-band k = 0 frequency and is dropped. Anything
    // genuinely negative means the matrix was assembled wrong.
    const auto& mu = solver.eigenvalues();
    double scale = mu(m - 1);
    int zero_count = 0;
    std::vector<double> freqs;
    freqs.reserve(m - 1);
    for (int j = 0; j < m; ++j) {
        if (mu(j) < -1e-10 * scale)
            throw numerical_error(
                "realspace_spectrum: capacitance matrix not positive "
                "semidefinite (construction bug)");
        if (mu(j) < 1e-10 * scale) {
            ++zero_count;
            continue;
        }
        freqs.push_back(1.0 / std::sqrt(mu(j)));
    }
    if (zero_count != 1)
        throw numerical_error(
            "realspace_spectrum: expected exactly one uniform zero mode, got " +
            std::to_string(zero_count));
    std::sort(freqs.begin(), freqs.end());
    return freqs;
}

} // namespace lhsm::band
