#include "lhsm/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace lhsm::ham {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Keeps 2N+Q comfortably inside int and the dense scratch sizes sane.
constexpr int kMaxModes = 1 << 21;

} // namespace

void GiantAtom::validate() const {
    if (!(g >= 0))
        throw config_error("atom coupling g must be >= 0");
    if (d_s < 0)
        throw config_error("coupling-point separation d_s must be >= 0");
    if (!(omega_q > 0) || !std::isfinite(omega_q))
        throw config_error("atom frequency omega_q must be positive");
}

void AtomPair::validate() const {
    atom_a.validate();
    atom_b.validate();
    if (D_q < 1)
        throw config_error("atom separation D_q must be a positive integer");
    if (atom_a.omega_q != atom_b.omega_q || atom_a.d_s != atom_b.d_s ||
        atom_a.g != atom_b.g)
        throw config_error("atom pair must be identical in omega_q, d_s, g");
}

ModeGrid mode_grid(int n_modes, const band::LatticeParams& params,
                   double upper_cutoff) {
    params.validate();
    if (n_modes < 2 || n_modes % 2 != 0)
        throw config_error("mode count must be even and >= 2");
    if (n_modes > kMaxModes)
        throw config_error("mode count exceeds the dimension guard");
    if (!(upper_cutoff > 0))
        throw config_error("upper-band cutoff must be positive");

    ModeGrid grid;
    grid.n_modes = n_modes;
    grid.upper_cutoff = upper_cutoff;
    grid.k_values.resize(n_modes);
    grid.frequencies_upper.resize(n_modes);
    grid.frequencies_lower.resize(n_modes);

    for (int j = 1; j <= n_modes; ++j) {
        // Exact at the two special points: j = N/2 -> 0, j = N -> pi.
        double k = -kPi + 2.0 * kPi * (double(j) / double(n_modes));
        int i = j - 1;
        grid.k_values[i] = k;
        grid.frequencies_lower[i] = band::omega(k, band::Band::Lower, params);
        double up = (k == 0.0) ? upper_cutoff
                               : band::omega(k, band::Band::Upper, params);
        grid.frequencies_upper[i] = std::min(up, upper_cutoff);
    }
    return grid;
}

std::vector<std::complex<double>>
coupling_amplitudes(const GiantAtom& atom, const ModeGrid& grid, int offset) {
    atom.validate();
    if (offset < 0)
        throw config_error("coupling offset must be >= 0");
    const int n = grid.n_modes;
    std::vector<std::complex<double>> g_k(2 * std::size_t(n));
    for (int i = 0; i < n; ++i) {
        double k = grid.k_values[i];
        std::complex<double> form =
            atom.g * (1.0 + std::polar(1.0, k * atom.d_s));
        if (offset != 0)
            form *= std::polar(1.0, k * offset);
        g_k[i] = form;          // upper-band block
        g_k[i + n] = form;      // lower-band block, same form factor
    }
    return g_k;
}

namespace {

ArrowheadHamiltonian assemble(const ModeGrid& grid, Frame frame,
                              double omega_q,
                              std::vector<std::vector<std::complex<double>>> border) {
    ArrowheadHamiltonian h;
    h.n_modes = grid.n_modes;
    h.n_atoms = int(border.size());
    h.frame = frame;
    h.omega_ref = (frame == Frame::Rotating) ? omega_q : 0.0;
    h.border = std::move(border);

    const int n = grid.n_modes;
    h.mode_diagonal.resize(2 * std::size_t(n));
    for (int i = 0; i < n; ++i) {
        h.mode_diagonal[i] = grid.frequencies_upper[i] - h.omega_ref;
        h.mode_diagonal[i + n] = grid.frequencies_lower[i] - h.omega_ref;
    }
    h.atom_diagonal.assign(h.n_atoms, omega_q - h.omega_ref);
    return h;
}

} // namespace

ArrowheadHamiltonian build_hamiltonian(const GiantAtom& atom,
                                       const ModeGrid& grid, Frame frame) {
    atom.validate();
    return assemble(grid, frame, atom.omega_q,
                    {coupling_amplitudes(atom, grid)});
}

ArrowheadHamiltonian build_hamiltonian(const AtomPair& pair,
                                       const ModeGrid& grid, Frame frame) {
    pair.validate();
    return assemble(grid, frame, pair.atom_a.omega_q,
                    {coupling_amplitudes(pair.atom_a, grid),
                     coupling_amplitudes(pair.atom_b, grid, pair.D_q)});
}

std::size_t ArrowheadHamiltonian::structural_nonzeros() const {
    std::size_t two_n = mode_diagonal.size();
    return two_n + 2 * (two_n * border.size()) + atom_diagonal.size();
}

double ArrowheadHamiltonian::max_abs_diagonal() const {
    double m = 0;
    for (double d : mode_diagonal) m = std::max(m, std::abs(d));
    for (double d : atom_diagonal) m = std::max(m, std::abs(d));
    return m;
}

void ArrowheadHamiltonian::apply(const std::complex<double>* x,
                                 std::complex<double>* y) const {
    const std::size_t two_n = mode_diagonal.size();
    for (std::size_t i = 0; i < two_n; ++i)
        y[i] = mode_diagonal[i] * x[i];
    for (int a = 0; a < n_atoms; ++a) {
        const std::complex<double> xa = x[two_n + a];
        const std::complex<double>* col = border[a].data();
        std::complex<double> acc = atom_diagonal[a] * xa;
        for (std::size_t i = 0; i < two_n; ++i) {
            y[i] += col[i] * xa;
            acc += std::conj(col[i]) * x[i];
        }
        y[two_n + a] = acc;
    }
}

Eigen::MatrixXcd ArrowheadHamiltonian::dense() const {
    if (n_modes > 512)
        throw config_error("dense realization limited to N <= 512");
    const int dim = dimension();
    const int two_n = 2 * n_modes;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < two_n; ++i) m(i, i) = mode_diagonal[i];
    for (int a = 0; a < n_atoms; ++a) {
        m(two_n + a, two_n + a) = atom_diagonal[a];
        for (int i = 0; i < two_n; ++i) {
            m(i, two_n + a) = border[a][i];
            m(two_n + a, i) = std::conj(border[a][i]);
        }
    }
    return m;
}

} // namespace lhsm::ham
