#include "lhsm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace lhsm::dyn {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kStabilityBudget = 0.1;  // dt * max|diag| bound

// Split-complex view of the arrowhead. The hot loop runs over the 2N mode
// entries once per atom; with Q <= 2 this stays memory-bound and
// vectorizes without fast-math.
struct SplitArrowhead {
    int two_n = 0;
    int n_atoms = 0;
    const double* diag = nullptr;            // 2N
    std::vector<double> atom_diag;           // Q
    std::vector<std::vector<double>> br, bi;  // Q x 2N border split

    explicit SplitArrowhead(const ham::ArrowheadHamiltonian& h)
        : two_n(2 * h.n_modes), n_atoms(h.n_atoms),
          diag(h.mode_diagonal.data()), atom_diag(h.atom_diagonal) {
        br.resize(n_atoms);
        bi.resize(n_atoms);
        for (int a = 0; a < n_atoms; ++a) {
            br[a].resize(two_n);
            bi[a].resize(two_n);
            for (int i = 0; i < two_n; ++i) {
                br[a][i] = h.border[a][i].real();
                bi[a][i] = h.border[a][i].imag();
            }
        }
    }

    // f = -i H x, i.e. fr = (Hx)_im, fi = -(Hx)_re.
    void deriv(const double* __restrict xr, const double* __restrict xi,
               double* __restrict fr, double* __restrict fi) const {
        for (int i = 0; i < two_n; ++i) {
            fr[i] = diag[i] * xi[i];
            fi[i] = -diag[i] * xr[i];
        }
        for (int a = 0; a < n_atoms; ++a) {
            const double* __restrict cr = br[a].data();
            const double* __restrict ci = bi[a].data();
            const double ar = xr[two_n + a];
            const double ai = xi[two_n + a];
            double sr = 0, si = 0;  // sum conj(b) * x over modes
            for (int i = 0; i < two_n; ++i) {
                // (Hx)_mode += b * x_atom
                fr[i] += cr[i] * ai + ci[i] * ar;
                fi[i] -= cr[i] * ar - ci[i] * ai;
                sr += cr[i] * xr[i] + ci[i] * xi[i];
                si += cr[i] * xi[i] - ci[i] * xr[i];
            }
            const double hr = atom_diag[a] * ar + sr;
            const double hi = atom_diag[a] * ai + si;
            fr[two_n + a] = hi;
            fi[two_n + a] = -hr;
        }
    }

    // <x|H|x>, real by Hermiticity.
    double energy(const double* xr, const double* xi) const {
        double e = 0;
        for (int i = 0; i < two_n; ++i)
            e += diag[i] * (xr[i] * xr[i] + xi[i] * xi[i]);
        for (int a = 0; a < n_atoms; ++a) {
            const double ar = xr[two_n + a];
            const double ai = xi[two_n + a];
            e += atom_diag[a] * (ar * ar + ai * ai);
            double sr = 0, si = 0;
            const double* cr = br[a].data();
            const double* ci = bi[a].data();
            for (int i = 0; i < two_n; ++i) {
                sr += cr[i] * xr[i] + ci[i] * xi[i];
                si += cr[i] * xi[i] - ci[i] * xr[i];
            }
            // border appears twice (column and conjugate row)
            e += 2 * (ar * sr + ai * si);
        }
        return e;
    }
};

} // namespace

Trajectory evolve(const ham::ArrowheadHamiltonian& h, AtomExcited initial,
                  const EvolveConfig& cfg) {
    if (initial.index < 0 || initial.index >= h.n_atoms)
        throw config_error("excited-atom index out of range");
    if (cfg.frame != h.frame)
        throw config_error("evolve frame does not match the Hamiltonian frame");
    if (!(cfg.t_max > 0) || !std::isfinite(cfg.t_max))
        throw config_error("t_max must be positive");
    if (!(cfg.tolerance > 0))
        throw config_error("norm tolerance must be positive");

    const double dmax = h.max_abs_diagonal();
    double dt = cfg.dt;
    if (dt == 0)
        dt = (dmax > 0) ? 0.999 * kStabilityBudget / dmax : 0.01;
    if (!(dt > 0))
        throw config_error("dt must be positive");
    if (dt * dmax > kStabilityBudget * (1 + 1e-12))
        throw config_error("dt violates the stability guard dt*max|diag| <= " +
                           std::to_string(kStabilityBudget));

    const std::int64_t n_steps =
        std::max<std::int64_t>(1, std::int64_t(std::ceil(cfg.t_max / dt - 1e-9)));
    int stride = cfg.record_stride;
    if (stride == 0)
        stride = std::max<std::int64_t>(1, n_steps / 4000);
    if (stride < 0)
        throw config_error("record_stride must be >= 0");

    const SplitArrowhead sa(h);
    const int dim = h.dimension();
    const int two_n = sa.two_n;

    std::vector<double> xr(dim, 0.0), xi(dim, 0.0);
    xr[two_n + initial.index] = 1.0;

    std::vector<double> k1r(dim), k1i(dim), k2r(dim), k2i(dim), k3r(dim),
        k3i(dim), k4r(dim), k4i(dim), tr(dim), ti(dim);

    Trajectory out;
    const std::int64_t n_rec = n_steps / stride + 1;
    out.t_grid.reserve(n_rec);
    out.atom_amplitudes.assign(h.n_atoms, {});
    for (auto& v : out.atom_amplitudes) v.reserve(n_rec);
    out.mode_population_total.reserve(n_rec);
    out.norm_series.reserve(n_rec);
    out.energy_series.reserve(n_rec);

    auto record = [&](std::int64_t step) {
        double mode_pop = 0;
        for (int i = 0; i < two_n; ++i)
            mode_pop += xr[i] * xr[i] + xi[i] * xi[i];
        double norm = mode_pop;
        for (int a = 0; a < h.n_atoms; ++a) {
            const double ar = xr[two_n + a], ai = xi[two_n + a];
            norm += ar * ar + ai * ai;
            out.atom_amplitudes[a].emplace_back(ar, ai);
        }
        const double t = double(step) * dt;
        if (!std::isfinite(norm))
            throw numerical_error("state became non-finite at t = " +
                                  std::to_string(t));
        if (std::abs(norm - 1.0) > cfg.tolerance)
            throw numerical_error(
                "norm drift " + std::to_string(norm - 1.0) + " at t = " +
                std::to_string(t) + " exceeds tolerance " +
                std::to_string(cfg.tolerance));
        out.t_grid.push_back(t);
        out.mode_population_total.push_back(mode_pop);
        out.norm_series.push_back(norm);
        out.energy_series.push_back(sa.energy(xr.data(), xi.data()));
    };

    record(0);
    const double h2 = dt / 2, h6 = dt / 6;
    for (std::int64_t step = 1; step <= n_steps; ++step) {
        sa.deriv(xr.data(), xi.data(), k1r.data(), k1i.data());
        for (int i = 0; i < dim; ++i) {
            tr[i] = xr[i] + h2 * k1r[i];
            ti[i] = xi[i] + h2 * k1i[i];
        }
        sa.deriv(tr.data(), ti.data(), k2r.data(), k2i.data());
        for (int i = 0; i < dim; ++i) {
            tr[i] = xr[i] + h2 * k2r[i];
            ti[i] = xi[i] + h2 * k2i[i];
        }
        sa.deriv(tr.data(), ti.data(), k3r.data(), k3i.data());
        for (int i = 0; i < dim; ++i) {
            tr[i] = xr[i] + dt * k3r[i];
            ti[i] = xi[i] + dt * k3i[i];
        }
        sa.deriv(tr.data(), ti.data(), k4r.data(), k4i.data());
        for (int i = 0; i < dim; ++i) {
            xr[i] += h6 * (k1r[i] + 2 * (k2r[i] + k3r[i]) + k4r[i]);
            xi[i] += h6 * (k1i[i] + 2 * (k2i[i] + k3i[i]) + k4i[i]);
        }
        if (step % stride == 0)
            record(step);
    }
    return out;
}

namespace {

// Indices of t_grid inside [t0, t1].
std::pair<int, int> window_indices(const Trajectory& traj, double t0,
                                   double t1) {
    if (!(t0 < t1))
        throw config_error("fit window must have t0 < t1");
    const auto& t = traj.t_grid;
    int lo = int(std::lower_bound(t.begin(), t.end(), t0 - 1e-12) - t.begin());
    int hi = int(std::upper_bound(t.begin(), t.end(), t1 + 1e-12) - t.begin());
    return {lo, hi};
}

struct LineFit {
    double slope = 0;
    double rms = 0;
    int n = 0;
};

LineFit fit_log_population(const Trajectory& traj, double t0, double t1,
                           int atom) {
    if (atom < 0 || atom >= int(traj.atom_amplitudes.size()))
        throw config_error("atom index out of range");
    auto [lo, hi] = window_indices(traj, t0, t1);
    if (hi - lo < 8)
        throw config_error("fit window holds fewer than 8 samples");

    double tm = 0, ym = 0;
    std::vector<double> ts(hi - lo), ys(hi - lo);
    for (int j = lo; j < hi; ++j) {
        const double p = std::norm(traj.atom_amplitudes[atom][j]);
        if (p <= 0)
            throw physics_error("population underflow inside the fit window");
        ts[j - lo] = traj.t_grid[j];
        ys[j - lo] = std::log(p);
        tm += ts[j - lo];
        ym += ys[j - lo];
    }
    const int n = hi - lo;
    tm /= n;
    ym /= n;
    double stt = 0, sty = 0;
    for (int j = 0; j < n; ++j) {
        stt += (ts[j] - tm) * (ts[j] - tm);
        sty += (ts[j] - tm) * (ys[j] - ym);
    }
    LineFit f;
    f.slope = sty / stt;
    f.n = n;
    double ss = 0;
    for (int j = 0; j < n; ++j) {
        const double r = ys[j] - (ym + f.slope * (ts[j] - tm));
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

} // namespace

DecayFit fit_decay_rate(const Trajectory& traj, double t0, double t1,
                        int atom) {
    auto [lo, hi] = window_indices(traj, t0, t1);
    for (int j = lo; j < hi; ++j) {
        const double a = std::abs(traj.atom_amplitudes[atom][j]);
        if (a <= 1e-6)
            throw physics_error("|c_e| underflows 1e-6 inside the fit window");
        if (j > lo && !(a < std::abs(traj.atom_amplitudes[atom][j - 1])))
            throw physics_error(
                "|c_e| is not strictly decreasing on the fit window "
                "(non-Markovian regime)");
    }
    const LineFit f = fit_log_population(traj, t0, t1, atom);
    return DecayFit{-f.slope, f.rms, f.n};
}

double log_slope(const Trajectory& traj, double t0, double t1, int atom) {
    return fit_log_population(traj, t0, t1, atom).slope;
}

double steady_population(const Trajectory& traj, double tail_fraction,
                         int atom) {
    if (!(tail_fraction > 0) || !(tail_fraction <= 0.5))
        throw config_error("tail_fraction must lie in (0, 0.5]");
    if (atom < 0 || atom >= int(traj.atom_amplitudes.size()))
        throw config_error("atom index out of range");
    const int n = traj.n_samples();
    if (n < 16)
        throw config_error("trajectory too short for a tail average");

    auto tail_mean = [&](double frac) {
        const int start = std::min(n - 2, int(std::floor(n * (1 - frac))));
        double s = 0;
        for (int j = start; j < n; ++j)
            s += std::norm(traj.atom_amplitudes[atom][j]);
        return s / (n - start);
    };
    const double a1 = tail_mean(tail_fraction);
    const double a2 = tail_mean(std::min(0.5, 2 * tail_fraction));
    if (std::abs(a1 - a2) > 0.01 * std::max(a1, a2) + 1e-12)
        throw numerical_error(
            "tail average still drifting (" + std::to_string(a1) + " vs " +
            std::to_string(a2) + " when the window is doubled)");
    return a1;
}

namespace {

// |sum_j w_j s_j exp(-i w t_j)| with a Hann window, s already demeaned.
double windowed_dtft_mag(const std::vector<double>& s, double dt_rec,
                         double w) {
    const int m = int(s.size());
    double cr = 1, ci = 0;  // running exp(-i w t_j)
    const double pc = std::cos(w * dt_rec), ps = -std::sin(w * dt_rec);
    double accr = 0, acci = 0;
    for (int j = 0; j < m; ++j) {
        const double hann =
            0.5 * (1 - std::cos(2 * kPi * j / double(m - 1)));
        accr += hann * s[j] * cr;
        acci += hann * s[j] * ci;
        const double nr = cr * pc - ci * ps;
        ci = cr * ps + ci * pc;
        cr = nr;
    }
    return std::hypot(accr, acci);
}

} // namespace

double rabi_frequency(const Trajectory& traj, int atom) {
    if (atom < 0 || atom >= int(traj.atom_amplitudes.size()))
        throw config_error("atom index out of range");
    const int n_full = traj.n_samples();
    if (n_full < 64)
        throw config_error("trajectory too short for a spectral estimate");

    // Decimate to keep the coarse scan cheap; Rabi exchange is slow
    // against any sensible sampling rate.
    const int stride = std::max(1, n_full / 4096);
    std::vector<double> s;
    s.reserve(n_full / stride + 1);
    for (int j = 0; j < n_full; j += stride)
        s.push_back(std::norm(traj.atom_amplitudes[atom][j]));
    const int m = int(s.size());
    const double dt_rec = (traj.t_grid[stride] - traj.t_grid[0]);

    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    if (*mx - *mn <= 0.5)
        throw physics_error("population contrast " +
                            std::to_string(*mx - *mn) +
                            " too low for a Rabi readout (need > 0.5)");

    double mean = 0;
    for (double v : s) mean += v;
    mean /= m;
    for (double& v : s) v -= mean;

    // Coarse scan over 4x zero-padded bin spacing, skipping the window
    // main lobe around zero frequency.
    const int pad = 4;
    const int n_bins = pad * m / 2;
    const double dw = 2 * kPi / (pad * m * dt_rec);
    const int first = 3 * pad;  // Hann main lobe is ~2 unpadded bins
    int best = -1;
    double best_mag = 0, mag_sum = 0;
    int mag_cnt = 0;
    for (int b = first; b < n_bins; ++b) {
        const double mag = windowed_dtft_mag(s, dt_rec, b * dw);
        mag_sum += mag;
        ++mag_cnt;
        if (mag > best_mag) {
            best_mag = mag;
            best = b;
        }
    }
    if (best < 0 || best_mag < 5 * (mag_sum / mag_cnt))
        throw physics_error("no dominant spectral peak in |c_e|^2");

    // Golden-section refinement of the DTFT magnitude around the peak.
    double lo = (best - 1) * dw, hi = (best + 1) * dw;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = windowed_dtft_mag(s, dt_rec, a);
    double fb = windowed_dtft_mag(s, dt_rec, b);
    for (int it = 0; it < 80 && hi - lo > 1e-12 * hi; ++it) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = windowed_dtft_mag(s, dt_rec, b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = windowed_dtft_mag(s, dt_rec, a);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace lhsm::dyn
