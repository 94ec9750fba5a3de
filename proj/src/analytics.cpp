#include "lhsm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lhsm::an {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using gk = boost::math::quadrature::gauss_kronrod<double, 61>;

double integrate_checked(const std::function<double(double)>& f, double lo,
                         double hi, const char* label) {
    double err = 0;
    double val = gk::integrate(f, lo, hi, 12, 1e-11, &err);
    if (!std::isfinite(val) || err > 1e-6 * std::max(1.0, std::abs(val)))
        throw numerical_error(std::string(label) +
                              " quadrature failed to converge (error " +
                              std::to_string(err) + ")");
    return val;
}

} // namespace

double SelfEnergyContext::beta() const {
    return std::sqrt(detuning_Delta0 / edge.alpha);
}

void SelfEnergyContext::validate() const {
    atom.validate();
    if (!(edge.alpha > 0))
        throw config_error("edge curvature alpha must be positive");
    if (edge.k0 != 0.0 && std::abs(edge.k0 - kPi) > 1e-12)
        throw config_error("edge k0 must be 0 or pi");
    if (!(detuning_Delta0 > 0))
        throw config_error("detuning Delta0 must be positive for gap physics");
    if (n_modes_N < 2)
        throw config_error("mode count N must be >= 2");
}

SelfEnergyContext make_context(const band::LatticeParams& params,
                               band::Band which_band, double k0,
                               const ham::GiantAtom& atom, int n_modes) {
    SelfEnergyContext ctx;
    ctx.edge = band::quadratic_band_edge(which_band, k0, params);
    ctx.atom = atom;
    ctx.n_modes_N = n_modes;
    ctx.detuning_Delta0 = std::abs(atom.omega_q - ctx.edge.edge_freq);
    const bool band_above =
        ctx.edge.orientation == band::EdgeOrientation::Minimum;
    if (band_above && !(atom.omega_q < ctx.edge.edge_freq))
        throw config_error(
            "omega_q must lie below a rising band edge for gap physics");
    if (!band_above && !(atom.omega_q > ctx.edge.edge_freq))
        throw config_error(
            "omega_q must lie above a falling band edge for gap physics");
    ctx.validate();
    return ctx;
}

double markov_decay_rate(const band::LatticeParams& params,
                         const ham::GiantAtom& atom, double k_r,
                         band::Band which_band, int n_modes) {
    atom.validate();
    if (n_modes < 2)
        throw config_error("mode count N must be >= 2");
    const double ka = std::abs(k_r);
    if (ka < 0.1 || ka > kPi - 0.1)
        throw physics_error(
            "k_r is closer than 0.1 to a band edge; the Markov decay "
            "formula has no validity window there");
    const double vg = band::group_velocity(k_r, which_band, params);
    const double interference = 1.0 + std::cos(k_r * atom.d_s);
    return std::max(0.0, 4.0 * n_modes * atom.g * atom.g * interference /
                             std::abs(vg));
}

namespace {

// Form factor |1 + e^{i k d_s}|^2 / 2 = 1 + cos(k d_s) evaluated at
// k = k0 + dk.
double form_factor(const SelfEnergyContext& ctx, double dk) {
    return 1.0 + std::cos((ctx.edge.k0 + dk) * ctx.atom.d_s);
}

// The closed forms integrate the quadratic-edge model over the whole dk
// line (the Lorentzian-like integrand is what makes that extension
// legitimate). The numerical route therefore uses a window of 200
// half-widths sqrt(y/alpha): the truncated tail is 2/(200 pi) < 0.4%,
// small against the 2% cross-check budget, while the cos(d*dk)
// oscillation count stays tractable for the adaptive rule.
double quad_window(double y, double alpha) {
    return std::max(2.0 * kPi, 200.0 * std::sqrt(y / alpha));
}

std::complex<double> self_energy_quadrature(std::complex<double> s,
                                            const SelfEnergyContext& ctx) {
    const double sigma = ctx.sigma();
    const double d0 = ctx.detuning_Delta0;
    const double alpha = ctx.edge.alpha;
    const double u = sigma * (-s.imag());
    if (std::abs(s.real()) < 1e-14 && u >= d0 * (1 - 1e-12))
        throw physics_error(
            "self-energy pole on the integration contour (s touches "
            "the band continuum)");
    const double a = s.real(), b = s.imag();
    auto denom_re = [&](double dk) {
        const double det = sigma * (d0 + alpha * dk * dk);
        const double mag = a * a + (b + det) * (b + det);
        return form_factor(ctx, dk) * a / mag;
    };
    auto denom_im = [&](double dk) {
        const double det = sigma * (d0 + alpha * dk * dk);
        const double mag = a * a + (b + det) * (b + det);
        return form_factor(ctx, dk) * (-(b + det)) / mag;
    };
    const double w = quad_window(d0 + std::max(0.0, -u), alpha);
    const double pref = ctx.n_modes_N * ctx.atom.g * ctx.atom.g / kPi;
    const double re = integrate_checked(denom_re, -w, w, "self-energy");
    const double im = integrate_checked(denom_im, -w, w, "self-energy");
    return pref * std::complex<double>(re, im);
}

std::complex<double> self_energy_closed(std::complex<double> s,
                                        const SelfEnergyContext& ctx) {
    if (std::abs(s.real()) > 1e-12 * (1 + std::abs(s)))
        throw config_error(
            "closed-form self-energy is defined on the imaginary axis only");
    const double sigma = ctx.sigma();
    const double x = -s.imag();  // s = -i x
    const double u = sigma * x;
    const double y = ctx.detuning_Delta0 - u;
    if (y <= 0)
        throw physics_error(
            "branch violation: Delta0 - u <= 0 in the closed-form "
            "self-energy");
    const double alpha = ctx.edge.alpha;
    const double decay = std::exp(-ctx.atom.d_s * std::sqrt(y / alpha));
    const double bracket =
        1.0 + std::cos(ctx.atom.d_s * ctx.edge.k0) * decay;
    const double f = ctx.n_modes_N * ctx.atom.g * ctx.atom.g * bracket /
                     std::sqrt(alpha * y);
    return std::complex<double>(0, -sigma * f);
}

// F(u) with Sigma(-i sigma u) = -i sigma F(u); positive for u < Delta0.
double axis_f(const SelfEnergyContext& ctx, double u, Method method) {
    const std::complex<double> s(0, -ctx.sigma() * u);
    const std::complex<double> sig = (method == Method::Quadrature)
                                         ? self_energy_quadrature(s, ctx)
                                         : self_energy_closed(s, ctx);
    return -ctx.sigma() * sig.imag();
}

} // namespace

std::complex<double> self_energy(std::complex<double> s,
                                 const SelfEnergyContext& ctx, Method method) {
    ctx.validate();
    if (ctx.atom.g == 0)
        return {0, 0};
    return method == Method::Quadrature ? self_energy_quadrature(s, ctx)
                                        : self_energy_closed(s, ctx);
}

namespace {

// 1/(1 + dSigma/ds) at s = -i x0, derivative by Richardson-extrapolated
// central differences along the imaginary axis.
std::complex<double> residue_at(const SelfEnergyContext& ctx, double x0,
                                Method method) {
    const double delta = 1e-6 * ctx.detuning_Delta0;
    if (!(delta > 0) || delta < 1e-12 * std::abs(x0))
        throw numerical_error("residue derivative step underflows");
    auto fd = [&](double step) {
        const std::complex<double> sp(0, -(x0 + step));
        const std::complex<double> sm(0, -(x0 - step));
        return std::complex<double>(0, 1) *
               (self_energy(sp, ctx, method) - self_energy(sm, ctx, method)) /
               (2 * step);
    };
    const std::complex<double> dsig = (4.0 * fd(delta / 2) - fd(delta)) / 3.0;
    const std::complex<double> denom = 1.0 + dsig;
    if (std::abs(denom) < 1e-6)
        throw numerical_error("degenerate residue: |1 + dSigma/ds| ~ 0");
    return 1.0 / denom;
}

} // namespace

BoundStateResult bound_state_pole(const SelfEnergyContext& ctx,
                                  Method method) {
    ctx.validate();
    BoundStateResult out;
    out.bound_length = 1.0 / ctx.beta();
    if (ctx.atom.g == 0) {
        out.pole_s0 = {0, 0};
        out.residue = {1, 0};
        out.steady_population = 1.0;
        return out;
    }

    // The dressed level is repelled by the band: u = sigma*x stays
    // negative, so h(u) = u + F(u) moves from h(0^-) = F(0) > 0 down to
    // -inf as u -> -inf (F decays like |u|^{-1/2}).
    auto h = [&](double u) { return u + axis_f(ctx, u, method); };
    const double scale =
        2.0 * ctx.n_modes_N * ctx.atom.g * ctx.atom.g /
        std::sqrt(ctx.edge.alpha * ctx.detuning_Delta0);
    double lo = -std::max(4.0 * scale, 1e-12);
    double hi = 0.0;  // h(0) = F(0) > 0
    int guard = 0;
    while (h(lo) > 0) {
        lo *= 2;
        if (++guard > 60)
            throw physics_error(
                "no sign change bracketing the bound-state pole");
    }

    // The pole equation is monotone here, but scan the bracket anyway
    // and keep the sign change closest to u = 0 if several show up.
    const int n_scan = 64;
    double seg_lo = lo, seg_hi = hi;
    double prev_u = hi, prev_h = h(hi);
    for (int i = 1; i <= n_scan; ++i) {
        const double u = hi + (lo - hi) * (double(i) / n_scan);
        const double hu = h(u);
        if (prev_h > 0 && hu <= 0) {
            seg_lo = u;
            seg_hi = prev_u;
            break;
        }
        prev_u = u;
        prev_h = hu;
    }

    for (int it = 0; it < 200 && seg_hi - seg_lo >
                                      1e-18 * std::max(1.0, std::abs(seg_lo));
         ++it) {
        const double mid = 0.5 * (seg_lo + seg_hi);
        if (h(mid) > 0)
            seg_hi = mid;
        else
            seg_lo = mid;
    }
    const double u0 = 0.5 * (seg_lo + seg_hi);
    const double x0 = ctx.sigma() * u0;
    out.pole_s0 = std::complex<double>(0, -x0);

    const std::complex<double> resid =
        out.pole_s0 + self_energy(out.pole_s0, ctx, method);
    if (std::abs(resid) > 1e-12)
        throw numerical_error("bound-state pole residual " +
                              std::to_string(std::abs(resid)) +
                              " exceeds 1e-12");

    out.residue = residue_at(ctx, x0, method);
    out.steady_population = std::min(std::norm(out.residue), 1.0);
    return out;
}

double residue_population(const SelfEnergyContext& ctx,
                          std::complex<double> pole_s0, Method method) {
    ctx.validate();
    if (ctx.atom.g == 0)
        return 1.0;
    const double pop = std::norm(residue_at(ctx, -pole_s0.imag(), method));
    if (pop > 1 + 1e-9)
        throw numerical_error("residue population exceeds 1");
    return std::min(pop, 1.0);
}

double dipole_coupling(const ham::AtomPair& pair,
                       const SelfEnergyContext& ctx, Method method) {
    pair.validate();
    ctx.validate();
    const double sigma = ctx.sigma();
    const double d0 = ctx.detuning_Delta0;
    const double alpha = ctx.edge.alpha;
    const double k0 = ctx.edge.k0;
    const int d = pair.atom_a.d_s;
    const int D = pair.D_q;
    const double ng2 = double(ctx.n_modes_N) * pair.atom_a.g * pair.atom_a.g;

    if (method == Method::Quadrature) {
        auto f = [&](double dk) {
            const double k = k0 + dk;
            return std::cos(k * D) * (1.0 + std::cos(k * d)) /
                   (-sigma * (d0 + alpha * dk * dk));
        };
        const double w = quad_window(d0, alpha);
        return ng2 / kPi * integrate_checked(f, -w, w, "dipole coupling");
    }

    const double beta = ctx.beta();
    auto term = [&](double m) {
        return std::cos(k0 * m) * std::exp(-std::abs(m) * beta);
    };
    const double sum = term(D) + 0.5 * term(D + d) + 0.5 * term(D - d);
    return -sigma * ng2 / (alpha * beta) * sum;
}

double exact_coupling_sum(const ham::AtomPair& pair,
                          const ham::ModeGrid& grid) {
    pair.validate();
    const double g2 = pair.atom_a.g * pair.atom_a.g;
    const double wq = pair.atom_a.omega_q;
    double j = 0;
    for (int i = 0; i < grid.n_modes; ++i) {
        const double k = grid.k_values[i];
        const double ff =
            2.0 * g2 * (1.0 + std::cos(k * pair.atom_a.d_s)) *
            std::cos(k * pair.D_q);
        j += ff / (wq - grid.frequencies_upper[i]);
        j += ff / (wq - grid.frequencies_lower[i]);
    }
    return j;
}

} // namespace lhsm::an
