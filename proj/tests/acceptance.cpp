// Acceptance gate for the giant-atom / left-handed-superlattice artifact.
// Each criterion prints intermediate clause lines and exactly one final
// [PASS]/[FAIL] line; the process exit code is the number of failed
// criteria. Run `acceptance <n>` for a single criterion, `acceptance`
// or `acceptance all` for the whole gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "lhsm/analytics.hpp"
#include "lhsm/bandstructure.hpp"
#include "lhsm/dynamics.hpp"
#include "lhsm/hamiltonian.hpp"
#include "lhsm/scenario.hpp"
#include "lhsm/table.hpp"

using namespace lhsm;
using band::Band;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

band::LatticeParams params() { return {}; }

struct Gate {
    bool all_ok = true;

    bool clause(bool ok, const char* fmt, ...) {
        std::va_list ap;
        va_start(ap, fmt);
        char buf[512];
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        std::printf("  %-4s %s\n", ok ? "ok" : "FAIL", buf);
        all_ok = all_ok && ok;
        return ok;
    }
};

struct Timer {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

void verdict(int n, const char* name, bool ok, double secs) {
    std::printf("[%s] criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", n,
                name, secs);
    std::fflush(stdout);
}

// ---- criterion 1: two independent routes to the same spectrum ---------

bool criterion_1() {
    Timer tm;
    Gate g;
    auto p = params();
    const int n_cells = 200;

    auto freqs = band::realspace_spectrum(p, n_cells);
    std::vector<double> expected;
    for (int m = 0; m < n_cells; ++m) {
        double k = 2.0 * kPi * m / n_cells;
        if (k > kPi)
            k -= 2.0 * kPi;
        expected.push_back(band::omega(k, Band::Lower, p));
        if (m != 0)
            expected.push_back(band::omega(k, Band::Upper, p));
    }
    std::sort(expected.begin(), expected.end());

    g.clause(freqs.size() == expected.size(),
             "mode count: ring gives %zu finite modes, dispersion gives %zu",
             freqs.size(), expected.size());
    double worst = 0;
    if (freqs.size() == expected.size())
        for (std::size_t j = 0; j < freqs.size(); ++j)
            worst = std::max(worst,
                             std::abs(freqs[j] - expected[j]) / expected[j]);
    g.clause(worst < 1e-10,
             "max relative deviation %.3e < 1e-10 across %zu modes", worst,
             freqs.size());
    double secs = tm.seconds();
    g.clause(secs < 5.0, "runtime %.2f s < 5 s", secs);
    verdict(1, "real-space ring matches the dispersion", g.all_ok, secs);
    return g.all_ok;
}

// ---- criterion 2: gap closure and growth -------------------------------

bool criterion_2() {
    Timer tm;
    Gate g;

    band::LatticeParams p;
    p.epsilon = 1.0;
    double closed = band::band_edges(p).gap_width;
    g.clause(std::abs(closed) < 1e-12,
             "gap at eps = 1 is %.3e (matched sub-cells, no Bragg gap)",
             closed);

    p.epsilon = 1.4;
    double gap = band::band_edges(p).gap_width;
    g.clause(std::abs(gap - 0.14286) < 1e-4,
             "gap at eps = 1.4 is %.6f (0.14286 +- 1e-4)", gap);

    bool increasing = true;
    double prev = -1;
    for (int j = 0; j < 20; ++j) {
        p.epsilon = 1.0 + j / 19.0;
        double w = band::band_edges(p).gap_width;
        if (j > 0 && w <= prev)
            increasing = false;
        prev = w;
    }
    g.clause(increasing,
             "gap grows strictly with eps over [1, 2] at 20 samples");
    double secs = tm.seconds();
    g.clause(secs < 1.0, "runtime %.2f s < 1 s", secs);
    verdict(2, "Bragg gap closure and growth", g.all_ok, secs);
    return g.all_ok;
}

// ---- criterion 3: interference pattern of the fitted decay rate --------

bool criterion_3() {
    Timer tm;
    Gate g;
    auto p = params();

    std::vector<run::DecayPoint> pts;
    std::printf("  d_s   gamma_fit      gamma_markov   window\n");
    for (int d = 0; d <= 12; ++d) {
        pts.push_back(run::measure_decay(p, 2000, 1e-4, d, kPi / 2,
                                         Band::Upper));
        const auto& q = pts.back();
        std::printf("  %2d    %.6e   %.6e   [%.0f, %.0f]%s\n", d,
                    q.gamma_num, q.gamma_analytic, q.window_t0, q.window_t1,
                    q.lenient ? "  (slope)" : "");
    }
    double peak = 0;
    for (const auto& q : pts)
        peak = std::max(peak, q.gamma_num);

    bool zeros_ok = true;
    for (int d : {2, 6, 10})
        zeros_ok = zeros_ok && pts[d].gamma_num <= 1e-2 * peak;
    g.clause(zeros_ok,
             "interference zeros at d_s = 2, 6, 10 stay below 1e-2 of the "
             "sweep peak %.3e",
             peak);

    bool agree = true;
    double worst = 0;
    for (const auto& q : pts)
        if (q.gamma_analytic > 0) {
            double rel = std::abs(q.gamma_num / q.gamma_analytic - 1.0);
            worst = std::max(worst, rel);
            agree = agree && rel <= 0.10;
        }
    g.clause(agree,
             "fitted rate within 10%% of the Fermi golden rule at nonzero "
             "points (worst %.1f%%)",
             100 * worst);

    bool periodic = true;
    for (int d = 0; d + 4 <= 12; ++d)
        periodic = periodic &&
                   std::abs(pts[d].gamma_num - pts[d + 4].gamma_num) <=
                       0.15 * peak;
    g.clause(periodic, "pattern repeats with period 4 in d_s");

    double secs = tm.seconds();
    g.clause(secs <= 600.0, "runtime %.0f s <= 600 s", secs);
    verdict(3, "giant-atom interference in the decay rate", g.all_ok, secs);
    return g.all_ok;
}

// ---- criterion 4: band asymmetry of the decay rate ---------------------

bool criterion_4() {
    Timer tm;
    Gate g;
    auto p = params();

    auto up = run::measure_decay(p, 2000, 1e-4, 0, kPi / 2, Band::Upper);
    auto lo = run::measure_decay(p, 2000, 1e-4, 0, kPi / 2, Band::Lower);
    std::printf("  upper band: gamma = %.6e (markov %.6e)\n", up.gamma_num,
                up.gamma_analytic);
    std::printf("  lower band: gamma = %.6e (markov %.6e)\n", lo.gamma_num,
                lo.gamma_analytic);

    const double h = 1e-6;
    auto fd = [&](Band b) {
        return (band::omega(kPi / 2 + h, b, p) -
                band::omega(kPi / 2 - h, b, p)) /
               (2 * h);
    };
    double expect = std::abs(fd(Band::Upper) / fd(Band::Lower));
    double ratio = lo.gamma_num / up.gamma_num;
    g.clause(std::abs(ratio / expect - 1.0) <= 0.20,
             "rate ratio %.2f within 20%% of the group-velocity ratio %.2f",
             ratio, expect);

    double secs = tm.seconds();
    g.clause(secs <= 900.0, "runtime %.0f s <= 900 s", secs);
    verdict(4, "slow lower band decays faster in proportion", g.all_ok,
            secs);
    return g.all_ok;
}

// ---- criterion 5: bound-state population, residue vs dynamics ----------

bool criterion_5() {
    Timer tm;
    Gate g;
    auto p = params();
    auto edges = band::band_edges(p);

    struct Curve {
        const char* name;
        run::EdgeSide side;
        double delta0;
        std::vector<run::GapPoint> pts;
    };
    std::vector<Curve> curves = {
        {"omega_1 (below the upper edge)", run::EdgeSide::UpperPi,
         0.2 * edges.gap_width, {}},
        {"omega_2 (above the lower edge)", run::EdgeSide::LowerPi,
         0.2 * edges.gap_width, {}},
        {"omega_3 (below the lower band)", run::EdgeSide::LowerZero,
         0.2 * edges.lower_width, {}},
    };

    bool five_pct = true;
    double worst = 0;
    for (auto& c : curves) {
        std::printf("  %s\n  d_s   residue-pop    steady-pop\n", c.name);
        for (int d = 1; d <= 10; ++d) {
            c.pts.push_back(run::measure_gap_population(p, 2000, 1e-4, d,
                                                        c.side, c.delta0));
            const auto& q = c.pts.back();
            double rel = std::abs(q.population_residue -
                                  q.population_dynamics) /
                         q.population_dynamics;
            worst = std::max(worst, rel);
            five_pct = five_pct && rel <= 0.05;
            std::printf("  %2d    %.6f       %.6f   (%.2f%%)\n", d,
                        q.population_residue, q.population_dynamics,
                        100 * rel);
        }
    }
    g.clause(five_pct,
             "residue population matches the evolved steady population "
             "within 5%% for every d_s (worst %.2f%%)",
             100 * worst);

    bool parity = true;
    for (int c = 0; c < 2; ++c) {  // the two gap edges
        const auto& pts = curves[c].pts;
        for (int d = 2; d <= 10; d += 2) {
            parity = parity && pts[d - 2].population_dynamics >
                                   pts[d - 1].population_dynamics;
            if (d < 10)
                parity = parity && pts[d].population_dynamics >
                                       pts[d - 1].population_dynamics;
        }
    }
    g.clause(parity,
             "odd d_s traps more population than adjacent even d_s near "
             "both gap edges");

    double secs = tm.seconds();
    g.clause(secs <= 1200.0, "runtime %.0f s <= 1200 s", secs);
    verdict(5, "atom-photon bound-state population two ways", g.all_ok,
            secs);
    return g.all_ok;
}

// ---- criterion 6: population vs detuning on both gap edges -------------

bool criterion_6() {
    Timer tm;
    Gate g;
    auto p = params();
    auto edges = band::band_edges(p);

    std::vector<double> fracs;
    for (int j = 1; j <= 10; ++j)
        fracs.push_back(0.05 * j);

    std::vector<run::GapPoint> up, lo;
    std::printf(
        "  delta0/gap   res_up     dyn_up     res_low    dyn_low\n");
    for (double f : fracs) {
        up.push_back(run::measure_gap_population(
            p, 2000, 1e-4, 4, run::EdgeSide::UpperPi, f * edges.gap_width));
        lo.push_back(run::measure_gap_population(
            p, 2000, 1e-4, 4, run::EdgeSide::LowerPi, f * edges.gap_width));
        std::printf("  %.2f         %.6f   %.6f   %.6f   %.6f\n", f,
                    up.back().population_residue,
                    up.back().population_dynamics,
                    lo.back().population_residue,
                    lo.back().population_dynamics);
    }

    bool dec_up = true, dec_lo = true;
    for (std::size_t j = 1; j < fracs.size(); ++j) {
        dec_up = dec_up &&
                 up[j].population_residue < up[j - 1].population_residue;
        dec_lo = dec_lo &&
                 lo[j].population_residue < lo[j - 1].population_residue;
    }
    g.clause(dec_up && dec_lo,
             "population decays monotonically with detuning "
             "(measured: upper %.4f -> %.4f, lower %.4f -> %.4f; deeper "
             "detuning decouples the atom from the band and *raises* the "
             "trapped population)",
             up.front().population_residue, up.back().population_residue,
             lo.front().population_residue, lo.back().population_residue);

    bool above = true;
    for (std::size_t j = 0; j < fracs.size(); ++j) {
        above = above &&
                up[j].population_residue > lo[j].population_residue;
        // at delta0 = gap/2 the two placements give the same omega_q and
        // the dynamics coincide by construction; strictness is tested
        // where the frequencies actually differ
        if (std::abs(fracs[j] - 0.5) > 1e-12)
            above = above &&
                    up[j].population_dynamics > lo[j].population_dynamics;
    }
    g.clause(above,
             "upper-edge population stays strictly above the lower-edge "
             "population at equal detuning");

    double secs = tm.seconds();
    g.clause(secs <= 1200.0, "runtime %.0f s <= 1200 s", secs);
    verdict(6, "harder band edge binds more population", g.all_ok, secs);
    return g.all_ok;
}

// ---- criterion 7: two-atom exchange through the gap --------------------

bool criterion_7() {
    Timer tm;
    Gate g;
    auto p = params();
    auto edges = band::band_edges(p);
    const double mid =
        0.5 * (edges.omega_upper_pi + edges.omega_lower_pi);
    const double half = 0.5 * edges.gap_width;
    const int d_s = 3, D_q = 6;
    const double gq = 1e-4;

    ham::GiantAtom atom{mid, d_s, gq, 0};
    ham::AtomPair pair{atom, atom, D_q};
    auto ctx_up = run::edge_context(p, run::EdgeSide::UpperPi, half, d_s,
                                    gq, 2000);
    auto ctx_lo = run::edge_context(p, run::EdgeSide::LowerPi, half, d_s,
                                    gq, 2000);
    double j_up = an::dipole_coupling(pair, ctx_up, an::Method::ClosedForm);
    double j_lo = an::dipole_coupling(pair, ctx_lo, an::Method::ClosedForm);
    auto grid = ham::mode_grid(2000, p);
    double j_exact = an::exact_coupling_sum(pair, grid);
    std::printf("  J12: upper edge %.4e, lower edge %.4e, total %.4e, "
                "grid sum %.4e\n",
                j_up, j_lo, j_up + j_lo, j_exact);

    // evolve to the wraparound horizon of the slowest in-gap speed
    double v_slow = std::min(
        2 * std::sqrt(ctx_up.edge.alpha * half),
        2 * std::sqrt(ctx_lo.edge.alpha * half));
    double horizon = run::revival_horizon(2000, v_slow);
    auto h = ham::build_hamiltonian(pair, grid, ham::Frame::Rotating);
    dyn::EvolveConfig cfg;
    cfg.t_max = horizon;
    cfg.frame = ham::Frame::Rotating;
    auto traj = dyn::evolve(h, dyn::AtomExcited{0}, cfg);

    double hi = 0, lo_pop = 1;
    for (const auto& c : traj.atom_amplitudes[1]) {
        hi = std::max(hi, std::norm(c));
        lo_pop = std::min(lo_pop, std::norm(c));
    }
    double contrast = hi - lo_pop;
    g.clause(contrast > 0.9,
             "exchange contrast %.2e over t <= %.0f (the edge "
             "contributions %.3e and %.3e nearly cancel, so |J12*t| "
             "reaches only %.3f before wraparound)",
             contrast, horizon, j_up, j_lo,
             std::abs(j_up + j_lo) * horizon);

    bool rabi_ok = false;
    try {
        double w = dyn::rabi_frequency(traj, 1);
        double target = 2 * std::abs(j_up + j_lo);
        rabi_ok = std::abs(w / target - 1.0) <= 0.15;
        g.clause(rabi_ok, "beat frequency %.3e vs 2|J12| = %.3e", w,
                 target);
    } catch (const physics_error& e) {
        g.clause(false, "beat readout unavailable: %s", e.what());
    }

    // envelope slope: single-edge quadrature against the bound-state beta
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    bool alternates = true;
    double prev = 0;
    for (int D = 4; D <= 14; ++D) {
        double j = an::dipole_coupling(ham::AtomPair{atom, atom, D}, ctx_up,
                                       an::Method::Quadrature);
        if (D > 4)
            alternates = alternates && j * prev < 0;
        prev = j;
        double x = D, y = std::log(std::abs(j));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double beta = ctx_up.beta();
    g.clause(std::abs(-slope / beta - 1.0) <= 0.10,
             "ln|J12| slope %.4f vs -beta = %.4f over D_q = 4..14 "
             "(%.1f%% off)",
             slope, -beta, 100 * std::abs(-slope / beta - 1.0));
    g.clause(alternates, "J12 sign alternates with D_q parity");

    double secs = tm.seconds();
    g.clause(secs <= 1200.0, "runtime %.0f s <= 1200 s", secs);
    verdict(7, "bound-state-mediated exchange between two atoms", g.all_ok,
            secs);
    return g.all_ok;
}

// ---- criterion 8: property bundle --------------------------------------

bool criterion_8() {
    Timer tm;
    Gate g;
    auto p = params();

    {  // unitarity and integrator order
        auto grid = ham::mode_grid(100, p);
        ham::GiantAtom atom{0.6, 2, 1e-3, 0};
        auto h = ham::build_hamiltonian(atom, grid, ham::Frame::Rotating);
        auto final_amp = [&](double dt) {
            dyn::EvolveConfig cfg;
            cfg.dt = dt;
            cfg.t_max = 200;
            auto traj = dyn::evolve(h, dyn::AtomExcited{0}, cfg);
            double drift = 0;
            for (double nrm : traj.norm_series)
                drift = std::max(drift, std::abs(nrm - 1.0));
            return std::make_pair(traj.atom_amplitudes[0].back(), drift);
        };
        auto [ref, drift_ref] = final_amp(0.00125);
        auto [a1, d1] = final_amp(0.01);
        auto [a2, d2] = final_amp(0.005);
        double worst_drift = std::max({drift_ref, d1, d2});
        g.clause(worst_drift < 1e-6, "norm drift %.2e < 1e-6", worst_drift);
        double ratio = std::abs(a1 - ref) / std::abs(a2 - ref);
        g.clause(ratio > 8.0 && ratio < 40.0,
                 "halving dt shrinks the error %.1fx (4th order)", ratio);
    }

    {  // hermiticity, exactly
        auto grid = ham::mode_grid(32, p);
        ham::GiantAtom atom{0.6, 3, 1e-3, 0};
        auto h = ham::build_hamiltonian(ham::AtomPair{atom, atom, 5}, grid,
                                        ham::Frame::Lab);
        auto dense = h.dense();
        double dev = (dense - dense.adjoint()).cwiseAbs().maxCoeff();
        g.clause(dev == 0.0, "arrowhead is Hermitian to the last bit");
    }

    {  // frame invariance
        auto grid = ham::mode_grid(200, p);
        ham::GiantAtom atom{0.62, 3, 1e-4, 0};
        auto run_frame = [&](ham::Frame f) {
            auto h = ham::build_hamiltonian(atom, grid, f);
            dyn::EvolveConfig cfg;
            cfg.dt = 0.005;
            cfg.t_max = 500;
            cfg.frame = f;
            return dyn::evolve(h, dyn::AtomExcited{0}, cfg);
        };
        auto lab = run_frame(ham::Frame::Lab);
        auto rot = run_frame(ham::Frame::Rotating);
        double worst = 0;
        for (int j = 0; j < lab.n_samples(); ++j)
            worst = std::max(worst,
                             std::abs(std::norm(lab.atom_amplitudes[0][j]) -
                                      std::norm(rot.atom_amplitudes[0][j])));
        g.clause(worst < 1e-8, "lab vs rotating populations differ by %.1e",
                 worst);
    }

    {  // group velocity against finite differences
        double worst = 0;
        const double h = 1e-6;
        for (int j = 0; j < 200; ++j) {
            double k = 0.05 + (kPi - 0.10) * j / 199.0;
            for (Band b : {Band::Upper, Band::Lower}) {
                double fd =
                    (band::omega(k + h, b, p) - band::omega(k - h, b, p)) /
                    (2 * h);
                double an_v = band::group_velocity(k, b, p);
                worst = std::max(worst, std::abs(fd - an_v) /
                                            std::max(1.0, std::abs(an_v)));
            }
        }
        g.clause(worst < 1e-6, "group velocity vs finite differences %.1e",
                 worst);
    }

    {  // self-energy: quadrature vs closed form at the pole
        auto edges = band::band_edges(p);
        double worst = 0;
        for (double frac : {0.1, 0.2, 0.4})
            for (int d_s : {2, 4, 8, 14}) {
                auto ctx = run::edge_context(p, run::EdgeSide::UpperPi,
                                             frac * edges.gap_width, d_s,
                                             1e-4, 2000);
                auto bs = an::bound_state_pole(ctx);
                auto cf = an::self_energy(bs.pole_s0, ctx,
                                          an::Method::ClosedForm);
                auto qd = an::self_energy(bs.pole_s0, ctx,
                                          an::Method::Quadrature);
                worst = std::max(worst, std::abs(qd - cf) / std::abs(cf));
            }
        g.clause(worst < 0.02,
                 "self-energy quadrature vs closed form within %.2f%%",
                 100 * worst);

        auto ctx = run::edge_context(p, run::EdgeSide::UpperPi,
                                     0.2 * edges.gap_width, 4, 1e-4, 2000);
        auto bs = an::bound_state_pole(ctx);
        double residual = std::abs(
            bs.pole_s0 +
            an::self_energy(bs.pole_s0, ctx, an::Method::ClosedForm));
        g.clause(residual < 1e-12, "pole residual %.1e < 1e-12", residual);
    }

    {  // harness determinism
        run::ScenarioConfig cfg;
        cfg.scenario = run::Scenario::TwoAtomDistanceSweep;
        cfg.d_s = 3;
        cfg.seedless = true;
        cfg.workers = 1;
        auto a = run::run_scenario(cfg);
        auto b = run::run_scenario(cfg);
        bool same = a.manifest == b.manifest && a.tables == b.tables &&
                    a.plots == b.plots;
        g.clause(same, "reruns are byte-identical");

        cfg.workers = 4;
        auto c = run::run_scenario(cfg);
        g.clause(c.tables[0].second.substr(c.tables[0].second.find('\n')) ==
                     a.tables[0].second.substr(
                         a.tables[0].second.find('\n')),
                 "serial and 4-worker sweeps agree byte for byte");
    }

    double secs = tm.seconds();
    g.clause(secs < 120.0, "runtime %.0f s < 120 s", secs);
    verdict(8, "property bundle", g.all_ok, secs);
    return g.all_ok;
}

} // namespace

int main(int argc, char** argv) {
    int which = 0;  // 0 = run the whole gate
    if (argc > 1 && std::strcmp(argv[1], "all") != 0) {
        which = std::atoi(argv[1]);
        if (which < 1 || which > 8) {
            std::fprintf(stderr, "usage: %s [1-8|all]\n", argv[0]);
            return 2;
        }
    }

    using Fn = bool (*)();
    const Fn criteria[] = {criterion_1, criterion_2, criterion_3,
                           criterion_4, criterion_5, criterion_6,
                           criterion_7, criterion_8};
    int fails = 0;
    for (int n = 1; n <= 8; ++n) {
        if (which != 0 && which != n)
            continue;
        try {
            if (!criteria[n - 1]())
                ++fails;
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion %d: unhandled error: %s\n", n,
                        e.what());
            ++fails;
        }
    }
    return fails;
}
