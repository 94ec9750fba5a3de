#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>

#include "lhsm/hamiltonian.hpp"

using namespace lhsm;
using band::Band;
using std::complex;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

band::LatticeParams params() { return {}; }

} // namespace

TEST_CASE("mode grid covers (-pi, pi] with k = 0 and pi on even grids") {
    auto grid = ham::mode_grid(4, params());
    REQUIRE(grid.n_modes == 4);
    CHECK(grid.k_values[0] == doctest::Approx(-kPi / 2).epsilon(1e-15));
    CHECK(grid.k_values[1] == 0.0);  // exact, not approximate
    CHECK(grid.k_values[2] == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(grid.k_values[3] == doctest::Approx(kPi).epsilon(1e-15));
    for (int j = 1; j < 4; ++j)
        CHECK(grid.k_values[j] - grid.k_values[j - 1] ==
              doctest::Approx(2 * kPi / 4).epsilon(1e-14));

    CHECK_THROWS_AS((void)ham::mode_grid(5, params()), config_error);
    CHECK_THROWS_AS((void)ham::mode_grid(0, params()), config_error);
}

TEST_CASE("upper band clamp keeps the diagonal bounded") {
    auto grid = ham::mode_grid(2000, params());
    double max_u = 0, max_l = 0;
    int clamped = 0;
    for (int j = 0; j < 2000; ++j) {
        max_u = std::max(max_u, grid.frequencies_upper[j]);
        max_l = std::max(max_l, grid.frequencies_lower[j]);
        if (grid.frequencies_upper[j] == grid.upper_cutoff)
            ++clamped;
    }
    CHECK(max_u == 10.0);   // the k = 0 entry and its neighbors hit the cap
    CHECK(clamped >= 3);
    CHECK(clamped < 200);   // but most of the band is genuine
    CHECK(max_l == doctest::Approx(0.53043926951259705).epsilon(1e-13));

    auto tight = ham::mode_grid(2000, params(), 5.0);
    double m = 0;
    for (double w : tight.frequencies_upper)
        m = std::max(m, w);
    CHECK(m == 5.0);

    // away from the cap the grid frequencies are the dispersion exactly
    auto small = ham::mode_grid(8, params());
    for (int j = 0; j < 8; ++j) {
        if (small.k_values[j] != 0.0)
            CHECK(small.frequencies_upper[j] ==
                  std::min(band::omega(small.k_values[j], Band::Upper,
                                       params()),
                           small.upper_cutoff));
        CHECK(small.frequencies_lower[j] ==
              band::omega(small.k_values[j], Band::Lower, params()));
    }
}

TEST_CASE("coupling amplitudes carry the two-point interference factor") {
    auto grid = ham::mode_grid(8, params());
    const double g = 1e-4;

    ham::GiantAtom atom{0.6, 3, g, 0};
    auto amps = ham::coupling_amplitudes(atom, grid);
    REQUIRE(int(amps.size()) == 16);

    for (int j = 0; j < 8; ++j) {
        // both band blocks see the same form factor at the same k
        CHECK(amps[j] == amps[j + 8]);
        double k = grid.k_values[j];
        CHECK(std::abs(amps[j]) ==
              doctest::Approx(2 * g * std::abs(std::cos(k * 3 / 2.0)))
                  .epsilon(1e-12));
    }

    // k = pi/2, d_s = 3: 1 + e^{i 3 pi/2} = 1 - i
    int jq = 5;  // k_values[5] = pi/2 on the 8-point grid
    REQUIRE(grid.k_values[jq] == doctest::Approx(kPi / 2));
    CHECK(amps[jq].real() == doctest::Approx(g).epsilon(1e-12));
    CHECK(amps[jq].imag() == doctest::Approx(-g).epsilon(1e-12));

    // second atom of a pair: same factor times e^{i k D_q}; D_q = 6 at
    // k = pi/2 gives e^{3 i pi} = -1
    auto shifted = ham::coupling_amplitudes(atom, grid, 6);
    CHECK(shifted[jq].real() == doctest::Approx(-g).epsilon(1e-12));
    CHECK(shifted[jq].imag() == doctest::Approx(g).epsilon(1e-12));

    ham::GiantAtom point{0.6, 0, g, 0};
    for (const auto& a : ham::coupling_amplitudes(point, grid))
        CHECK(std::abs(a) == doctest::Approx(2 * g).epsilon(1e-12));
}

TEST_CASE("arrowhead matches its dense realization and is exactly hermitian") {
    auto grid = ham::mode_grid(16, params());
    ham::GiantAtom atom{0.6, 2, 1e-3, 0};

    for (auto frame : {ham::Frame::Lab, ham::Frame::Rotating}) {
        auto h = ham::build_hamiltonian(atom, grid, frame);
        CHECK(h.dimension() == 33);
        CHECK(h.structural_nonzeros() == 2 * 16 + 2 * (2 * 16) + 1);

        auto dense = h.dense();
        CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() == 0.0);

        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(-1, 1);
        Eigen::VectorXcd x(h.dimension());
        for (int i = 0; i < h.dimension(); ++i)
            x(i) = complex<double>(u(rng), u(rng));
        Eigen::VectorXcd want = dense * x;
        std::vector<complex<double>> got(h.dimension());
        h.apply(x.data(), got.data());
        for (int i = 0; i < h.dimension(); ++i)
            CHECK(std::abs(got[i] - want(i)) < 1e-13);
    }
}

TEST_CASE("rotating frame moves omega_q onto the mode diagonal") {
    auto grid = ham::mode_grid(16, params());
    ham::GiantAtom atom{0.6, 2, 1e-3, 0};

    auto lab = ham::build_hamiltonian(atom, grid, ham::Frame::Lab);
    auto rot = ham::build_hamiltonian(atom, grid, ham::Frame::Rotating);

    CHECK(lab.atom_diagonal[0] == 0.6);
    CHECK(rot.atom_diagonal[0] == 0.0);
    CHECK(rot.omega_ref == 0.6);
    for (int i = 0; i < 32; ++i)
        CHECK(rot.mode_diagonal[i] ==
              doctest::Approx(lab.mode_diagonal[i] - 0.6).epsilon(1e-15));
    // the border is frame-independent
    for (int i = 0; i < 32; ++i)
        CHECK(rot.border[0][i] == lab.border[0][i]);

    CHECK(lab.max_abs_diagonal() == 10.0);  // the clamped upper entries
}

TEST_CASE("atom pair builds a two-column arrowhead with the D_q phase") {
    auto grid = ham::mode_grid(16, params());
    ham::GiantAtom atom{0.6, 2, 1e-3, 0};
    ham::AtomPair pair{atom, atom, 5};

    auto h = ham::build_hamiltonian(pair, grid, ham::Frame::Rotating);
    CHECK(h.dimension() == 34);
    CHECK(h.n_atoms == 2);
    CHECK(h.structural_nonzeros() == 2 * 16 + 2 * (2 * 2 * 16) + 2);

    auto dense = h.dense();
    CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    // atoms talk only through the field
    CHECK(std::abs(dense(32, 33)) == 0.0);

    for (int i = 0; i < 32; ++i) {
        int j = i % 16;
        auto phase = std::polar(1.0, grid.k_values[j] * 5);
        CHECK(std::abs(h.border[1][i] - h.border[0][i] * phase) < 1e-15);
    }
}

TEST_CASE("input validation") {
    ham::GiantAtom bad{0.6, -1, 1e-4, 0};
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = {0.6, 2, -1e-4, 0};
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = {0.0, 2, 1e-4, 0};
    CHECK_THROWS_AS(bad.validate(), config_error);

    ham::GiantAtom ok{0.6, 2, 1e-4, 0};
    ham::AtomPair pair{ok, ok, 0};
    CHECK_THROWS_AS(pair.validate(), config_error);
    ham::GiantAtom other{0.7, 2, 1e-4, 0};
    pair = {ok, other, 5};
    CHECK_THROWS_AS(pair.validate(), config_error);
}
