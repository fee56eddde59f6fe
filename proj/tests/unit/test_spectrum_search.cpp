#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "doa/baselines.hpp"
#include "doa/spectrum_search.hpp"
#include "oracles.hpp"

using namespace doa;

namespace {

SpectrumResult synthetic(const ScanGrid& grid, double (*shape)(double)) {
    SpectrumResult s;
    s.resize(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        s.angles[n] = grid[n];
        s.power[n]  = shape(grid[n]);
        s.valid[n]  = true;
    }
    return s;
}

} // namespace

TEST_SUITE("spectrum_search") {

TEST_CASE("scan grid excludes the endpoints") {
    const ScanGrid g(0.5);
    CHECK(g.size() == 359);
    CHECK(g[0] == 0.5);
    CHECK(g[358] == 179.5);
    CHECK_THROWS_AS(ScanGrid(0.7), std::invalid_argument);
    CHECK_THROWS_AS(ScanGrid(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ScanGrid(180.0), std::invalid_argument);
}

TEST_CASE("two synthetic bumps") {
    const ScanGrid       grid(0.5);
    const SpectrumResult s = synthetic(grid, [](double t) {
        return std::exp(-std::pow(t - 88.0, 2)) + 0.8 * std::exp(-std::pow(t - 91.0, 2)) + 1e-3;
    });
    const std::vector<double> peaks = find_peaks(s, 2);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0] == 88.0);
    CHECK(peaks[1] == 91.0);
    CHECK(find_peaks(s, 1) == std::vector<double>{88.0});
}

TEST_CASE("monotone spectrum has no peak") {
    const ScanGrid       grid(1.0);
    const SpectrumResult s = synthetic(grid, [](double t) { return t; });
    CHECK(find_peaks(s, 2).empty());
    CHECK_THROWS_AS(find_peaks(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(find_peaks(s, 1000), std::invalid_argument);
}

TEST_CASE("invalid neighbours disqualify a peak") {
    const ScanGrid grid(1.0);
    SpectrumResult s = synthetic(grid, [](double t) { return std::exp(-std::pow(t - 50.0, 2)); });
    s.valid[50]      = false; // 51 degrees
    CHECK(find_peaks(s, 1).empty());
}

TEST_CASE("noiseless two-source spectrum peaks at the truths") {
    SourceScenario sc;
    sc.doas          = {60.0, 75.0};
    sc.noise_power   = 1e-6;
    sc.num_snapshots = 30;
    Rng                  rng(13);
    const SnapshotMatrix data = generate_snapshots(sc, {10, 0.5}, rng);
    const SpectrumResult s    = jio_spectrum(data, ScanGrid(0.5), 3, 1.0);
    CHECK(find_peaks(s, 2) == std::vector<double>{60.0, 75.0});
}

TEST_CASE("identity C gives a flat polynomial without admissible roots") {
    const RootingPolynomial p = rooting_polynomial_from(CMatrix::Identity(6, 6));
    CHECK(p.coefficient(0) == Complex(6.0, 0.0));
    for (int k = 1; k <= 5; ++k) {
        CHECK(p.coefficient(k) == Complex(0.0, 0.0));
        CHECK(p.coefficient(-k) == Complex(0.0, 0.0));
    }
    CHECK(std::abs(p.evaluate_angle(33.0, 0.5) - Complex(6.0, 0.0)) < 1e-12);
    const RootedDoas r = roots_to_doas(p, 2, 0.5);
    CHECK(r.shortfall);
    CHECK(r.doas.empty());
}

TEST_CASE("polynomial evaluation reproduces the quadratic form") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> angle(1.0, 179.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Index   m = 12;
        const CMatrix t = oracle::random_matrix(m, 3, rng);
        const CMatrix k = oracle::direct_inverse(oracle::random_pd(3, rng));
        const RootingPolynomial p = build_rooting_polynomial(t, 0.5 * (k + k.adjoint()));
        for (int j = -(static_cast<int>(m) - 1); j < static_cast<int>(m); ++j) {
            CHECK(std::abs(p.coefficient(-j) - std::conj(p.coefficient(j))) < 1e-12 * std::abs(p.coefficient(0)));
        }
        for (int n = 0; n < 50; ++n) {
            const double  theta = angle(rng);
            const CVector abar  = t.adjoint() * oracle::steering(m, theta);
            const double  q     = abar.dot(k * abar).real();
            const Complex v     = p.evaluate_angle(theta, 0.5);
            CHECK(std::abs(v.real() - q) < 1e-10 * q);
            CHECK(std::abs(v.imag()) < 1e-10 * std::abs(p.coefficient(0)));
        }
    }
}

TEST_CASE("companion-matrix roots") {
    // (z - 1)(z - 2)(z + 0.5j) expanded in ascending powers.
    const std::vector<Complex> ascending{Complex(0, 1), Complex(2, -1.5), Complex(-3, 0.5), Complex(1, 0)};
    std::vector<Complex>       roots = polynomial_roots(ascending);
    REQUIRE(roots.size() == 3);
    for (const Complex expected : {Complex(1, 0), Complex(2, 0), Complex(0, -0.5)}) {
        const auto near = std::any_of(roots.begin(), roots.end(), [&](Complex z) { return std::abs(z - expected) < 1e-12; });
        CHECK(near);
    }
    // Trailing zero leading coefficients are trimmed.
    CHECK(polynomial_roots({Complex(-2, 0), Complex(1, 0), Complex(0, 0)}).size() == 1);
}

TEST_CASE("roots pair as z and 1 / conj(z)") {
    std::mt19937_64 rng(19);
    const CMatrix   t     = oracle::random_matrix(8, 2, rng);
    const CMatrix   k     = oracle::direct_inverse(oracle::random_pd(2, rng));
    const auto      roots = rooting_roots(build_rooting_polynomial(t, 0.5 * (k + k.adjoint())));
    CHECK(roots.size() == 14);
    for (const Complex& z : roots) {
        const Complex mirror = 1.0 / std::conj(z);
        const double  gap    = std::abs(
            *std::min_element(roots.begin(), roots.end(), [&](Complex l, Complex r) { return std::abs(l - mirror) < std::abs(r - mirror); }) -
            mirror);
        CHECK(gap < 1e-6 * std::max(1.0, std::abs(mirror)));
    }
}

TEST_CASE("exact noise-subspace rooting recovers the source") {
    const ArrayGeometry geom{10, 0.5};
    const CVector       a = steering_vector(geom, 47.3);
    CMatrix             r = a * a.adjoint();
    r.diagonal().array() += 0.1;
    const EigenDecomposition eig   = hermitian_eigen(r);
    const CMatrix            noise = eig.vectors.rightCols(9);
    const RootedDoas         out   = roots_to_doas(rooting_polynomial_from(noise * noise.adjoint()), 1, 0.5);
    REQUIRE(out.doas.size() == 1);
    CHECK_FALSE(out.shortfall);
    CHECK(std::abs(out.doas[0] - 47.3) < 1e-6);
}

TEST_CASE("rooting agrees with grid search for two close sources") {
    SourceScenario sc;
    sc.doas          = {88.5, 91.5};
    sc.noise_power   = noise_power_for_snr(1.0, 25.0);
    sc.num_snapshots = 100;
    const ArrayGeometry geom{20, 0.5};
    Rng                 rng(23);
    const SnapshotMatrix data   = generate_snapshots(sc, geom, rng);
    const CMatrix        r      = data.data * data.data.adjoint() / 100.0;
    const EigenDecomposition e  = hermitian_eigen(r);
    const CMatrix        noise  = e.vectors.rightCols(18);
    const RootedDoas     rooted = roots_to_doas(rooting_polynomial_from(noise * noise.adjoint()), 2, 0.5);
    const std::vector<double> grid = find_peaks(music_spectrum(data, ScanGrid(0.5), 2), 2);
    REQUIRE(rooted.doas.size() == 2);
    REQUIRE(grid.size() == 2);
    CHECK(std::abs(rooted.doas[0] - grid[0]) <= 0.5);
    CHECK(std::abs(rooted.doas[1] - grid[1]) <= 0.5);
}

TEST_CASE("rooted refinement") {
    const ArrayGeometry geom{20, 0.5};
    SourceScenario      sc;
    sc.doas          = {60.27};
    sc.noise_power   = noise_power_for_snr(1.0, 30.0);
    sc.num_snapshots = 40;
    Rng                  rng(29);
    const SnapshotMatrix data = generate_snapshots(sc, geom, rng);
    JioOptions           opt;
    opt.rank       = 3;
    opt.forgetting = 1.0;

    const std::vector<double> grid = find_peaks(jio_family_spectrum(data, ScanGrid(0.5), opt), 1);
    REQUIRE(grid.size() == 1);

    SUBCASE("off-grid source beats the grid quantization") {
        const std::vector<double> fine = rooted_refine(data, ScanGrid(0.5), opt, 1);
        REQUIRE(fine.size() == 1);
        CHECK(std::abs(fine[0] - 60.27) < 0.25);
        CHECK(std::abs(fine[0] - 60.27) < std::abs(grid[0] - 60.27));
    }
    SUBCASE("coarse scan lands within a fine step of grid search") {
        const std::vector<double> coarse = rooted_refine(data, ScanGrid(1.0), opt, 1);
        REQUIRE(coarse.size() == 1);
        CHECK(std::abs(coarse[0] - grid[0]) <= 0.5);
    }
}

}
