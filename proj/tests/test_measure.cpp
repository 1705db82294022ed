#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bqec/measure.hpp"
#include "bqec/noise.hpp"

#include <cmath>
#include <random>

using namespace bqec;
using fock::Complex;
using fock::Matrix;
using fock::TruncatedSpace;
using fock::Vector;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;

Matrix random_density(int dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}
}  // namespace

TEST_CASE("canonical H") {
    auto h = measure::h_canonical(TruncatedSpace(51));
    CHECK(h.entries(0, 0) == 1.0);
    CHECK(h.entries(0, 50) == 1.0);
    // Ones matrix: spectrum {dim, 0, ...}.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.entries);
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(51.0));
    CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
}

TEST_CASE("heterodyne H") {
    auto h = measure::h_heterodyne(TruncatedSpace(40));
    CHECK(std::abs(h.entries(0, 1) - 0.88622692545275801) < 1e-12);  // sqrt(pi)/2
    CHECK(std::abs(h.entries(0, 2) - 1.0 / std::sqrt(2.0)) < 1e-12);
    for (int n = 0; n < 40; ++n) CHECK(h.entries(n, n) == doctest::Approx(1.0));
    for (int m = 0; m < 40; ++m)
        for (int n = 0; n < m; ++n) CHECK(h.entries(m, n) < 1.0);

    // Independent oracle: radial marginalization of the coherent projector,
    // 2 int_0^inf r^{n+m+1} e^{-r^2} dr / sqrt(n! m!) by fine quadrature.
    const int npts = 200000;
    const double rmax = 9.0, dr = rmax / npts;
    for (int m = 0; m <= 10; ++m)
        for (int n = 0; n <= m; ++n) {
            double acc = 0.0;
            for (int i = 0; i < npts; ++i) {
                const double r = (i + 0.5) * dr;
                acc += std::exp((n + m + 1) * std::log(r) - r * r -
                                0.5 * std::lgamma(n + 1.0) - 0.5 * std::lgamma(m + 1.0)) *
                       dr;
            }
            CHECK(std::abs(2.0 * acc - h.entries(m, n)) < 1e-6);
        }
}

TEST_CASE("adaptive homodyne H") {
    // Moment fixtures: M_{n,0} = 1/(2n+1)!! exactly.
    double dfac = 1.0;
    for (int n = 0; n <= 10; ++n) {
        if (n > 0) dfac *= (2.0 * n + 1.0);
        CHECK(std::abs(measure::ahd_moment(n, 0) - 1.0 / dfac) < 1e-14 / dfac + 1e-15);
        CHECK(std::abs(measure::ahd_moment(0, n) - 1.0 / dfac) < 1e-14 / dfac + 1e-15);
    }
    CHECK(measure::ahd_moment(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    auto h = measure::h_adaptive_homodyne(TruncatedSpace(31));
    for (int n = 0; n <= 30; ++n) CHECK(std::abs(h.entries(n, n) - 1.0) < 1e-8);

    // Near-diagonal advantage over heterodyne (m, n <= 20, |m-n| <= 6).
    auto het = measure::h_heterodyne(TruncatedSpace(31));
    for (int m = 0; m <= 20; ++m)
        for (int n = 0; n <= 20; ++n)
            if (m != n && std::abs(m - n) <= 6)
                CHECK(h.entries(m, n) >= het.entries(m, n));

    // PSD within tolerance.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.entries);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);

    CHECK_THROWS(measure::h_adaptive_homodyne(TruncatedSpace(10), 4));
}

TEST_CASE("phase outcome weights") {
    TruncatedSpace s(40);
    measure::PhaseGrid grid(512);

    // Vacuum is phase-uniform.
    Matrix vac = Matrix::Zero(40, 40);
    vac(0, 0) = 1.0;
    auto w = measure::phase_outcome_weights(measure::h_heterodyne(s), grid, vac);
    for (auto v : w) CHECK(std::abs(v - Complex(1.0 / 512, 0)) < 1e-12);

    // Canonical measurement of a coherent state peaks at phi = 0 and the
    // distribution is normalized.
    Vector a3 = fock::coherent_state(Complex(3.0, 0.0), s);
    auto wc = measure::phase_outcome_weights(measure::h_canonical(s), grid,
                                             Matrix(a3 * a3.adjoint()));
    Complex total(0, 0);
    size_t peak = 0;
    for (size_t b = 0; b < wc.size(); ++b) {
        total += wc[b];
        if (wc[b].real() > wc[peak].real()) peak = b;
    }
    CHECK(std::abs(total - Complex(1, 0)) < 1e-8);
    const double peak_phi = grid.center(int(peak));
    CHECK((peak_phi < 0.05 || peak_phi > 2 * kPi - 0.05));

    // POVM completeness on a random state.
    Matrix rho = random_density(40, 11);
    auto wr = measure::phase_outcome_weights(measure::h_adaptive_homodyne(s), grid, rho);
    Complex tr(0, 0);
    for (auto v : wr) tr += v;
    CHECK(std::abs(tr - rho.trace()) < 1e-8);
}

TEST_CASE("inefficiency is absorbed into the H matrix") {
    TruncatedSpace s(30);
    measure::PhaseGrid grid(128);
    const double eta = 0.73;
    Matrix rho = random_density(30, 12);
    for (auto h : {measure::h_canonical(s), measure::h_heterodyne(s)}) {
        auto damaged = measure::loss_damaged(h, eta);
        for (int n = 0; n < 30; ++n) CHECK(std::abs(damaged.entries(n, n) - 1.0) < 1e-12);
        auto w1 = measure::phase_outcome_weights(damaged, grid, rho);
        auto w2 = measure::phase_outcome_weights(
            h, grid, measure::inefficient_measurement_preprocess(eta, rho));
        for (size_t b = 0; b < w1.size(); ++b) CHECK(std::abs(w1[b] - w2[b]) < 1e-10);
    }
    // Composition of preprocessing steps multiplies transmissivities.
    Matrix two = measure::inefficient_measurement_preprocess(
        0.9, measure::inefficient_measurement_preprocess(0.8, rho));
    Matrix once = measure::inefficient_measurement_preprocess(0.72, rho);
    CHECK(fock::max_abs(two - once) < 1e-10);
}

TEST_CASE("modular phase uncertainty") {
    // Equal-magnitude coefficients with canonical measurement: uncertainty
    // falls as the peak count grows.
    auto ideal_delta = [](int peaks) {
        codes::CodeWords cw;
        cw.family = codes::Family::Bin;
        cw.order = 1;
        cw.dim = 2 * peaks + 2;
        Vector plus = Vector::Zero(cw.dim);
        for (int k = 0; k < peaks; ++k) plus(k) = 1.0 / std::sqrt(double(peaks));
        cw.plus = plus;
        cw.zero = plus;  // unused by the uncertainty
        cw.one = plus;
        cw.minus = plus;
        auto h = measure::h_canonical(TruncatedSpace(cw.dim));
        return measure::modular_phase_uncertainty(cw, h);
    };
    double prev = std::numeric_limits<double>::infinity();
    for (int peaks : {4, 8, 16, 32}) {
        const double d = ideal_delta(peaks);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(ideal_delta(64) < 0.01);
}

TEST_CASE("homodyne bin weights") {
    TruncatedSpace s(60);
    auto grid = fock::uniform_grid(8.0 * kSqrtPi, 1024);
    auto qt = fock::quadrature_transform(grid, s, fock::Quadrature::P);
    measure::QuadratureBinning binning{grid, 1.0};

    // GKP plus state: mass concentrates on the even (bin 0) lattice.
    auto cw = codes::gkp_codewords({0.4, s});
    auto w = measure::homodyne_bin_weights(binning, qt, Matrix(cw.plus * cw.plus.adjoint()));
    CHECK(w[0].real() > w[1].real());
    CHECK(w[0].real() > 0.9);
    CHECK(std::abs(w[0] + w[1] - Complex(1, 0)) < 1e-8);

    // Vacuum: completeness.
    Matrix vac = Matrix::Zero(60, 60);
    vac(0, 0) = 1.0;
    auto wv = measure::homodyne_bin_weights(binning, qt, vac);
    CHECK(std::abs(wv[0] + wv[1] - Complex(1, 0)) < 1e-8);

    // Rescaled decision boundaries move the assignment of p = 0.9 sqrt(pi).
    measure::QuadratureBinning rescaled{grid, std::sqrt(0.8)};
    CHECK(binning.logical_bin(0.9 * kSqrtPi) == 1);
    CHECK(rescaled.logical_bin(0.9 * kSqrtPi) == 1);
    CHECK(binning.logical_bin(0.45 * kSqrtPi) == 0);
    CHECK(rescaled.logical_bin(0.47 * kSqrtPi) == 1);

    // Mass escaping a too-small grid raises.
    auto tiny = fock::uniform_grid(1.0, 64);
    auto qtiny = fock::quadrature_transform(tiny, s, fock::Quadrature::P);
    Matrix hot = Matrix::Zero(60, 60);
    hot(40, 40) = 1.0;
    CHECK_THROWS(measure::homodyne_bin_weights({tiny, 1.0}, qtiny, hot));
}
