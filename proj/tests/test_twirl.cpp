#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bqec/twirl.hpp"

#include <cmath>

using namespace bqec;

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;

// Independent oracle: fine Simpson quadrature of the Gaussian over the
// acceptance segments.
double p_succ_quadrature(double sigma) {
    if (sigma == 0.0) return 1.0;
    const double lim = 10.0 * sigma;
    const int n = 2000001;
    const double h = 2.0 * lim / (n - 1);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = -lim + i * h;
        const long r = std::lround(z / kSqrtPi);
        if ((((r % 2) + 2) % 2) != 0) continue;
        const double f = std::exp(-0.5 * z * z / (sigma * sigma));
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f;
    }
    return acc * h / 3.0 / std::sqrt(2.0 * 3.14159265358979323846 * sigma * sigma);
}

}  // namespace

TEST_CASE("p_succ") {
    CHECK(twirl::p_succ(0.0) == 1.0);
    CHECK(twirl::p_succ(1e-6) == doctest::Approx(1.0));
    CHECK(twirl::p_succ(100.0) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(twirl::p_succ(0.5) == doctest::Approx(0.924).epsilon(1e-3));

    for (double sigma : {0.2, 0.5, 0.9}) {
        CHECK(std::abs(twirl::p_succ(sigma) - p_succ_quadrature(sigma)) < 1e-9);
    }

    // Strictly decreasing on (0, 2], bounded in [1/2, 1].
    double prev = 1.0;
    for (double s = 0.05; s <= 2.0; s += 0.05) {
        const double v = twirl::p_succ(s);
        CHECK(v < prev);
        CHECK(v >= 0.5);
        CHECK(v <= 1.0);
        prev = v;
    }
    CHECK_THROWS(twirl::p_succ(-0.1));
}

TEST_CASE("effective variances") {
    auto v = twirl::effective_variances({0.3, 0.3, 1.0});
    CHECK(v.data_sq == doctest::Approx(0.09));
    CHECK(v.anci_sq == doctest::Approx(0.09));

    auto v2 = twirl::effective_variances({1e-12, 1e-12, 0.95});
    CHECK(v2.data_sq == doctest::Approx(1.0 / 19.0).epsilon(1e-9));

    auto v3 = twirl::effective_variances({0.2, 0.4, 1.0});
    CHECK(v3.data_sq == doctest::Approx(v3.anci_sq));
    CHECK(v3.anci_sq == doctest::Approx(0.5 * (0.04 + 0.16)));
}

TEST_CASE("twirl fidelity") {
    auto perfect = twirl::twirl_fidelity({1e-9, 1e-9, 1.0});
    CHECK(perfect.avg_gate_fidelity == doctest::Approx(1.0));

    auto f = twirl::twirl_fidelity({0.225, 0.225, 1.0});
    CHECK(f.entanglement_fidelity ==
          doctest::Approx(std::pow(twirl::p_succ(0.225), 2)).epsilon(1e-12));
    CHECK(f.avg_gate_fidelity == doctest::Approx((2 * f.entanglement_fidelity + 1) / 3));

    // Rescaled-boundary (cc) decoding halves the added loss variance and can
    // only help.
    for (double eta : {0.5, 0.75, 0.9, 0.99}) {
        auto amp = twirl::twirl_fidelity({0.3, 0.3, eta}, false);
        auto cc = twirl::twirl_fidelity({0.3, 0.3, eta}, true);
        CHECK(cc.sigma_data_sq ==
              doctest::Approx(amp.sigma_data_sq - 0.5 * (1 - eta) / eta).epsilon(1e-12));
        CHECK(cc.entanglement_fidelity >= amp.entanglement_fidelity);
    }
}

TEST_CASE("monte carlo oracle") {
    // sigma = 0: every sample decodes correctly.
    auto exact = twirl::monte_carlo_oracle(0.0, 0.0, 10000, 3);
    CHECK(exact.entanglement_fidelity == 1.0);

    // Same seed, same estimate; different seed, different stream.
    auto a = twirl::monte_carlo_oracle(0.3, 0.3, 50000, 42);
    auto b = twirl::monte_carlo_oracle(0.3, 0.3, 50000, 42);
    auto c = twirl::monte_carlo_oracle(0.3, 0.3, 50000, 43);
    CHECK(a.entanglement_fidelity == b.entanglement_fidelity);
    CHECK(a.entanglement_fidelity != c.entanglement_fidelity);

    // Statistical consistency with the analytic value at 1e6 samples.
    for (double sigma : {0.2, 0.3, 0.5}) {
        auto mc = twirl::monte_carlo_oracle(sigma, sigma, 1000000, 7);
        const double exact_fe = twirl::p_succ(sigma) * twirl::p_succ(sigma);
        CHECK(std::abs(mc.entanglement_fidelity - exact_fe) < 3.0 * mc.stderr_);
    }
    CHECK_THROWS(twirl::monte_carlo_oracle(0.3, 0.3, 100, 1));
}
