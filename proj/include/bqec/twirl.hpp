#pragma once

#include <cstdint>

namespace bqec::twirl {

struct TwirlParams {
    double delta_data;
    double delta_anci;
    double eta = 1.0;  // measurement efficiency in (0, 1]
};

/// Probability that a zero-mean Gaussian shift of std sigma stays within the
/// closest-integer decision cells around even lattice points,
/// sum_n integral_{(2n-1/2)sqrt(pi)}^{(2n+1/2)sqrt(pi)} N(0, sigma^2).
double p_succ(double sigma);

struct EffectiveVariances {
    double data_sq;
    double anci_sq;
};

/// sigma_data^2 = (delta_d^2 + delta_a^2)/2 + (1-eta)/eta,
/// sigma_anci^2 = (delta_d^2 + delta_a^2)/2.
EffectiveVariances effective_variances(const TwirlParams& p);

struct TwirlFidelity {
    double entanglement_fidelity;
    double avg_gate_fidelity;
    double sigma_data_sq;
    double sigma_anci_sq;
};

/// F_E = p_succ(sigma_data) p_succ(sigma_anci); Fbar = (2 F_E + 1)/3.
/// With cc_amplification the measurement-loss variance is halved to
/// (1-eta)/(2 eta), matching loss followed by rescaled decision boundaries.
TwirlFidelity twirl_fidelity(const TwirlParams& p, bool cc_amplification = false);

struct MonteCarloEstimate {
    double entanglement_fidelity;
    double stderr_;
    std::uint64_t samples;
};

/// Independent sampling oracle: Gaussian shifts per rail, closest-integer
/// decoding, joint success frequency.  Reproducible by seed and independent
/// of thread count.
MonteCarloEstimate monte_carlo_oracle(double sigma_data, double sigma_anci,
                                      std::uint64_t samples, std::uint64_t seed);

}  // namespace bqec::twirl
