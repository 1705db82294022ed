#include "bqec/twirl.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace bqec::twirl {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;

// SplitMix64: counter-based, keyed per (seed, rail, sample index).
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t bits) {
    return double(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double gaussian_sample(std::uint64_t seed, std::uint64_t rail, std::uint64_t index) {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(rail * 0x9e3779b97f4a7c15ull + index));
    const double u1 = uniform01(splitmix64(k));
    const double u2 = uniform01(splitmix64(k ^ 0xdeadbeefcafef00dull));
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

bool decoded_correctly(double shift) {
    const long r = std::lround(shift / (2.0 * kSqrtPi) * 2.0);
    return (((r % 2) + 2) % 2) == 0;
}

}  // namespace

double p_succ(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("p_succ: sigma must be >= 0");
    if (sigma == 0.0) return 1.0;
    const double inv = 1.0 / (std::sqrt(2.0) * sigma);
    double total = 0.0;
    for (int n = 0;; ++n) {
        const double lo = (2.0 * n - 0.5) * kSqrtPi;
        const double hi = (2.0 * n + 0.5) * kSqrtPi;
        double inc = 0.5 * (std::erf(hi * inv) - std::erf(lo * inv));
        if (n > 0) inc += 0.5 * (std::erf(-lo * inv) - std::erf(-hi * inv));
        total += inc;
        if (n > 0 && inc < 1e-12) break;
        if (n > 10000) break;
    }
    return total;
}

EffectiveVariances effective_variances(const TwirlParams& p) {
    if (p.delta_data <= 0.0 && p.delta_anci <= 0.0 && p.eta >= 1.0)
        return {0.0, 0.0};
    if (p.eta <= 0.0 || p.eta > 1.0)
        throw std::invalid_argument("effective_variances: eta in (0,1]");
    const double half = 0.5 * (p.delta_data * p.delta_data + p.delta_anci * p.delta_anci);
    return {half + (1.0 - p.eta) / p.eta, half};
}

TwirlFidelity twirl_fidelity(const TwirlParams& p, bool cc_amplification) {
    auto v = effective_variances(p);
    if (cc_amplification) {
        // Loss followed by rescaled decision boundaries adds only half the
        // variance of the amplified displacement channel.
        v.data_sq -= 0.5 * (1.0 - p.eta) / p.eta;
    }
    const double fe = p_succ(std::sqrt(v.data_sq)) * p_succ(std::sqrt(v.anci_sq));
    return {fe, (2.0 * fe + 1.0) / 3.0, v.data_sq, v.anci_sq};
}

MonteCarloEstimate monte_carlo_oracle(double sigma_data, double sigma_anci,
                                      std::uint64_t samples, std::uint64_t seed) {
    if (samples < 10000) throw std::invalid_argument("monte_carlo_oracle: need >= 1e4 samples");
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t block = 1u << 16;
    const std::uint64_t nblocks = (samples + block - 1) / block;
    std::vector<std::uint64_t> hits(nblocks, 0);

    auto run_block = [&](std::uint64_t b) {
        const std::uint64_t lo = b * block;
        const std::uint64_t hi = std::min(samples, lo + block);
        std::uint64_t h = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            const bool ok_d =
                sigma_data == 0.0 || decoded_correctly(sigma_data * gaussian_sample(seed, 1, i));
            const bool ok_a =
                sigma_anci == 0.0 || decoded_correctly(sigma_anci * gaussian_sample(seed, 2, i));
            if (ok_d && ok_a) ++h;
        }
        hits[b] = h;
    };

    std::vector<std::thread> pool;
    std::uint64_t next = 0;
    for (unsigned t = 0; t < hw; ++t) {
        pool.emplace_back([&, t]() {
            for (std::uint64_t b = t; b < nblocks; b += hw) run_block(b);
        });
    }
    (void)next;
    for (auto& th : pool) th.join();

    std::uint64_t h = 0;
    for (auto v : hits) h += v;
    const double p = double(h) / double(samples);
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / double(samples));
    return {p, se, samples};
}

}  // namespace bqec::twirl
