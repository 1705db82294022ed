#include "bqec/measure.hpp"

#include "bqec/noise.hpp"

#include <cmath>

namespace bqec::measure {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;
}  // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Canonical: return "can";
        case Scheme::Heterodyne: return "het";
        case Scheme::AdaptiveHomodyne: return "ahd";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "can") return Scheme::Canonical;
    if (name == "het") return Scheme::Heterodyne;
    if (name == "ahd") return Scheme::AdaptiveHomodyne;
    throw std::invalid_argument("unknown measurement scheme: " + name);
}

HMatrix h_canonical(const TruncatedSpace& space) {
    return HMatrix{Scheme::Canonical, RealMatrix::Ones(space.dim, space.dim)};
}

HMatrix h_heterodyne(const TruncatedSpace& space) {
    const int d = space.dim;
    RealMatrix h(d, d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n <= m; ++n) {
            const double l = std::lgamma(0.5 * (n + m) + 1.0) -
                             0.5 * std::lgamma(n + 1.0) - 0.5 * std::lgamma(m + 1.0);
            h(m, n) = h(n, m) = std::exp(l);
        }
    return HMatrix{Scheme::Heterodyne, std::move(h)};
}

HMatrix loss_damaged(const HMatrix& h, double eta) {
    if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("loss_damaged: eta in (0,1]");
    if (eta == 1.0) return h;
    const int d = h.dim();
    RealMatrix out = RealMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        // H~_{mn} += c_k(m) c_k(n) H_{m-k, n-k}
        for (int m = k; m < d; ++m) {
            const double cm = noise::loss_amplitude(eta, m, k);
            if (cm == 0.0) continue;
            for (int n = k; n <= m; ++n)
                out(m, n) += cm * noise::loss_amplitude(eta, n, k) * h.entries(m - k, n - k);
        }
    }
    for (int m = 0; m < d; ++m)
        for (int n = m + 1; n < d; ++n) out(m, n) = out(n, m);
    return HMatrix{h.scheme, std::move(out)};
}

std::vector<Complex> phase_outcome_weights(const HMatrix& h, const PhaseGrid& grid,
                                           const Matrix& rho_like) {
    const int d = h.dim();
    if (rho_like.rows() != d || rho_like.cols() != d)
        throw std::invalid_argument("phase_outcome_weights: dimension mismatch");
    // s(dd) = sum_{m-n=dd} H_{mn} rho_{nm}; w_b = (dphi/2pi) sum_dd e^{i phi_b dd} s(dd).
    std::vector<Complex> s(2 * d - 1, Complex(0, 0));
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) s[(m - n) + d - 1] += h.entries(m, n) * rho_like(n, m);
    std::vector<Complex> w(grid.bins);
    const double f = grid.width() / (2.0 * kPi);
    for (int b = 0; b < grid.bins; ++b) {
        const double phi = grid.center(b);
        Complex acc(0, 0);
        for (int dd = -(d - 1); dd <= d - 1; ++dd)
            acc += std::polar(1.0, phi * dd) * s[dd + d - 1];
        w[b] = f * acc;
    }
    return w;
}

double modular_phase_uncertainty(const codes::CodeWords& code, const HMatrix& h) {
    const int n_order = code.order;
    auto f = codes::lattice_coefficients(code);
    double mean = 0.0;
    for (size_t k = 0; k + 1 < f.size(); ++k) {
        const int a = int(k) * n_order, b = int(k + 1) * n_order;
        if (b >= h.dim()) break;
        mean += 0.5 * std::abs(f[k] * f[k + 1] * h.entries(a, b));
    }
    if (mean <= 0.0) throw std::runtime_error("modular_phase_uncertainty: vanishing mean phase");
    return 1.0 / (mean * mean) - 1.0;
}

int QuadratureBinning::logical_bin(double p) const {
    const long r = std::lround(p / (boundary_scale * kSqrtPi));
    return int(((r % 2) + 2) % 2);
}

std::array<Complex, 2> homodyne_bin_weights(const QuadratureBinning& binning,
                                            const fock::QuadratureTransform& transform,
                                            const Matrix& rho_like) {
    const auto& grid = binning.grid;
    if (grid.size() != transform.grid.size())
        throw std::invalid_argument("homodyne_bin_weights: grid mismatch");
    const int g = int(grid.size());
    std::array<Complex, 2> mass{Complex(0, 0), Complex(0, 0)};
    Matrix amp_rho = transform.amplitudes * rho_like;  // g x dim
    for (int i = 0; i < g; ++i) {
        const Complex density = transform.amplitudes.row(i).dot(amp_rho.row(i));
        double w = 0.0;
        if (i > 0) w += 0.5 * (grid(i) - grid(i - 1));
        if (i + 1 < g) w += 0.5 * (grid(i + 1) - grid(i));
        mass[binning.logical_bin(grid(i))] += w * density;
    }
    const Complex total = mass[0] + mass[1];
    const Complex tr = rho_like.trace();
    if (std::abs(total - tr) > 1e-6 * std::max(1.0, std::abs(tr)))
        throw std::runtime_error("homodyne_bin_weights: mass outside grid exceeds 1e-6");
    return mass;
}

Matrix inefficient_measurement_preprocess(double eta, const Matrix& state_like) {
    if (eta <= 0.0 || eta > 1.0)
        throw std::invalid_argument("inefficient_measurement_preprocess: eta in (0,1]");
    TruncatedSpace space(int(state_like.rows()));
    if (eta == 1.0) return state_like;
    return noise::pure_loss_channel(eta, space).apply(state_like);
}

}  // namespace bqec::measure
