#include "bqec/noise.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace bqec::noise {

namespace {
constexpr double kPi = 3.14159265358979323846;

double log_choose(int n, int k) {
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}
}  // namespace

ChannelAction ChannelAction::from_kraus(int dim, std::vector<Matrix> kraus, bool trace_guard) {
    ChannelAction c;
    c.kind_ = Kind::KrausList;
    c.dim_ = dim;
    c.kraus_ = std::move(kraus);
    c.trace_guard_ = trace_guard;
    return c;
}

ChannelAction ChannelAction::from_linear(int dim, std::function<Matrix(const Matrix&)> map) {
    ChannelAction c;
    c.kind_ = Kind::LinearMap;
    c.dim_ = dim;
    c.map_ = std::move(map);
    return c;
}

ChannelAction ChannelAction::identity(int dim) {
    return from_linear(dim, [](const Matrix& m) { return m; });
}

const std::vector<Matrix>& ChannelAction::kraus_operators() const {
    if (kind_ != Kind::KrausList)
        throw std::logic_error("ChannelAction: no Kraus list for linear-map channels");
    return kraus_;
}

Matrix ChannelAction::apply(const Matrix& rho_like) const {
    if (rho_like.rows() != dim_ || rho_like.cols() != dim_)
        throw std::invalid_argument("ChannelAction::apply: dimension mismatch");
    if (kind_ == Kind::LinearMap) return map_(rho_like);
    Matrix out = Matrix::Zero(dim_, dim_);
    for (const Matrix& k : kraus_) out += k * rho_like * k.adjoint();
    if (trace_guard_) {
        const Complex tin = rho_like.trace(), tout = out.trace();
        if (std::abs(tin - tout) > 1e-6 * std::max(1.0, std::abs(tin)))
            throw std::runtime_error("ChannelAction: cutoff inadequate, trace drift " +
                                     std::to_string(std::abs(tin - tout)));
    }
    return out;
}

Matrix lindblad_rhs(const Matrix& rho, const LindbladParams& p) {
    const int d = int(rho.rows());
    Matrix out(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Complex v = -0.5 * (p.kappa_tau * double(i + j) +
                                p.kappa_phi_tau * double(i - j) * double(i - j)) *
                        rho(i, j);
            if (i + 1 < d && j + 1 < d)
                v += p.kappa_tau * std::sqrt(double(i + 1) * double(j + 1)) * rho(i + 1, j + 1);
            out(i, j) = v;
        }
    }
    return out;
}

namespace {

// Dormand-Prince 5(4) on the matrix-valued master equation over t in [0, 1].
Matrix integrate_gksl(Matrix y, const LindbladParams& p) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2; (void)c3; (void)c4; (void)c5;

    const double tol = 1e-10;
    double t = 0.0;
    // Initial step from the generator scale.
    const int d = int(y.rows());
    const double lam = p.kappa_tau * d + 0.5 * p.kappa_phi_tau * double(d) * double(d) + 1e-30;
    double h = std::min(1.0, 0.5 / lam);
    Matrix k1 = lindblad_rhs(y, p);
    int rejects = 0;
    while (t < 1.0) {
        h = std::min(h, 1.0 - t);
        Matrix k2 = lindblad_rhs(y + h * a21 * k1, p);
        Matrix k3 = lindblad_rhs(y + h * (a31 * k1 + a32 * k2), p);
        Matrix k4 = lindblad_rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3), p);
        Matrix k5 = lindblad_rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), p);
        Matrix k6 = lindblad_rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), p);
        Matrix ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Matrix k7 = lindblad_rhs(ynew, p);
        Matrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale = tol * std::max(1.0, fock::max_abs(y));
        const double enorm = fock::max_abs(err) / scale;
        if (enorm <= 1.0) {
            t += h;
            y = std::move(ynew);
            k1 = std::move(k7);
            rejects = 0;
        } else if (++rejects > 60) {
            throw std::runtime_error("loss_dephasing_channel: integrator stalled, achieved "
                                     "tolerance " + std::to_string(enorm * tol));
        }
        const double f = 0.9 * std::pow(std::max(enorm, 1e-10), -0.2);
        h *= std::clamp(f, 0.2, 5.0);
        if (h < 1e-12) throw std::runtime_error("loss_dephasing_channel: step underflow");
    }
    return y;
}

}  // namespace

ChannelAction loss_dephasing_channel(const LindbladParams& p, const TruncatedSpace& space) {
    if (p.kappa_tau < 0.0 || p.kappa_phi_tau < 0.0)
        throw std::invalid_argument("loss_dephasing_channel: rates must be >= 0");
    if (p.is_zero()) return ChannelAction::identity(space.dim);
    return ChannelAction::from_linear(space.dim,
                                      [p](const Matrix& rho) { return integrate_gksl(rho, p); });
}

ChannelAction dephasing_channel(double kappa_phi_tau, const TruncatedSpace& space) {
    if (kappa_phi_tau < 0.0) throw std::invalid_argument("dephasing_channel: rate must be >= 0");
    return ChannelAction::from_linear(space.dim, [kappa_phi_tau](const Matrix& rho) {
        Matrix out = rho;
        const int d = int(rho.rows());
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out(i, j) *= std::exp(-0.5 * kappa_phi_tau * double(i - j) * double(i - j));
        return out;
    });
}

double loss_amplitude(double eta, int n, int k) {
    if (k > n) return 0.0;
    if (eta >= 1.0) return k == 0 ? 1.0 : 0.0;
    const double l = 0.5 * (log_choose(n, k) + (n - k) * std::log(eta) + k * std::log1p(-eta));
    return std::exp(l);
}

ChannelAction pure_loss_channel(double eta, const TruncatedSpace& space) {
    if (eta <= 0.0 || eta > 1.0)
        throw std::invalid_argument("pure_loss_channel: eta must be in (0, 1]");
    const int d = space.dim;
    std::vector<Matrix> kraus;
    if (eta == 1.0) {
        kraus.push_back(Matrix::Identity(d, d));
        return ChannelAction::from_kraus(d, std::move(kraus));
    }
    for (int k = 0; k < d; ++k) {
        Matrix a = Matrix::Zero(d, d);
        bool nonzero = false;
        for (int n = k; n < d; ++n) {
            const double c = loss_amplitude(eta, n, k);
            if (c > 0.0) {
                a(n - k, n) = c;
                nonzero = true;
            }
        }
        if (nonzero) kraus.push_back(std::move(a));
    }
    return ChannelAction::from_kraus(d, std::move(kraus));
}

ChannelAction amplification_channel(double gain, const TruncatedSpace& space) {
    if (gain < 1.0) throw std::invalid_argument("amplification_channel: gain must be >= 1");
    const int d = space.dim;
    std::vector<Matrix> kraus;
    if (gain == 1.0) {
        kraus.push_back(Matrix::Identity(d, d));
        return ChannelAction::from_kraus(d, std::move(kraus));
    }
    const double x = (gain - 1.0) / gain;
    for (int k = 0; k < d; ++k) {
        Matrix b = Matrix::Zero(d, d);
        bool nonzero = false;
        for (int n = 0; n + k < d; ++n) {
            const double l = 0.5 * (log_choose(n + k, k) + k * std::log(x) -
                                    (n + 1) * std::log(gain));
            b(n + k, n) = std::exp(l);
            nonzero = true;
        }
        if (nonzero) kraus.push_back(std::move(b));
    }
    return ChannelAction::from_kraus(d, std::move(kraus), /*trace_guard=*/true);
}

namespace {

// Gauss-Hermite nodes/weights for weight e^{-t^2} via the Golub-Welsch
// symmetric tridiagonal eigenproblem.
void gauss_hermite(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) {
        const double b = std::sqrt(0.5 * i);
        j(i - 1, i) = b;
        j(i, i - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    nodes.resize(m);
    weights.resize(m);
    const double mu0 = std::sqrt(kPi);
    for (int i = 0; i < m; ++i) {
        nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        weights[i] = mu0 * v0 * v0;
    }
}

std::vector<Matrix> displacement_mixture_kraus(double sigma_sq, const TruncatedSpace& space,
                                               int order) {
    std::vector<double> t, w;
    gauss_hermite(order, t, w);
    const double sigma = std::sqrt(sigma_sq);
    double total = 0.0;
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) total += w[i] * w[j] / kPi;
    std::vector<Matrix> kraus;
    kraus.reserve(order * order);
    for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) {
            const double p = (w[i] * w[j] / kPi) / total;
            const Complex alpha(sigma * t[i], sigma * t[j]);
            kraus.push_back(std::sqrt(p) * fock::displacement(alpha, space));
        }
    }
    return kraus;
}

}  // namespace

ChannelAction gaussian_displacement_channel(double sigma_sq, const TruncatedSpace& space) {
    if (sigma_sq < 0.0)
        throw std::invalid_argument("gaussian_displacement_channel: variance must be >= 0");
    const int d = space.dim;
    if (sigma_sq == 0.0) return ChannelAction::identity(d);
    // Adapt the quadrature order until a probe evolution stabilizes.
    Matrix probe = Matrix::Zero(d, d);
    const int nprobe = std::min(4, d - 1);
    probe(nprobe, nprobe) = 1.0;
    Matrix prev;
    for (int order = 12; order <= 48; order += 8) {
        auto kraus = displacement_mixture_kraus(sigma_sq, space, order);
        Matrix out = Matrix::Zero(d, d);
        for (const auto& k : kraus) out += k * probe * k.adjoint();
        if (order > 12 && fock::max_abs(out - prev) < 1e-9)
            return ChannelAction::from_kraus(d, std::move(kraus));
        prev = std::move(out);
    }
    throw std::runtime_error("gaussian_displacement_channel: quadrature did not converge");
}

}  // namespace bqec::noise
