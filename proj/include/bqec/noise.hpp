#pragma once

#include "bqec/fock.hpp"

#include <functional>

namespace bqec::noise {

using fock::Complex;
using fock::Matrix;
using fock::TruncatedSpace;

/// Dimensionless loss and dephasing strengths (rate times evolution time).
struct LindbladParams {
    double kappa_tau = 0.0;
    double kappa_phi_tau = 0.0;
    bool is_zero() const { return kappa_tau == 0.0 && kappa_phi_tau == 0.0; }
};

/// A completely positive map on truncated-Fock operators, either as an
/// explicit Kraus list or as a linear evolution procedure.  Inputs may be
/// non-Hermitian; the map is applied verbatim.
class ChannelAction {
  public:
    enum class Kind { KrausList, LinearMap };

    static ChannelAction from_kraus(int dim, std::vector<Matrix> kraus, bool trace_guard = false);
    static ChannelAction from_linear(int dim, std::function<Matrix(const Matrix&)> map);
    static ChannelAction identity(int dim);

    Matrix apply(const Matrix& rho_like) const;
    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::vector<Matrix>& kraus_operators() const;

  private:
    ChannelAction() = default;
    Kind kind_ = Kind::LinearMap;
    int dim_ = 0;
    bool trace_guard_ = false;
    std::vector<Matrix> kraus_;
    std::function<Matrix(const Matrix&)> map_;
};

/// Simultaneous loss-dephasing evolution, integrated from the GKSL generator
///   kappa D[a] + kappa_phi D[n]
/// over unit dimensionless time with an adaptive Runge-Kutta scheme
/// (per-step tolerance 1e-10).  Applicable to non-Hermitian matrices.
ChannelAction loss_dephasing_channel(const LindbladParams& p, const TruncatedSpace& space);

/// Closed-form pure dephasing: coherences scaled by e^{-kphi_tau (n-m)^2/2}.
ChannelAction dephasing_channel(double kappa_phi_tau, const TruncatedSpace& space);

/// Standard bosonic loss channel with transmissivity eta, as a Kraus list.
ChannelAction pure_loss_channel(double eta, const TruncatedSpace& space);

/// Quantum-limited amplifier with gain G >= 1, as a Kraus list.  Applying it
/// to states whose amplified support spills past the cutoff raises an error.
ChannelAction amplification_channel(double gain, const TruncatedSpace& space);

/// Gaussian random displacement channel of variance sigma^2 per quadrature,
/// discretized by Gauss-Hermite quadrature with adaptive order.
ChannelAction gaussian_displacement_channel(double sigma_sq, const TruncatedSpace& space);

/// Right-hand side of the loss-dephasing master equation (exposed for tests).
Matrix lindblad_rhs(const Matrix& rho, const LindbladParams& p);

/// Loss Kraus amplitude: A_k |n> = loss_amplitude(eta, n, k) |n-k>.
double loss_amplitude(double eta, int n, int k);

}  // namespace bqec::noise
