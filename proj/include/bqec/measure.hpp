#pragma once

#include "bqec/codes.hpp"
#include "bqec/fock.hpp"

#include <array>

namespace bqec::measure {

using fock::Complex;
using fock::Matrix;
using fock::RealMatrix;
using fock::RealVector;
using fock::TruncatedSpace;

enum class Scheme { Canonical, Heterodyne, AdaptiveHomodyne };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Positive symmetric matrix with unit diagonal characterizing a
/// rotation-covariant unbiased phase POVM,
///   F(phi) = (1/2pi) sum_{mn} e^{i phi (m-n)} H_{mn} |m><n|.
struct HMatrix {
    Scheme scheme;
    RealMatrix entries;
    int dim() const { return int(entries.rows()); }
};

HMatrix h_canonical(const TruncatedSpace& space);
HMatrix h_heterodyne(const TruncatedSpace& space);

/// Adaptive homodyne (instantaneous-feedback mark II) H matrix.  The series
/// defining each entry is truncated at lmax (default 2*dim) and rejected if
/// doubling lmax changes any entry by more than 1e-8.
HMatrix h_adaptive_homodyne(const TruncatedSpace& space, int lmax = -1);

/// Measurement chain with efficiency eta: the loss channel preceding an
/// ideal detector, absorbed into the H matrix through the channel adjoint.
/// Keeps the unit diagonal.
HMatrix loss_damaged(const HMatrix& h, double eta);

/// Moment M_{n,m} of the adaptive-homodyne recursion, M_{n,0} = 1/(2n+1)!!.
double ahd_moment(int n, int m);

/// B equally spaced phase bins over [0, 2pi), midpoint representatives.
struct PhaseGrid {
    int bins;
    explicit PhaseGrid(int b) : bins(b) {
        if (b < 8) throw std::invalid_argument("PhaseGrid: need >= 8 bins");
    }
    double center(int b) const { return 2.0 * 3.14159265358979323846 * (b + 0.5) / bins; }
    double width() const { return 2.0 * 3.14159265358979323846 / bins; }
};

/// Per-bin weights Tr[F(phi_b) rho] * dphi by the midpoint rule.  rho_like
/// may be non-Hermitian, in which case weights are complex.
std::vector<Complex> phase_outcome_weights(const HMatrix& h, const PhaseGrid& grid,
                                           const Matrix& rho_like);

/// Modular phase uncertainty 1/|<e^{iN theta}>|^2 - 1 of a rotation code
/// under the measurement described by h, with the mean modular phase summed
/// as (1/2) sum_k |f_k f_{k+1} H_{kN,(k+1)N}|.
double modular_phase_uncertainty(const codes::CodeWords& code, const HMatrix& h);

/// p-quadrature grid with closest-integer logical binning; decision
/// boundaries live on the lattice scaled by boundary_scale.
struct QuadratureBinning {
    RealVector grid;
    double boundary_scale = 1.0;
    /// Logical bin of a point: round(p / (boundary_scale sqrt(pi))) mod 2.
    int logical_bin(double p) const;
};

/// Masses of the two logical bins for a state (or non-Hermitian matrix).
/// Trapezoid rule over the grid; errors out if more than 1e-6 of the trace
/// is unaccounted for (grid too small).
std::array<Complex, 2> homodyne_bin_weights(const QuadratureBinning& binning,
                                            const fock::QuadratureTransform& transform,
                                            const Matrix& rho_like);

/// Finite-efficiency preprocessing of a state before an ideal measurement.
Matrix inefficient_measurement_preprocess(double eta, const Matrix& state_like);

}  // namespace bqec::measure
