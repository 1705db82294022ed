#pragma once

#include "bqec/codes.hpp"
#include "bqec/measure.hpp"
#include "bqec/noise.hpp"

#include <array>
#include <cstdint>

namespace bqec::telecorrect {

using fock::Complex;
using fock::Matrix;
using fock::Vector;
using Matrix4 = Eigen::Matrix4cd;
using Matrix2 = Eigen::Matrix2cd;

/// Telecorrection circuit for a rotation code: the data rail carries the
/// noisy encoded state and is read out by a phase measurement of efficiency
/// data_eta; the middle ancilla rail is noiseless with an ideal measurement;
/// the output rail is the trivial Fock qubit and only enters through the
/// Pauli frame bookkeeping.
struct RsbCircuitConfig {
    codes::CodeWords data_code;
    codes::CodeWords ancilla_code;
    measure::HMatrix data_h;
    measure::HMatrix ancilla_h;
    double data_eta = 1.0;
    noise::LindbladParams noise{};
    int bins = 512;
};

enum class EfficiencyModel { Amplified, LossRescaledBoundaries };

std::string efficiency_model_name(EfficiencyModel m);

/// GKP telecorrection circuit: homodyne readout on both rails, closest
/// integer decoding.  Finite efficiency on the data rail is modeled either
/// as loss compensated by quantum-limited amplification (a Gaussian random
/// displacement channel) or as bare loss with decision boundaries rescaled
/// by sqrt(eta).
struct GkpCircuitConfig {
    double delta_data = 0.3;
    double delta_anci = 0.3;
    double eta = 1.0;
    EfficiencyModel efficiency_model = EfficiencyModel::LossRescaledBoundaries;
    noise::LindbladParams noise{};
    int dim = 150;
    int grid_points = 1024;  // FFT-matched spacing sqrt(2 pi / grid_points)
};

enum class CircuitKind { Rsb, Gkp };

/// Outcome weights c_ij(x) over dual-basis index pairs i = 2a + b and
/// outcome bin pairs x = x1 * n_x2 + x2, along with the maximum-likelihood
/// decoder choice and the per-frame accumulations needed for assembly.
struct OutcomeWeights {
    CircuitKind kind = CircuitKind::Rsb;
    int n_x1 = 0, n_x2 = 0;
    std::array<Eigen::VectorXd, 4> diag;          // c_ii(x), real
    std::vector<std::uint8_t> decoder_choice;     // Pauli index per outcome
    std::array<Matrix4, 4> frame_sums;            // A^(p)_{ij} = sum_{x: dec=p} c_ij(x)
    std::array<double, 4> completeness{};         // sum_x c_ii(x)
    std::vector<Matrix4> full_c;                  // full c_ij per x (small grids / GKP)

    int outcome_count() const { return n_x1 * n_x2; }
    bool has_full() const { return !full_c.empty(); }
};

/// Maximum-likelihood frame choice per outcome: argmax_i c_ii(x), ties
/// broken toward the smaller index.
std::vector<std::uint8_t> ml_decode(const std::array<Eigen::VectorXd, 4>& diagonals);

OutcomeWeights rsb_outcome_weights(const RsbCircuitConfig& cfg);
OutcomeWeights gkp_outcome_weights(const GkpCircuitConfig& cfg);

/// Qubit-to-qubit channel: superoperator on column-stacked 2x2 operators and
/// the Choi matrix (1/2) sum_kl Lambda(E_kl) (x) E_kl.
struct LogicalChannel {
    Matrix4 superop;
    Matrix4 choi;
    Matrix2 apply(const Matrix2& rho) const;
};

/// Assemble the logical channel from outcome weights; raises if the result
/// violates complete positivity or trace preservation beyond 1e-5.
LogicalChannel assemble_logical_channel(const OutcomeWeights& weights);

struct FidelityReport {
    double entanglement_fidelity = 0.0;
    double avg_gate_fidelity = 0.0;
    double break_even_avg_gate_fidelity = 0.0;
};

double entanglement_fidelity(const LogicalChannel& channel);

/// Trivial Fock qubit under the same noise channel, without error correction.
FidelityReport break_even_channel(const noise::LindbladParams& noise);

FidelityReport fidelity_report(const LogicalChannel& channel,
                               const noise::LindbladParams& noise);

/// Logical Pauli P_{2a+b} = X^a Z^b, ordered {I, Z, X, XZ}.
Matrix2 logical_pauli(int index);

/// Pauli frame index left by the GKP closest-integer outcome classes
/// (cell1 on the data rail, cell2 on the ancilla rail).
int gkp_frame_for_cells(int cell1, int cell2);

}  // namespace bqec::telecorrect
