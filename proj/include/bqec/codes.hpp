#pragma once

#include "bqec/fock.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>

namespace bqec::codes {

using fock::Complex;
using fock::Matrix;
using fock::TruncatedSpace;
using fock::Vector;

enum class Family { Cat, Bin, Gkp, Trivial };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Rotation-code description: an order-N cat code with coherent amplitude
/// alpha, or an order-N binomial code with truncation parameter K.
struct RotationCodeSpec {
    Family family;  // Cat or Bin
    int order;      // N
    double alpha;   // cat amplitude (> 0)
    int truncation; // bin K (>= 2)
    TruncatedSpace space;

    static RotationCodeSpec cat(int order, double alpha, TruncatedSpace space) {
        return RotationCodeSpec{Family::Cat, order, alpha, 0, space};
    }
    static RotationCodeSpec bin(int order, int truncation, TruncatedSpace space) {
        return RotationCodeSpec{Family::Bin, order, 0.0, truncation, space};
    }
};

struct GkpSpec {
    double delta;  // envelope regularization, > 0
    TruncatedSpace space;
};

/// The four logical states of an encoding as truncated Fock coefficient
/// vectors.  plus/minus are the renormalized superpositions of zero/one.
struct CodeWords {
    Vector zero, one, plus, minus;
    Family family = Family::Trivial;
    int order = 1;        // rotation order N (1 for GKP/trivial)
    double parameter = 0; // alpha, K, or delta
    int dim = 0;

    /// Fock support stride of the computational words (N for rotation codes).
    int support_stride() const { return order; }
};

CodeWords cat_codewords(const RotationCodeSpec& spec);
CodeWords bin_codewords(const RotationCodeSpec& spec);
CodeWords gkp_codewords(const GkpSpec& spec);
CodeWords trivial_codewords(const TruncatedSpace& space);

/// Alternative GKP construction as a weighted sum of squeezed displaced
/// states; agrees with gkp_codewords in fidelity to better than 1e-8.
CodeWords gkp_codewords_displaced_squeezed(const GkpSpec& spec);

/// (<zero|n|zero> + <one|n|one>)/2.
double mean_photon_number(const CodeWords& cw);

/// 10 log10(1/(2 delta^2)).
double squeezing_db(double delta);

/// Single-mode error-operator basis element:
///   k <  0:  e^{i theta n} a^{|k|}
///   k >= 0:  (a^dag)^{k} e^{-i theta n}
Matrix error_operator(int k, double theta, const TruncatedSpace& space);

/// Dual-basis lattice coefficients f_k of a rotation code, defined by
/// |+_N> = (1/sqrt 2) sum_k f_{k} |kN>.  Length floor((dim-1)/N) + 1.
std::vector<Complex> lattice_coefficients(const CodeWords& cw);

/// Smallest cutoff for which a cat code keeps tail weight below 1e-10.
int required_cat_dim(int order, double alpha);

nlohmann::json to_json(const CodeWords& cw);
CodeWords codewords_from_json(const nlohmann::json& j);

}  // namespace bqec::codes
