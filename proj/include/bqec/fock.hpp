#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

namespace bqec::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// A single bosonic mode truncated to Fock states |0>..|dim-1>.
struct TruncatedSpace {
    int dim;
    explicit TruncatedSpace(int d) : dim(d) {
        if (d < 2) throw std::invalid_argument("TruncatedSpace: dim must be >= 2");
    }
};

/// Number of top levels excluded from physical-validity checks.
/// Truncation artifacts are confined near the cutoff.
inline int validity_buffer(int dim) { return (dim + 9) / 10; }

struct LadderOperators {
    Matrix a;      // annihilation, <n-1|a|n> = sqrt(n)
    Matrix a_dag;  // creation
    Matrix n;      // number operator, diagonal 0..dim-1
};

LadderOperators ladder_operators(const TruncatedSpace& space);

/// Diagonal rotation exp(i theta n). rotation(2*pi/N) is the order-N
/// symmetry operator, rotation(pi/N) the logical Z of an order-N code.
Matrix rotation(double theta, const TruncatedSpace& space);

/// exp(alpha a^dag - conj(alpha) a). Warns (returns via diagnostic) when the
/// displaced vacuum has tail weight beyond the cutoff above 1e-10; the caller
/// is responsible for keeping |alpha|^2 well below dim.
Matrix displacement(Complex alpha, const TruncatedSpace& space);

/// exp[(r/2)(a^dag^2 - a^2)].  Var_x(S(r)|0>) = e^{2r}/2 with x = (a+a^dag)/sqrt(2).
Matrix squeeze(double r, const TruncatedSpace& space);

/// Fock basis vector |n>.
Vector fock_state(int n, const TruncatedSpace& space);

/// Coherent state, evaluated in log space so large |alpha| stays stable.
Vector coherent_state(Complex alpha, const TruncatedSpace& space);

/// Weight of the coherent-state Poisson tail beyond the cutoff.
double coherent_tail_weight(double abs_alpha_sq, int dim);

/// exp(i H) for Hermitian H via eigendecomposition.
Matrix unitary_from_hermitian_generator(const Matrix& h);

double max_abs(const Matrix& m);

/// ||U^dag U - I||_max restricted to rows/columns with index < dim - buffer.
double unitarity_defect(const Matrix& u, int buffer);

// ---------------------------------------------------------------------------
// Two-mode unitaries.  Joint pure states are stored as dimA x dimB matrices
// psi(n_a, n_b); operators act block-diagonally in total photon number where
// that structure exists.

class TwoModeUnitary {
  public:
    virtual ~TwoModeUnitary() = default;
    virtual int dim_a() const = 0;
    virtual int dim_b() const = 0;
    /// U|psi> (or U^dag|psi>) for psi arranged as dim_a x dim_b.
    virtual Matrix apply(const Matrix& psi, bool adjoint = false) const = 0;
    /// Dense (dimA*dimB)^2 matrix, index n_a*dimB + n_b. Small dims only.
    Matrix dense() const;
};

enum class BsConvention {
    LossReservoir,     // exp[theta (a^dag b - a b^dag)]
    PhasePreserving,   // exp[i theta (a^dag b + b^dag a)]
};

/// Beam splitter; for BsConvention::LossReservoir the transmissivity is
/// eta = cos^2(theta), mapping |alpha>|0> -> |sqrt(eta) alpha>|-sqrt(1-eta) alpha>.
std::unique_ptr<TwoModeUnitary> beamsplitter(double theta, const TruncatedSpace& a,
                                             const TruncatedSpace& b, BsConvention convention);

/// exp(i s x1 x2), realized as BS(theta) (S(r) x S(r)) BS(theta - pi/2)
/// with s = 2 sinh(r), cos(theta) = (1+e^{2r})^{-1/2}.
std::unique_ptr<TwoModeUnitary> cz_gate(double s, const TruncatedSpace& a,
                                        const TruncatedSpace& b);

/// Controlled rotation exp(i pi n (x) n / (NM)).  Exactly diagonal in the
/// joint Fock basis, therefore kept functional and never materialized densely.
struct CrotGate {
    int order_n;
    int order_m;
    CrotGate(int n_order, int m_order) : order_n(n_order), order_m(m_order) {
        if (n_order < 1 || m_order < 1)
            throw std::invalid_argument("CrotGate: orders must be >= 1");
    }
    Complex phase(int n, int m) const;
    /// Rotation angle imprinted on the partner mode by Fock index n.
    double partner_angle(int n) const;
    void apply_in_place(Matrix& psi, bool adjoint = false) const;
};

// ---------------------------------------------------------------------------
// Quadrature transforms.

enum class Quadrature { X, P };

/// Samples of <g|n> on a real grid.  Row g, column n.  For Quadrature::P the
/// convention is <p|n> = i^n psi_n(p) with psi_n the n-th Hermite function.
struct QuadratureTransform {
    RealVector grid;
    Matrix amplitudes;
    Quadrature quadrature;
};

QuadratureTransform quadrature_transform(const RealVector& grid, const TruncatedSpace& space,
                                         Quadrature quadrature);

/// Hermite functions psi_0..psi_{nmax-1} at x, by the normalized three-term
/// recurrence (stable for n up to several hundred).
void hermite_functions(double x, int nmax, double* out);

/// Uniform grid of `points` samples covering [-halfwidth, halfwidth].
RealVector uniform_grid(double halfwidth, int points);

}  // namespace bqec::fock
