#include "bqec/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace bqec::fock {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

LadderOperators ladder_operators(const TruncatedSpace& space) {
    const int d = space.dim;
    LadderOperators ops{Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
    for (int n = 1; n < d; ++n) ops.a(n - 1, n) = std::sqrt(double(n));
    ops.a_dag = ops.a.adjoint();
    for (int n = 0; n < d; ++n) ops.n(n, n) = double(n);
    return ops;
}

Matrix rotation(double theta, const TruncatedSpace& space) {
    const int d = space.dim;
    Matrix r = Matrix::Zero(d, d);
    for (int n = 0; n < d; ++n) r(n, n) = std::polar(1.0, theta * n);
    return r;
}

Matrix unitary_from_hermitian_generator(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& vals = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    Vector phases(vals.size());
    for (int i = 0; i < vals.size(); ++i) phases(i) = std::polar(1.0, vals(i));
    return vecs * phases.asDiagonal() * vecs.adjoint();
}

Matrix displacement(Complex alpha, const TruncatedSpace& space) {
    const int d = space.dim;
    if (alpha == Complex(0.0, 0.0)) return Matrix::Identity(d, d);
    auto ops = ladder_operators(space);
    // alpha a^dag - conj(alpha) a = i H with H Hermitian.
    Matrix h = Complex(0, -1) * (alpha * ops.a_dag - std::conj(alpha) * ops.a);
    return unitary_from_hermitian_generator(h);
}

Matrix squeeze(double r, const TruncatedSpace& space) {
    const int d = space.dim;
    if (r == 0.0) return Matrix::Identity(d, d);
    auto ops = ladder_operators(space);
    Matrix gen = 0.5 * r * (ops.a_dag * ops.a_dag - ops.a * ops.a);
    Matrix h = Complex(0, -1) * gen;
    return unitary_from_hermitian_generator(h);
}

Vector fock_state(int n, const TruncatedSpace& space) {
    if (n < 0 || n >= space.dim) throw std::invalid_argument("fock_state: index out of range");
    Vector v = Vector::Zero(space.dim);
    v(n) = 1.0;
    return v;
}

Vector coherent_state(Complex alpha, const TruncatedSpace& space) {
    const int d = space.dim;
    Vector v(d);
    const double a2 = std::norm(alpha);
    if (a2 == 0.0) return fock_state(0, space);
    const double la = 0.5 * std::log(a2);
    const double phi = std::arg(alpha);
    for (int n = 0; n < d; ++n) {
        double lmag = -0.5 * a2 + n * la - 0.5 * std::lgamma(double(n) + 1.0);
        v(n) = std::polar(std::exp(lmag), n * phi);
    }
    return v;
}

double coherent_tail_weight(double abs_alpha_sq, int dim) {
    if (abs_alpha_sq == 0.0) return 0.0;
    // Upper Poisson tail P(N >= dim) for mean abs_alpha_sq, summed directly.
    double tail = 0.0;
    const double lmean = std::log(abs_alpha_sq);
    for (int n = dim; n < dim + 400; ++n) {
        double lp = -abs_alpha_sq + n * lmean - std::lgamma(double(n) + 1.0);
        double p = std::exp(lp);
        tail += p;
        if (p < 1e-18 && n > dim + 4) break;
    }
    return tail;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double unitarity_defect(const Matrix& u, int buffer) {
    Matrix g = u.adjoint() * u;
    const int d = int(g.rows());
    const int sub = std::max(1, d - buffer);
    Matrix block = g.topLeftCorner(sub, sub) - Matrix::Identity(sub, sub);
    return max_abs(block);
}

// ---------------------------------------------------------------------------

Matrix TwoModeUnitary::dense() const {
    const int da = dim_a(), db = dim_b();
    Matrix out(da * db, da * db);
    Matrix psi = Matrix::Zero(da, db);
    for (int n = 0; n < da; ++n)
        for (int m = 0; m < db; ++m) {
            psi(n, m) = 1.0;
            Matrix col = apply(psi);
            psi(n, m) = 0.0;
            for (int p = 0; p < da; ++p)
                for (int q = 0; q < db; ++q) out(p * db + q, n * db + m) = col(p, q);
        }
    return out;
}

namespace {

// Beam splitter stored block-diagonally over total photon number N_tot; the
// block on the strip {(n, N_tot-n)} is the exponential of a tridiagonal
// Hermitian generator.
class BlockBeamSplitter final : public TwoModeUnitary {
  public:
    BlockBeamSplitter(double theta, int da, int db, BsConvention conv)
        : da_(da), db_(db) {
        const int nmax = da + db - 2;
        blocks_.reserve(nmax + 1);
        for (int N = 0; N <= nmax; ++N) {
            const int lo = std::max(0, N - db + 1);
            const int hi = std::min(da - 1, N);
            const int sz = hi - lo + 1;
            Matrix h = Matrix::Zero(sz, sz);
            for (int i = 0; i + 1 < sz; ++i) {
                const int n = lo + i;        // photons in mode a
                const int m = N - n;         // photons in mode b
                // <n+1, m-1| a^dag b |n, m> = sqrt((n+1) m)
                const double c = std::sqrt(double(n + 1) * double(m));
                if (conv == BsConvention::PhasePreserving) {
                    // generator theta (a^dag b + b^dag a); H Hermitian real.
                    h(i + 1, i) = theta * c;
                    h(i, i + 1) = theta * c;
                } else {
                    // generator theta (a^dag b - a b^dag) = i H,
                    // H = -i theta (a^dag b - a b^dag), Hermitian.
                    h(i + 1, i) = Complex(0, -1) * theta * c;
                    h(i, i + 1) = Complex(0, 1) * theta * c;
                }
            }
            blocks_.push_back(unitary_from_hermitian_generator(h));
            los_.push_back(lo);
        }
    }

    int dim_a() const override { return da_; }
    int dim_b() const override { return db_; }

    Matrix apply(const Matrix& psi, bool adjoint) const override {
        if (psi.rows() != da_ || psi.cols() != db_)
            throw std::invalid_argument("TwoModeUnitary::apply: shape mismatch");
        Matrix out = Matrix::Zero(da_, db_);
        for (size_t N = 0; N < blocks_.size(); ++N) {
            const Matrix& u = blocks_[N];
            const int lo = los_[N];
            const int sz = int(u.rows());
            Vector strip(sz);
            for (int i = 0; i < sz; ++i) strip(i) = psi(lo + i, int(N) - (lo + i));
            Vector res = adjoint ? Vector(u.adjoint() * strip) : Vector(u * strip);
            for (int i = 0; i < sz; ++i) out(lo + i, int(N) - (lo + i)) = res(i);
        }
        return out;
    }

  private:
    int da_, db_;
    std::vector<Matrix> blocks_;
    std::vector<int> los_;
};

// Product of factors applied left to right on kets.
class ComposedTwoMode final : public TwoModeUnitary {
  public:
    ComposedTwoMode(int da, int db) : da_(da), db_(db) {}
    int dim_a() const override { return da_; }
    int dim_b() const override { return db_; }

    void push_two_mode(std::shared_ptr<TwoModeUnitary> u) { steps_.push_back({std::move(u), {}, {}}); }
    void push_local(Matrix ua, Matrix ub) { steps_.push_back({nullptr, std::move(ua), std::move(ub)}); }

    Matrix apply(const Matrix& psi, bool adjoint) const override {
        Matrix cur = psi;
        if (!adjoint) {
            for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) cur = apply_step(*it, cur, false);
        } else {
            for (const auto& st : steps_) cur = apply_step(st, cur, true);
        }
        return cur;
    }

  private:
    struct Step {
        std::shared_ptr<TwoModeUnitary> joint;
        Matrix ua, ub;
    };
    Matrix apply_step(const Step& st, const Matrix& psi, bool adjoint) const {
        if (st.joint) return st.joint->apply(psi, adjoint);
        if (!adjoint) return st.ua * psi * st.ub.transpose();
        return st.ua.adjoint() * psi * st.ub.conjugate();
    }
    int da_, db_;
    // steps_ listed leftmost factor first: U = steps_[0] * steps_[1] * ...
    std::vector<Step> steps_;
};

}  // namespace

std::unique_ptr<TwoModeUnitary> beamsplitter(double theta, const TruncatedSpace& a,
                                             const TruncatedSpace& b, BsConvention convention) {
    return std::make_unique<BlockBeamSplitter>(theta, a.dim, b.dim, convention);
}

std::unique_ptr<TwoModeUnitary> cz_gate(double s, const TruncatedSpace& a,
                                        const TruncatedSpace& b) {
    auto composed = std::make_unique<ComposedTwoMode>(a.dim, b.dim);
    if (s == 0.0) return composed;
    const double r = std::asinh(0.5 * s);
    const double theta = std::acos(1.0 / std::sqrt(1.0 + std::exp(2.0 * r)));
    Matrix sq_a = squeeze(r, a);
    Matrix sq_b = squeeze(r, b);
    composed->push_two_mode(std::shared_ptr<TwoModeUnitary>(
        beamsplitter(theta, a, b, BsConvention::PhasePreserving)));
    composed->push_local(std::move(sq_a), std::move(sq_b));
    composed->push_two_mode(std::shared_ptr<TwoModeUnitary>(
        beamsplitter(theta - 0.5 * kPi, a, b, BsConvention::PhasePreserving)));
    return composed;
}

Complex CrotGate::phase(int n, int m) const {
    return std::polar(1.0, kPi * double(n) * double(m) / (double(order_n) * double(order_m)));
}

double CrotGate::partner_angle(int n) const {
    return kPi * double(n) / (double(order_n) * double(order_m));
}

void CrotGate::apply_in_place(Matrix& psi, bool adjoint) const {
    const double sign = adjoint ? -1.0 : 1.0;
    for (int n = 0; n < psi.rows(); ++n)
        for (int m = 0; m < psi.cols(); ++m)
            psi(n, m) *= std::polar(1.0, sign * kPi * double(n) * double(m) /
                                             (double(order_n) * double(order_m)));
}

// ---------------------------------------------------------------------------

void hermite_functions(double x, int nmax, double* out) {
    if (nmax <= 0) return;
    const double psi0 = std::exp(-0.5 * x * x) * std::pow(kPi, -0.25);
    out[0] = psi0;
    if (nmax == 1) return;
    out[1] = std::sqrt(2.0) * x * psi0;
    for (int n = 2; n < nmax; ++n)
        out[n] = x * std::sqrt(2.0 / n) * out[n - 1] - std::sqrt(double(n - 1) / n) * out[n - 2];
}

QuadratureTransform quadrature_transform(const RealVector& grid, const TruncatedSpace& space,
                                         Quadrature quadrature) {
    for (int i = 1; i < grid.size(); ++i)
        if (grid(i) <= grid(i - 1))
            throw std::invalid_argument("quadrature_transform: grid must be strictly increasing");
    const int d = space.dim;
    QuadratureTransform t{grid, Matrix(grid.size(), d), quadrature};
    std::vector<double> row(d);
    for (int g = 0; g < grid.size(); ++g) {
        hermite_functions(grid(g), d, row.data());
        for (int n = 0; n < d; ++n) {
            if (quadrature == Quadrature::X) {
                t.amplitudes(g, n) = row[n];
            } else {
                // <p|n> = i^n psi_n(p)
                static const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
                t.amplitudes(g, n) = i_pow[n & 3] * row[n];
            }
        }
    }
    return t;
}

RealVector uniform_grid(double halfwidth, int points) {
    RealVector g(points);
    for (int i = 0; i < points; ++i)
        g(i) = -halfwidth + 2.0 * halfwidth * double(i) / double(points - 1);
    return g;
}

}  // namespace bqec::fock
