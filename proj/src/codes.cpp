#include "bqec/codes.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace bqec::codes {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;

Vector normalized(Vector v) {
    const double n = v.norm();
    if (n == 0.0) throw std::runtime_error("codes: cannot normalize zero vector");
    return v / n;
}

void fill_dual_basis(CodeWords& cw) {
    cw.plus = normalized(Vector((cw.zero + cw.one) / std::sqrt(2.0)));
    cw.minus = normalized(Vector((cw.zero - cw.one) / std::sqrt(2.0)));
}

double log_choose(int n, int k) {
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Cat: return "cat";
        case Family::Bin: return "bin";
        case Family::Gkp: return "gkp";
        case Family::Trivial: return "trivial";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "cat") return Family::Cat;
    if (name == "bin") return Family::Bin;
    if (name == "gkp") return Family::Gkp;
    if (name == "trivial") return Family::Trivial;
    throw std::invalid_argument("unknown code family: " + name);
}

int required_cat_dim(int order, double alpha) {
    const double a2 = alpha * alpha;
    int d = std::max(2 * order + 2, int(std::ceil(a2)) + 2);
    while (fock::coherent_tail_weight(a2, d) >= 1e-10) ++d;
    // Words live on the stride-N lattice; round up to cover a full period.
    const int stride = 2 * order;
    d = ((d + stride - 1) / stride) * stride + 1;
    return d;
}

CodeWords cat_codewords(const RotationCodeSpec& spec) {
    if (spec.family != Family::Cat) throw std::invalid_argument("cat_codewords: wrong family");
    if (spec.alpha <= 0.0) throw std::invalid_argument("cat_codewords: alpha must be > 0");
    if (spec.order < 1) throw std::invalid_argument("cat_codewords: order must be >= 1");
    const int d = spec.space.dim;
    const int N = spec.order;
    const double a2 = spec.alpha * spec.alpha;
    if (fock::coherent_tail_weight(a2, d) >= 1e-10)
        throw std::invalid_argument("cat_codewords: cutoff " + std::to_string(d) +
                                    " inadequate, need dim >= " +
                                    std::to_string(required_cat_dim(N, spec.alpha)));

    // Fock lattice route: the 2N-fold rotated superposition of |alpha>
    // projects onto n = 0 (mod 2N) for the zero word and n = N (mod 2N) for
    // the one word, with coefficients proportional to alpha^n / sqrt(n!).
    const double la = std::log(spec.alpha);
    CodeWords cw;
    cw.family = Family::Cat;
    cw.order = N;
    cw.parameter = spec.alpha;
    cw.dim = d;
    for (int mu = 0; mu < 2; ++mu) {
        Vector v = Vector::Zero(d);
        double lmax = -std::numeric_limits<double>::infinity();
        std::vector<double> lmag;
        std::vector<int> idx;
        for (int n = mu * N; n < d; n += 2 * N) {
            double l = n * la - 0.5 * std::lgamma(double(n) + 1.0);
            lmag.push_back(l);
            idx.push_back(n);
            lmax = std::max(lmax, l);
        }
        for (size_t i = 0; i < idx.size(); ++i) v(idx[i]) = std::exp(lmag[i] - lmax);
        v = normalized(v);
        (mu == 0 ? cw.zero : cw.one) = v;
    }
    fill_dual_basis(cw);
    return cw;
}

CodeWords bin_codewords(const RotationCodeSpec& spec) {
    if (spec.family != Family::Bin) throw std::invalid_argument("bin_codewords: wrong family");
    if (spec.truncation < 2) throw std::invalid_argument("bin_codewords: K must be >= 2");
    if (spec.order < 1) throw std::invalid_argument("bin_codewords: order must be >= 1");
    const int d = spec.space.dim;
    const int N = spec.order;
    const int K = spec.truncation;
    if (K * N >= d)
        throw std::invalid_argument("bin_codewords: cutoff inadequate, need dim >= " +
                                    std::to_string(K * N + 1));
    CodeWords cw;
    cw.family = Family::Bin;
    cw.order = N;
    cw.parameter = double(K);
    cw.dim = d;
    // Both parities of p in [0, K] carry total weight 2^{K-1}, so each word
    // is exactly normalized.
    for (int mu = 0; mu < 2; ++mu) {
        Vector v = Vector::Zero(d);
        for (int p = mu; p <= K; p += 2)
            v(p * N) = std::exp(0.5 * (log_choose(K, p) - (K - 1) * std::log(2.0)));
        (mu == 0 ? cw.zero : cw.one) = v;
    }
    fill_dual_basis(cw);
    return cw;
}

CodeWords trivial_codewords(const TruncatedSpace& space) {
    CodeWords cw;
    cw.family = Family::Trivial;
    cw.order = 1;
    cw.parameter = 0.0;
    cw.dim = space.dim;
    cw.zero = fock::fock_state(0, space);
    cw.one = fock::fock_state(1, space);
    fill_dual_basis(cw);
    return cw;
}

namespace {

// Lattice of ideal peak positions (2s + mu) sqrt(pi) kept while the Gaussian
// envelope amplitude exp(-tanh(delta^2) x^2 / 2) stays above 1e-14 of its
// maximum.
std::vector<double> gkp_peak_positions(double delta, int mu) {
    const double t = std::tanh(delta * delta);
    const double xmax = std::sqrt(2.0 * 14.0 * std::log(10.0) / t);
    std::vector<double> xs;
    for (int s = -int(std::ceil(xmax / (2.0 * kSqrtPi))) - 1;; ++s) {
        const double x = (2.0 * s + mu) * kSqrtPi;
        if (x > xmax) break;
        if (x >= -xmax) xs.push_back(x);
    }
    if (xs.empty()) throw std::runtime_error("gkp: empty peak lattice");
    return xs;
}

void check_gkp_cutoff(const Vector& word, double delta, int dim) {
    const int buffer = std::max(2, dim / 20);
    double tail = 0.0;
    for (int n = dim - buffer; n < dim; ++n) tail += std::norm(word(n));
    if (tail > 1e-9) {
        const int suggested =
            int(std::ceil(std::log(1.0 / (1e-12 * 2.0 * delta * delta)) / (2.0 * delta * delta)));
        throw std::invalid_argument("gkp_codewords: cutoff inadequate for delta=" +
                                    std::to_string(delta) + ", suggest dim >= " +
                                    std::to_string(suggested));
    }
}

}  // namespace

CodeWords gkp_codewords(const GkpSpec& spec) {
    if (spec.delta <= 0.0) throw std::invalid_argument("gkp_codewords: delta must be > 0");
    const int d = spec.space.dim;
    CodeWords cw;
    cw.family = Family::Gkp;
    cw.order = 1;
    cw.parameter = spec.delta;
    cw.dim = d;
    const double d2 = spec.delta * spec.delta;
    std::vector<double> psi(d);
    for (int mu = 0; mu < 2; ++mu) {
        Vector v = Vector::Zero(d);
        for (double x : gkp_peak_positions(spec.delta, mu)) {
            fock::hermite_functions(x, d, psi.data());
            for (int n = 0; n < d; ++n) v(n) += psi[n];
        }
        // Envelope e^{-delta^2 (n + 1/2)} applied to the ideal peak sum.
        for (int n = 0; n < d; ++n) v(n) *= std::exp(-d2 * (n + 0.5));
        v = normalized(v);
        check_gkp_cutoff(v, spec.delta, d);
        (mu == 0 ? cw.zero : cw.one) = v;
    }
    fill_dual_basis(cw);
    return cw;
}

CodeWords gkp_codewords_displaced_squeezed(const GkpSpec& spec) {
    if (spec.delta <= 0.0) throw std::invalid_argument("gkp: delta must be > 0");
    const int d = spec.space.dim;
    const double d2 = spec.delta * spec.delta;
    const double t = std::tanh(d2);
    // Each regularized peak is the squeezed state S(r)|0> with x-variance
    // tanh(delta^2)/2, displaced to x0 / cosh(delta^2), and weighted by
    // exp(-(pi/2) tanh(delta^2) (2s+mu)^2).
    const double r = 0.5 * std::log(t);
    const Vector sq = fock::squeeze(r, spec.space) * fock::fock_state(0, spec.space);
    CodeWords cw;
    cw.family = Family::Gkp;
    cw.order = 1;
    cw.parameter = spec.delta;
    cw.dim = d;
    for (int mu = 0; mu < 2; ++mu) {
        Vector v = Vector::Zero(d);
        for (double x : gkp_peak_positions(spec.delta, mu)) {
            const double w = std::exp(-0.5 * t * x * x);
            const Complex beta = x / (std::sqrt(2.0) * std::cosh(d2));
            v += w * (fock::displacement(beta, spec.space) * sq);
        }
        (mu == 0 ? cw.zero : cw.one) = normalized(v);
    }
    fill_dual_basis(cw);
    return cw;
}

double mean_photon_number(const CodeWords& cw) {
    double acc = 0.0;
    for (int n = 0; n < cw.dim; ++n)
        acc += n * (std::norm(cw.zero(n)) + std::norm(cw.one(n)));
    return 0.5 * acc;
}

double squeezing_db(double delta) {
    if (delta <= 0.0) throw std::invalid_argument("squeezing_db: delta must be > 0");
    return 10.0 * std::log10(1.0 / (2.0 * delta * delta));
}

Matrix error_operator(int k, double theta, const TruncatedSpace& space) {
    const int d = space.dim;
    if (std::abs(k) >= d) throw std::invalid_argument("error_operator: |k| must be < dim");
    auto ops = fock::ladder_operators(space);
    Matrix shift = Matrix::Identity(d, d);
    const int a = std::abs(k);
    for (int i = 0; i < a; ++i) shift = (k < 0) ? Matrix(ops.a * shift) : Matrix(ops.a_dag * shift);
    Matrix rot = fock::rotation(k < 0 ? theta : -theta, space);
    return (k < 0) ? Matrix(rot * shift) : Matrix(shift * rot);
}

std::vector<Complex> lattice_coefficients(const CodeWords& cw) {
    const int N = cw.order;
    const int count = (cw.dim - 1) / N + 1;
    std::vector<Complex> f(count);
    const double s2 = std::sqrt(2.0);
    for (int k = 0; k < count; ++k) f[k] = s2 * cw.plus(k * N);
    return f;
}

namespace {

nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
    return arr;
}

Vector vector_from_json(const nlohmann::json& arr) {
    Vector v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i)
        v(i) = Complex(arr[i][0].get<double>(), arr[i][1].get<double>());
    return v;
}

}  // namespace

nlohmann::json to_json(const CodeWords& cw) {
    return nlohmann::json{{"family", family_name(cw.family)},
                          {"order", cw.order},
                          {"parameter", cw.parameter},
                          {"dim", cw.dim},
                          {"zero", vector_to_json(cw.zero)},
                          {"one", vector_to_json(cw.one)},
                          {"plus", vector_to_json(cw.plus)},
                          {"minus", vector_to_json(cw.minus)}};
}

CodeWords codewords_from_json(const nlohmann::json& j) {
    CodeWords cw;
    cw.family = family_from_name(j.at("family").get<std::string>());
    cw.order = j.at("order").get<int>();
    cw.parameter = j.at("parameter").get<double>();
    cw.dim = j.at("dim").get<int>();
    cw.zero = vector_from_json(j.at("zero"));
    cw.one = vector_from_json(j.at("one"));
    cw.plus = vector_from_json(j.at("plus"));
    cw.minus = vector_from_json(j.at("minus"));
    return cw;
}

}  // namespace bqec::codes
