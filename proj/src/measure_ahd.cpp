#include "bqec/measure.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace bqec::measure {

namespace {

// Signed log-magnitude value: value = sign * exp(log_mag), sign in {-1,0,+1}.
struct SignedLog {
    double log_mag = -std::numeric_limits<double>::infinity();
    int sign = 0;
};

// log of the moment table M_{u,v} defined by
//   M_{n,m} = (n M_{n-1,m} + m M_{n,m-1}) / (2(n-m)^2 + n + m),
//   M_{n,0} = M_{0,n} = 1/(2n+1)!!.
// All entries are positive, so plain logsumexp suffices.
Eigen::MatrixXd moment_log_table(int umax) {
    Eigen::MatrixXd lm(umax + 1, umax + 1);
    for (int n = 0; n <= umax; ++n) {
        // log (2n+1)!! = lgamma(2n+2) - n log 2 - lgamma(n+1)
        const double ldf = std::lgamma(2.0 * n + 2.0) - n * std::log(2.0) -
                           std::lgamma(double(n) + 1.0);
        lm(n, 0) = -ldf;
        lm(0, n) = -ldf;
    }
    for (int n = 1; n <= umax; ++n)
        for (int m = 1; m <= umax; ++m) {
            const double t1 = std::log(double(n)) + lm(n - 1, m);
            const double t2 = std::log(double(m)) + lm(n, m - 1);
            const double hi = std::max(t1, t2), lo = std::min(t1, t2);
            lm(n, m) = hi + std::log1p(std::exp(lo - hi)) -
                       std::log(2.0 * double(n - m) * double(n - m) + n + m);
        }
    return lm;
}

// Generalized binomial coefficients binom(alpha, l) for l = 0..lmax, signed log.
std::vector<SignedLog> gen_binomial_row(double alpha, int lmax) {
    std::vector<SignedLog> row(lmax + 1);
    row[0] = {0.0, 1};
    double lmag = 0.0;
    int sign = 1;
    for (int l = 1; l <= lmax; ++l) {
        const double factor = (alpha - l + 1) / l;
        if (factor == 0.0 || sign == 0) {
            row[l] = {-std::numeric_limits<double>::infinity(), 0};
            sign = 0;
            continue;
        }
        lmag += std::log(std::abs(factor));
        if (factor < 0.0) sign = -sign;
        row[l] = {lmag, sign};
    }
    return row;
}

// g_m^{(alpha)}(u) = sum_{p <= min(floor(m/2), u)} gamma_{m,p} binom(alpha, u-p)
// with the series index u - p capped at lmax, and
// gamma_{m,p} = sqrt(m!) / (2^p (m-2p)! p!).
std::vector<SignedLog> g_profile(int m, const std::vector<SignedLog>& binom_row, int umax,
                                 int lmax) {
    const int pmax = m / 2;
    std::vector<double> lgam(pmax + 1);
    for (int p = 0; p <= pmax; ++p)
        lgam[p] = 0.5 * std::lgamma(double(m) + 1.0) - p * std::log(2.0) -
                  std::lgamma(double(m - 2 * p) + 1.0) - std::lgamma(double(p) + 1.0);
    std::vector<SignedLog> g(umax + 1);
    std::vector<double> terms;
    std::vector<int> signs;
    for (int u = 0; u <= umax; ++u) {
        terms.clear();
        signs.clear();
        double tmax = -std::numeric_limits<double>::infinity();
        for (int p = std::max(0, u - lmax); p <= std::min(pmax, u); ++p) {
            const SignedLog& b = binom_row[u - p];
            if (b.sign == 0) continue;
            const double t = lgam[p] + b.log_mag;
            terms.push_back(t);
            signs.push_back(b.sign);
            tmax = std::max(tmax, t);
        }
        if (terms.empty()) continue;
        double acc = 0.0;
        for (size_t i = 0; i < terms.size(); ++i) acc += signs[i] * std::exp(terms[i] - tmax);
        if (acc == 0.0) continue;
        g[u].log_mag = tmax + std::log(std::abs(acc));
        g[u].sign = acc > 0 ? 1 : -1;
    }
    return g;
}

double ahd_entry(int m, int n, int lmax, const Eigen::MatrixXd& lm) {
    // H_mn = sum_{u,v} M_{u,v} g_m^{((n-m)/2)}(u) g_n^{((m-n)/2)}(v)
    const int umax = m / 2 + lmax;
    const int vmax = n / 2 + lmax;
    auto bm = gen_binomial_row(0.5 * (n - m), lmax);
    auto bn = gen_binomial_row(0.5 * (m - n), lmax);
    auto gm = g_profile(m, bm, umax, lmax);
    auto gn = g_profile(n, bn, vmax, lmax);
    // Pass 1: locate the dominant term so the signed sum can be rescaled.
    double tmax = -std::numeric_limits<double>::infinity();
    for (int u = 0; u <= umax; ++u) {
        if (gm[u].sign == 0) continue;
        for (int v = 0; v <= vmax; ++v) {
            if (gn[v].sign == 0) continue;
            tmax = std::max(tmax, gm[u].log_mag + gn[v].log_mag + lm(u, v));
        }
    }
    if (!std::isfinite(tmax)) return 0.0;
    double acc = 0.0;
    for (int u = 0; u <= umax; ++u) {
        if (gm[u].sign == 0) continue;
        for (int v = 0; v <= vmax; ++v) {
            if (gn[v].sign == 0) continue;
            const double t = gm[u].log_mag + gn[v].log_mag + lm(u, v) - tmax;
            if (t < -45.0) continue;
            acc += gm[u].sign * gn[v].sign * std::exp(t);
        }
    }
    return std::exp(tmax) * acc;
}

RealMatrix ahd_matrix(int dim, int lmax) {
    const int umax = (dim - 1) / 2 + lmax;
    Eigen::MatrixXd lm = moment_log_table(umax);
    RealMatrix h(dim, dim);
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n <= m; ++n) {
            const double v = ahd_entry(m, n, lmax, lm);
            h(m, n) = v;
            h(n, m) = v;
        }
    return h;
}

}  // namespace

double ahd_moment(int n, int m) {
    if (n < 0 || m < 0) throw std::invalid_argument("ahd_moment: indices must be >= 0");
    Eigen::MatrixXd lm = moment_log_table(std::max(n, m));
    return std::exp(lm(n, m));
}

HMatrix h_adaptive_homodyne(const TruncatedSpace& space, int lmax) {
    const int d = space.dim;
    // Default 2*dim, floored where the series tail is still in its slow
    // leading regime.
    if (lmax < 0) lmax = std::max(2 * d, 48);
    if (lmax < d)
        throw std::invalid_argument("h_adaptive_homodyne: lmax must cover the Fock range");

    static std::mutex mu;
    static std::map<std::pair<int, int>, RealMatrix> memo;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find({d, lmax});
        if (it != memo.end()) return HMatrix{Scheme::AdaptiveHomodyne, it->second};
    }

    RealMatrix h = ahd_matrix(d, lmax);
    RealMatrix h2 = ahd_matrix(d, 2 * lmax);
    const double drift = (h - h2).cwiseAbs().maxCoeff();
    if (drift > 1e-8) {
        char msg[96];
        std::snprintf(msg, sizeof msg,
                      "h_adaptive_homodyne: series not converged, doubling drift %.3e", drift);
        throw std::runtime_error(msg);
    }
    {
        std::lock_guard<std::mutex> lock(mu);
        memo[{d, lmax}] = h2;
    }
    return HMatrix{Scheme::AdaptiveHomodyne, std::move(h2)};
}

}  // namespace bqec::measure
