#include "bqec/telecorrect.hpp"

#include <Eigen/SVD>
#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <thread>

namespace bqec::telecorrect {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;

// Shared FFTW plan per transform size (backward sign, e^{+i 2 pi k j / G}).
fftw_plan grid_plan(int g) {
    static std::mutex mu;
    static std::map<int, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find(g);
    if (it != plans.end()) return it->second;
    std::vector<std::complex<double>> buf(g);
    fftw_plan p = fftw_plan_dft_1d(g, reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()),
                                   FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans[g] = p;
    return p;
}

struct GkpGrid {
    int g;
    double step;      // sqrt(2 pi / g), so the centered DFT is exact
    double halfwidth; // g/2 * step
    Eigen::VectorXd points;
};

GkpGrid make_grid(int g) {
    if (g < 64 || (g & (g - 1)) != 0)
        throw std::invalid_argument("gkp_outcome_weights: grid_points must be a power of two >= 64");
    GkpGrid grid;
    grid.g = g;
    grid.step = std::sqrt(2.0 * kPi / g);
    grid.halfwidth = 0.5 * g * grid.step;
    grid.points.resize(g);
    for (int j = 0; j < g; ++j) grid.points(j) = (j - g / 2) * grid.step;
    return grid;
}

// Soft logical-bin-0 weight on the data rail once the efficiency channel is
// pushed into the p1 statistics: an affine-Gaussian map of the marginal.
Eigen::VectorXd data_bin0_weights(const GkpGrid& grid, double eta, EfficiencyModel model) {
    Eigen::VectorXd w(grid.g);
    double scale = 1.0, noise_sq = 0.0;
    if (eta < 1.0) {
        if (model == EfficiencyModel::Amplified) {
            noise_sq = (1.0 - eta) / eta;
        } else {
            scale = std::sqrt(eta);
            noise_sq = 0.5 * (1.0 - eta);
        }
    }
    for (int k = 0; k < grid.g; ++k) {
        const double p = scale * grid.points(k);
        if (noise_sq == 0.0) {
            const long r = std::lround(grid.points(k) / kSqrtPi);
            w(k) = (((r % 2) + 2) % 2) == 0 ? 1.0 : 0.0;
            continue;
        }
        // Boundaries on the (possibly rescaled) lattice; segment centers at
        // even multiples of scale*sqrt(pi).
        const double inv = 1.0 / std::sqrt(2.0 * noise_sq);
        const int nc = int(std::lround(p / (2.0 * scale * kSqrtPi)));
        double acc = 0.0;
        const int reach = 2 + int(std::ceil(4.0 * std::sqrt(noise_sq) / (scale * kSqrtPi)));
        for (int n = nc - reach; n <= nc + reach; ++n) {
            const double lo = scale * (2.0 * n - 0.5) * kSqrtPi;
            const double hi = scale * (2.0 * n + 0.5) * kSqrtPi;
            acc += 0.5 * (std::erf((hi - p) * inv) - std::erf((lo - p) * inv));
        }
        w(k) = std::min(1.0, std::max(0.0, acc));
    }
    return w;
}

struct RankTerm {
    double weight;
    Vector u, v;
};

std::vector<RankTerm> svd_terms(const Matrix& x) {
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    double kept = 0.0, total = 0.0;
    std::vector<RankTerm> terms;
    for (int r = 0; r < s.size(); ++r) {
        total += s(r);
        if (s(r) >= 1e-10 * smax) {
            terms.push_back({s(r), svd.matrixU().col(r), svd.matrixV().col(r)});
            kept += s(r);
        }
    }
    if (total - kept > 1e-8 * total)
        throw std::runtime_error("gkp_outcome_weights: SVD rank truncation error above 1e-8");
    return terms;
}

struct FieldWorkspace {
    Eigen::MatrixXcd phi_u0, phi_u1, phi_v0, phi_v1;
};

// Joint p-amplitude <p1 p2| CZ |vec, anc_dual>, columns indexed by p2:
//   Phi(p1, p2) = (1/sqrt(2 pi)) int dx e^{+i p1 x} vec_x(x) y_p(p2 - x).
void joint_field(const GkpGrid& grid, const Eigen::VectorXcd& vec_x,
                 const Eigen::VectorXcd& y_doubled, Eigen::MatrixXcd& out) {
    const int g = grid.g;
    out.resize(g, g);
    fftw_plan plan = grid_plan(g);
    std::vector<std::complex<double>> buf(g);
    const double norm = grid.step / std::sqrt(2.0 * kPi);
    // Centering: e^{i p_k x_j} = e^{i 2pi kj/g} (-1)^{k+j} e^{i pi g/2}.
    const Complex global = std::polar(1.0, 0.5 * kPi * g);
    for (int k2 = 0; k2 < g; ++k2) {
        for (int j = 0; j < g; ++j) {
            Complex f = vec_x(j) * y_doubled(k2 - j + g - 1);
            if (j & 1) f = -f;
            buf[j] = f;
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()),
                         reinterpret_cast<fftw_complex*>(buf.data()));
        for (int k1 = 0; k1 < g; ++k1) {
            Complex v = buf[k1] * norm * global;
            if (k1 & 1) v = -v;
            out(k1, k2) = v;
        }
    }
}

}  // namespace

OutcomeWeights gkp_outcome_weights(const GkpCircuitConfig& cfg) {
    if (cfg.eta <= 0.0 || cfg.eta > 1.0)
        throw std::invalid_argument("gkp_outcome_weights: eta in (0,1]");
    const fock::TruncatedSpace space(cfg.dim);
    const codes::CodeWords data = codes::gkp_codewords({cfg.delta_data, space});
    const codes::CodeWords anci = codes::gkp_codewords({cfg.delta_anci, space});

    const GkpGrid grid = make_grid(cfg.grid_points);
    const int g = grid.g;

    // x-representation table for the data vectors.
    Eigen::MatrixXd hx(g, cfg.dim);
    {
        std::vector<double> row(cfg.dim);
        for (int j = 0; j < g; ++j) {
            fock::hermite_functions(grid.points(j), cfg.dim, row.data());
            for (int n = 0; n < cfg.dim; ++n) hx(j, n) = row[n];
        }
    }
    // p-representation of the ancilla dual states on the doubled grid.
    std::array<Eigen::VectorXcd, 2> y_doubled;
    {
        static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        std::vector<double> row(cfg.dim);
        for (int beta = 0; beta < 2; ++beta) y_doubled[beta] = Eigen::VectorXcd::Zero(2 * g - 1);
        for (int q = 0; q < 2 * g - 1; ++q) {
            const double p = (q - (g - 1)) * grid.step;
            if (std::abs(p) > grid.halfwidth + 25.0) continue;
            fock::hermite_functions(p, cfg.dim, row.data());
            Complex a0(0, 0), a1(0, 0);
            for (int n = 0; n < cfg.dim; ++n) {
                const Complex amp = ipow[n & 3] * row[n];
                a0 += amp * anci.plus(n);
                a1 += amp * anci.minus(n);
            }
            y_doubled[0](q) = a0;
            y_doubled[1](q) = a1;
        }
    }

    const Eigen::VectorXd w0 = data_bin0_weights(grid, cfg.eta, cfg.efficiency_model);
    Eigen::VectorXi anc_cell(g);
    for (int k = 0; k < g; ++k) {
        const long r = std::lround(grid.points(k) / kSqrtPi);
        anc_cell(k) = int(((r % 2) + 2) % 2);
    }

    // Data dual pairs evolved under the loss-dephasing channel, then SVD.
    std::array<Vector, 2> duals{data.plus, data.minus};
    auto evolved = [&](int a, int ap) {
        Matrix d = duals[a] * duals[ap].adjoint();
        if (cfg.noise.is_zero()) return d;
        return noise::loss_dephasing_channel(cfg.noise, space).apply(d);
    };

    // w[(2a+beta)(2a'+beta')][cell]; cells indexed cell1*2 + cell2.
    std::array<Matrix4, 4> cell_c;
    for (auto& m : cell_c) m.setZero();

    const std::array<std::pair<int, int>, 3> pairs{{{0, 0}, {1, 1}, {0, 1}}};
    for (const auto& [a, ap] : pairs) {
        auto terms = svd_terms(evolved(a, ap));
        // Per-term partial results, combined in term order for determinism.
        std::vector<std::array<std::array<Complex, 4>, 4>> partial(terms.size());
        const unsigned workers =
            std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                               unsigned(terms.size()));
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&, t]() {
                FieldWorkspace ws;
                for (size_t r = t; r < terms.size(); r += workers) {
                    const Eigen::VectorXcd ux = hx * terms[r].u;
                    const Eigen::VectorXcd vx = hx * terms[r].v;
                    joint_field(grid, ux, y_doubled[0], ws.phi_u0);
                    joint_field(grid, ux, y_doubled[1], ws.phi_u1);
                    joint_field(grid, vx, y_doubled[0], ws.phi_v0);
                    joint_field(grid, vx, y_doubled[1], ws.phi_v1);
                    const double fac = terms[r].weight * grid.step * grid.step;
                    for (int beta = 0; beta < 2; ++beta) {
                        const Eigen::MatrixXcd& fu = beta == 0 ? ws.phi_u0 : ws.phi_u1;
                        for (int betap = 0; betap < 2; ++betap) {
                            const Eigen::MatrixXcd& fv = betap == 0 ? ws.phi_v0 : ws.phi_v1;
                            // masses[cell1][cell2]
                            Complex q0[2] = {Complex(0, 0), Complex(0, 0)};
                            Complex qt[2] = {Complex(0, 0), Complex(0, 0)};
                            for (int k2 = 0; k2 < g; ++k2) {
                                const auto cu = fu.col(k2);
                                const auto cv = fv.col(k2);
                                Complex st(0, 0), sw(0, 0);
                                for (int k1 = 0; k1 < g; ++k1) {
                                    const Complex p = cu(k1) * std::conj(cv(k1));
                                    st += p;
                                    sw += w0(k1) * p;
                                }
                                q0[anc_cell(k2)] += sw;
                                qt[anc_cell(k2)] += st;
                            }
                            auto& pr = partial[r];
                            for (int c2 = 0; c2 < 2; ++c2) {
                                pr[beta * 2 + betap][0 * 2 + c2] = fac * q0[c2];
                                pr[beta * 2 + betap][1 * 2 + c2] = fac * (qt[c2] - q0[c2]);
                            }
                        }
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        for (size_t r = 0; r < terms.size(); ++r)
            for (int bb = 0; bb < 4; ++bb)
                for (int cell = 0; cell < 4; ++cell) {
                    const int i = 2 * a + (bb >> 1);
                    const int j = 2 * ap + (bb & 1);
                    cell_c[cell](i, j) += partial[r][bb][cell];
                }
    }
    // Remaining block by Hermiticity: c_ji(x) = conj(c_ij(x)).
    for (int beta = 0; beta < 2; ++beta)
        for (int betap = 0; betap < 2; ++betap)
            for (int cell = 0; cell < 4; ++cell)
                cell_c[cell](2 + beta, betap) = std::conj(cell_c[cell](betap, 2 + beta));

    OutcomeWeights w;
    w.kind = CircuitKind::Gkp;
    w.n_x1 = 2;
    w.n_x2 = 2;
    w.full_c.assign(4, Matrix4::Zero());
    for (int cell = 0; cell < 4; ++cell) w.full_c[cell] = cell_c[cell];
    for (int i = 0; i < 4; ++i) {
        w.diag[i] = Eigen::VectorXd(4);
        for (int cell = 0; cell < 4; ++cell) w.diag[i](cell) = cell_c[cell](i, i).real();
        w.completeness[i] = w.diag[i].sum();
        if (std::abs(w.completeness[i] - 1.0) > 1e-6)
            throw std::runtime_error(
                "gkp_outcome_weights: outcome mass deficit above 1e-6 (grid too small), got " +
                std::to_string(w.completeness[i]));
    }
    w.decoder_choice.resize(4);
    for (int c1 = 0; c1 < 2; ++c1)
        for (int c2 = 0; c2 < 2; ++c2)
            w.decoder_choice[c1 * 2 + c2] = std::uint8_t(gkp_frame_for_cells(c1, c2));
    for (auto& m : w.frame_sums) m.setZero();
    for (int cell = 0; cell < 4; ++cell) w.frame_sums[w.decoder_choice[cell]] += cell_c[cell];
    return w;
}

}  // namespace bqec::telecorrect
