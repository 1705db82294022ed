#include "bqec/telecorrect.hpp"

#include <cmath>

namespace bqec::telecorrect {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string efficiency_model_name(EfficiencyModel m) {
    return m == EfficiencyModel::Amplified ? "amplified" : "rescaled";
}

Matrix2 logical_pauli(int index) {
    Matrix2 x, z;
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    switch (index) {
        case 0: return Matrix2::Identity();
        case 1: return z;
        case 2: return x;
        case 3: return Matrix2(x * z);
    }
    throw std::invalid_argument("logical_pauli: index must be 0..3");
}

std::vector<std::uint8_t> ml_decode(const std::array<Eigen::VectorXd, 4>& diagonals) {
    const auto n = diagonals[0].size();
    std::vector<std::uint8_t> choice(n, 0);
    for (Eigen::Index x = 0; x < n; ++x) {
        int best = 0;
        double bestval = diagonals[0](x);
        for (int i = 1; i < 4; ++i)
            if (diagonals[i](x) > bestval) {
                bestval = diagonals[i](x);
                best = i;
            }
        choice[x] = std::uint8_t(best);
    }
    return choice;
}

// ---------------------------------------------------------------------------
// RSB outcome weights.
//
// The two-mode dual-basis pair |i><j| with i = 2a + b is pulled through the
// CROT gate; because CROT is diagonal in the joint Fock basis the trace
// against M_{x1} (x) M_{x2} factorizes as
//
//   c_ij(x) = sum_{pp'} (-1)^{ap + a'p'} sum_{nn'} (M~_{x1})_{n'n}
//             [N(G_pp')]_{nn'} T^{(b+p, b'+p')}_{x2}(n mod 2N, n' mod 2N)
//
// where G_pp' collects the parity-p/p' part of the dual-basis lattice, N is
// the data-rail noise channel, M~ carries the measurement inefficiency
// absorbed into the H matrix, and T holds the ancilla factors under the
// data-index-dependent rotations imprinted by CROT.

namespace {

struct AncKernels {
    // t[gamma*2+gamma'][bin] is a vector over (r, r') pairs, r, r' in [0, 2N).
    std::array<Eigen::MatrixXcd, 4> t;  // bins x (2N)^2
};

AncKernels ancilla_kernels(const RsbCircuitConfig& cfg) {
    const int n_order = cfg.data_code.order;
    const int m_order = cfg.ancilla_code.order;
    const int two_n = 2 * n_order;
    const int da = cfg.ancilla_code.dim;
    const measure::PhaseGrid grid(cfg.bins);
    const double f = grid.width() / (2.0 * kPi);

    // Ancilla dual support: indices and coefficients on the stride-M lattice.
    std::vector<int> support;
    for (int m = 0; m < da; m += m_order) support.push_back(m);
    const Vector& y0 = cfg.ancilla_code.plus;
    const Vector& y1 = cfg.ancilla_code.minus;

    AncKernels out;
    for (int g = 0; g < 2; ++g) {
        for (int gp = 0; gp < 2; ++gp) {
            const Vector& ket = (g == 0) ? y0 : y1;
            const Vector& bra = (gp == 0) ? y0 : y1;
            Eigen::MatrixXcd tk = Eigen::MatrixXcd::Zero(cfg.bins, two_n * two_n);
            for (int r = 0; r < two_n; ++r) {
                const double th_r = kPi * r / (double(n_order) * m_order);
                for (int rp = 0; rp < two_n; ++rp) {
                    const double th_rp = kPi * rp / (double(n_order) * m_order);
                    // u(d) = sum_{m-m'=d} conj(bra_m) ket_m' H_{mm'}
                    //        e^{i(th_r m' - th_rp m)}
                    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(2 * da - 1);
                    for (int m : support) {
                        const Complex bm = std::conj(bra(m)) * std::polar(1.0, -th_rp * m);
                        if (bm == Complex(0, 0)) continue;
                        for (int mp : support) {
                            const Complex km = ket(mp) * std::polar(1.0, th_r * mp);
                            u(m - mp + da - 1) +=
                                bm * km * cfg.ancilla_h.entries(m, mp);
                        }
                    }
                    for (int b = 0; b < cfg.bins; ++b) {
                        const double phi = grid.center(b);
                        Complex acc(0, 0);
                        for (int d = -(da - 1); d <= da - 1; ++d) {
                            const Complex& ud = u(d + da - 1);
                            if (ud != Complex(0, 0)) acc += std::polar(1.0, phi * d) * ud;
                        }
                        tk(b, r * two_n + rp) = f * acc;
                    }
                }
            }
            out.t[g * 2 + gp] = std::move(tk);
        }
    }
    return out;
}

struct DataKernels {
    std::array<Eigen::MatrixXcd, 4> g;  // [p*2+p']: bins x (2N)^2
};

DataKernels data_kernels(const RsbCircuitConfig& cfg) {
    const int n_order = cfg.data_code.order;
    const int two_n = 2 * n_order;
    const int dd = cfg.data_code.dim;
    const measure::PhaseGrid grid(cfg.bins);
    const double f = grid.width() / (2.0 * kPi);

    auto fk = codes::lattice_coefficients(cfg.data_code);
    const int kcount = int(fk.size());

    // Parity-split dual-pair matrices on the stride-N lattice.
    std::array<Matrix, 4> gmat;
    for (int p = 0; p < 2; ++p)
        for (int pp = 0; pp < 2; ++pp) {
            Matrix m = Matrix::Zero(dd, dd);
            for (int k = p; k < kcount; k += 2)
                for (int kp = pp; kp < kcount; kp += 2)
                    m(k * n_order, kp * n_order) = 0.5 * fk[k] * std::conj(fk[kp]);
            gmat[p * 2 + pp] = std::move(m);
        }

    // Data-rail noise, applied to the (possibly non-Hermitian) parity blocks.
    if (!cfg.noise.is_zero()) {
        auto channel = noise::loss_dephasing_channel(cfg.noise, fock::TruncatedSpace(dd));
        gmat[0] = channel.apply(gmat[0]);
        gmat[3] = channel.apply(gmat[3]);
        gmat[1] = channel.apply(gmat[1]);
        gmat[2] = gmat[1].adjoint();
    }

    const measure::HMatrix ht = measure::loss_damaged(cfg.data_h, cfg.data_eta);

    DataKernels out;
    for (int c = 0; c < 4; ++c) {
        const Matrix& x = gmat[c];
        // s(d, r) = sum_{n == r (mod 2N)} H~(n+d, n) X(n, n+d); the receiving
        // residue is r' = (r + d) mod 2N.
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2 * dd - 1, two_n);
        for (int n = 0; n < dd; ++n) {
            const int r = n % two_n;
            for (int np = 0; np < dd; ++np) {
                const Complex v = ht.entries(np, n) * x(n, np);
                if (v != Complex(0, 0)) s(np - n + dd - 1, r) += v;
            }
        }
        Eigen::MatrixXcd gk = Eigen::MatrixXcd::Zero(cfg.bins, two_n * two_n);
        for (int b = 0; b < cfg.bins; ++b) {
            const double phi = grid.center(b);
            for (int d = -(dd - 1); d <= dd - 1; ++d) {
                const Complex ph = f * std::polar(1.0, phi * d);
                for (int r = 0; r < two_n; ++r) {
                    const Complex& sv = s(d + dd - 1, r);
                    if (sv == Complex(0, 0)) continue;
                    const int rp = ((r + d) % two_n + two_n) % two_n;
                    gk(b, r * two_n + rp) += ph * sv;
                }
            }
        }
        out.g[c] = std::move(gk);
    }
    return out;
}

}  // namespace

OutcomeWeights rsb_outcome_weights(const RsbCircuitConfig& cfg) {
    if (cfg.data_h.dim() != cfg.data_code.dim || cfg.ancilla_h.dim() != cfg.ancilla_code.dim)
        throw std::invalid_argument("rsb_outcome_weights: H matrix dims must match codes");
    if (cfg.data_eta <= 0.0 || cfg.data_eta > 1.0)
        throw std::invalid_argument("rsb_outcome_weights: data_eta in (0,1]");

    const int bins = cfg.bins;
    DataKernels dk = data_kernels(cfg);
    AncKernels ak = ancilla_kernels(cfg);

    OutcomeWeights w;
    w.kind = CircuitKind::Rsb;
    w.n_x1 = bins;
    w.n_x2 = bins;
    const int total = bins * bins;
    for (auto& d : w.diag) d = Eigen::VectorXd::Zero(total);
    const bool keep_full = total <= 4096;
    if (keep_full) w.full_c.assign(total, Matrix4::Zero());

    // P[pp'][gg'](x1, x2) = sum_{rr'} g[pp'](x1, rr') t[gg'](x2, rr'), built
    // chunked over x1 rows; c_ij follows by the parity sign sum.
    const int chunk = 64;
    std::vector<Eigen::MatrixXcd> p(16);

    auto compute_chunk = [&](int x1lo, int x1hi) {
        const int rows = x1hi - x1lo;
        for (int c = 0; c < 4; ++c) {
            const auto gblock = dk.g[c].middleRows(x1lo, rows);
            for (int t = 0; t < 4; ++t) p[c * 4 + t].noalias() = gblock * ak.t[t].transpose();
        }
        (void)rows;
    };

    // Pass 1: diagonals.
    for (int x1lo = 0; x1lo < bins; x1lo += chunk) {
        const int x1hi = std::min(bins, x1lo + chunk);
        compute_chunk(x1lo, x1hi);
        for (int x1 = x1lo; x1 < x1hi; ++x1) {
            const int row = x1 - x1lo;
            for (int x2 = 0; x2 < bins; ++x2) {
                const int xi = x1 * bins + x2;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        Complex acc(0, 0);
                        for (int pp = 0; pp < 4; ++pp) {
                            const int pr = pp >> 1, pc = pp & 1;
                            const double sgn = ((a * pr + a * pc) & 1) ? -1.0 : 1.0;
                            const int tt = ((b ^ pr) << 1) | (b ^ pc);
                            acc += sgn * p[pp * 4 + tt](row, x2);
                        }
                        w.diag[a * 2 + b](xi) = acc.real();
                    }
            }
        }
    }
    w.decoder_choice = ml_decode(w.diag);
    for (int i = 0; i < 4; ++i) w.completeness[i] = w.diag[i].sum();

    // Pass 2: frame-resolved accumulation of the full c_ij.
    for (auto& m : w.frame_sums) m.setZero();
    for (int x1lo = 0; x1lo < bins; x1lo += chunk) {
        const int x1hi = std::min(bins, x1lo + chunk);
        compute_chunk(x1lo, x1hi);
        for (int x1 = x1lo; x1 < x1hi; ++x1) {
            const int row = x1 - x1lo;
            for (int x2 = 0; x2 < bins; ++x2) {
                const int xi = x1 * bins + x2;
                Matrix4& acc = w.frame_sums[w.decoder_choice[xi]];
                for (int i = 0; i < 4; ++i) {
                    const int a = i >> 1, b = i & 1;
                    for (int j = 0; j < 4; ++j) {
                        const int ap = j >> 1, bp = j & 1;
                        Complex v(0, 0);
                        for (int pp = 0; pp < 4; ++pp) {
                            const int pr = pp >> 1, pc = pp & 1;
                            const double sgn = ((a * pr + ap * pc) & 1) ? -1.0 : 1.0;
                            const int tt = ((b ^ pr) << 1) | (bp ^ pc);
                            v += sgn * p[pp * 4 + tt](row, x2);
                        }
                        acc(i, j) += v;
                        if (keep_full) w.full_c[xi](i, j) = v;
                    }
                }
            }
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Channel assembly and fidelities.

namespace {

Matrix2 unvec(const Eigen::Vector4cd& v) {
    Matrix2 m;
    m << v(0), v(2), v(1), v(3);
    return m;
}

Eigen::Vector4cd vec(const Matrix2& m) {
    Eigen::Vector4cd v;
    v << m(0, 0), m(1, 0), m(0, 1), m(1, 1);
    return v;
}

Matrix2 basis_e(int k, int l) {
    Matrix2 m = Matrix2::Zero();
    m(k, l) = 1.0;
    return m;
}

LogicalChannel channel_from_action(const std::function<Matrix2(const Matrix2&)>& act) {
    LogicalChannel ch;
    std::array<Matrix2, 4> images;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) images[k * 2 + l] = act(basis_e(k, l));
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) ch.superop.col(l * 2 + k) = vec(images[k * 2 + l]);
    ch.choi.setZero();
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            const Matrix2& lam = images[k * 2 + l];
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n)
                    ch.choi(m * 2 + k, n * 2 + l) += 0.5 * lam(m, n);
        }
    return ch;
}

void check_cptp(const LogicalChannel& ch) {
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            const Matrix2 img = unvec(ch.superop.col(l * 2 + k));
            const Complex tr = img.trace();
            const Complex expect = (k == l) ? Complex(1, 0) : Complex(0, 0);
            if (std::abs(tr - expect) > 1e-5)
                throw std::runtime_error("assemble_logical_channel: trace preservation violated");
        }
    Eigen::SelfAdjointEigenSolver<Matrix4> es(0.5 * (ch.choi + ch.choi.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-5)
        throw std::runtime_error("assemble_logical_channel: Choi not positive semidefinite");
}

int gkp_frame_index(int cell1, int cell2) {
    // Residual Pauli X^{cell2} Z^{cell1} for p-lattice classes
    // (cell1 on the data rail, cell2 on the ancilla rail).
    return 2 * cell2 + cell1;
}

}  // namespace

Matrix2 LogicalChannel::apply(const Matrix2& rho) const {
    return unvec(superop * vec(rho));
}

LogicalChannel assemble_logical_channel(const OutcomeWeights& w) {
    LogicalChannel ch;
    if (w.kind == CircuitKind::Rsb) {
        ch = channel_from_action([&](const Matrix2& rho) {
            Matrix2 out = Matrix2::Zero();
            for (int p = 0; p < 4; ++p) {
                const Matrix2 rec = logical_pauli(p).adjoint();
                for (int i = 0; i < 4; ++i) {
                    const Matrix2 ki = rec * logical_pauli(i);
                    for (int j = 0; j < 4; ++j) {
                        const Complex a = w.frame_sums[p](i, j);
                        if (a == Complex(0, 0)) continue;
                        const Matrix2 kj = rec * logical_pauli(j);
                        out += 0.25 * a * ki * rho * kj.adjoint();
                    }
                }
            }
            return out;
        });
    } else {
        if (!w.has_full()) throw std::logic_error("gkp weights must carry full c");
        ch = channel_from_action([&](const Matrix2& rho) {
            Matrix2 out = Matrix2::Zero();
            for (int x = 0; x < w.outcome_count(); ++x) {
                const Matrix4& c = w.full_c[x];
                Matrix2 m = Matrix2::Zero();
                for (int beta = 0; beta < 2; ++beta)
                    for (int betap = 0; betap < 2; ++betap) {
                        Complex v(0, 0);
                        for (int k = 0; k < 2; ++k)
                            for (int l = 0; l < 2; ++l)
                                v += rho(k, l) * c(2 * k + beta, 2 * l + betap);
                        m(beta, betap) = v;
                    }
                const Matrix2 rec = logical_pauli(w.decoder_choice[x]).adjoint();
                out += 0.5 * rec * m * rec.adjoint();
            }
            return out;
        });
    }
    check_cptp(ch);
    return ch;
}

double entanglement_fidelity(const LogicalChannel& ch) {
    // <Omega| Choi |Omega> with |Omega> = (|00> + |11>)/sqrt(2).
    Eigen::Vector4cd omega;
    omega << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
    return (omega.adjoint() * ch.choi * omega)(0, 0).real();
}

FidelityReport break_even_channel(const noise::LindbladParams& p) {
    const fock::TruncatedSpace qubit(2);
    auto channel = noise::loss_dephasing_channel(p, qubit);
    LogicalChannel ch = channel_from_action([&](const Matrix2& rho) {
        Matrix m(2, 2);
        m << rho(0, 0), rho(0, 1), rho(1, 0), rho(1, 1);
        Matrix out = channel.apply(m);
        Matrix2 r;
        r << out(0, 0), out(0, 1), out(1, 0), out(1, 1);
        return r;
    });
    const double fe = entanglement_fidelity(ch);
    const double fbar = (2.0 * fe + 1.0) / 3.0;
    return {fe, fbar, fbar};
}

FidelityReport fidelity_report(const LogicalChannel& channel,
                               const noise::LindbladParams& noise) {
    const double fe = entanglement_fidelity(channel);
    FidelityReport r;
    r.entanglement_fidelity = fe;
    r.avg_gate_fidelity = (2.0 * fe + 1.0) / 3.0;
    r.break_even_avg_gate_fidelity = break_even_channel(noise).avg_gate_fidelity;
    return r;
}

int gkp_frame_for_cells(int cell1, int cell2) { return gkp_frame_index(cell1, cell2); }

}  // namespace bqec::telecorrect
