#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bqec/runner/cache.hpp"
#include "bqec/telecorrect.hpp"
#include "bqec/twirl.hpp"

#include <cmath>
#include <iostream>

using namespace bqec;
using fock::Complex;
using fock::Matrix;
using fock::TruncatedSpace;
using fock::Vector;
using telecorrect::Matrix2;
using telecorrect::Matrix4;

namespace {

constexpr double kPi = 3.14159265358979323846;

// --------------------------------------------------------------------------
// Dense three-mode oracle for the rotation-code telecorrection circuit.
// Simulates data (x) ancilla (x) trivial-output rails with explicit density
// matrices and POVM bin operators, independent of the factorized kernels in
// the production path.

struct DenseRsbOracle {
    int d1, d2;
    static constexpr int d3 = 2;
    telecorrect::RsbCircuitConfig cfg;
    std::vector<Matrix> povm1, povm2;  // undamaged bin operators per rail

    explicit DenseRsbOracle(const telecorrect::RsbCircuitConfig& c)
        : d1(c.data_code.dim), d2(c.ancilla_code.dim), cfg(c) {
        measure::PhaseGrid grid(cfg.bins);
        auto bins_for = [&](const measure::HMatrix& h) {
            std::vector<Matrix> out;
            for (int b = 0; b < cfg.bins; ++b) {
                Matrix m(h.dim(), h.dim());
                for (int i = 0; i < h.dim(); ++i)
                    for (int j = 0; j < h.dim(); ++j)
                        m(i, j) = grid.width() / (2.0 * kPi) *
                                  std::polar(1.0, grid.center(b) * (i - j)) * h.entries(i, j);
                out.push_back(std::move(m));
            }
            return out;
        };
        povm1 = bins_for(cfg.data_h);
        povm2 = bins_for(cfg.ancilla_h);
    }

    int idx(int n, int m, int l) const { return (n * d2 + m) * d3 + l; }

    // Full circuit: rho_L -> sum_x R_x rho_3(x) R_x^dag with the recovery
    // table supplied by the caller (bell-frame Paulis).
    Matrix2 conditional_output(const Matrix& rho3mode, const Matrix& m1, const Matrix& m2) const {
        Matrix2 out = Matrix2::Zero();
        for (int l = 0; l < d3; ++l)
            for (int lp = 0; lp < d3; ++lp) {
                Complex acc(0, 0);
                for (int n = 0; n < d1; ++n)
                    for (int np = 0; np < d1; ++np)
                        for (int m = 0; m < d2; ++m)
                            for (int mp = 0; mp < d2; ++mp)
                                acc += m1(np, n) * m2(mp, m) *
                                       rho3mode(idx(n, m, l), idx(np, mp, lp));
                out(l, lp) = acc;
            }
        return out;
    }

    Matrix premeasurement_state(const Matrix2& rho_logical) const {
        // Encoded data matrix.
        Matrix rho1 = Matrix::Zero(d1, d1);
        std::array<Vector, 2> words{cfg.data_code.zero, cfg.data_code.one};
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                rho1 += rho_logical(k, l) * words[k] * words[l].adjoint();
        if (!cfg.noise.is_zero())
            rho1 = noise::loss_dephasing_channel(cfg.noise, TruncatedSpace(d1)).apply(rho1);

        // Ancilla pair |+_M>|+_1> entangled by CROT23.
        Vector psi23 = Vector::Zero(d2 * d3);
        fock::CrotGate crot23(cfg.ancilla_code.order, 1);
        const Vector& plus2 = cfg.ancilla_code.plus;
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (int m = 0; m < d2; ++m)
            for (int l = 0; l < d3; ++l)
                psi23(m * d3 + l) = plus2(m) * inv_sqrt2 * crot23.phase(m, l);

        // rho = N(rho1) (x) |psi23><psi23|, conjugated by CROT12, then the
        // measurement-chain loss on the data rail.
        const int dtot = d1 * d2 * d3;
        Matrix rho = Matrix::Zero(dtot, dtot);
        fock::CrotGate crot12(cfg.data_code.order, cfg.ancilla_code.order);
        for (int n = 0; n < d1; ++n)
            for (int np = 0; np < d1; ++np) {
                if (rho1(n, np) == Complex(0, 0)) continue;
                for (int m = 0; m < d2; ++m)
                    for (int mp = 0; mp < d2; ++mp)
                        for (int l = 0; l < d3; ++l)
                            for (int lp = 0; lp < d3; ++lp)
                                rho(idx(n, m, l), idx(np, mp, lp)) +=
                                    rho1(n, np) * psi23(m * d3 + l) *
                                    std::conj(psi23(mp * d3 + lp)) * crot12.phase(n, m) *
                                    std::conj(crot12.phase(np, mp));
            }
        if (cfg.data_eta < 1.0) {
            Matrix damaged = Matrix::Zero(dtot, dtot);
            for (int k = 0; k < d1; ++k) {
                // Mode-1 loss Kraus acts on the n index pair.
                Matrix block = Matrix::Zero(dtot, dtot);
                bool any = false;
                for (int n = k; n < d1; ++n) {
                    const double cn = noise::loss_amplitude(cfg.data_eta, n, k);
                    if (cn == 0.0) continue;
                    for (int np = k; np < d1; ++np) {
                        const double cnp = noise::loss_amplitude(cfg.data_eta, np, k);
                        if (cnp == 0.0) continue;
                        any = true;
                        for (int m = 0; m < d2; ++m)
                            for (int mp = 0; mp < d2; ++mp)
                                for (int l = 0; l < d3; ++l)
                                    for (int lp = 0; lp < d3; ++lp)
                                        block(idx(n - k, m, l), idx(np - k, mp, lp)) +=
                                            cn * cnp * rho(idx(n, m, l), idx(np, mp, lp));
                    }
                }
                if (any) damaged += block;
            }
            rho = std::move(damaged);
        }
        return rho;
    }

    telecorrect::LogicalChannel channel(const std::vector<std::uint8_t>& decoder) const {
        std::array<Matrix2, 4> images;
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                Matrix2 e = Matrix2::Zero();
                e(k, l) = 1.0;
                Matrix rho = premeasurement_state(e);
                Matrix2 out = Matrix2::Zero();
                for (int b1 = 0; b1 < cfg.bins; ++b1)
                    for (int b2 = 0; b2 < cfg.bins; ++b2) {
                        Matrix2 cond = conditional_output(rho, povm1[b1], povm2[b2]);
                        const int frame = decoder[b1 * cfg.bins + b2];
                        // Bell-frame residual X^{beta} Z^{a} for frame 2a+beta.
                        const Matrix2 res = telecorrect::logical_pauli(2 * (frame & 1) +
                                                                       ((frame >> 1) & 1));
                        out += res.adjoint() * cond * res;
                    }
                images[k * 2 + l] = out;
            }
        telecorrect::LogicalChannel ch;
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                const Matrix2& img = images[k * 2 + l];
                ch.superop(0, l * 2 + k) = img(0, 0);
                ch.superop(1, l * 2 + k) = img(1, 0);
                ch.superop(2, l * 2 + k) = img(0, 1);
                ch.superop(3, l * 2 + k) = img(1, 1);
            }
        ch.choi.setZero();
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                for (int m = 0; m < 2; ++m)
                    for (int n = 0; n < 2; ++n)
                        ch.choi(m * 2 + k, n * 2 + l) += 0.5 * images[k * 2 + l](m, n);
        return ch;
    }
};

telecorrect::RsbCircuitConfig small_config(double kt, double kpt, double eta, int bins) {
    telecorrect::RsbCircuitConfig cfg;
    TruncatedSpace sd(13), sa(17);
    cfg.data_code = codes::cat_codewords(codes::RotationCodeSpec::cat(1, 1.2, sd));
    cfg.ancilla_code = codes::cat_codewords(codes::RotationCodeSpec::cat(1, 1.6, sa));
    cfg.data_h = measure::h_heterodyne(sd);
    cfg.ancilla_h = measure::h_canonical(sa);
    cfg.data_eta = eta;
    cfg.noise = {kt, kpt};
    cfg.bins = bins;
    return cfg;
}

}  // namespace

TEST_CASE("outcome weight structure") {
    auto cfg = small_config(0.02, 0.015, 0.85, 32);
    auto w = telecorrect::rsb_outcome_weights(cfg);
    REQUIRE(w.has_full());

    // Hermiticity in (i, j) and real non-negative diagonals.
    for (int x = 0; x < w.outcome_count(); ++x) {
        CHECK(fock::max_abs(Matrix4(w.full_c[x] - w.full_c[x].adjoint())) < 1e-10);
        for (int i = 0; i < 4; ++i) CHECK(w.full_c[x](i, i).real() > -1e-9);
    }
    // Completeness per hypothesis.
    for (int i = 0; i < 4; ++i) CHECK(std::abs(w.completeness[i] - 1.0) < 1e-6);

    // Decoder: argmax with smallest-index ties.
    std::array<Eigen::VectorXd, 4> diag;
    for (auto& d : diag) d = Eigen::VectorXd::Ones(3);
    diag[2](1) = 2.0;
    auto dec = telecorrect::ml_decode(diag);
    CHECK(dec[0] == 0);
    CHECK(dec[1] == 2);
    CHECK(dec[2] == 0);
}

TEST_CASE("rsb channel matches the dense three-mode oracle") {
    for (auto [kt, kpt, eta] : {std::array<double, 3>{0.0, 0.0, 1.0},
                                std::array<double, 3>{0.03, 0.02, 1.0},
                                std::array<double, 3>{0.02, 0.015, 0.85}}) {
        auto cfg = small_config(kt, kpt, eta, 24);
        auto w = telecorrect::rsb_outcome_weights(cfg);
        auto prod = telecorrect::assemble_logical_channel(w);

        DenseRsbOracle oracle(cfg);
        auto ref = oracle.channel(w.decoder_choice);

        INFO("kt=", kt, " kpt=", kpt, " eta=", eta);
        CHECK(fock::max_abs(Matrix(prod.superop - ref.superop)) < 1e-8);
        CHECK(fock::max_abs(Matrix(prod.choi - ref.choi)) < 1e-8);
        CHECK(std::abs(telecorrect::entanglement_fidelity(prod) -
                       telecorrect::entanglement_fidelity(ref)) < 1e-9);
    }
}

TEST_CASE("frame-sum diagnostics match the Choi fidelity") {
    auto cfg = small_config(0.01, 0.01, 1.0, 32);
    auto w = telecorrect::rsb_outcome_weights(cfg);
    auto ch = telecorrect::assemble_logical_channel(w);
    double fe_direct = 0.0;
    for (int p = 0; p < 4; ++p) fe_direct += 0.25 * w.frame_sums[p](p, p).real();
    CHECK(std::abs(fe_direct - telecorrect::entanglement_fidelity(ch)) < 1e-12);
}

TEST_CASE("noiseless channel approaches the identity for large codes") {
    telecorrect::RsbCircuitConfig cfg;
    TruncatedSpace sd(42), sa(42);
    cfg.data_code = codes::cat_codewords(codes::RotationCodeSpec::cat(1, 3.5, sd));
    cfg.ancilla_code = codes::cat_codewords(codes::RotationCodeSpec::cat(1, 3.5, sa));
    cfg.data_h = measure::h_canonical(sd);
    cfg.ancilla_h = measure::h_canonical(sa);
    cfg.bins = 512;
    auto w = telecorrect::rsb_outcome_weights(cfg);
    auto ch = telecorrect::assemble_logical_channel(w);
    auto rep = telecorrect::fidelity_report(ch, cfg.noise);
    CHECK(1.0 - rep.avg_gate_fidelity < 1e-4);
    // Relation between the two fidelities holds by construction.
    CHECK(rep.avg_gate_fidelity ==
          doctest::Approx((2 * rep.entanglement_fidelity + 1) / 3).epsilon(1e-12));
}

TEST_CASE("break-even channel") {
    auto zero = telecorrect::break_even_channel({0.0, 0.0});
    CHECK(zero.avg_gate_fidelity == doctest::Approx(1.0));

    // Closed-form qubit channel oracle across a grid.
    for (double kt : {0.003, 0.01, 0.05})
        for (double kpt : {0.0, 0.01, 0.03}) {
            auto rep = telecorrect::break_even_channel({kt, kpt});
            const double fe =
                0.25 * (1.0 + std::exp(-kt) + 2.0 * std::exp(-0.5 * (kt + kpt)));
            CHECK(std::abs(rep.entanglement_fidelity - fe) < 1e-10);
        }
    // Monotone in both rates.
    double prev = 1.0;
    for (double k : {0.01, 0.02, 0.03}) {
        auto rep = telecorrect::break_even_channel({k, k});
        CHECK(rep.avg_gate_fidelity < prev);
        prev = rep.avg_gate_fidelity;
    }
}

TEST_CASE("identity weights give the identity channel") {
    // Every hypothesis fully resolved and decoded to its own frame.
    telecorrect::OutcomeWeights w;
    w.kind = telecorrect::CircuitKind::Rsb;
    w.n_x1 = 4;
    w.n_x2 = 1;
    w.decoder_choice = {0, 1, 2, 3};
    for (int p = 0; p < 4; ++p) {
        w.frame_sums[p].setZero();
        w.frame_sums[p](p, p) = 1.0;
    }
    auto ch = telecorrect::assemble_logical_channel(w);
    CHECK(std::abs(telecorrect::entanglement_fidelity(ch) - 1.0) < 1e-14);
    Matrix2 rho;
    rho << 0.3, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.7;
    CHECK(fock::max_abs(Matrix(Matrix2(ch.apply(rho) - rho))) < 1e-14);
}

TEST_CASE("depolarizing and Pauli reference channels") {
    // Fully symmetric weights: uniform diagonal c_ii, zero off-diagonal.
    telecorrect::OutcomeWeights w;
    w.kind = telecorrect::CircuitKind::Rsb;
    w.n_x1 = 4;
    w.n_x2 = 1;
    w.decoder_choice = {0, 1, 2, 3};
    for (auto& m : w.frame_sums) m.setZero();
    for (int x = 0; x < 4; ++x) {
        Matrix4 c = Matrix4::Zero();
        for (int i = 0; i < 4; ++i) c(i, i) = 0.25;
        w.frame_sums[x] += c;
    }
    auto ch = telecorrect::assemble_logical_channel(w);
    CHECK(std::abs(telecorrect::entanglement_fidelity(ch) - 0.25) < 1e-12);
    auto rep = telecorrect::fidelity_report(ch, {0, 0});
    CHECK(rep.avg_gate_fidelity == doctest::Approx(0.5));

    // Z flip with probability 0.1 relative to every frame: F_E = 0.9.
    telecorrect::OutcomeWeights wz;
    wz.kind = telecorrect::CircuitKind::Rsb;
    wz.n_x1 = 4;
    wz.n_x2 = 1;
    wz.decoder_choice = {0, 1, 2, 3};
    for (int p = 0; p < 4; ++p) {
        wz.frame_sums[p].setZero();
        wz.frame_sums[p](p, p) = 0.9;
        wz.frame_sums[p](p ^ 1, p ^ 1) = 0.1;
    }
    auto chz = telecorrect::assemble_logical_channel(wz);
    CHECK(std::abs(telecorrect::entanglement_fidelity(chz) - 0.9) < 1e-12);
    CHECK(telecorrect::fidelity_report(chz, {0, 0}).avg_gate_fidelity ==
          doctest::Approx(2.8 / 3.0));
}

// --------------------------------------------------------------------------
// GKP path.

namespace {

// Dense two-mode oracle for the GKP circuit without Lindblad noise: rank-1
// dual pairs, CZ through the beam-splitter decomposition, explicit p-segment
// POVMs, measurement loss as mode-1 Kraus operators on state vectors.
struct DenseGkpOracle {
    int dim;
    telecorrect::GkpCircuitConfig cfg;
    codes::CodeWords words;
    std::unique_ptr<fock::TwoModeUnitary> cz;
    fock::QuadratureTransform qt;
    Eigen::VectorXd weights;  // trapezoid weights

    explicit DenseGkpOracle(const telecorrect::GkpCircuitConfig& c)
        : dim(c.dim),
          cfg(c),
          words(codes::gkp_codewords({c.delta_data, TruncatedSpace(c.dim)})),
          cz(fock::cz_gate(1.0, TruncatedSpace(c.dim), TruncatedSpace(c.dim))),
          qt(fock::quadrature_transform(fock::uniform_grid(11.0 * 1.7724538509055160273, 1401),
                                        TruncatedSpace(c.dim), fock::Quadrature::P)) {
        weights = Eigen::VectorXd::Zero(qt.grid.size());
        for (int i = 0; i < qt.grid.size(); ++i) {
            if (i > 0) weights(i) += 0.5 * (qt.grid(i) - qt.grid(i - 1));
            if (i + 1 < qt.grid.size()) weights(i) += 0.5 * (qt.grid(i + 1) - qt.grid(i));
        }
    }

    // Segment-projected POVM for logical cell `bit` with boundary scale.
    Matrix segment_povm(int bit, double scale) const {
        measure::QuadratureBinning binning{qt.grid, scale};
        Matrix m = Matrix::Zero(dim, dim);
        for (int g = 0; g < qt.grid.size(); ++g) {
            if (binning.logical_bin(qt.grid(g)) != bit) continue;
            m += weights(g) * (qt.amplitudes.row(g).adjoint() * qt.amplitudes.row(g));
        }
        return m;
    }

    std::array<Matrix4, 4> cell_weights() const {
        std::array<Vector, 2> duals{words.plus, words.minus};
        const double scale =
            (cfg.eta < 1.0 &&
             cfg.efficiency_model == telecorrect::EfficiencyModel::LossRescaledBoundaries)
                ? std::sqrt(cfg.eta)
                : 1.0;
        std::array<Matrix, 2> m1{segment_povm(0, scale), segment_povm(1, scale)};
        std::array<Matrix, 2> m2{segment_povm(0, 1.0), segment_povm(1, 1.0)};

        // Mode-1 Kraus set of the measurement chain.
        std::vector<Matrix> kraus;
        if (cfg.eta >= 1.0) {
            kraus.push_back(Matrix::Identity(dim, dim));
        } else {
            auto loss = noise::pure_loss_channel(cfg.eta, TruncatedSpace(dim));
            if (cfg.efficiency_model == telecorrect::EfficiencyModel::LossRescaledBoundaries) {
                kraus = loss.kraus_operators();
            } else {
                auto amp = noise::amplification_channel(1.0 / cfg.eta, TruncatedSpace(dim));
                for (const auto& b : amp.kraus_operators())
                    for (const auto& a : loss.kraus_operators()) {
                        Matrix prod = b * a;
                        if (fock::max_abs(prod) > 1e-9) kraus.push_back(std::move(prod));
                    }
            }
        }

        std::array<Matrix4, 4> cells;
        for (auto& c : cells) c.setZero();
        for (int a = 0; a < 2; ++a)
            for (int ap = 0; ap < 2; ++ap)
                for (int beta = 0; beta < 2; ++beta)
                    for (int betap = 0; betap < 2; ++betap) {
                        Matrix ket = duals[a] * duals[beta].transpose();
                        Matrix bra = duals[ap] * duals[betap].transpose();
                        Matrix cket = cz->apply(ket);
                        Matrix cbra = cz->apply(bra);
                        for (int c1 = 0; c1 < 2; ++c1)
                            for (int c2 = 0; c2 < 2; ++c2) {
                                Complex acc(0, 0);
                                for (const auto& k : kraus) {
                                    Matrix lk = k * cket;
                                    Matrix lb = k * cbra;
                                    // <bra| (M1 x M2) |ket> on joint matrices.
                                    Matrix t = m1[c1] * lk * m2[c2].transpose();
                                    acc += (lb.conjugate().cwiseProduct(t)).sum();
                                }
                                cells[c1 * 2 + c2](2 * a + beta, 2 * ap + betap) += acc;
                            }
                    }
        return cells;
    }
};

}  // namespace

TEST_CASE("gkp weights match the dense two-mode oracle") {
    for (auto [eta, model] :
         {std::pair<double, telecorrect::EfficiencyModel>{1.0,
                                                          telecorrect::EfficiencyModel::Amplified},
          {0.9, telecorrect::EfficiencyModel::LossRescaledBoundaries},
          {0.9, telecorrect::EfficiencyModel::Amplified}}) {
        telecorrect::GkpCircuitConfig cfg;
        cfg.delta_data = 0.5;
        cfg.delta_anci = 0.5;
        cfg.eta = eta;
        cfg.efficiency_model = model;
        cfg.dim = 64;
        cfg.grid_points = 1024;
        auto w = telecorrect::gkp_outcome_weights(cfg);
        DenseGkpOracle oracle(cfg);
        auto cells = oracle.cell_weights();
        INFO("eta=", eta, " model=", telecorrect::efficiency_model_name(model));
        for (int cell = 0; cell < 4; ++cell)
            CHECK(fock::max_abs(Matrix(w.full_c[cell] - cells[cell])) < 2e-5);
    }
}

TEST_CASE("gkp noiseless channel tracks the twirl prediction") {
    telecorrect::GkpCircuitConfig cfg;
    cfg.delta_data = 0.4;
    cfg.delta_anci = 0.4;
    cfg.dim = 90;
    auto w = telecorrect::gkp_outcome_weights(cfg);
    auto ch = telecorrect::assemble_logical_channel(w);
    const double infid = 1.0 - telecorrect::fidelity_report(ch, {0, 0}).avg_gate_fidelity;
    auto tw = twirl::twirl_fidelity({0.4, 0.4, 1.0});
    const double tw_infid = 1.0 - tw.avg_gate_fidelity;
    CHECK(std::abs(infid - tw_infid) / tw_infid < 0.05);
}

TEST_CASE("gkp grid refinement is converged") {
    telecorrect::GkpCircuitConfig cfg;
    cfg.delta_data = 0.45;
    cfg.delta_anci = 0.45;
    cfg.dim = 72;
    cfg.grid_points = 1024;
    auto w1 = telecorrect::gkp_outcome_weights(cfg);
    cfg.grid_points = 2048;
    auto w2 = telecorrect::gkp_outcome_weights(cfg);
    auto f1 = telecorrect::fidelity_report(telecorrect::assemble_logical_channel(w1), {0, 0});
    auto f2 = telecorrect::fidelity_report(telecorrect::assemble_logical_channel(w2), {0, 0});
    CHECK(std::abs(f1.avg_gate_fidelity - f2.avg_gate_fidelity) < 1e-5);
}
