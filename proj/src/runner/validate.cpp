#include "bqec/runner/validate.hpp"

#include "bqec/codes.hpp"
#include "bqec/measure.hpp"
#include "bqec/noise.hpp"
#include "bqec/telecorrect.hpp"
#include "bqec/twirl.hpp"

#include <cmath>
#include <random>

namespace bqec::runner {

namespace {

using fock::Complex;
using fock::Matrix;
using fock::TruncatedSpace;
using fock::Vector;

constexpr double kPi = 3.14159265358979323846;

Matrix random_density(int dim, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

}  // namespace

std::vector<CheckResult> run_validation(const std::string& fault) {
    std::vector<CheckResult> out;
    auto check = [&](const std::string& name, double measured, double tol) {
        out.push_back({name, measured, tol, measured < tol});
    };
    std::mt19937 rng(20230517);

    // --- fock ---------------------------------------------------------
    {
        TruncatedSpace s(24);
        auto ops = fock::ladder_operators(s);
        Matrix comm = ops.a * ops.a_dag - ops.a_dag * ops.a - Matrix::Identity(24, 24);
        check("fock.ladder.commutator-subblock",
              comm.topLeftCorner(23, 23).cwiseAbs().maxCoeff(), 1e-12);

        Matrix r4 = fock::rotation(kPi / 2, s);
        check("fock.rotation.periodicity",
              fock::max_abs(Matrix(r4 * r4 * r4 * r4 - Matrix::Identity(24, 24))), 1e-12);
    }
    {
        TruncatedSpace s(60);
        Matrix d = fock::displacement(Complex(1.0, 0.0), s);
        check("fock.displacement.vacuum-amplitude",
              std::abs(d(0, 0) - std::exp(-0.5)), 1e-12);
        Matrix dp = fock::displacement(Complex(1.5, 0.0), s);
        Matrix dm = fock::displacement(Complex(-1.5, 0.0), s);
        check("fock.displacement.inverse",
              fock::max_abs(Matrix((dp * dm).topLeftCorner(40, 40) - Matrix::Identity(40, 40))),
              1e-10);
    }
    {
        TruncatedSpace s(100);
        Matrix sq = fock::squeeze(0.5, s);
        auto ops = fock::ladder_operators(s);
        Matrix x = (ops.a + ops.a_dag) / std::sqrt(2.0);
        Vector v = sq * fock::fock_state(0, s);
        const double var = (v.adjoint() * x * x * v)(0, 0).real();
        check("fock.squeeze.variance", std::abs(var - std::exp(1.0) / 2.0), 1e-9);
    }
    {
        TruncatedSpace s(40);
        auto bs = fock::beamsplitter(std::acos(std::sqrt(0.64)), s, s,
                                     fock::BsConvention::LossReservoir);
        Vector alpha = fock::coherent_state(Complex(1.0, 0.0), s);
        Matrix joint = alpha * fock::fock_state(0, s).transpose();
        Matrix outj = bs->apply(joint);
        Matrix rho1 = outj * outj.adjoint();  // partial trace over mode 2
        Vector target = fock::coherent_state(Complex(0.8, 0.0), s);
        const double fid = (target.adjoint() * rho1 * target)(0, 0).real();
        check("fock.beamsplitter.coherent-split", std::abs(1.0 - fid), 1e-8);
    }
    {
        std::vector<double> h1(1);
        fock::hermite_functions(0.0, 1, h1.data());
        check("fock.quadrature.ground-state",
              std::abs(h1[0] - std::pow(kPi, -0.25)), 1e-12);
        TruncatedSpace s(24);
        auto qt = fock::quadrature_transform(fock::uniform_grid(10.0, 2001), s,
                                             fock::Quadrature::X);
        const double dg = qt.grid(1) - qt.grid(0);
        Matrix gram = qt.amplitudes.adjoint() * qt.amplitudes * dg;
        double worst = 0.0;
        for (int m = 0; m <= 20; ++m)
            for (int n = 0; n <= 20; ++n)
                worst = std::max(worst, std::abs(gram(m, n) - (m == n ? 1.0 : 0.0)));
        check("fock.quadrature.orthonormality", worst, 1e-6);
    }
    {
        const int dim = 20;
        const double sgate = 0.3;
        TruncatedSpace s(dim);
        auto cz = fock::cz_gate(sgate, s, s);
        auto ops = fock::ladder_operators(s);
        Matrix x = (ops.a + ops.a_dag) / std::sqrt(2.0);
        Matrix gen = Matrix::Zero(dim * dim, dim * dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int ap = 0; ap < dim; ++ap)
                    for (int bp = 0; bp < dim; ++bp)
                        gen(a * dim + b, ap * dim + bp) = sgate * x(a, ap) * x(b, bp);
        Matrix dense = fock::unitary_from_hermitian_generator(gen);
        Vector v1 = fock::coherent_state(Complex(0.3, 0.0), s);
        Vector v2 = fock::coherent_state(Complex(-0.15, 0.0), s);
        Matrix joint = v1 * v2.transpose();
        Matrix outj = cz->apply(joint);
        Eigen::VectorXcd flat(dim * dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) flat(a * dim + b) = joint(a, b);
        Eigen::VectorXcd ref = dense * flat;
        double worst = 0.0;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                worst = std::max(worst, std::abs(outj(a, b) - ref(a * dim + b)));
        check("fock.cz.matches-exponential", worst, 1e-8);
    }
    {
        TruncatedSpace s(20);
        fock::CrotGate crot(2, 1);
        Vector psi = fock::coherent_state(Complex(1.2, 0.3), s);
        Matrix joint = fock::fock_state(3, s) * psi.transpose();
        crot.apply_in_place(joint);
        Vector rotated = fock::rotation(crot.partner_angle(3), s) * psi;
        check("fock.crot.diagonal-action",
              (joint.row(3).transpose() - rotated).cwiseAbs().maxCoeff(), 1e-12);
    }

    // --- codes --------------------------------------------------------
    {
        TruncatedSpace s(41);
        auto spec = codes::RotationCodeSpec::cat(2, 2.0, s);
        auto cw = codes::cat_codewords(spec);
        // Independent route: rotated coherent superposition.
        Vector zero = Vector::Zero(41);
        for (int m = 0; m < 4; ++m)
            zero += fock::coherent_state(std::polar(2.0, m * kPi / 2.0), s);
        zero /= zero.norm();
        check("codes.cat.route-agreement", (zero - cw.zero).cwiseAbs().maxCoeff(), 1e-10);

        Matrix proj = cw.zero * cw.zero.adjoint() + cw.one * cw.one.adjoint();
        Matrix rot = fock::rotation(2.0 * kPi / 2.0, s);
        check("codes.rotation.projector-commutes",
              fock::max_abs(Matrix(rot * proj - proj * rot)), 1e-10);
        Matrix z = fock::rotation(kPi / 2.0, s);
        check("codes.rotation.logical-z",
              (z * cw.zero - cw.zero).cwiseAbs().maxCoeff() +
                  (z * cw.one + cw.one).cwiseAbs().maxCoeff(),
              1e-10);
    }
    {
        TruncatedSpace s(12);
        auto cw = codes::bin_codewords(codes::RotationCodeSpec::bin(1, 3, s));
        check("codes.bin.normalization",
              std::abs(cw.zero.norm() - 1.0) + std::abs(cw.one.norm() - 1.0), 1e-12);
        check("codes.bin.k3-one-word",
              std::abs(cw.one(1) - std::sqrt(3.0) / 2.0) + std::abs(cw.one(3) - 0.5), 1e-12);
    }
    {
        TruncatedSpace s(60);
        auto a = codes::gkp_codewords({0.5, s});
        auto b = codes::gkp_codewords_displaced_squeezed({0.5, s});
        const double f0 = std::norm((a.zero.adjoint() * b.zero)(0, 0));
        const double f1 = std::norm((a.one.adjoint() * b.one)(0, 0));
        check("codes.gkp.route-agreement", (1.0 - f0) + (1.0 - f1), 1e-8);
    }
    {
        TruncatedSpace s(40);
        Matrix zn = fock::rotation(kPi / 2.0, s);  // N = 2
        Matrix ek = codes::error_operator(-1, 0.3, s);
        Matrix lhs = zn * ek;
        Matrix rhs = std::polar(1.0, kPi * -1.0 / 2.0) * ek * zn;
        const int sub = 36;
        check("codes.errorop.z-propagation",
              fock::max_abs(Matrix((lhs - rhs).topLeftCorner(sub, sub))), 1e-10);
    }

    // --- noise --------------------------------------------------------
    {
        TruncatedSpace s(30);
        noise::LindbladParams p{0.01, 0.01};
        auto chan = noise::loss_dephasing_channel(p, s);
        Matrix rho = random_density(30, rng);
        Matrix outm = chan.apply(rho);
        check("noise.loss-dephasing.trace-preservation",
              std::abs(outm.trace().real() - 1.0), 1e-9);

        // Closed-form oracle: dephasing and loss factorize exactly.
        auto loss = noise::pure_loss_channel(std::exp(-p.kappa_tau), s);
        auto deph = noise::dephasing_channel(p.kappa_phi_tau, s);
        Matrix oracle = deph.apply(loss.apply(rho));
        check("noise.loss-dephasing.closed-form-oracle", fock::max_abs(outm - oracle), 1e-8);

        auto twice = noise::loss_dephasing_channel({0.02, 0.02}, s);
        check("noise.loss-dephasing.semigroup",
              fock::max_abs(Matrix(chan.apply(chan.apply(rho)) - twice.apply(rho))), 1e-8);
    }
    {
        TruncatedSpace s(40);
        auto loss = noise::pure_loss_channel(0.64, s);
        Vector alpha = fock::coherent_state(Complex(1.0, 0.0), s);
        Matrix outm = loss.apply(Matrix(alpha * alpha.adjoint()));
        Vector target = fock::coherent_state(Complex(0.8, 0.0), s);
        check("noise.loss.coherent-rule",
              std::abs(1.0 - (target.adjoint() * outm * target)(0, 0).real()), 1e-8);
    }
    {
        TruncatedSpace s(30);
        auto loss = noise::pure_loss_channel(0.7, s);
        auto bs = fock::beamsplitter(std::acos(std::sqrt(0.7)), s, s,
                                     fock::BsConvention::LossReservoir);
        Matrix rho = random_density(12, rng);
        Matrix rho30 = Matrix::Zero(30, 30);
        rho30.topLeftCorner(12, 12) = rho;
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho30);
        Matrix viabs = Matrix::Zero(30, 30);
        for (int k = 0; k < 30; ++k) {
            const double lam = es.eigenvalues()(k);
            if (lam < 1e-14) continue;
            Matrix joint = es.eigenvectors().col(k) * fock::fock_state(0, s).transpose();
            Matrix outj = bs->apply(joint);
            viabs += lam * outj * outj.adjoint();
        }
        check("noise.loss.vs-beamsplitter", fock::max_abs(loss.apply(rho30) - viabs), 1e-10);
    }
    {
        TruncatedSpace s(40);
        auto amp = noise::amplification_channel(1.25, s);
        Matrix vac = Matrix::Zero(40, 40);
        vac(0, 0) = 1.0;
        Matrix outm = amp.apply(vac);
        double nbar = 0.0;
        for (int n = 0; n < 40; ++n) nbar += n * outm(n, n).real();
        check("noise.amplification.added-photons", std::abs(nbar - 0.25), 1e-6);
    }
    {
        TruncatedSpace s(40);
        const double eta = 0.8;
        auto loss = noise::pure_loss_channel(eta, s);
        auto amp = noise::amplification_channel(1.0 / eta, s);
        auto disp = noise::gaussian_displacement_channel((1.0 - eta) / eta, s);
        double worst = 0.0;
        for (int n = 0; n <= 8; ++n) {
            Matrix in = Matrix::Zero(40, 40);
            in(n, n) = 1.0;
            Matrix a = amp.apply(loss.apply(in));
            Matrix b = disp.apply(in);
            worst = std::max(worst, fock::max_abs(Matrix(
                                        (a - b).topLeftCorner(30, 30))));
        }
        check("noise.amplified-loss.displacement-equivalence", worst, 1e-4);
    }

    // --- measure ------------------------------------------------------
    {
        TruncatedSpace s(40);
        auto het = measure::h_heterodyne(s);
        auto ahd = measure::h_adaptive_homodyne(s);
        double dmax = 0.0;
        for (int n = 0; n < 40; ++n)
            dmax = std::max({dmax, std::abs(het.entries(n, n) - 1.0),
                             std::abs(ahd.entries(n, n) - 1.0)});
        check("measure.h.unit-diagonal", dmax, 1e-8);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(het.entries);
        check("measure.h.heterodyne-psd", std::max(0.0, -es.eigenvalues().minCoeff()), 1e-8);
        check("measure.ahd.moment-m10", std::abs(measure::ahd_moment(1, 0) - 1.0 / 3.0), 1e-12);
        check("measure.ahd.moment-m11", std::abs(measure::ahd_moment(1, 1) - 1.0 / 3.0), 1e-12);
    }
    {
        TruncatedSpace s(60);
        auto h = measure::h_canonical(s);
        if (fault == "hmatrix") h.entries(3, 3) += 0.05;  // negative control
        measure::PhaseGrid grid(4096);
        // sum_b F(phi_b) dphi, accumulated through the same kernel used for
        // outcome weights.
        Matrix acc = Matrix::Zero(60, 60);
        for (int b = 0; b < grid.bins; ++b) {
            const double phi = grid.center(b);
            for (int m = 0; m < 60; ++m)
                for (int n = 0; n < 60; ++n)
                    acc(m, n) += grid.width() / (2 * kPi) * std::polar(1.0, phi * (m - n)) *
                                 h.entries(m, n);
        }
        check("measure.povm.completeness",
              fock::max_abs(Matrix(acc - Matrix::Identity(60, 60))), 1e-6);
    }
    {
        // Canonical-phase modular uncertainty only sees |f|: rotating the cat
        // primitive in phase space must not change it.
        TruncatedSpace s(41);
        auto cw = codes::cat_codewords(codes::RotationCodeSpec::cat(2, 2.0, s));
        auto rotated = cw;
        Matrix r = fock::rotation(0.37, s);
        rotated.plus = r * cw.plus;
        auto h = measure::h_canonical(s);
        check("measure.mpu.rotation-invariance",
              std::abs(measure::modular_phase_uncertainty(cw, h) -
                       measure::modular_phase_uncertainty(rotated, h)),
              1e-10);
    }

    // --- twirl and telecorrect ----------------------------------------
    {
        check("twirl.psucc.sigma-zero", std::abs(twirl::p_succ(0.0) - 1.0), 1e-15);
        check("twirl.psucc.large-sigma-limit", std::abs(twirl::p_succ(50.0) - 0.5), 1e-3);
        double prev = 1.0;
        double worst = 0.0;
        for (double sg = 0.1; sg <= 2.0; sg += 0.1) {
            const double v = twirl::p_succ(sg);
            if (v > prev) worst = std::max(worst, v - prev);
            prev = v;
        }
        check("twirl.psucc.monotone", worst, 1e-12);
        auto a = twirl::monte_carlo_oracle(0.3, 0.3, 20000, 7);
        auto b = twirl::monte_carlo_oracle(0.3, 0.3, 20000, 7);
        check("twirl.mc.seed-determinism",
              std::abs(a.entanglement_fidelity - b.entanglement_fidelity), 1e-15);
    }
    {
        const noise::LindbladParams p{0.01, 0.003};
        auto report = telecorrect::break_even_channel(p);
        const double fe_closed =
            0.25 * (1.0 + std::exp(-p.kappa_tau) +
                    2.0 * std::exp(-0.5 * (p.kappa_tau + p.kappa_phi_tau)));
        check("telecorrect.breakeven.closed-form",
              std::abs(report.entanglement_fidelity - fe_closed), 1e-10);
    }

    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace bqec::runner
