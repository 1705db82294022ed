#include <CLI11.hpp>

#include "bqec/codes.hpp"
#include "bqec/runner/cache.hpp"
#include "bqec/runner/config.hpp"
#include "bqec/runner/plots.hpp"
#include "bqec/runner/sweep.hpp"
#include "bqec/runner/validate.hpp"
#include "bqec/twirl.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

int cmd_validate(const std::string& fault) {
    auto results = bqec::runner::run_validation(fault);
    int failures = 0;
    for (const auto& r : results) {
        std::printf("%-48s %-4s  measured %.3e  tolerance %.1e\n", r.name.c_str(),
                    r.pass ? "ok" : "FAIL", r.measured, r.tolerance);
        if (!r.pass) ++failures;
    }
    std::printf("%zu checks, %d failed\n", results.size(), failures);
    return failures == 0 ? 0 : 1;
}

int cmd_codes_info(const std::string& family, int order, double alpha, int k, double delta,
                   int dim, const std::string& json_out) {
    using namespace bqec;
    codes::CodeWords cw;
    if (family == "cat") {
        const int d = dim > 0 ? dim : codes::required_cat_dim(order, alpha);
        cw = codes::cat_codewords(codes::RotationCodeSpec::cat(order, alpha, fock::TruncatedSpace(d)));
    } else if (family == "bin") {
        const int d = dim > 0 ? dim : k * order + 2;
        cw = codes::bin_codewords(codes::RotationCodeSpec::bin(order, k, fock::TruncatedSpace(d)));
    } else if (family == "gkp") {
        const int d = dim > 0 ? dim : 120;
        cw = codes::gkp_codewords({delta, fock::TruncatedSpace(d)});
    } else if (family == "trivial") {
        cw = codes::trivial_codewords(fock::TruncatedSpace(dim > 0 ? dim : 2));
    } else {
        std::fprintf(stderr, "unknown family: %s\n", family.c_str());
        return 2;
    }
    std::printf("family           %s\n", codes::family_name(cw.family).c_str());
    std::printf("order            %d\n", cw.order);
    std::printf("parameter        %.6g\n", cw.parameter);
    std::printf("dim              %d\n", cw.dim);
    std::printf("mean photons     %.9g\n", codes::mean_photon_number(cw));
    std::printf("support stride   %d\n", cw.support_stride());
    std::printf("<zero|one>       %.3e\n", std::abs((cw.zero.adjoint() * cw.one)(0, 0)));
    if (cw.family == codes::Family::Gkp)
        std::printf("squeezing        %.4g dB\n", codes::squeezing_db(cw.parameter));
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        out << codes::to_json(cw).dump(2) << '\n';
        std::printf("wrote %s\n", json_out.c_str());
    }
    return 0;
}

int cmd_hmatrix_dump(const std::string& scheme, int dim, const std::string& out_path, int lmax) {
    using namespace bqec;
    measure::HMatrix h;
    if (scheme == "ahd" && lmax > 0)
        h = measure::h_adaptive_homodyne(fock::TruncatedSpace(dim), lmax);
    else
        h = runner::h_for_scheme(measure::scheme_from_name(scheme), dim);
    std::ofstream out(out_path);
    if (!out) {
        std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
        return 2;
    }
    out << "row,col,value\n";
    for (int m = 0; m < h.dim(); ++m)
        for (int n = 0; n < h.dim(); ++n)
            out << m << ',' << n << ',' << runner::format_double(h.entries(m, n)) << '\n';
    std::printf("wrote %s (%d x %d)\n", out_path.c_str(), h.dim(), h.dim());
    return 0;
}

int cmd_twirl(double delta_data, double delta_anci, double eta, bool cc, std::uint64_t mc_samples,
              std::uint64_t seed) {
    using namespace bqec;
    auto fid = twirl::twirl_fidelity({delta_data, delta_anci, eta}, cc);
    std::printf("sigma_data^2            %.12g\n", fid.sigma_data_sq);
    std::printf("sigma_anci^2            %.12g\n", fid.sigma_anci_sq);
    std::printf("entanglement fidelity   %.12g\n", fid.entanglement_fidelity);
    std::printf("avg gate fidelity       %.12g\n", fid.avg_gate_fidelity);
    std::printf("infidelity              %.12g\n", 1.0 - fid.avg_gate_fidelity);
    if (mc_samples > 0) {
        auto mc = twirl::monte_carlo_oracle(std::sqrt(fid.sigma_data_sq),
                                            std::sqrt(fid.sigma_anci_sq), mc_samples, seed);
        std::printf("monte carlo estimate    %.12g +- %.3g (%llu samples)\n",
                    mc.entanglement_fidelity, mc.stderr_,
                    static_cast<unsigned long long>(mc.samples));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated-Fock-space telecorrection simulator for bosonic codes"};
    app.require_subcommand(1);

    auto* validate = app.add_subcommand("validate", "run the invariant suite");
    std::string fault;
    validate->add_option("--inject-fault", fault, "perturb a subsystem as a negative control");

    auto* info = app.add_subcommand("codes", "code word utilities");
    auto* info_sub = info->add_subcommand("info", "print code word summary");
    std::string family = "cat";
    int order = 1, kparam = 2, dim = 0;
    double alpha = 2.0, delta = 0.3;
    std::string json_out;
    info_sub->add_option("--family", family, "cat|bin|gkp|trivial")->required();
    info_sub->add_option("--order", order, "rotation order N");
    info_sub->add_option("--alpha", alpha, "cat amplitude");
    info_sub->add_option("--k", kparam, "bin truncation K");
    info_sub->add_option("--delta", delta, "gkp regularization");
    info_sub->add_option("--dim", dim, "Fock cutoff (0 = automatic)");
    info_sub->add_option("--json", json_out, "write code words to a JSON file");

    auto* hdump = app.add_subcommand("hmatrix", "H matrix utilities");
    auto* hdump_sub = hdump->add_subcommand("dump", "write an H matrix to CSV");
    std::string scheme = "het", hout = "h.csv";
    int hdim = 60, lmax = -1;
    hdump_sub->add_option("--scheme", scheme, "can|het|ahd")->required();
    hdump_sub->add_option("--dim", hdim, "Fock cutoff")->required();
    hdump_sub->add_option("--out", hout, "output CSV path")->required();
    hdump_sub->add_option("--lmax", lmax, "ahd series truncation");

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    std::string config_path, sweep_out;
    int threads = 2;
    sweep->add_option("--config", config_path, "TOML sweep configuration")->required();
    sweep->add_option("--out", sweep_out, "override output CSV path");
    sweep->add_option("--threads", threads, "worker threads");

    auto* tw = app.add_subcommand("twirl", "analytic GKP model");
    double delta_data = 0.3, delta_anci = 0.3, eta = 1.0;
    bool cc = false;
    std::uint64_t mc_samples = 0, seed = 1;
    tw->add_option("--delta-data", delta_data, "data regularization")->required();
    tw->add_option("--delta-anci", delta_anci, "ancilla regularization")->required();
    tw->add_option("--eta", eta, "measurement efficiency");
    tw->add_flag("--cc", cc, "halve the loss variance (rescaled decision boundaries)");
    tw->add_option("--mc-samples", mc_samples, "Monte Carlo cross-check samples");
    tw->add_option("--seed", seed, "Monte Carlo seed");

    auto* plot = app.add_subcommand("plot-data", "emit per-panel plot CSVs");
    std::string recipe, plot_in, out_dir = "plots";
    plot->add_option("--recipe", recipe, "fig5|fig6|fig9|fig10")->required();
    plot->add_option("--in", plot_in, "results CSV")->required();
    plot->add_option("--out-dir", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(fault);
        if (info_sub->parsed())
            return cmd_codes_info(family, order, alpha, kparam, delta, dim, json_out);
        if (hdump_sub->parsed()) return cmd_hmatrix_dump(scheme, hdim, hout, lmax);
        if (sweep->parsed()) {
            auto cfg = bqec::runner::SweepConfig::from_file(config_path);
            if (!sweep_out.empty()) cfg.out = sweep_out;
            auto result = bqec::runner::run_sweep(cfg, threads);
            std::printf("sweep: %zu rows (%d computed, %d reused) -> %s [%.1f s]\n",
                        result.rows.size(), result.computed, result.skipped, cfg.out.c_str(),
                        result.wall_time_s);
            for (const auto& r : result.rows)
                if (r.flags != "ok")
                    std::fprintf(stderr, "point %d: %s\n", r.index, r.flags.c_str());
            return 0;
        }
        if (tw->parsed()) return cmd_twirl(delta_data, delta_anci, eta, cc, mc_samples, seed);
        if (plot->parsed()) {
            auto rows = bqec::runner::read_rows_csv(plot_in);
            auto files = bqec::runner::emit_plot_data(recipe, rows, out_dir);
            for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
            return 0;
        }
    } catch (const bqec::runner::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
