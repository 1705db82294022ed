#include "bqec/runner/sweep.hpp"

#include "bqec/runner/cache.hpp"
#include "bqec/twirl.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace bqec::runner {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header() {
    return "index,kind,family,order,param,nbar_code,scheme,eta,kappa_tau,kappa_phi_tau,"
           "entanglement_fidelity,avg_gate_fidelity,infidelity,break_even_infidelity,"
           "twirl_infidelity,mc_entanglement_fidelity,mc_stderr,flags";
}

std::string csv_line(const ResultRow& r) {
    std::ostringstream ss;
    ss << r.index << ',' << r.kind << ',' << r.family << ',' << r.order << ','
       << format_double(r.param) << ',' << format_double(r.nbar_code) << ',' << r.scheme << ','
       << format_double(r.eta) << ',' << format_double(r.kappa_tau) << ','
       << format_double(r.kappa_phi_tau) << ',' << format_double(r.entanglement_fidelity) << ','
       << format_double(r.avg_gate_fidelity) << ',' << format_double(r.infidelity) << ','
       << format_double(r.break_even_infidelity) << ',' << format_double(r.twirl_infidelity)
       << ',' << format_double(r.mc_entanglement_fidelity) << ',' << format_double(r.mc_stderr)
       << ',' << r.flags;
    return ss.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::vector<ResultRow> read_rows_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results file: " + path);
    std::string line;
    std::getline(in, line);
    if (line != csv_header()) throw std::runtime_error("unexpected results header in " + path);
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 18) throw std::runtime_error("bad results row in " + path);
        ResultRow r;
        r.index = std::stoi(f[0]);
        r.kind = f[1];
        r.family = f[2];
        r.order = std::stoi(f[3]);
        r.param = std::stod(f[4]);
        r.nbar_code = std::stod(f[5]);
        r.scheme = f[6];
        r.eta = std::stod(f[7]);
        r.kappa_tau = std::stod(f[8]);
        r.kappa_phi_tau = std::stod(f[9]);
        r.entanglement_fidelity = std::stod(f[10]);
        r.avg_gate_fidelity = std::stod(f[11]);
        r.infidelity = std::stod(f[12]);
        r.break_even_infidelity = std::stod(f[13]);
        r.twirl_infidelity = std::stod(f[14]);
        r.mc_entanglement_fidelity = std::stod(f[15]);
        r.mc_stderr = std::stod(f[16]);
        r.flags = f[17];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_rows_csv(const std::string& path, const std::vector<ResultRow>& rows,
                    const SweepConfig& cfg, double wall_time_s) {
    {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write results file: " + path);
        out << csv_header() << '\n';
        for (const auto& r : rows) out << csv_line(r) << '\n';
    }
    nlohmann::json side{{"config_hash", cfg.hash},
                        {"config", cfg.canonical_text},
                        {"rows", rows.size()},
                        {"wall_time_s", wall_time_s},
                        {"float_format", "%.17g"},
                        {"tolerances",
                         {{"cptp", 1e-5}, {"completeness", 1e-6}, {"integrator", 1e-10}}}};
    std::ofstream sc(path + ".meta.json");
    sc << side.dump(2) << '\n';
}

std::optional<std::uint64_t> sidecar_hash(const std::string& csv_path) {
    std::ifstream in(csv_path + ".meta.json");
    if (!in) return std::nullopt;
    try {
        nlohmann::json j;
        in >> j;
        return j.at("config_hash").get<std::uint64_t>();
    } catch (...) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Point evaluation.

namespace {

codes::CodeWords build_rsb_code(const std::string& family, int order, double nbar, int dim_hint) {
    if (family == "bin") {
        const double kf = 2.0 * nbar / order;
        const int k = int(std::lround(kf));
        if (std::abs(kf - k) > 1e-9 || k < 2)
            throw ConfigError("bin code: nbar=" + std::to_string(nbar) +
                              " needs integer K = 2 nbar / N >= 2");
        const int dim = dim_hint > 0 ? dim_hint : k * order + 2;
        return codes::bin_codewords(codes::RotationCodeSpec::bin(order, k, fock::TruncatedSpace(dim)));
    }
    if (family == "cat") {
        const double alpha = std::sqrt(nbar);
        const int dim = dim_hint > 0 ? dim_hint : codes::required_cat_dim(order, alpha);
        return codes::cat_codewords(
            codes::RotationCodeSpec::cat(order, alpha, fock::TruncatedSpace(dim)));
    }
    throw ConfigError("unknown rsb code family: " + family);
}

}  // namespace

ResultRow evaluate_rsb_point(const SweepConfig& cfg, double nbar, const std::string& scheme,
                             double eta_value, double kt, double kpt) {
    ResultRow row;
    row.kind = "rsb";
    row.family = cfg.family;
    row.order = cfg.order;
    row.param = nbar;
    row.scheme = scheme;
    row.eta = eta_value;
    row.kappa_tau = kt;
    row.kappa_phi_tau = kpt;

    telecorrect::RsbCircuitConfig circuit;
    circuit.data_code = build_rsb_code(cfg.family, cfg.order, nbar, cfg.dim);
    const double anc_alpha = cfg.anc_match_nbar ? std::sqrt(nbar) : cfg.anc_alpha;
    const int anc_dim =
        cfg.anc_dim > 0 ? cfg.anc_dim : codes::required_cat_dim(cfg.anc_order, anc_alpha);
    circuit.ancilla_code = codes::cat_codewords(
        codes::RotationCodeSpec::cat(cfg.anc_order, anc_alpha, fock::TruncatedSpace(anc_dim)));
    circuit.data_h = h_for_scheme(measure::scheme_from_name(scheme), circuit.data_code.dim);
    circuit.ancilla_h =
        h_for_scheme(measure::scheme_from_name(cfg.anc_scheme), circuit.ancilla_code.dim);
    circuit.data_eta = eta_value;
    circuit.noise = {kt, kpt};
    circuit.bins = cfg.bins;

    row.nbar_code = codes::mean_photon_number(circuit.data_code);
    auto weights = telecorrect::rsb_outcome_weights(circuit);
    auto channel = telecorrect::assemble_logical_channel(weights);
    auto report = telecorrect::fidelity_report(channel, circuit.noise);
    row.entanglement_fidelity = report.entanglement_fidelity;
    row.avg_gate_fidelity = report.avg_gate_fidelity;
    row.infidelity = 1.0 - report.avg_gate_fidelity;
    row.break_even_infidelity = 1.0 - report.break_even_avg_gate_fidelity;
    return row;
}

ResultRow evaluate_gkp_point(const SweepConfig& cfg, double delta, double eta_value, double kt,
                             double kpt) {
    ResultRow row;
    row.kind = "gkp";
    row.family = "gkp";
    row.order = 1;
    row.param = delta;
    row.scheme = "hom";
    row.eta = eta_value;
    row.kappa_tau = kt;
    row.kappa_phi_tau = kpt;

    telecorrect::GkpCircuitConfig circuit;
    circuit.delta_data = delta;
    circuit.delta_anci = delta;
    circuit.eta = eta_value;
    circuit.efficiency_model = cfg.efficiency_model == "amplified"
                                   ? telecorrect::EfficiencyModel::Amplified
                                   : telecorrect::EfficiencyModel::LossRescaledBoundaries;
    circuit.noise = {kt, kpt};
    circuit.dim = cfg.dim > 0 ? cfg.dim : 150;
    circuit.grid_points = cfg.grid_points;

    row.nbar_code = codes::mean_photon_number(
        codes::gkp_codewords({delta, fock::TruncatedSpace(circuit.dim)}));
    auto weights = telecorrect::gkp_outcome_weights(circuit);
    auto channel = telecorrect::assemble_logical_channel(weights);
    auto report = telecorrect::fidelity_report(channel, circuit.noise);
    row.entanglement_fidelity = report.entanglement_fidelity;
    row.avg_gate_fidelity = report.avg_gate_fidelity;
    row.infidelity = 1.0 - report.avg_gate_fidelity;
    row.break_even_infidelity = 1.0 - report.break_even_avg_gate_fidelity;

    const bool cc = cfg.efficiency_model != "amplified";
    auto tw = twirl::twirl_fidelity({delta, delta, eta_value}, cc);
    row.twirl_infidelity = 1.0 - tw.avg_gate_fidelity;
    return row;
}

namespace {

ResultRow evaluate_twirl_point(const SweepConfig& cfg, double delta, double eta_value) {
    ResultRow row;
    row.kind = "twirl";
    row.family = "gkp";
    row.order = 1;
    row.param = delta;
    row.scheme = "hom";
    row.eta = eta_value;
    const bool cc = cfg.efficiency_model != "amplified";
    auto tw = twirl::twirl_fidelity({delta, delta, eta_value}, cc);
    row.entanglement_fidelity = tw.entanglement_fidelity;
    row.avg_gate_fidelity = tw.avg_gate_fidelity;
    row.infidelity = 1.0 - tw.avg_gate_fidelity;
    row.break_even_infidelity = 0.0;
    row.twirl_infidelity = row.infidelity;
    if (cfg.mc_samples > 0) {
        auto mc = twirl::monte_carlo_oracle(std::sqrt(tw.sigma_data_sq),
                                            std::sqrt(tw.sigma_anci_sq), cfg.mc_samples, cfg.seed);
        row.mc_entanglement_fidelity = mc.entanglement_fidelity;
        row.mc_stderr = mc.stderr_;
    }
    return row;
}

ResultRow evaluate_break_even_point(double kt, double kpt) {
    ResultRow row;
    row.kind = "break-even";
    row.family = "trivial";
    row.order = 1;
    row.param = 0.0;
    row.nbar_code = 0.5;
    row.scheme = "-";
    row.kappa_tau = kt;
    row.kappa_phi_tau = kpt;
    auto report = telecorrect::break_even_channel({kt, kpt});
    row.entanglement_fidelity = report.entanglement_fidelity;
    row.avg_gate_fidelity = report.avg_gate_fidelity;
    row.infidelity = 1.0 - report.avg_gate_fidelity;
    row.break_even_infidelity = row.infidelity;
    return row;
}

struct PointSpec {
    int index;
    std::function<ResultRow()> run;
};

std::vector<PointSpec> enumerate_points(const SweepConfig& cfg) {
    std::vector<PointSpec> points;
    int idx = 0;
    auto kphi_of = [&](double kt, size_t i) {
        return cfg.kappa_ratio > 0.0 ? kt / cfg.kappa_ratio : cfg.kappa_phi_tau[i];
    };
    auto noise_pairs = [&]() {
        std::vector<std::pair<double, double>> ps;
        for (double kt : cfg.kappa_tau) {
            if (cfg.kappa_ratio > 0.0) {
                ps.emplace_back(kt, kt / cfg.kappa_ratio);
            } else {
                for (double kp : cfg.kappa_phi_tau) ps.emplace_back(kt, kp);
            }
        }
        return ps;
    };
    (void)kphi_of;

    switch (cfg.kind) {
        case ExperimentKind::Rsb: {
            for (auto [kt, kp] : noise_pairs()) {
                for (const auto& scheme : cfg.schemes)
                    for (double e : cfg.eta)
                        for (double nb : cfg.nbar) {
                            points.push_back(
                                {idx++, [=, &cfg]() {
                                     return evaluate_rsb_point(cfg, nb, scheme, e, kt, kp);
                                 }});
                        }
                points.push_back({idx++, [=]() { return evaluate_break_even_point(kt, kp); }});
            }
            break;
        }
        case ExperimentKind::Gkp: {
            for (auto [kt, kp] : noise_pairs()) {
                for (double e : cfg.eta)
                    for (double d : cfg.delta)
                        points.push_back({idx++, [=, &cfg]() {
                                              return evaluate_gkp_point(cfg, d, e, kt, kp);
                                          }});
                points.push_back({idx++, [=]() { return evaluate_break_even_point(kt, kp); }});
            }
            break;
        }
        case ExperimentKind::Twirl: {
            for (double e : cfg.eta)
                for (double d : cfg.delta)
                    points.push_back(
                        {idx++, [=, &cfg]() { return evaluate_twirl_point(cfg, d, e); }});
            break;
        }
        case ExperimentKind::BreakEven: {
            for (auto [kt, kp] : noise_pairs())
                points.push_back({idx++, [=]() { return evaluate_break_even_point(kt, kp); }});
            break;
        }
    }
    return points;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    auto points = enumerate_points(cfg);

    SweepResult result;
    result.rows.resize(points.size());
    std::vector<char> done(points.size(), 0);

    // Resume: accept completed points from an existing run of the same config.
    auto adopt = [&](const std::string& path) {
        auto hash = sidecar_hash(path);
        if (!hash || *hash != cfg.hash) return;
        try {
            for (auto& r : read_rows_csv(path)) {
                if (r.index >= 0 && size_t(r.index) < points.size() && !done[r.index]) {
                    result.rows[r.index] = r;
                    done[r.index] = 1;
                    ++result.skipped;
                }
            }
        } catch (...) {
        }
    };
    adopt(cfg.out);

    std::atomic<size_t> next{0};
    std::mutex partial_mu;
    std::ofstream partial(cfg.out + ".partial", std::ios::app);

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= points.size()) break;
            if (done[i]) continue;
            ResultRow row;
            try {
                row = points[i].run();
            } catch (const std::exception& e) {
                row.flags = std::string("error:") + e.what();
                for (char& c : row.flags)
                    if (c == ',' || c == '\n') c = ';';
            }
            row.index = points[i].index;
            result.rows[i] = row;
            done[i] = 1;
            std::lock_guard<std::mutex> lock(partial_mu);
            partial << csv_line(row) << '\n' << std::flush;
            ++result.computed;
        }
    };

    const int nthreads = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    const auto t1 = std::chrono::steady_clock::now();
    result.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    write_rows_csv(cfg.out, result.rows, cfg, result.wall_time_s);
    partial.close();
    std::remove((cfg.out + ".partial").c_str());
    return result;
}

}  // namespace bqec::runner
