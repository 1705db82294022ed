#pragma once

#include "bqec/runner/config.hpp"
#include "bqec/telecorrect.hpp"

#include <optional>

namespace bqec::runner {

/// One output record of a parameter sweep.  Wall-clock timings live in the
/// JSON sidecar so result files stay byte-identical across re-runs.
struct ResultRow {
    int index = 0;
    std::string kind;
    std::string family;
    int order = 1;
    double param = 0.0;      // nbar (rsb), delta (gkp/twirl), 0 for break-even
    double nbar_code = 0.0;
    std::string scheme = "-";
    double eta = 1.0;
    double kappa_tau = 0.0;
    double kappa_phi_tau = 0.0;
    double entanglement_fidelity = 0.0;
    double avg_gate_fidelity = 0.0;
    double infidelity = 0.0;
    double break_even_infidelity = 0.0;
    double twirl_infidelity = std::numeric_limits<double>::quiet_NaN();
    double mc_entanglement_fidelity = std::numeric_limits<double>::quiet_NaN();
    double mc_stderr = std::numeric_limits<double>::quiet_NaN();
    std::string flags = "ok";
};

struct SweepResult {
    std::vector<ResultRow> rows;
    int computed = 0;
    int skipped = 0;
    double wall_time_s = 0.0;
};

/// Executes the Cartesian grid, one logical channel per point, parallel over
/// points.  Rows are written to cfg.out (with a JSON sidecar) in point-index
/// order; a re-run with an unchanged config hash recomputes only missing
/// points and produces a byte-identical file.
SweepResult run_sweep(const SweepConfig& cfg, int threads);

std::string csv_header();
std::string csv_line(const ResultRow& row);
void write_rows_csv(const std::string& path, const std::vector<ResultRow>& rows,
                    const SweepConfig& cfg, double wall_time_s);
std::vector<ResultRow> read_rows_csv(const std::string& path);
std::optional<std::uint64_t> sidecar_hash(const std::string& csv_path);

/// Serialize a double losslessly (17 significant digits).
std::string format_double(double v);

/// Single-point evaluation helpers shared with the acceptance suite.
ResultRow evaluate_rsb_point(const SweepConfig& cfg, double nbar, const std::string& scheme,
                             double eta_value, double kt, double kpt);
ResultRow evaluate_gkp_point(const SweepConfig& cfg, double delta, double eta_value, double kt,
                             double kpt);

}  // namespace bqec::runner
