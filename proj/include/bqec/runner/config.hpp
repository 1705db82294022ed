#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bqec::runner {

/// Error in user-supplied configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Minimal TOML document: [section] headers, key = value pairs with strings,
/// numbers, booleans and flat arrays, and # comments.  Covers the sweep
/// configuration format documented in the README.
class TomlTable {
  public:
    static TomlTable parse_file(const std::string& path);
    static TomlTable parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    double number(const std::string& section, const std::string& key, double fallback) const;
    double number(const std::string& section, const std::string& key) const;
    std::string str(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    bool boolean(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key) const;
    std::vector<std::string> strings(const std::string& section, const std::string& key) const;

    /// Sorted section.key = raw-value lines, used for hashing.
    std::string canonical() const;

  private:
    const std::string& raw(const std::string& section, const std::string& key) const;
    std::map<std::string, std::string> values_;  // "section.key" -> raw value text
};

enum class ExperimentKind { Rsb, Gkp, Twirl, BreakEven };

std::string experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& name);

/// Declarative sweep description.  Grids are Cartesian; every produced row
/// carries the config hash in the sidecar for idempotent re-runs.
struct SweepConfig {
    ExperimentKind kind = ExperimentKind::Rsb;

    // rsb code grid
    std::string family = "bin";  // cat | bin
    int order = 2;
    std::vector<double> nbar;

    // ancilla rail
    std::string anc_family = "cat";
    int anc_order = 1;
    double anc_alpha = 10.0;
    bool anc_match_nbar = false;
    std::string anc_scheme = "can";

    // noise grids; if kappa_ratio > 0, kappa_phi_tau = kappa_tau / kappa_ratio
    std::vector<double> kappa_tau{0.0};
    std::vector<double> kappa_phi_tau;
    double kappa_ratio = 0.0;

    // measurement
    std::vector<std::string> schemes{"can"};
    std::vector<double> eta{1.0};

    // gkp
    std::vector<double> delta;
    std::string efficiency_model = "rescaled";  // rescaled | amplified

    // numerics
    int dim = 0;  // 0 = automatic from the code support
    int anc_dim = 0;
    int bins = 512;
    int grid_points = 1024;
    std::uint64_t seed = 1;
    std::uint64_t mc_samples = 0;

    std::string out = "results.csv";

    std::string canonical_text;
    std::uint64_t hash = 0;

    static SweepConfig from_toml(const TomlTable& t);
    static SweepConfig from_file(const std::string& path);
    void finalize();  // validate, fill defaults, compute hash
};

std::uint64_t fnv1a(const std::string& text);

}  // namespace bqec::runner
