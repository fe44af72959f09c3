#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "servo/plant.hpp"
#include "servo/sim.hpp"

namespace servo {

/// The full experiment surface with every default resolved. Field
/// semantics and defaults are defined once in config_schema().
struct ExperimentConfig {
    PlantParams plant;

    // fuzzy
    std::size_t input_mfs = 10;
    std::size_t output_mfs = 14;
    double y_lo = 0.0;
    double y_hi = 20.0;
    double de_lo = -5.0;
    double de_hi = 5.0;

    // controller
    std::vector<double> K{4.0, 4.0};
    double p_gain = 1000.0;
    double gamma_f = 0.5;
    double gamma_g = 0.5;
    double g_min = 0.05;
    double u_max = 10.0;
    double theta_f_bound = 50.0;
    double theta_g_lo = 0.05;
    double theta_g_hi = 100.0;
    std::vector<double> theta_f_init{0.0};   ///< size 1 broadcasts
    std::vector<double> theta_g_init{60.0};  ///< size 1 broadcasts

    // pso
    std::size_t particles = 30;
    std::size_t max_iters = 100;  ///< 0 skips the swarm entirely
    double w = 0.72;
    double c1 = 1.49;
    double c2 = 1.49;
    std::size_t stall_iters = 25;
    double stall_tol = 1e-8;
    std::uint64_t seed = 1;
    double v_max_frac = 0.2;
    unsigned workers = 1;  ///< execution detail: never persisted
    bool tune_theta_f = true;
    bool tune_theta_g = true;
    bool tune_scales = true;
    bool tune_K = true;
    double scale_lo = 0.2;
    double scale_hi = 5.0;
    double k_lo = 0.1;
    double k_hi = 50.0;

    // sim
    double dt = 1e-3;
    double t_final = 10.0;
    std::size_t log_every = 10;
    double x0 = 0.0;
    double v0 = 10.0;
    double P1_0 = 3.52e5;
    double P2_0 = 3.0e5;
    double dist_amp = 0.0;
    double dist_freq = 0.0;

    // trajectory
    double y0 = 9.0;
    double y1 = 15.5;

    // output
    std::string out_dir = "out";

    bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One schema row: file location of the key, documentation, and the
/// accessors that read and write the corresponding config field.
struct KeyInfo {
    std::string section;
    std::string key;
    std::string description;
    bool persist = true;
    std::function<void(ExperimentConfig&, std::string_view)> assign;  ///< throws ConfigError
    std::function<std::string(const ExperimentConfig&)> format;
};

/// The single source of truth for sections, keys, defaults, and docs.
const std::vector<KeyInfo>& config_schema();

/// Parses INI text ('#'/';' comments, [section] headers, key = value,
/// duplicates last-wins). Unknown sections or keys and malformed values
/// raise ConfigError with `name:line:column:` context. An empty file
/// yields the defaults.
ExperimentConfig parse_config(std::string_view text, const std::string& name = "config");

/// parse_config over a file's contents; ConfigError if unreadable.
ExperimentConfig parse_config_file(const std::string& path);

/// Cross-field validation with `section.key: rule` messages.
void validate_config(const ExperimentConfig& cfg);

/// Serializes every persisted key; parse_config(to_ini(c)) == c up to
/// never-persisted fields. Doubles use shortest round-trip formatting.
std::string to_ini(const ExperimentConfig& cfg);

/// One "section.key (default ...): description" line per key, for help
/// output and the documentation-drift test.
std::string config_reference();

/// Builds the validated experiment bundle. pso.initial_guess is left to
/// compare_experiment.
ExperimentSetup make_setup(const ExperimentConfig& cfg);

/// Rewrites the config so the baseline arm reproduces `candidate`:
/// theta inits, K, and input universes absorb the decoded blocks. The
/// result feeds straight back into the simulate path.
ExperimentConfig fold_candidate(const ExperimentConfig& cfg, const CandidateEncoding& encoding,
                                std::span<const double> candidate);

}  // namespace servo
