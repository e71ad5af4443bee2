#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coxnet/analytic.hpp"
#include "coxnet/cox.hpp"
#include "coxnet/sim.hpp"

namespace coxnet {

enum class Command {
    assoc,
    coverage_user,
    coverage_relay,
    throughput,
    sweep,
    simulate,
    validate,
};

struct SweepSpec {
    std::string key;  // a NetworkConfig field name, e.g. "w2_mhz"
    std::vector<double> values;
};

struct ExperimentSpec {
    Command command = Command::assoc;
    NetworkConfig cfg;
    std::vector<double> tau_grid_db{-10.0, 0.0, 10.0};
    std::optional<SweepSpec> sweep;
    long n_reps = 0;          // 0 = per-command default
    double window_km = 0.0;   // 0 = heuristic default
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
    double tol_scale = 1.0;
    std::string dump_realization_path;  // simulate only, optional
};

/// Parses a flat key=value config file ('#' comments). Every model
/// parameter must be present; missing keys are a hard error listing them.
/// Optional w_mhz and gamma entries are consistency-checked, never used as
/// overrides.
NetworkConfig load_config(const std::string& path);

/// Canonical emission; load_config(save_config(cfg)) round-trips exactly.
void save_config(const NetworkConfig& cfg, std::ostream& os);

/// "A:B:STEP" -> inclusive grid.
std::vector<double> parse_grid(const std::string& text);

/// Assigns a sweep value to the named config field; unknown names throw.
void apply_config_value(NetworkConfig& cfg, const std::string& key, double value);

/// Runs one experiment; writes CSV artifacts into out_dir atomically.
/// Returns 0 on success, 2 on quadrature quality errors, 3 on validation
/// failure.
int run(const ExperimentSpec& spec);

}  // namespace coxnet
