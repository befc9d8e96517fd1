#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fibrosim/model.hpp"
#include "fibrosim/pde.hpp"

namespace fibrosim {

/// Flat `key = value` configuration (UTF-8, one pair per line, `#` comments).
/// A file whose first non-blank character is `{` is read as the equivalent
/// flat JSON object instead.
std::map<std::string, std::string> read_flat_config(std::istream& is);

/// Applies one parameter override. Raw enzyme keys (nu, tau, pi_*) keep the
/// effective per-population degradation rates in sync; setting an effective
/// rate back-solves the production rate. Throws ParseError on unknown keys or
/// malformed values.
void apply_param_key(ModelParams& p, const std::string& key, const std::string& value);

/// All parameter keys of p in a stable order, 17 significant digits.
std::string write_params_config(const ModelParams& p);

/// Defaults plus every parameter key found in the map (non-parameter keys are
/// left for the scenario layer).
ModelParams params_from_config(const std::map<std::string, std::string>& kv);

enum class RunKind { Ode, Picard, Equilibria, Portrait, Pde, Sweep, Validate };

std::string to_string(RunKind k);

struct Scenario {
    std::string name = "scenario";
    RunKind run = RunKind::Ode;
    ModelParams params = ModelParams::defaults();
    VolumeState initial{0.0, 0.3, 0.0};
    Population alpha = Population::Healthy;
    double t_end = 100.0;
    double dt = 1e-3;
    double picard_tol = 1e-10;
    double t_max = 500.0;  // classification horizon for sweeps
    int grid_n = 50;
    int stride = 100;
    double level = 0.25;  // wave-speed tracking level
    Grid1D grid{0.0, 60.0, 400};
    ConstitutiveLaw law;
    double seed_level = 0.05;
    double seed_fraction = 0.05;
    std::string out_dir;  // empty: FIBROSIM_OUT or current directory
};

/// Built-in scenarios: `physiological` (healthy cells seeded without matrix),
/// `fibrotic` (healthy equilibrium plus a small tumor fraction), `invasion`
/// (1D spatial run of the fibrotic setup).
Scenario preset_scenario(const std::string& name);

/// Scenarios of a config file: global parameter overrides as bare keys,
/// per-scenario fields under `scenario.<name>.<field>` (with parameter
/// overrides under `scenario.<name>.param.<key>`). Every scenario's
/// parameters must pass validate_params.
std::vector<Scenario> parse_config(std::istream& is);
std::vector<Scenario> parse_config_file(const std::string& path);

/// Inverse of parse_config for one scenario (field-for-field round trip).
std::string write_scenario_config(const Scenario& s);

struct ScenarioResult {
    int status = 0;
    std::string summary;  // one line for standard output
    std::vector<std::string> artifacts;
};

ScenarioResult run_scenario(const Scenario& s);

}  // namespace fibrosim
