#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace atomsplit {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Shells, Propagate, Sweep, Figure };
enum class FigurePreset { Fig1, Fig2, Fig3 };
enum class ClosedFormCoupling { R0Squared, CycleAverage };

/// Everything a run needs. Defaults are the modulated-splitting preset
/// (r0_squared = 280, epsilon = 0.8, nu = 29, tau_end = 0.567, delta_p = 0.5).
struct RunConfig {
  Mode mode = Mode::Propagate;
  FigurePreset preset = FigurePreset::Fig3;

  // modulation
  double r0_squared = 280.0;
  double epsilon = 0.8;
  double nu = 29.0;
  double phi0 = 0.0;

  // grid; nullopt means automatic
  int sublattices = 16;
  std::optional<int> shells;

  // time integration; dt nullopt means automatic
  double tau_end = 0.567;
  std::optional<double> dt;
  double tol = 1e-10;
  double delta_p = 0.5;
  double truncation_tol = 1e-6;
  double norm_tolerance = 1e-10;
  double boundary_threshold = 1e-8;

  // shell model
  bool drop_kinetic = false;
  int samples = 1000;
  ClosedFormCoupling closed_form_coupling = ClosedFormCoupling::R0Squared;

  // analysis
  double p_star = 40.0;
  double halfwidth = 6.0;
  double min_height_fraction = 0.02;

  // sweep axes; empty means the scalar value above
  std::vector<double> sweep_epsilon;
  std::vector<double> sweep_nu;
  std::vector<double> sweep_r0_squared;
  std::vector<double> sweep_tau_end;
  bool resume = false;

  std::string output = ".";
  int jobs = 1;
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "ATOMSPLIT_OUTPUT_DIR";

/// All recognised keys, in documentation order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value. Throws ConfigError naming the key.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Cross-field checks; throws ConfigError.
void validate(const RunConfig& config);

/// Parses `key = value` lines with `#` comments on top of `base`, then
/// validates. Errors name the key and the line.
RunConfig parse_config(std::string_view text, const RunConfig& base = RunConfig{});

/// Default config with the output directory taken from the environment.
RunConfig default_config();

std::string to_string(Mode mode);
std::string to_string(FigurePreset preset);
std::string to_string(ClosedFormCoupling coupling);
FigurePreset parse_preset(std::string_view text);

/// Serialises every key in `key = value` form; parse_config reads it back.
std::string format_config(const RunConfig& config);

}  // namespace atomsplit
