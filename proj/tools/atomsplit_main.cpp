// Command-line front end: `atomsplit <shells|propagate|sweep|figure> [options]`.
//
// Settings come from built-in defaults, then an optional --config file of
// `key = value` lines, then command-line flags named after the same keys.
// Exit status: 0 when every run met its thresholds, 1 otherwise, 2 on a
// configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "atomsplit/app.hpp"
#include "atomsplit/config.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw atomsplit::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Momentum-space beam splitting in a modulated standing wave"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);

  const std::vector<std::string> flag_keys{"drop_kinetic", "resume"};
  std::map<std::string, std::string> overrides;
  std::map<std::string, bool> flags;
  for (const auto& key : atomsplit::config_keys()) {
    if (key == "mode") continue;
    if (std::find(flag_keys.begin(), flag_keys.end(), key) != flag_keys.end()) {
      app.add_flag("--" + key, flags[key], "set " + key + " = true");
    } else {
      app.add_option("--" + key, overrides[key], "override config key " + key);
    }
  }

  auto* shells = app.add_subcommand("shells", "integrate the shell hierarchy");
  auto* propagate = app.add_subcommand("propagate", "propagate a Gaussian packet and analyse the splitting");
  auto* sweep = app.add_subcommand("sweep", "grid search over epsilon, nu, r0_squared and tau_end");
  auto* figure = app.add_subcommand("figure", "reproduce a figure preset (fig1, fig2, fig3)");
  std::string preset_name;
  figure->add_option("preset", preset_name, "fig1, fig2 or fig3")->required();
  for (auto* sub : {shells, propagate, sweep, figure}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  atomsplit::RunConfig config;
  try {
    config = atomsplit::default_config();
    if (!config_path.empty()) config = atomsplit::parse_config(read_file(config_path), config);
    for (const auto& [key, value] : overrides)
      if (app.count("--" + key) > 0) atomsplit::apply_setting(config, key, value);
    for (const auto& [key, value] : flags)
      if (value) atomsplit::apply_setting(config, key, "true");

    if (*shells) config.mode = atomsplit::Mode::Shells;
    if (*propagate) config.mode = atomsplit::Mode::Propagate;
    if (*sweep) config.mode = atomsplit::Mode::Sweep;
    if (*figure) {
      config.mode = atomsplit::Mode::Figure;
      config.preset = atomsplit::parse_preset(preset_name);
    }
    atomsplit::validate(config);
  } catch (const atomsplit::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  try {
    const atomsplit::RunOutcome outcome = atomsplit::run(config);
    for (const auto& msg : outcome.messages) std::cout << msg << '\n';
    for (const auto& file : outcome.files) std::cout << "wrote " << file.string() << '\n';
    return outcome.thresholds_met ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
