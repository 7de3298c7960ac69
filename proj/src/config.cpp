#include "atomsplit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "atomsplit/csv.hpp"

namespace atomsplit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::string_view key, const std::string& what) {
  throw ConfigError(std::string(key) + " " + what);
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(value))
    fail(key, "expects a number, got '" + std::string(text) + "'");
  return value;
}

int to_int(std::string_view key, std::string_view text) {
  text = trim(text);
  int value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    fail(key, "expects an integer, got '" + std::string(text) + "'");
  return value;
}

bool to_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(key, "expects true or false, got '" + std::string(text) + "'");
}

std::vector<double> to_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(to_double(key, text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double nonnegative(std::string_view key, double v) {
  if (v < 0.0) fail(key, "must be ≥ 0");
  return v;
}

double positive(std::string_view key, double v) {
  if (!(v > 0.0)) fail(key, "must be > 0");
  return v;
}

int at_least_one(std::string_view key, int v) {
  if (v < 1) fail(key, "must be ≥ 1");
  return v;
}

std::string list_text(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_number(values[i]);
  }
  return out;
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

struct Key {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key number_key(std::string name, double RunConfig::*field, double (*check)(std::string_view, double)) {
  return {name,
          [name, field, check](RunConfig& c, std::string_view v) { c.*field = check(name, to_double(name, v)); },
          [field](const RunConfig& c) { return format_number(c.*field); }};
}

Key list_key(std::string name, std::vector<double> RunConfig::*field, double (*check)(std::string_view, double)) {
  return {name,
          [name, field, check](RunConfig& c, std::string_view v) {
            auto values = to_list(name, v);
            for (double x : values) check(name, x);
            c.*field = std::move(values);
          },
          [field](const RunConfig& c) { return list_text(c.*field); }};
}


const std::vector<Key>& key_table() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back({"mode",
                 [](RunConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v == "shells") c.mode = Mode::Shells;
                   else if (v == "propagate") c.mode = Mode::Propagate;
                   else if (v == "sweep") c.mode = Mode::Sweep;
                   else if (v == "figure") c.mode = Mode::Figure;
                   else fail("mode", "must be one of shells, propagate, sweep, figure");
                 },
                 [](const RunConfig& c) { return to_string(c.mode); }});
    k.push_back({"preset", [](RunConfig& c, std::string_view v) { c.preset = parse_preset(v); },
                 [](const RunConfig& c) { return to_string(c.preset); }});
    k.push_back(number_key("r0_squared", &RunConfig::r0_squared, nonnegative));
    k.push_back(number_key("epsilon", &RunConfig::epsilon, nonnegative));
    k.push_back(number_key("nu", &RunConfig::nu, nonnegative));
    k.push_back({"phi0",
                 [](RunConfig& c, std::string_view v) { c.phi0 = to_double("phi0", v); },
                 [](const RunConfig& c) { return format_number(c.phi0); }});
    k.push_back({"sublattices",
                 [](RunConfig& c, std::string_view v) { c.sublattices = at_least_one("sublattices", to_int("sublattices", v)); },
                 [](const RunConfig& c) { return std::to_string(c.sublattices); }});
    k.push_back({"shells",
                 [](RunConfig& c, std::string_view v) {
                   if (trim(v) == "auto") c.shells.reset();
                   else c.shells = at_least_one("shells", to_int("shells", v));
                 },
                 [](const RunConfig& c) { return c.shells ? std::to_string(*c.shells) : std::string("auto"); }});
    k.push_back(number_key("tau_end", &RunConfig::tau_end, nonnegative));
    k.push_back({"dt",
                 [](RunConfig& c, std::string_view v) {
                   if (trim(v) == "auto") c.dt.reset();
                   else c.dt = positive("dt", to_double("dt", v));
                 },
                 [](const RunConfig& c) { return c.dt ? format_number(*c.dt) : std::string("auto"); }});
    k.push_back(number_key("tol", &RunConfig::tol, positive));
    k.push_back(number_key("delta_p", &RunConfig::delta_p, positive));
    k.push_back(number_key("truncation_tol", &RunConfig::truncation_tol, positive));
    k.push_back(number_key("norm_tolerance", &RunConfig::norm_tolerance, positive));
    k.push_back(number_key("boundary_threshold", &RunConfig::boundary_threshold, positive));
    k.push_back({"drop_kinetic", [](RunConfig& c, std::string_view v) { c.drop_kinetic = to_bool("drop_kinetic", v); },
                 [](const RunConfig& c) { return bool_text(c.drop_kinetic); }});
    k.push_back({"samples",
                 [](RunConfig& c, std::string_view v) {
                   c.samples = to_int("samples", v);
                   if (c.samples < 2) fail("samples", "must be ≥ 2");
                 },
                 [](const RunConfig& c) { return std::to_string(c.samples); }});
    k.push_back({"closed_form_coupling",
                 [](RunConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v == "r0_squared") c.closed_form_coupling = ClosedFormCoupling::R0Squared;
                   else if (v == "cycle_average") c.closed_form_coupling = ClosedFormCoupling::CycleAverage;
                   else fail("closed_form_coupling", "must be r0_squared or cycle_average");
                 },
                 [](const RunConfig& c) { return to_string(c.closed_form_coupling); }});
    k.push_back(number_key("p_star", &RunConfig::p_star, positive));
    k.push_back(number_key("halfwidth", &RunConfig::halfwidth, positive));
    k.push_back({"min_height_fraction",
                 [](RunConfig& c, std::string_view v) {
                   const double x = to_double("min_height_fraction", v);
                   if (!(x > 0.0 && x < 1.0)) fail("min_height_fraction", "must lie in (0, 1)");
                   c.min_height_fraction = x;
                 },
                 [](const RunConfig& c) { return format_number(c.min_height_fraction); }});
    k.push_back(list_key("sweep_epsilon", &RunConfig::sweep_epsilon, nonnegative));
    k.push_back(list_key("sweep_nu", &RunConfig::sweep_nu, nonnegative));
    k.push_back(list_key("sweep_r0_squared", &RunConfig::sweep_r0_squared, nonnegative));
    k.push_back(list_key("sweep_tau_end", &RunConfig::sweep_tau_end, nonnegative));
    k.push_back({"resume", [](RunConfig& c, std::string_view v) { c.resume = to_bool("resume", v); },
                 [](const RunConfig& c) { return bool_text(c.resume); }});
    k.push_back({"output",
                 [](RunConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v.empty()) fail("output", "must not be empty");
                   c.output = std::string(v);
                 },
                 [](const RunConfig& c) { return c.output; }});
    k.push_back({"jobs", [](RunConfig& c, std::string_view v) { c.jobs = at_least_one("jobs", to_int("jobs", v)); },
                 [](const RunConfig& c) { return std::to_string(c.jobs); }});
    return k;
  }();
  return keys;
}

const Key* find_key(std::string_view name) {
  for (const Key& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Key& k : key_table()) out.push_back(k.name);
    return out;
  }();
  return names;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  const Key* k = find_key(trim(key));
  if (!k) throw ConfigError("unknown key '" + std::string(trim(key)) + "'");
  k->set(config, value);
}

void validate(const RunConfig& config) {
  if (!(config.p_star > config.halfwidth))
    throw ConfigError("p_star must exceed halfwidth so the two target windows do not overlap");
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
  RunConfig config = base;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string_view::npos) throw ConfigError("expected 'key = value', got '" + std::string(line) + "'");
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(config);
  return config;
}

RunConfig default_config() {
  RunConfig config;
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) config.output = dir;
  return config;
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Shells: return "shells";
    case Mode::Propagate: return "propagate";
    case Mode::Sweep: return "sweep";
    case Mode::Figure: return "figure";
  }
  return "propagate";
}

std::string to_string(FigurePreset preset) {
  switch (preset) {
    case FigurePreset::Fig1: return "fig1";
    case FigurePreset::Fig2: return "fig2";
    case FigurePreset::Fig3: return "fig3";
  }
  return "fig3";
}

std::string to_string(ClosedFormCoupling coupling) {
  return coupling == ClosedFormCoupling::R0Squared ? "r0_squared" : "cycle_average";
}

FigurePreset parse_preset(std::string_view text) {
  text = trim(text);
  if (text == "fig1") return FigurePreset::Fig1;
  if (text == "fig2") return FigurePreset::Fig2;
  if (text == "fig3") return FigurePreset::Fig3;
  throw ConfigError("preset must be one of fig1, fig2, fig3");
}

std::string format_config(const RunConfig& config) {
  std::string out;
  for (const Key& k : key_table()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

}  // namespace atomsplit
