#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "csgd/engine.hpp"
#include "csgd/problem.hpp"
#include "csgd/schedule.hpp"

namespace csgd {

// Flat key-value run configuration. See render_config for the full key
// list; parse_config rejects unknown keys.
struct RunConfig {
  // problem.*
  std::string kind = "least_squares";  // least_squares | logistic
  int dim = 10;
  int workers = 10;
  std::uint64_t data_seed = 7;
  double noise_std = 0.01;
  std::string dataset_path;  // logistic only
  double l2 = 0.0005;        // logistic only
  // schedule.*
  ScheduleSet schedule;
  // run.*
  Variant variant = Variant::csgd;
  long iterations = 500;
  std::vector<std::uint64_t> seeds = {1};
  ThresholdForm form = ThresholdForm::experimental;
  long metrics_every = 1;
  std::string out_path;
  // theory.*
  std::string theory_mode = "off";  // off | pl | nonconvex
  double theory_delta = 0.1;
};

struct ParsedConfig {
  RunConfig config;
  std::vector<std::string> warnings;
};

// Lines of `key = value`; '#' starts a comment; later keys override
// earlier ones; a `preset = <name>` line resets everything to that preset
// before the following lines apply. Unknown keys and malformed values
// raise ConfigError naming the key.
ParsedConfig parse_config(std::string_view text);
ParsedConfig load_config_file(const std::string& path);

// Canonical full-precision rendering; parse_config(render_config(c)) is
// the identity.
std::string render_config(const RunConfig& config);

const std::vector<std::string>& preset_names();
RunConfig preset(std::string_view name);

Problem build_problem(const RunConfig& config);
RunSettings build_settings(const RunConfig& config, std::uint64_t seed);

}  // namespace csgd
