#include "csgd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "csgd/csv.hpp"
#include "csgd/errors.hpp"

namespace csgd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void fail(const std::string& key, const std::string& message) {
  throw ConfigError(key, key + ": " + message);
}

double to_double(const std::string& key, std::string_view value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    fail(key, "expected a real number, got '" + std::string(value) + "'");
  }
  return out;
}

long to_long(const std::string& key, std::string_view value) {
  long out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    fail(key, "expected an integer, got '" + std::string(value) + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, std::string_view value) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    fail(key, "expected a non-negative integer, got '" + std::string(value) +
                  "'");
  }
  return out;
}

std::vector<std::uint64_t> to_seed_list(const std::string& key,
                                        std::string_view value) {
  std::vector<std::uint64_t> seeds;
  while (!value.empty()) {
    const std::size_t comma = value.find(',');
    const std::string_view item = trim(value.substr(0, comma));
    if (!item.empty()) seeds.push_back(to_u64(key, item));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  if (seeds.empty()) fail(key, "expected a comma-separated list of seeds");
  return seeds;
}

void apply_key(RunConfig& c, const std::string& key, std::string_view value) {
  if (key == "problem.kind") {
    const std::string v(value);
    if (v != "least_squares" && v != "logistic") {
      fail(key, "expected least_squares or logistic, got '" + v + "'");
    }
    c.kind = v;
  } else if (key == "problem.dim") {
    c.dim = static_cast<int>(to_long(key, value));
    if (c.dim < 1) fail(key, "must be >= 1");
  } else if (key == "problem.workers") {
    c.workers = static_cast<int>(to_long(key, value));
    if (c.workers < 1) fail(key, "must be >= 1");
  } else if (key == "problem.data_seed") {
    c.data_seed = to_u64(key, value);
  } else if (key == "problem.noise_std") {
    c.noise_std = to_double(key, value);
    if (!(c.noise_std >= 0.0)) fail(key, "must be >= 0");
  } else if (key == "problem.dataset") {
    c.dataset_path = std::string(value);
  } else if (key == "problem.l2") {
    c.l2 = to_double(key, value);
    if (!(c.l2 >= 0.0)) fail(key, "must be >= 0");
  } else if (key == "schedule.alpha") {
    c.schedule.alpha = to_double(key, value);
  } else if (key == "schedule.batch0") {
    c.schedule.batch0 = to_long(key, value);
  } else if (key == "schedule.batch_growth") {
    c.schedule.batch_growth = to_double(key, value);
  } else if (key == "schedule.batch_cap") {
    c.schedule.batch_cap = to_long(key, value);
  } else if (key == "schedule.sigma0") {
    c.schedule.sigma0 = to_double(key, value);
  } else if (key == "schedule.control_decay") {
    c.schedule.control_decay = to_double(key, value);
  } else if (key == "schedule.window") {
    c.schedule.window = static_cast<int>(to_long(key, value));
  } else if (key == "schedule.weight") {
    c.schedule.weight = to_double(key, value);
  } else if (key == "schedule.epoch_len") {
    c.schedule.epoch_len = to_long(key, value);
  } else if (key == "run.variant") {
    const auto v = parse_variant(value);
    if (!v) fail(key, "expected sgd, csgd or lag-s");
    c.variant = *v;
  } else if (key == "run.iterations") {
    c.iterations = to_long(key, value);
    if (c.iterations < 1) fail(key, "must be >= 1");
  } else if (key == "run.seeds") {
    c.seeds = to_seed_list(key, value);
  } else if (key == "run.threshold_form") {
    if (value == "experimental") {
      c.form = ThresholdForm::experimental;
    } else if (value == "theoretical") {
      c.form = ThresholdForm::theoretical;
    } else {
      fail(key, "expected experimental or theoretical");
    }
  } else if (key == "run.metrics_every") {
    c.metrics_every = to_long(key, value);
    if (c.metrics_every < 1) fail(key, "must be >= 1");
  } else if (key == "run.out") {
    c.out_path = std::string(value);
  } else if (key == "theory.mode") {
    const std::string v(value);
    if (v != "off" && v != "pl" && v != "nonconvex") {
      fail(key, "expected off, pl or nonconvex");
    }
    c.theory_mode = v;
  } else if (key == "theory.delta") {
    c.theory_delta = to_double(key, value);
    if (!(c.theory_delta > 0.0 && c.theory_delta < 1.0)) {
      fail(key, "must be in (0, 1)");
    }
  } else {
    fail(key, "unknown key");
  }
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"least-squares",
                                                 "logistic-desk"};
  return names;
}

RunConfig preset(std::string_view name) {
  RunConfig c;
  if (name == "least-squares") {
    c.kind = "least_squares";
    c.dim = 10;
    c.workers = 10;
    c.data_seed = 7;
    c.noise_std = 0.01;
    c.schedule.alpha = 0.02;
    c.schedule.batch0 = 1;
    c.schedule.batch_growth = 1.1;
    c.schedule.batch_cap = 500;
    c.schedule.sigma0 = 0.1;
    c.schedule.control_decay = 0.91;
    c.schedule.window = 10;
    c.schedule.weight = 1.0 / 60.0;
    c.schedule.epoch_len = 1;
    c.variant = Variant::csgd;
    c.iterations = 500;
    c.seeds = {1, 2, 3, 4, 5};
    return c;
  }
  if (name == "logistic-desk") {
    c.kind = "logistic";
    c.workers = 10;
    c.data_seed = 7;
    c.dataset_path = "logistic_desk.csv";
    c.l2 = 0.0005;
    c.schedule.alpha = 0.05;
    c.schedule.batch0 = 1;
    c.schedule.batch_growth = 1.05;
    c.schedule.batch_cap = 100;
    // Small enough that the censoring floor sits below the gradient level
    // the batch-growth phase reaches; a large control size stalls the
    // midgame on this problem.
    c.schedule.sigma0 = 0.01;
    c.schedule.control_decay = 0.99;
    c.schedule.window = 10;
    c.schedule.weight = 1.0 / 60.0;
    c.schedule.epoch_len = 1;
    c.variant = Variant::csgd;
    c.iterations = 800;
    c.seeds = {1, 2, 3};
    return c;
  }
  throw ConfigError("preset", "preset: unknown preset '" + std::string(name) +
                                  "' (available: least-squares, "
                                  "logistic-desk)");
}

ParsedConfig parse_config(std::string_view text) {
  ParsedConfig parsed;
  RunConfig& c = parsed.config;
  bool kind_set = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos
                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line),
                        "expected 'key = value', got '" + std::string(line) +
                            "'");
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(key, "empty key");

    if (key == "preset") {
      c = preset(value);
      kind_set = true;
    } else {
      if (key == "problem.kind") kind_set = true;
      apply_key(c, key, value);
    }
  }

  if (!kind_set) {
    throw ConfigError("problem.kind", "problem.kind required");
  }
  if (c.kind == "logistic" && c.dataset_path.empty()) {
    throw ConfigError("problem.dataset",
                      "problem.dataset: required for logistic problems");
  }
  try {
    validate(c.schedule);
  } catch (const ScheduleError& e) {
    throw ConfigError("schedule", std::string("schedule: ") + e.what());
  }

  if (c.theory_mode != "off") {
    const double eta1 = c.schedule.eta1();
    const double eta2 = c.schedule.eta2();
    if (eta2 >= eta1) {
      std::ostringstream w;
      w << "schedule.control_decay: control decay rate (" << eta2
        << ") is not below the batch growth rate (" << eta1
        << "); the guarantees need growth rate > decay rate > rho";
      parsed.warnings.push_back(w.str());
    }
  }
  return parsed;
}

ParsedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config", "config: cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  out << "problem.kind = " << c.kind << '\n';
  out << "problem.dim = " << c.dim << '\n';
  out << "problem.workers = " << c.workers << '\n';
  out << "problem.data_seed = " << c.data_seed << '\n';
  out << "problem.noise_std = " << format_double(c.noise_std) << '\n';
  if (!c.dataset_path.empty()) {
    out << "problem.dataset = " << c.dataset_path << '\n';
  }
  out << "problem.l2 = " << format_double(c.l2) << '\n';
  out << "schedule.alpha = " << format_double(c.schedule.alpha) << '\n';
  out << "schedule.batch0 = " << c.schedule.batch0 << '\n';
  out << "schedule.batch_growth = " << format_double(c.schedule.batch_growth)
      << '\n';
  out << "schedule.batch_cap = " << c.schedule.batch_cap << '\n';
  out << "schedule.sigma0 = " << format_double(c.schedule.sigma0) << '\n';
  out << "schedule.control_decay = "
      << format_double(c.schedule.control_decay) << '\n';
  out << "schedule.window = " << c.schedule.window << '\n';
  out << "schedule.weight = " << format_double(c.schedule.weight) << '\n';
  out << "schedule.epoch_len = " << c.schedule.epoch_len << '\n';
  out << "run.variant = " << variant_name(c.variant) << '\n';
  out << "run.iterations = " << c.iterations << '\n';
  out << "run.seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    if (i) out << ',';
    out << c.seeds[i];
  }
  out << '\n';
  out << "run.threshold_form = "
      << (c.form == ThresholdForm::experimental ? "experimental"
                                                : "theoretical")
      << '\n';
  out << "run.metrics_every = " << c.metrics_every << '\n';
  if (!c.out_path.empty()) out << "run.out = " << c.out_path << '\n';
  out << "theory.mode = " << c.theory_mode << '\n';
  out << "theory.delta = " << format_double(c.theory_delta) << '\n';
  return out.str();
}

Problem build_problem(const RunConfig& c) {
  if (c.kind == "least_squares") {
    return Problem::least_squares(c.dim, c.workers, c.data_seed, c.noise_std);
  }
  if (c.kind == "logistic") {
    if (c.dataset_path.empty()) {
      throw ConfigError("problem.dataset",
                        "problem.dataset: required for logistic problems");
    }
    Dataset data = load_csv(c.dataset_path);
    return Problem::logistic(std::move(data), c.workers, c.l2, c.data_seed);
  }
  throw ConfigError("problem.kind",
                    "problem.kind: unknown kind '" + c.kind + "'");
}

RunSettings build_settings(const RunConfig& c, std::uint64_t seed) {
  RunSettings s;
  s.variant = c.variant;
  s.iterations = c.iterations;
  s.seed = seed;
  s.form = c.form;
  s.metrics_every = c.metrics_every;
  return s;
}

}  // namespace csgd
