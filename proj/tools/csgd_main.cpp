// Command-line front end: run/compare/verify a config, generate datasets,
// print built-in presets. Data goes to stdout (or --out); notes to stderr.
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csgd/cli.hpp"
#include "csgd/csv.hpp"
#include "csgd/dataset.hpp"
#include "csgd/errors.hpp"

namespace {

using namespace csgd;

RunConfig load_with_warnings(const std::string& path) {
  ParsedConfig parsed = load_config_file(path);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
  return parsed.config;
}

void emit_csv(const std::vector<RunResult>& results,
              const std::string& out_path) {
  if (out_path.empty()) {
    write_csv(std::cout, results);
  } else {
    write_csv_file(out_path, results);
    std::cerr << "wrote " << out_path << '\n';
  }
}

int report_divergence(const cli::RunBatch& batch) {
  for (const auto& r : batch.results) {
    if (!r.diverged) continue;
    std::cerr << "diverged: variant=" << variant_name(r.variant)
              << " seed=" << r.seed << " at iteration " << r.diverged_at
              << '\n';
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator for communication-censored distributed SGD"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand(
      "run", "run one variant over the config's seeds, emit per-round CSV");
  std::string run_config, run_variant, run_out;
  std::uint64_t run_seed = 0;
  long run_iters = 0;
  run_cmd->add_option("--config", run_config, "config file")->required();
  run_cmd->add_option("--variant", run_variant, "sgd | csgd | lag-s");
  auto* run_seed_opt =
      run_cmd->add_option("--seed", run_seed, "replace the seed list");
  auto* run_iters_opt =
      run_cmd->add_option("--iters", run_iters, "iteration count override")
          ->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run_out, "CSV path (stdout when omitted)");

  auto* cmp_cmd = app.add_subcommand(
      "compare", "run csgd, lag-s and sgd on one config; CSV plus a summary");
  std::string cmp_config, cmp_out;
  cmp_cmd->add_option("--config", cmp_config, "config file")->required();
  cmp_cmd->add_option("--out", cmp_out, "CSV path (stdout when omitted)");

  auto* ver_cmd = app.add_subcommand(
      "verify", "re-run the config and check the recorded series against "
                "the method's guarantees");
  std::string ver_config;
  std::vector<std::string> ver_checks;
  ver_cmd->add_option("--config", ver_config, "config file")->required();
  auto* ver_checks_opt =
      ver_cmd
          ->add_option("--checks", ver_checks,
                       "comma list from: descent, decay, sparsity, mingrad, "
                       "threshold (default: all)")
          ->delimiter(',');

  auto* gen_cmd = app.add_subcommand(
      "gen-dataset", "write a synthetic logistic-regression CSV");
  std::size_t gen_rows = 1000, gen_dim = 10;
  std::uint64_t gen_seed = 7;
  std::string gen_out;
  gen_cmd->add_option("--rows", gen_rows, "sample count")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--dim", gen_dim, "feature count")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("--out", gen_out, "CSV path")->required();

  auto* pre_cmd = app.add_subcommand(
      "preset", "print a named built-in config (no name: list presets)");
  std::string pre_name, pre_out;
  pre_cmd->add_option("name", pre_name, "preset name");
  pre_cmd->add_option("--out", pre_out, "write to file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      RunConfig cfg = load_with_warnings(run_config);
      if (!run_variant.empty()) {
        const auto v = parse_variant(run_variant);
        if (!v) {
          throw ConfigError("--variant", "--variant: unknown variant '" +
                                             run_variant +
                                             "' (sgd, csgd, lag-s)");
        }
        cfg.variant = *v;
      }
      if (run_seed_opt->count() > 0) cfg.seeds = {run_seed};
      if (run_iters_opt->count() > 0) cfg.iterations = run_iters;
      if (!run_out.empty()) cfg.out_path = run_out;
      const Problem problem = build_problem(cfg);
      const cli::RunBatch batch =
          cli::run_variant_sweep(problem, cfg, cfg.variant);
      emit_csv(batch.results, cfg.out_path);
      return batch.diverged ? report_divergence(batch) : 0;
    }
    if (cmp_cmd->parsed()) {
      RunConfig cfg = load_with_warnings(cmp_config);
      if (!cmp_out.empty()) cfg.out_path = cmp_out;
      const Problem problem = build_problem(cfg);
      const cli::RunBatch batch = cli::run_compare(problem, cfg);
      emit_csv(batch.results, cfg.out_path);
      // keep stdout data-only when the CSV goes there
      (cfg.out_path.empty() ? std::cerr : std::cout)
          << cli::compare_summary(batch, cfg);
      return batch.diverged ? report_divergence(batch) : 0;
    }
    if (ver_cmd->parsed()) {
      const RunConfig cfg = load_with_warnings(ver_config);
      std::vector<std::string> checks;
      if (ver_checks_opt->count() == 0) {
        checks = {"descent", "decay", "sparsity", "mingrad", "threshold"};
      } else {
        for (const auto& c : ver_checks) {
          if (!c.empty()) checks.push_back(c);
        }
      }
      const cli::VerifyOutcome outcome = cli::run_verify(cfg, checks);
      for (const auto& line : outcome.lines) std::cout << line << '\n';
      std::cout << "verify: " << outcome.checks_run << " run, "
                << outcome.violations << " violations, " << outcome.skipped
                << " skipped\n";
      return outcome.exit_code;
    }
    if (gen_cmd->parsed()) {
      save_csv(synthetic_logistic(gen_rows, gen_dim, gen_seed), gen_out);
      std::cerr << "wrote " << gen_rows << " rows x " << gen_dim
                << " features to " << gen_out << '\n';
      return 0;
    }
    if (pre_cmd->parsed()) {
      if (pre_name.empty()) {
        for (const auto& n : preset_names()) std::cout << n << '\n';
        return 0;
      }
      const std::string text = render_config(preset(pre_name));
      if (pre_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(pre_out);
        if (!(out << text) || !out.flush()) {
          throw Error("cannot write " + pre_out);
        }
        std::cerr << "wrote " << pre_out << '\n';
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
