#include "csgd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "csgd/csv.hpp"
#include "csgd/errors.hpp"

namespace csgd::cli {

namespace {

std::string fmt(double v) { return format_double(v); }

std::string divergence_line(const RunResult& r) {
  std::ostringstream out;
  out << "diverged: variant=" << variant_name(r.variant) << " seed=" << r.seed
      << " at iteration " << r.diverged_at;
  return out.str();
}

std::vector<long> mingrad_checkpoints(long iterations) {
  if (iterations >= 800) return {100, 200, 400, 800};
  std::vector<long> pts;
  for (long div : {8, 4, 2, 1}) {
    const long k = iterations / div;
    if (k >= 1 && (pts.empty() || k > pts.back())) pts.push_back(k);
  }
  return pts;
}

}  // namespace

RunBatch run_variant_sweep(const Problem& problem, const RunConfig& config,
                           Variant variant) {
  RunBatch batch;
  for (const std::uint64_t seed : config.seeds) {
    RunSettings settings = build_settings(config, seed);
    settings.variant = variant;
    batch.results.push_back(run(problem, config.schedule, settings));
    batch.diverged = batch.diverged || batch.results.back().diverged;
  }
  return batch;
}

RunBatch run_compare(const Problem& problem, const RunConfig& config) {
  RunBatch batch;
  for (const Variant v : {Variant::csgd, Variant::lag_s, Variant::sgd}) {
    RunBatch part = run_variant_sweep(problem, config, v);
    batch.diverged = batch.diverged || part.diverged;
    for (auto& r : part.results) batch.results.push_back(std::move(r));
  }
  return batch;
}

std::string compare_summary(const RunBatch& batch, const RunConfig& config) {
  std::ostringstream out;
  for (const Variant v : {Variant::csgd, Variant::lag_s, Variant::sgd}) {
    double loss = 0.0;
    double uploads = 0.0;
    double samples = 0.0;
    long n = 0;
    for (const auto& r : batch.results) {
      if (r.variant != v || r.rounds.empty()) continue;
      const auto& last = r.rounds.back();
      loss += last.loss;
      uploads += static_cast<double>(last.cum_uploads);
      samples += static_cast<double>(last.cum_samples);
      ++n;
    }
    if (n == 0) continue;
    out << variant_name(v) << ": seeds=" << n
        << " mean_final_loss=" << fmt(loss / n)
        << " mean_cum_uploads=" << fmt(uploads / n)
        << " mean_cum_samples=" << fmt(samples / n) << '\n';
  }
  (void)config;
  return out.str();
}

VerifyOutcome run_verify(const RunConfig& config,
                         const std::vector<std::string>& checks) {
  VerifyOutcome out;
  if (checks.empty()) {
    out.lines.push_back("nothing verified: empty check set");
    out.exit_code = 2;
    return out;
  }
  static const std::set<std::string> known = {"descent", "decay", "sparsity",
                                              "mingrad", "threshold"};
  for (const auto& c : checks) {
    if (!known.count(c)) {
      throw ConfigError("--checks", "--checks: unknown check '" + c +
                                        "' (available: descent, decay, "
                                        "sparsity, mingrad, threshold)");
    }
  }

  const Problem problem = build_problem(config);
  const ObjectiveConstants consts = problem.estimate_constants();
  const bool need_trace =
      std::count(checks.begin(), checks.end(), "descent") > 0 ||
      std::count(checks.begin(), checks.end(), "threshold") > 0;

  std::vector<RunResult> runs;
  runs.reserve(config.seeds.size());
  for (const std::uint64_t seed : config.seeds) {
    RunSettings settings = build_settings(config, seed);
    settings.trace = need_trace;
    settings.metrics_every = 1;  // the checks need complete series
    runs.push_back(run(problem, config.schedule, settings));
    if (runs.back().diverged) {
      out.lines.push_back(divergence_line(runs.back()));
      out.exit_code = 3;
      return out;
    }
  }

  auto skip = [&out](const std::string& line) {
    out.lines.push_back(line);
    ++out.skipped;
  };

  for (const auto& check : checks) {
    if (check == "descent") {
      long rounds = 0, violations = 0;
      double worst_excess = -std::numeric_limits<double>::infinity();
      const DescentRow* worst = nullptr;
      std::vector<DescentReport> reports;
      reports.reserve(runs.size());
      for (const auto& r : runs) {
        reports.push_back(
            check_descent(problem, config.schedule, r, consts.smoothness));
        const auto& rep = reports.back();
        rounds += static_cast<long>(rep.rows.size());
        violations += rep.violations;
        for (const auto& row : rep.rows) {
          const double excess = row.lhs - row.rhs;
          if (excess > worst_excess) {
            worst_excess = excess;
            worst = &row;
          }
        }
      }
      ++out.checks_run;
      std::ostringstream line;
      if (violations == 0) {
        line << "descent: pass (" << rounds << " rounds, max lhs-rhs = "
             << fmt(worst_excess) << ")";
      } else {
        line << "descent: FAIL (" << violations << "/" << rounds
             << " rounds); worst at iteration " << worst->iteration
             << ": lhs = " << fmt(worst->lhs) << ", rhs = " << fmt(worst->rhs);
        ++out.violations;
      }
      out.lines.push_back(line.str());
    } else if (check == "decay") {
      if (consts.pl_constant <= 0.0) {
        skip("decay: skipped (no quadratic-growth constant for this "
             "problem)");
        continue;
      }
      const double rho = consts.pl_constant * config.schedule.alpha / 3.0;
      if (!(rho > 0.0) || !(rho < 1.0)) {
        skip("decay: skipped (rho = " + fmt(rho) + " outside (0, 1))");
        continue;
      }
      if (config.iterations < 50) {
        skip("decay: skipped (needs at least 50 iterations)");
        continue;
      }
      std::vector<std::vector<double>> series;
      series.reserve(runs.size());
      for (const auto& r : runs) {
        std::vector<double> s;
        s.reserve(r.rounds.size());
        for (const auto& rec : r.rounds) s.push_back(rec.lyapunov);
        series.push_back(std::move(s));
      }
      const DecayReport rep = check_geometric_decay(series, rho);
      ++out.checks_run;
      std::ostringstream line;
      line << "decay: " << (rep.pass ? "pass" : "FAIL") << " (slope = "
           << fmt(rep.slope) << ", bound = " << fmt(rep.slope_bound)
           << ", rho = " << fmt(rho) << ", seeds = " << series.size() << ")";
      if (!rep.pass) ++out.violations;
      out.lines.push_back(line.str());
    } else if (check == "sparsity") {
      if (config.variant == Variant::sgd) {
        skip("sparsity: skipped (sgd uploads every round by design)");
        continue;
      }
      long bad_seeds = 0;
      for (const auto& r : runs) {
        if (check_sparsity(r.rounds, config.schedule.window).any()) {
          ++bad_seeds;
        }
      }
      const double fraction =
          static_cast<double>(bad_seeds) / static_cast<double>(runs.size());
      const double gate = 2.0 * config.theory_delta;
      ++out.checks_run;
      std::ostringstream line;
      line << "sparsity: " << (fraction <= gate ? "pass" : "FAIL") << " ("
           << bad_seeds << "/" << runs.size()
           << " seeds with a repeated upload inside a window; fraction = "
           << fmt(fraction) << ", gate = " << fmt(gate) << ")";
      if (fraction > gate) ++out.violations;
      out.lines.push_back(line.str());
    } else if (check == "mingrad") {
      const std::vector<long> checkpoints =
          mingrad_checkpoints(config.iterations);
      if (checkpoints.size() < 2) {
        skip("mingrad: skipped (needs at least 2 checkpoints; run longer)");
        continue;
      }
      long passing = 0;
      std::ostringstream detail;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        std::vector<double> grad_sq;
        grad_sq.reserve(runs[i].rounds.size());
        for (const auto& rec : runs[i].rounds) {
          grad_sq.push_back(rec.grad_norm * rec.grad_norm);
        }
        const MinGradReport rep = check_min_grad_decay(grad_sq, checkpoints);
        if (rep.pass) ++passing;
        if (i == 0) {
          for (std::size_t j = 0; j < rep.scaled.size(); ++j) {
            detail << (j ? ", " : "") << "K=" << rep.checkpoints[j] << ": "
                   << fmt(rep.scaled[j]);
          }
        }
      }
      const bool pass = passing == static_cast<long>(runs.size());
      ++out.checks_run;
      std::ostringstream line;
      line << "mingrad: " << (pass ? "pass" : "FAIL") << " (" << passing << "/"
           << runs.size() << " seeds; first seed K*min |grad F|^2: "
           << detail.str() << ")";
      if (!pass) ++out.violations;
      out.lines.push_back(line.str());
    } else if (check == "threshold") {
      if (config.variant == Variant::sgd) {
        skip("threshold: skipped (sgd has no censoring threshold)");
        continue;
      }
      double worst = 0.0;
      long worst_iter = 0;
      for (const auto& r : runs) {
        const ThresholdAgreement agree =
            check_threshold_forms(r, config.schedule, problem.workers());
        if (agree.max_rel_err > worst) {
          worst = agree.max_rel_err;
          worst_iter = agree.worst_iteration;
        }
      }
      const bool pass = worst <= 1e-12;
      ++out.checks_run;
      std::ostringstream line;
      line << "threshold: " << (pass ? "pass" : "FAIL")
           << " (max relative gap between forms = " << fmt(worst)
           << " at iteration " << worst_iter << ", gate = 1e-12)";
      if (!pass) ++out.violations;
      out.lines.push_back(line.str());
    }
  }

  if (out.violations > 0) {
    out.exit_code = 1;
  } else if (out.checks_run == 0) {
    out.lines.push_back("nothing verified: every requested check was skipped");
    out.exit_code = 2;
  } else {
    out.exit_code = 0;
  }
  return out;
}

}  // namespace csgd::cli
