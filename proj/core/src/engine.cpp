#include "csgd/engine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "csgd/errors.hpp"

namespace csgd {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kLossCeiling = 1e12;
// Catches runaway trajectories between metric rounds, long before the
// model itself can overflow.
constexpr double kAggregateCeiling = 1e250;

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::sgd: return "sgd";
    case Variant::csgd: return "csgd";
    case Variant::lag_s: return "lag-s";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "sgd") return Variant::sgd;
  if (name == "csgd") return Variant::csgd;
  if (name == "lag-s" || name == "lag_s" || name == "lags") {
    return Variant::lag_s;
  }
  return std::nullopt;
}

double lyapunov_value(double suboptimality,
                      std::span<const double> window_newest_first,
                      double alpha, int window) {
  if (window < 1) throw ParameterError("window must be >= 1");
  if (static_cast<int>(window_newest_first.size()) != window) {
    throw ParameterError("history length does not match the window");
  }
  double v = suboptimality;
  for (int d = 1; d <= window; ++d) {
    const double beta = (window + 1 - d) * alpha / (9.0 * window);
    v += beta * window_newest_first[d - 1];
  }
  return v;
}

double lyapunov_value(const Problem& problem, const Vec& model,
                      const RingWindow& aggregate_history, double alpha,
                      int window) {
  if (!problem.has_optimum()) {
    throw CapabilityError("Lyapunov value needs the problem's optimal value");
  }
  const auto hist = aggregate_history.newest_first();
  return lyapunov_value(problem.suboptimality(model), hist, alpha, window);
}

RunResult run(const Problem& problem, const ScheduleSet& schedule,
              const RunSettings& settings) {
  validate(schedule);
  if (settings.iterations < 1) {
    throw ParameterError("iterations must be >= 1");
  }
  if (settings.metrics_every < 1) {
    throw ParameterError("metrics_every must be >= 1");
  }

  const int dim = problem.dim();
  const int workers = problem.workers();
  Vec start = settings.start.empty() ? zeros(dim) : settings.start;
  if (static_cast<int>(start.size()) != dim) {
    throw ParameterError("start point dimension mismatch");
  }
  for (double v : start) {
    if (!std::isfinite(v)) throw ParameterError("start point must be finite");
  }

  // lag-s is csgd with the control part switched off; sgd ignores the
  // threshold entirely and uploads unconditionally.
  ScheduleSet eff = schedule;
  if (settings.variant == Variant::lag_s) eff.sigma0 = 0.0;
  const bool censored = settings.variant != Variant::sgd;

  RunResult result;
  result.variant = settings.variant;
  result.seed = settings.seed;
  result.settings = settings;
  result.rounds.reserve(static_cast<std::size_t>(settings.iterations));
  if (settings.trace) {
    result.trace.emplace();
    result.trace->model.push_back(start);
  }

  ServerState server(start, workers, eff.window);
  std::vector<WorkerCensorState> states(workers);
  for (int m = 0; m < workers; ++m) {
    states[m].worker_id = m;
    states[m].last_uploaded = zeros(dim);
  }

  const double m2 = static_cast<double>(workers) * workers;
  // With empty histories both threshold forms reduce to sigma^1 / M^2.
  if (censored) {
    server.set_threshold(control_size(eff, 1) / m2);
  }

  const bool metrics_possible = problem.has_optimum();
  long cum_uploads = 0;
  long cum_samples = 0;
  std::vector<ServerState::Upload> uploads;
  uploads.reserve(workers);

  for (long k = 1; k <= settings.iterations; ++k) {
    const double tau = server.threshold();
    result.broadcasts += workers;  // model + threshold to every worker

    const long batch = batch_size(eff, k);
    uploads.clear();
    RoundRecord rec;
    rec.iteration = k;
    rec.loss = kNan;
    rec.grad_norm = kNan;
    rec.lyapunov = kNan;
    rec.threshold = tau;
    rec.upload_mask.assign(static_cast<std::size_t>(workers), 0);

    Vec fresh_sum;
    if (settings.trace) fresh_sum = zeros(dim);

    for (int m = 0; m < workers; ++m) {
      GradientSample sample =
          problem.sample_gradient(m, server.model(), batch, settings.seed, k);
      cum_samples += sample.batch_used;
      if (settings.trace) add_scaled(fresh_sum, 1.0, sample.mean_gradient);

      bool upload;
      if (censored) {
        upload = censor_decide(sample, states[m], tau) == Decision::upload;
      } else {
        states[m].last_uploaded = std::move(sample.mean_gradient);
        upload = true;
      }
      if (upload) {
        rec.upload_mask[m] = 1;
        uploads.push_back({m, &states[m].last_uploaded});
      }
    }

    server.apply_round(uploads, eff.alpha);
    if (settings.paranoid) {
      const Vec again = server.recompute_aggregate();
      double max_abs = 0.0, max_dev = 0.0;
      for (std::size_t i = 0; i < again.size(); ++i) {
        max_abs = std::max(max_abs, std::abs(again[i]));
        max_dev = std::max(max_dev, std::abs(again[i] - server.aggregate()[i]));
      }
      if (max_dev > 1e-12 * workers * std::max(1.0, max_abs)) {
        throw StateError("incremental aggregate drifted from its recomputation");
      }
    }

    cum_uploads += static_cast<long>(uploads.size());
    rec.uploads = static_cast<int>(uploads.size());
    rec.cum_uploads = cum_uploads;
    rec.cum_samples = cum_samples;

    if (censored) {
      double next_tau;
      if (settings.form == ThresholdForm::experimental) {
        next_tau = threshold_step_term(server.step_history().sum(), eff.weight,
                                       workers, eff.window, eff.alpha) +
                   control_size(eff, k + 1) / m2;
      } else {
        next_tau = threshold_theoretical(server.aggregate_history(),
                                         control_size(eff, k + 1), eff.weight,
                                         workers, eff.window);
      }
      server.set_threshold(next_tau);
    }

    const double agg_sq = server.aggregate_history().at_lag(1);
    bool diverged = !std::isfinite(agg_sq) || agg_sq > kAggregateCeiling;

    const bool metric_round = !diverged && (k % settings.metrics_every == 0 ||
                                            k == settings.iterations);
    if (metric_round || diverged) {
      rec.loss = problem.full_loss(server.model());
      rec.grad_norm = norm(problem.full_gradient(server.model()));
      if (!std::isfinite(rec.loss) || rec.loss > kLossCeiling) diverged = true;
      if (!diverged && metrics_possible) {
        rec.lyapunov = lyapunov_value(problem, server.model(),
                                      server.aggregate_history(), eff.alpha,
                                      eff.window);
      }
    }

    result.rounds.push_back(std::move(rec));
    if (settings.trace) {
      result.trace->model.push_back(server.model());
      result.trace->fresh_sum.push_back(std::move(fresh_sum));
      result.trace->aggregate_sq.push_back(agg_sq);
      result.trace->step_sq.push_back(server.step_history().at_lag(1));
      result.trace->threshold.push_back(tau);
    }
    if (diverged) {
      result.diverged = true;
      result.diverged_at = k;
      break;
    }
  }

  result.final_model = server.model();
  return result;
}

std::optional<ComplexityPoint> comm_complexity(const RunResult& result,
                                               double f_star,
                                               double accuracy) {
  for (const auto& rec : result.rounds) {
    if (std::isnan(rec.loss)) continue;
    if (rec.loss - f_star <= accuracy) {
      return ComplexityPoint{rec.iteration, rec.cum_uploads};
    }
  }
  return std::nullopt;
}

}  // namespace csgd
