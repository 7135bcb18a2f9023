#include "csgd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csgd/errors.hpp"

namespace csgd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const RunTrace& require_trace(const RunResult& result) {
  if (!result.trace || result.trace->model.size() != result.rounds.size() + 1 ||
      result.trace->fresh_sum.size() != result.rounds.size()) {
    throw CapabilityError("this check needs a run recorded with trace=true");
  }
  return *result.trace;
}

}  // namespace

DescentReport check_descent(const Problem& problem, const ScheduleSet& schedule,
                            const RunResult& result, double smoothness,
                            double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  if (!(smoothness > 0.0)) throw ParameterError("smoothness must be > 0");
  const RunTrace& trace = require_trace(result);

  const double alpha = schedule.alpha;
  const double m2 =
      static_cast<double>(problem.workers()) * problem.workers();
  const double grad_coeff =
      -alpha * (1.0 - epsilon / 2.0 - (1.0 + epsilon) * smoothness * alpha / 2.0);
  const bool censored = result.variant != Variant::sgd;
  const double err_coeff = censored ? alpha / epsilon : alpha / (2.0 * epsilon);
  const double tau_coeff =
      censored ? alpha * m2 *
                     (1.0 / epsilon +
                      (1.0 + 1.0 / epsilon) * smoothness * alpha / 2.0)
               : 0.0;

  DescentReport report;
  report.rows.reserve(result.rounds.size());
  double prev_loss = problem.full_loss(trace.model.front());
  for (std::size_t r = 0; r < result.rounds.size(); ++r) {
    const Vec& x_prev = trace.model[r];
    const Vec& x_next = trace.model[r + 1];
    const double next_loss = problem.full_loss(x_next);

    const Vec grad = problem.full_gradient(x_prev);
    const double err_sq = squared_distance(grad, trace.fresh_sum[r]);
    const double rhs = grad_coeff * squared_norm(grad) + err_coeff * err_sq +
                       tau_coeff * trace.threshold[r];
    const double lhs = next_loss - prev_loss;

    DescentRow row;
    row.iteration = result.rounds[r].iteration;
    row.lhs = lhs;
    row.rhs = rhs;
    row.pass = lhs <= rhs + 1e-9 * (1.0 + std::abs(rhs));
    if (!row.pass) ++report.violations;
    report.rows.push_back(row);
    prev_loss = next_loss;
  }
  return report;
}

DecayReport check_geometric_decay(
    const std::vector<std::vector<double>>& series_per_seed, double rho) {
  if (series_per_seed.empty()) {
    throw ParameterError("need at least one Lyapunov series");
  }
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw ParameterError("rho must be in (0, 1)");
  }
  const std::size_t len = series_per_seed.front().size();
  if (len < 50) throw ParameterError("series must cover at least 50 rounds");
  for (const auto& s : series_per_seed) {
    if (s.size() != len) {
      throw ParameterError("Lyapunov series have mismatched lengths");
    }
  }

  DecayReport report;
  report.rho = rho;
  report.slope_bound = std::log1p(-rho) + 0.5 * std::abs(std::log1p(-rho));
  report.mean_series.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    double acc = 0.0;
    for (const auto& s : series_per_seed) acc += s[i];
    report.mean_series[i] = acc / static_cast<double>(series_per_seed.size());
  }

  // Least-squares fit of log V against the iteration index over the tail
  // half; entries that cannot be logged (converged to exactly zero or bad)
  // are dropped.
  report.tail_start = static_cast<long>(len / 2 + 1);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long n = 0;
  for (std::size_t i = len / 2; i < len; ++i) {
    const double v = report.mean_series[i];
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    const double x = static_cast<double>(i + 1);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += y * x;
    ++n;
  }
  if (n < 2) {
    report.slope = std::numeric_limits<double>::quiet_NaN();
    report.pass = false;
    return report;
  }
  const double dn = static_cast<double>(n);
  report.slope = (sxy - sx * sy / dn) / (sxx - sx * sx / dn);
  report.pass = report.slope <= report.slope_bound;
  return report;
}

double decay_constant_csgd(double v0, double alpha, double rho,
                           const ScheduleSet& schedule, double g_squared) {
  const double eta1 = schedule.eta1();
  const double eta2 = schedule.eta2();
  if (eta1 <= rho || eta2 <= rho || schedule.sigma0 < 0.0) return kInf;
  return v0 + alpha * (1.0 - rho) / 3.0 *
                  (10.0 * schedule.sigma0 / (eta2 - rho) +
                   7.0 * g_squared / (schedule.batch0 * (eta1 - rho)));
}

double decay_constant_sgd(double v0, double alpha, double rho,
                          const ScheduleSet& schedule, double g_squared) {
  const double eta1 = schedule.eta1();
  if (eta1 <= rho) return kInf;
  return v0 + 7.0 * alpha * (1.0 - rho) * g_squared /
                  (3.0 * schedule.batch0 * (eta1 - rho));
}

SparsityReport check_sparsity(const std::vector<RoundRecord>& rounds,
                              int window) {
  if (window < 1) throw ParameterError("window must be >= 1");
  SparsityReport report;
  if (rounds.empty()) return report;
  const std::size_t workers = rounds.front().upload_mask.size();
  report.per_worker.assign(workers, 0);
  const long len = static_cast<long>(rounds.size());
  if (len < window) return report;

  for (std::size_t m = 0; m < workers; ++m) {
    long in_window = 0;
    for (long i = 0; i < len; ++i) {
      in_window += rounds[i].upload_mask[m];
      if (i >= window) in_window -= rounds[i - window].upload_mask[m];
      if (i >= window - 1) {
        ++report.windows_checked;
        if (in_window >= 2) {
          ++report.violations;
          ++report.per_worker[m];
        }
      }
    }
  }
  return report;
}

MinGradReport check_min_grad_decay(const std::vector<double>& grad_sq,
                                   const std::vector<long>& checkpoints) {
  if (checkpoints.size() < 2) {
    throw ParameterError("need at least two checkpoints");
  }
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 ||
        checkpoints[i] > static_cast<long>(grad_sq.size())) {
      throw ParameterError("checkpoint outside the recorded range");
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw ParameterError("checkpoints must be strictly increasing");
    }
  }

  MinGradReport report;
  report.checkpoints = checkpoints;
  report.scaled.reserve(checkpoints.size());
  double running_min = kInf;
  long next = 0;
  for (long k = 1; k <= checkpoints.back(); ++k) {
    running_min = std::min(running_min, grad_sq[k - 1]);
    if (k == checkpoints[next]) {
      report.scaled.push_back(static_cast<double>(k) * running_min);
      ++next;
    }
  }

  report.all_decreasing = true;
  for (std::size_t i = 1; i < report.scaled.size(); ++i) {
    report.all_decreasing =
        report.all_decreasing && report.scaled[i] < report.scaled[i - 1];
  }
  const std::size_t n = report.scaled.size();
  if (n >= 3) {
    report.pass =
        report.scaled[n - 2] < report.scaled[n - 3] &&
        report.scaled[n - 1] < report.scaled[n - 2];
  } else {
    report.pass = report.scaled[n - 1] < report.scaled[n - 2];
  }
  return report;
}

ThresholdAgreement check_threshold_forms(const RunResult& result,
                                         const ScheduleSet& schedule,
                                         int workers) {
  if (result.variant == Variant::sgd) {
    throw CapabilityError("threshold forms are undefined for sgd runs");
  }
  const RunTrace& trace = require_trace(result);
  if (trace.aggregate_sq.size() != result.rounds.size() ||
      trace.step_sq.size() != result.rounds.size() ||
      trace.threshold.size() != result.rounds.size()) {
    throw CapabilityError("trace is missing history series");
  }

  ScheduleSet eff = schedule;
  if (result.variant == Variant::lag_s) eff.sigma0 = 0.0;
  const double m2 = static_cast<double>(workers) * workers;

  ThresholdAgreement agreement;
  RingWindow agg(eff.window);
  RingWindow step(eff.window);
  for (std::size_t r = 0; r < result.rounds.size(); ++r) {
    const long k = result.rounds[r].iteration;
    const double sigma_k = control_size(eff, k);
    const double theo =
        threshold_theoretical(agg, sigma_k, eff.weight, workers, eff.window);
    const double expe = threshold_step_term(step.sum(), eff.weight, workers,
                                            eff.window, eff.alpha) +
                        sigma_k / m2;
    const double rec = trace.threshold[r];

    const double scale =
        std::max({std::abs(theo), std::abs(expe), std::abs(rec)});
    const double dev = std::max({std::abs(theo - expe), std::abs(theo - rec),
                                 std::abs(expe - rec)});
    const double rel = scale > 0.0 ? dev / scale : 0.0;
    if (rel > agreement.max_rel_err) {
      agreement.max_rel_err = rel;
      agreement.worst_iteration = k;
    }
    agg.push(trace.aggregate_sq[r]);
    step.push(trace.step_sq[r]);
  }
  return agreement;
}

}  // namespace csgd
