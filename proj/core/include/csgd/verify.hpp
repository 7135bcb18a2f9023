#pragma once

#include <vector>

#include "csgd/engine.hpp"
#include "csgd/problem.hpp"
#include "csgd/schedule.hpp"

namespace csgd {

// One per-round evaluation of the objective-descent bound.
struct DescentRow {
  long iteration = 0;
  double lhs = 0.0;  // F(x^k) - F(x^{k-1})
  double rhs = 0.0;  // descent bound at x^{k-1}
  bool pass = false; // lhs <= rhs + 1e-9 * (1 + |rhs|)
};

struct DescentReport {
  std::vector<DescentRow> rows;
  long violations = 0;
  bool pass() const { return violations == 0; }
};

// Evaluates the per-round descent bound on a traced run. For censored
// variants the bound charges the gradient-approximation error at rate
// alpha/epsilon plus a threshold term; for sgd the error rate is
// alpha/(2*epsilon) and there is no threshold term. `smoothness` must be a
// valid upper bound on the objective's smoothness constant.
DescentReport check_descent(const Problem& problem, const ScheduleSet& schedule,
                            const RunResult& result, double smoothness,
                            double epsilon = 0.5);

struct DecayReport {
  double slope = 0.0;        // fitted log-linear slope of the mean series
  double slope_bound = 0.0;  // log(1-rho) + 0.5*|log(1-rho)|
  double rho = 0.0;
  long tail_start = 0;       // first iteration included in the fit
  bool pass = false;
  std::vector<double> mean_series;
};

// Seed-averages the Lyapunov series, fits log V against the iteration
// index over the tail half, and compares the slope against the geometric
// rate with 50 percent slack.
DecayReport check_geometric_decay(
    const std::vector<std::vector<double>>& series_per_seed, double rho);

// Loose closed-form ceilings on the Lyapunov series, used as a secondary
// advisory check. Infinite when the rate gaps are not positive.
double decay_constant_csgd(double v0, double alpha, double rho,
                           const ScheduleSet& schedule, double g_squared);
double decay_constant_sgd(double v0, double alpha, double rho,
                          const ScheduleSet& schedule, double g_squared);

struct SparsityReport {
  long windows_checked = 0;  // sliding windows times workers
  long violations = 0;       // windows holding two or more uploads
  std::vector<long> per_worker;
  bool any() const { return violations > 0; }
};

// Counts sliding windows of `window` consecutive rounds in which a worker
// uploaded more than once.
SparsityReport check_sparsity(const std::vector<RoundRecord>& rounds,
                              int window);

struct MinGradReport {
  std::vector<long> checkpoints;
  std::vector<double> scaled;  // K * min of squared gradient norms up to K
  bool pass = false;           // strictly decreasing over the last three
  bool all_decreasing = false; // strictly decreasing over every step
};

// Trend check on K * min_{k<=K} |grad F(x^k)|^2 at the given checkpoints.
MinGradReport check_min_grad_decay(const std::vector<double>& grad_sq,
                                   const std::vector<long>& checkpoints);

struct ThresholdAgreement {
  double max_rel_err = 0.0;
  long worst_iteration = 0;
};

// Recomputes both threshold forms from a traced run and reports the worst
// relative disagreement between them and the recorded thresholds.
ThresholdAgreement check_threshold_forms(const RunResult& result,
                                         const ScheduleSet& schedule,
                                         int workers);

}  // namespace csgd
