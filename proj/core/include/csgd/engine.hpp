#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "csgd/censor.hpp"
#include "csgd/problem.hpp"
#include "csgd/schedule.hpp"

namespace csgd {

// sgd uploads unconditionally; lag_s censors with zero control size; csgd
// censors with the full threshold.
enum class Variant { sgd, csgd, lag_s };

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

enum class ThresholdForm { experimental, theoretical };

struct RoundRecord {
  long iteration = 0;
  double loss = 0.0;       // NaN off the metrics cadence
  double grad_norm = 0.0;  // NaN off the metrics cadence
  int uploads = 0;
  long cum_uploads = 0;
  long cum_samples = 0;
  double threshold = 0.0;  // threshold the round was censored against
  double lyapunov = 0.0;   // NaN off the metrics cadence
  std::vector<std::uint8_t> upload_mask;
};

// Optional per-round byproducts needed by the verification checks.
struct RunTrace {
  std::vector<Vec> model;       // index 0 is the start point, then one per round
  std::vector<Vec> fresh_sum;   // sum of freshly computed worker gradients
  std::vector<double> aggregate_sq;  // |aggregate|^2 after the round
  std::vector<double> step_sq;       // |model step|^2 of the round
  std::vector<double> threshold;     // threshold used by the round
};

struct RunSettings {
  Variant variant = Variant::csgd;
  long iterations = 100;
  std::uint64_t seed = 1;
  ThresholdForm form = ThresholdForm::experimental;
  Vec start;               // empty means the origin
  long metrics_every = 1;  // loss/grad/lyapunov cadence; last round always on
  bool trace = false;
  bool paranoid = false;   // recompute the aggregate every round and compare
};

struct RunResult {
  Variant variant = Variant::csgd;
  std::uint64_t seed = 1;
  RunSettings settings;  // echo of the request
  std::vector<RoundRecord> rounds;
  Vec final_model;
  long broadcasts = 0;  // model/threshold messages sent to workers
  bool diverged = false;
  long diverged_at = -1;
  std::optional<RunTrace> trace;
};

// Runs the synchronous round loop: broadcast the model and threshold, let
// every worker draw its batch and decide on uploading, fold the uploads
// into the server state, then update the threshold for the next round.
// Deterministic in (problem, schedule, settings).
RunResult run(const Problem& problem, const ScheduleSet& schedule,
              const RunSettings& settings);

// Suboptimality plus the weighted window of recent aggregate squared
// norms; weights are (window+1-d) * alpha / (9*window) for lag d.
double lyapunov_value(double suboptimality,
                      std::span<const double> window_newest_first,
                      double alpha, int window);
double lyapunov_value(const Problem& problem, const Vec& model,
                      const RingWindow& aggregate_history, double alpha,
                      int window);

struct ComplexityPoint {
  long iterations = 0;
  long uploads = 0;
};

// First recorded round whose loss is within `accuracy` of f_star, along
// with the uploads spent to get there. nullopt when never reached.
std::optional<ComplexityPoint> comm_complexity(const RunResult& result,
                                               double f_star,
                                               double accuracy);

}  // namespace csgd
