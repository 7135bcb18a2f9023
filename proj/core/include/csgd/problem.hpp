#pragma once

#include <cstdint>

#include "csgd/dataset.hpp"
#include "csgd/vec.hpp"

namespace csgd {

enum class ProblemKind { least_squares, logistic };

// Mean of a worker's freshly drawn mini-batch of stochastic gradients.
struct GradientSample {
  Vec mean_gradient;
  int worker_id = 0;
  long iteration = 0;
  long batch_requested = 0;
  long batch_used = 0;  // smaller than requested only on a full local pass
};

// Curvature and noise constants of the summed objective F = sum_m F_m.
struct ObjectiveConstants {
  double smoothness = 0.0;                // L, valid upper bound for F
  std::vector<double> worker_smoothness;  // per-worker L_m
  double pl_constant = 0.0;               // mu with 2*mu*(F-F*) <= |grad F|^2
  double variance_bound = 0.0;            // G^2 for one summed sample
  std::vector<double> worker_variance;    // per-worker G_m^2
  double variance_radius = 0.0;  // ball around the minimizer covered; inf = everywhere
  long variance_points = 0;      // Monte-Carlo probe points behind the bound
  long variance_draws = 0;       // gradient draws per probe point
};

struct ConstantsOptions {
  double radius = -1.0;  // < 0 picks a problem-dependent default
  int points = 48;
  int draws = 128;
  std::uint64_t seed = 2026;
};

// One distributed objective over a fixed worker count. Immutable after
// construction and safe to share across threads.
class Problem {
 public:
  // Least squares with a generated minimizer (entries uniform in [-2, 2]).
  // Every worker draws from the same sample distribution; fresh draws are
  // unlimited.
  static Problem least_squares(int dim, int workers, std::uint64_t seed,
                               double noise_std);
  // Least squares with a caller-supplied minimizer, for controlled setups.
  static Problem least_squares_at(Vec minimizer, int workers,
                                  double noise_std);
  // L2-regularized logistic regression over a dataset whose rows are
  // shuffled by `seed` and assigned evenly to the workers. Labels may be
  // {0,1} or {-1,+1}. With l2_penalty > 0 the optimal value is solved at
  // construction and cached; with l2_penalty = 0 it is unavailable.
  static Problem logistic(Dataset data, int workers, double l2_penalty,
                          std::uint64_t seed);

  ProblemKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int workers() const { return workers_; }
  // Rows held by one worker; 0 means unlimited fresh draws.
  long worker_rows(int worker) const;

  // One stochastic gradient, the draw-th sub-draw of the given worker and
  // iteration. Exposed so a batch mean can be reproduced draw by draw.
  Vec draw_gradient(int worker, const Vec& x, std::uint64_t seed,
                    long iteration, long draw) const;
  // Mean of `batch` i.i.d. sub-draws. For dataset-backed workers a batch
  // at least as large as the local row count becomes one exact full pass.
  GradientSample sample_gradient(int worker, const Vec& x, long batch,
                                 std::uint64_t seed, long iteration) const;

  // Exact mean gradient of one worker's local objective.
  Vec worker_gradient(int worker, const Vec& x) const;
  Vec full_gradient(const Vec& x) const;
  double full_loss(const Vec& x) const;
  // F(x) - F*, computed without cancellation where a closed form exists.
  // Throws CapabilityError when the optimal value is unavailable.
  double suboptimality(const Vec& x) const;
  bool has_optimum() const { return has_optimum_; }
  double optimal_value() const;  // CapabilityError when unavailable
  const Vec& minimizer() const;  // CapabilityError when unavailable

  ObjectiveConstants estimate_constants(const ConstantsOptions& opts = {}) const;

  double noise_std() const { return noise_std_; }
  double l2_penalty() const { return l2_; }

 private:
  Problem() = default;
  void check_worker(int worker) const;
  void check_point(const Vec& x) const;
  void draw_into(int worker, const Vec& x, std::uint64_t seed, long iteration,
                 long draw, Vec& out) const;
  void solve_optimum();

  ProblemKind kind_ = ProblemKind::least_squares;
  int dim_ = 0;
  int workers_ = 0;
  double noise_std_ = 0.0;
  bool has_optimum_ = false;
  Vec minimizer_;
  double f_star_ = 0.0;
  // logistic state
  Dataset data_;
  double l2_ = 0.0;
  std::vector<std::size_t> row_begin_;  // workers_+1 partition offsets
};

}  // namespace csgd
