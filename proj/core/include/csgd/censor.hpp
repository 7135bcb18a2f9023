#pragma once

#include <vector>

#include "csgd/problem.hpp"
#include "csgd/vec.hpp"

namespace csgd {

// Fixed-length window of recent squared norms, zero-filled at start so
// entries for rounds before the first one read as exact zeros.
class RingWindow {
 public:
  explicit RingWindow(int size);
  void push(double value);  // evicts the oldest entry
  double sum() const;
  double at_lag(int lag) const;  // lag=1 is the newest entry
  int size() const { return static_cast<int>(buf_.size()); }
  std::vector<double> newest_first() const;

 private:
  std::vector<double> buf_;
  std::size_t next_ = 0;
};

// A worker's censoring memory: the gradient it last actually transmitted.
struct WorkerCensorState {
  int worker_id = 0;
  Vec last_uploaded;
};

enum class Decision { upload, censor };

// Upload decision: transmit iff the squared distance between the fresh
// batch mean and the last upload strictly exceeds the threshold; ties
// censor. On upload the state's last_uploaded is replaced by the fresh
// mean.
Decision censor_decide(const GradientSample& fresh, WorkerCensorState& state,
                       double threshold);

// Threshold from aggregate-gradient history:
// (weight/window * sum(history) + sigma_k) / workers^2.
double threshold_theoretical(const RingWindow& aggregate_history,
                             double sigma_k, double weight, int workers,
                             int window);

// History part of the model-difference threshold form:
// weight * step_history_sum / (workers^2 * window * alpha^2).
double threshold_step_term(double step_history_sum, double weight,
                           int workers, int window, double alpha);

// Model-difference threshold form: the step term plus
// sigma0 * control_decay^iteration / workers^2.
double threshold_experimental(const RingWindow& step_history, double sigma0,
                              double control_decay, long iteration,
                              double weight, int workers, int window,
                              double alpha);

// Server side of one round: the model, the running aggregate of workers'
// last uploads, a server-side mirror of each worker's last upload, and the
// two norm-history windows feeding the threshold forms.
class ServerState {
 public:
  ServerState(Vec start, int workers, int window);

  struct Upload {
    int worker_id = 0;
    const Vec* gradient = nullptr;
  };

  // Applies one synchronous round: folds the uploads into the aggregate
  // incrementally (subtract the stale copy, add the fresh gradient), moves
  // the model one step against the aggregate, and pushes both history
  // entries. Uploads bitwise-equal to the stored copy are skipped so the
  // aggregate stays bit-stable under redundant uploads.
  void apply_round(const std::vector<Upload>& uploads, double alpha);

  const Vec& model() const { return model_; }
  const Vec& aggregate() const { return aggregate_; }
  const Vec& last_uploaded(int worker) const;
  const RingWindow& aggregate_history() const { return aggregate_history_; }
  const RingWindow& step_history() const { return step_history_; }
  double threshold() const { return threshold_; }
  void set_threshold(double tau);
  long round() const { return round_; }

  // Slow-path oracle: the aggregate rebuilt as a fresh sum of the stored
  // per-worker uploads.
  Vec recompute_aggregate() const;

 private:
  Vec model_;
  Vec aggregate_;
  std::vector<Vec> per_worker_;
  RingWindow aggregate_history_;
  RingWindow step_history_;
  double threshold_ = 0.0;
  long round_ = 0;
};

}  // namespace csgd
