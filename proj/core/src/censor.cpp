#include "csgd/censor.hpp"

#include <cmath>
#include <string>

#include "csgd/errors.hpp"

namespace csgd {

RingWindow::RingWindow(int size) {
  if (size < 1) throw ParameterError("window size must be >= 1");
  buf_.assign(static_cast<std::size_t>(size), 0.0);
}

void RingWindow::push(double value) {
  buf_[next_] = value;
  next_ = (next_ + 1) % buf_.size();
}

double RingWindow::sum() const {
  // Recomputed on demand: the window is short and a running sum would
  // accumulate cancellation drift over long runs.
  double s = 0.0;
  for (double v : buf_) s += v;
  return s;
}

double RingWindow::at_lag(int lag) const {
  if (lag < 1 || lag > size()) {
    throw ParameterError("window lag out of range: " + std::to_string(lag));
  }
  const std::size_t n = buf_.size();
  return buf_[(next_ + n - static_cast<std::size_t>(lag)) % n];
}

std::vector<double> RingWindow::newest_first() const {
  std::vector<double> out(buf_.size());
  for (int d = 1; d <= size(); ++d) out[d - 1] = at_lag(d);
  return out;
}

Decision censor_decide(const GradientSample& fresh, WorkerCensorState& state,
                       double threshold) {
  if (fresh.mean_gradient.size() != state.last_uploaded.size()) {
    throw StateError("gradient dimension mismatch in censor decision");
  }
  if (!(threshold >= 0.0)) {
    throw ParameterError("threshold must be >= 0");
  }
  if (squared_distance(fresh.mean_gradient, state.last_uploaded) > threshold) {
    state.last_uploaded = fresh.mean_gradient;
    return Decision::upload;
  }
  return Decision::censor;
}

double threshold_theoretical(const RingWindow& aggregate_history,
                             double sigma_k, double weight, int workers,
                             int window) {
  if (aggregate_history.size() != window) {
    throw ParameterError("history length does not match the window");
  }
  if (workers < 1) throw ParameterError("workers must be >= 1");
  const double m2 = static_cast<double>(workers) * workers;
  return (weight / window * aggregate_history.sum() + sigma_k) / m2;
}

double threshold_step_term(double step_history_sum, double weight,
                           int workers, int window, double alpha) {
  if (workers < 1) throw ParameterError("workers must be >= 1");
  if (window < 1) throw ParameterError("window must be >= 1");
  if (!(alpha > 0.0)) throw ParameterError("alpha must be > 0");
  const double m2 = static_cast<double>(workers) * workers;
  return weight / window * (step_history_sum / (alpha * alpha)) / m2;
}

double threshold_experimental(const RingWindow& step_history, double sigma0,
                              double control_decay, long iteration,
                              double weight, int workers, int window,
                              double alpha) {
  if (step_history.size() != window) {
    throw ParameterError("history length does not match the window");
  }
  if (iteration < 1) throw ParameterError("iteration index must be >= 1");
  const double m2 = static_cast<double>(workers) * workers;
  return threshold_step_term(step_history.sum(), weight, workers, window,
                             alpha) +
         sigma0 * std::pow(control_decay, iteration) / m2;
}

ServerState::ServerState(Vec start, int workers, int window)
    : model_(std::move(start)),
      aggregate_(),
      aggregate_history_(window),
      step_history_(window) {
  if (model_.empty()) throw ParameterError("start point must be non-empty");
  if (workers < 1) throw ParameterError("workers must be >= 1");
  aggregate_ = zeros(model_.size());
  per_worker_.assign(static_cast<std::size_t>(workers), zeros(model_.size()));
}

void ServerState::apply_round(const std::vector<Upload>& uploads,
                              double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("alpha must be finite and > 0");
  }
  std::vector<bool> seen(per_worker_.size(), false);
  for (const auto& up : uploads) {
    if (up.worker_id < 0 ||
        up.worker_id >= static_cast<int>(per_worker_.size())) {
      throw StateError("unknown worker id: " + std::to_string(up.worker_id));
    }
    if (seen[up.worker_id]) {
      throw StateError("worker uploaded twice in one round: " +
                       std::to_string(up.worker_id));
    }
    seen[up.worker_id] = true;
    if (up.gradient == nullptr || up.gradient->size() != model_.size()) {
      throw StateError("upload gradient missing or of wrong dimension");
    }
  }

  for (const auto& up : uploads) {
    Vec& stale = per_worker_[up.worker_id];
    const Vec& fresh = *up.gradient;
    if (bitwise_equal(fresh, stale)) continue;  // keeps the sum bit-stable
    for (std::size_t i = 0; i < aggregate_.size(); ++i) {
      aggregate_[i] += fresh[i] - stale[i];
    }
    stale = fresh;
  }

  double step_sq = 0.0;
  for (std::size_t i = 0; i < model_.size(); ++i) {
    const double step = alpha * aggregate_[i];
    model_[i] -= step;
    step_sq += step * step;
  }
  aggregate_history_.push(squared_norm(aggregate_));
  step_history_.push(step_sq);
  ++round_;
}

const Vec& ServerState::last_uploaded(int worker) const {
  if (worker < 0 || worker >= static_cast<int>(per_worker_.size())) {
    throw StateError("unknown worker id: " + std::to_string(worker));
  }
  return per_worker_[worker];
}

void ServerState::set_threshold(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw ParameterError("threshold must be finite and >= 0");
  }
  threshold_ = tau;
}

Vec ServerState::recompute_aggregate() const {
  Vec sum = zeros(model_.size());
  for (const auto& g : per_worker_) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
  }
  return sum;
}

}  // namespace csgd
