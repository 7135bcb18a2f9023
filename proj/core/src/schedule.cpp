#include "csgd/schedule.hpp"

#include <cmath>
#include <limits>

#include "csgd/errors.hpp"

namespace csgd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* message) {
  if (!ok) throw ScheduleError(message);
}

}  // namespace

void validate(const ScheduleSet& s) {
  require(std::isfinite(s.alpha) && s.alpha > 0.0, "alpha must be > 0");
  require(s.batch0 >= 1, "batch0 must be >= 1");
  require(std::isfinite(s.batch_growth) && s.batch_growth >= 1.0,
          "batch_growth must be >= 1");
  require(s.batch_cap >= 0, "batch_cap must be >= 0 (0 = uncapped)");
  require(std::isfinite(s.sigma0) && s.sigma0 >= 0.0, "sigma0 must be >= 0");
  require(std::isfinite(s.control_decay) && s.control_decay > 0.0 &&
              s.control_decay <= 1.0,
          "control_decay must be in (0, 1]");
  require(s.window >= 1, "window must be >= 1");
  require(std::isfinite(s.weight) && s.weight >= 0.0, "weight must be >= 0");
  require(s.epoch_len >= 1, "epoch_len must be >= 1");
}

long growth_exponent(const ScheduleSet& s, long iteration) {
  if (iteration < 1) throw ScheduleError("iteration index must be >= 1");
  if (s.epoch_len < 1) throw ScheduleError("epoch_len must be >= 1");
  return (iteration + s.epoch_len - 1) / s.epoch_len;
}

long batch_size(const ScheduleSet& s, long iteration) {
  const long e = growth_exponent(s, iteration);
  const double v =
      static_cast<double>(s.batch0) * std::pow(s.batch_growth, e);
  // The cap wins as soon as the raw curve passes it, so inaccuracy in huge
  // pow values cannot matter for capped schedules.
  if (s.batch_cap > 0 && v >= static_cast<double>(s.batch_cap)) {
    return s.batch_cap;
  }
  if (!(v < 9.0e18)) {
    throw ScheduleError("batch size overflows the integer range "
                        "(set a batch_cap)");
  }
  // Ceiling with a snap to exact integers, so representation dust in pow
  // (e.g. 1024.0000000000001) cannot bump the value up by one.
  const double r = std::round(v);
  long b;
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) {
    b = static_cast<long>(r);
  } else {
    b = static_cast<long>(std::ceil(v));
  }
  if (s.batch_cap > 0 && b > s.batch_cap) b = s.batch_cap;
  return b;
}

double control_size(const ScheduleSet& s, long iteration) {
  const long e = growth_exponent(s, iteration);
  return s.sigma0 * std::pow(s.control_decay, e);
}

bool TheoryReport::pass() const {
  for (const auto& c : conditions) {
    if (c.gating && !c.pass) return false;
  }
  return true;
}

double batch0_lower_bound(const ScheduleSet& s, const ObjectiveConstants& c,
                          int workers, double delta) {
  const double eta1 = s.eta1();
  const double eta2 = s.eta2();
  if (s.sigma0 <= 0.0 || delta <= 0.0 || eta1 <= eta2) return kInf;
  double sum_g = 0.0;
  for (double g : c.worker_variance) sum_g += g;
  if (c.worker_variance.empty()) sum_g = c.variance_bound;
  const double m2 = static_cast<double>(workers) * workers;
  return 6.0 * m2 * (1.0 - eta1) * sum_g /
         (s.sigma0 * (eta1 - eta2) * std::pow(1.0 - eta2, s.window) * delta);
}

TheoryReport validate_theoretical(const ScheduleSet& s,
                                  const ObjectiveConstants& c, int workers,
                                  TheoryMode mode, double delta) {
  validate(s);
  if (workers < 1) throw ParameterError("workers must be >= 1");

  TheoryReport report;
  const double mu = c.pl_constant;
  report.rho = mu * s.alpha / 3.0;
  const double md = static_cast<double>(workers) * s.window;

  auto add = [&report](std::string name, double value, double bound,
                       bool pass, bool gating, std::string note = {}) {
    report.conditions.push_back(
        {std::move(name), value, bound, pass, gating, std::move(note)});
  };

  // Step-size caps, one per curvature constant. A missing constant makes
  // its clause vacuous rather than failing the schedule.
  if (mu > 0.0) {
    const double b = 3.0 / (2.0 * s.window * mu);
    add("step_size_vs_quadratic_growth", s.alpha, b, s.alpha <= b, true);
  } else {
    add("step_size_vs_quadratic_growth", s.alpha, kInf, true, false,
        "no quadratic-growth constant available");
  }
  if (c.smoothness > 0.0) {
    const double b = 1.0 / (3.0 * c.smoothness);
    add("step_size_vs_smoothness", s.alpha, b, s.alpha <= b, true);
  } else {
    add("step_size_vs_smoothness", s.alpha, kInf, true, false,
        "no smoothness constant available");
  }
  double max_lm = 0.0;
  for (double lm : c.worker_smoothness) max_lm = std::max(max_lm, lm);
  if (max_lm > 0.0) {
    const double b = 1.0 / (6.0 * std::sqrt(5.0 * max_lm) * md);
    add("step_size_vs_worker_smoothness", s.alpha, b, s.alpha <= b, true);
  } else {
    add("step_size_vs_worker_smoothness", s.alpha, kInf, true, false,
        "no per-worker smoothness constants available");
  }

  add("confidence_weight", s.weight, 1.0 / 60.0,
      std::abs(s.weight - 1.0 / 60.0) <= 1e-12, true);

  const double eta1 = s.eta1();
  const double eta2 = s.eta2();
  add("batch_growth_rate_above_control_decay_rate", eta1, eta2, eta1 > eta2,
      true);
  add("control_decay_rate_above_rho", eta2, report.rho, eta2 > report.rho,
      true);

  const double min_window = (mode == TheoryMode::pl) ? 2.0 : 10.0;
  add("window_length", static_cast<double>(s.window), min_window,
      s.window >= min_window, true);

  report.batch0_bound = batch0_lower_bound(s, c, workers, delta);
  add("batch0_floor", static_cast<double>(s.batch0), report.batch0_bound,
      static_cast<double>(s.batch0) >= report.batch0_bound, false,
      "informational: guarantees the once-per-window upload bound with "
      "probability 1 - delta; the reference experiments use batch0 = 1");

  return report;
}

}  // namespace csgd
