#pragma once

#include <string>
#include <vector>

#include "csgd/problem.hpp"

namespace csgd {

// Per-run hyperparameter schedules: constant step size, geometrically
// growing mini-batches, geometrically decaying control size, and the
// censoring-threshold window parameters.
struct ScheduleSet {
  double alpha = 0.02;          // step size
  long batch0 = 1;              // B^0, first-round batch scale
  double batch_growth = 1.1;    // per-exponent batch growth factor, >= 1
  long batch_cap = 0;           // B-bar; 0 means uncapped
  double sigma0 = 0.1;          // initial control size
  double control_decay = 0.91;  // per-exponent control shrink factor, (0,1]
  int window = 10;              // D, history length feeding the threshold
  double weight = 1.0 / 60.0;   // w, weight on the history part
  long epoch_len = 1;           // staircase width of the growth exponents

  // Growth/decay rates in the form the convergence conditions use.
  double eta1() const { return 1.0 - 1.0 / batch_growth; }
  double eta2() const { return 1.0 - control_decay; }
};

// Throws ScheduleError naming the offending field.
void validate(const ScheduleSet& s);

// Shared staircase exponent: ceil(k / epoch_len).
long growth_exponent(const ScheduleSet& s, long iteration);

// B^k = min{ceil(batch0 * batch_growth^e), batch_cap}. Uncapped overflow
// throws ScheduleError.
long batch_size(const ScheduleSet& s, long iteration);

// sigma^k = sigma0 * control_decay^e.
double control_size(const ScheduleSet& s, long iteration);

enum class TheoryMode { pl, nonconvex };

struct TheoryCondition {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool gating = true;
  std::string note;
};

struct TheoryReport {
  std::vector<TheoryCondition> conditions;
  double rho = 0.0;          // mu * alpha / 3
  double batch0_bound = 0.0; // informational lower bound on batch0
  bool pass() const;         // all gating conditions hold
};

// Smallest batch0 for which the once-per-window upload guarantee holds
// with probability 1 - delta. Returns +inf when sigma0 or the rate gap
// make the bound undefined.
double batch0_lower_bound(const ScheduleSet& s, const ObjectiveConstants& c,
                          int workers, double delta);

// Checks the schedule against the convergence-rate conditions: the step
// size cap, weight = 1/60, eta1 > eta2 > rho, and the mode's window lower
// bound. Purely informational; never mutates the schedule.
TheoryReport validate_theoretical(const ScheduleSet& s,
                                  const ObjectiveConstants& c, int workers,
                                  TheoryMode mode, double delta = 0.1);

}  // namespace csgd
