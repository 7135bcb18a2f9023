#include <cmath>
#include <vector>

#include "csgd/engine.hpp"
#include "csgd/errors.hpp"
#include "csgd/verify.hpp"
#include "doctest.h"

using namespace csgd;

namespace {

// One-round result on F(x) = x^2/2: model 1 -> 1 - alpha*step_grad.
RunResult one_step_result(Variant v, double alpha, double step_grad,
                          double fresh, double tau) {
  RunResult r;
  r.variant = v;
  RoundRecord rec;
  rec.iteration = 1;
  rec.threshold = tau;
  r.rounds.push_back(rec);
  RunTrace t;
  t.model = {{1.0}, {1.0 - alpha * step_grad}};
  t.fresh_sum = {{fresh}};
  t.aggregate_sq = {step_grad * step_grad};
  t.step_sq = {alpha * alpha * step_grad * step_grad};
  t.threshold = {tau};
  r.trace = t;
  r.final_model = t.model.back();
  return r;
}

ScheduleSet schedule_with_alpha(double alpha) {
  ScheduleSet s;
  s.alpha = alpha;
  s.window = 2;
  return s;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("descent bound on a single quadratic step") {
  const Problem p = Problem::least_squares_at({0.0}, 1, 0.0);
  // exact gradient step: x 1 -> 0.9, fresh sum = grad F(1) = 1, tau = 0
  const RunResult r = one_step_result(Variant::csgd, 0.1, 1.0, 1.0, 0.0);
  const DescentReport rep = check_descent(p, schedule_with_alpha(0.1), r, 1.0);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].lhs == doctest::Approx(-0.095).epsilon(1e-12));
  CHECK(rep.rows[0].rhs == doctest::Approx(-0.0675).epsilon(1e-12));
  CHECK(rep.rows[0].pass);
  CHECK(rep.pass());

  // sgd variant: same numbers, no threshold term, halved error rate
  const RunResult rs = one_step_result(Variant::sgd, 0.1, 1.0, 1.0, 0.0);
  const DescentReport reps =
      check_descent(p, schedule_with_alpha(0.1), rs, 1.0);
  CHECK(reps.rows[0].rhs == doctest::Approx(-0.0675).epsilon(1e-12));
  CHECK(reps.pass());
}

TEST_CASE("descent bound charges gradient error") {
  const Problem p = Problem::least_squares_at({0.0}, 1, 0.0);
  // overshoot driven by a wrong fresh gradient: x 1 -> 1.2
  const RunResult r = one_step_result(Variant::csgd, 0.1, -2.0, -2.0, 0.0);
  const DescentReport rep = check_descent(p, schedule_with_alpha(0.1), r, 1.0);
  // lhs = F(1.2)-F(1) = 0.22; err = |1-(-2)|^2 = 9 charged at alpha/eps
  CHECK(rep.rows[0].lhs == doctest::Approx(0.22).epsilon(1e-12));
  CHECK(rep.rows[0].rhs == doctest::Approx(-0.0675 + 0.2 * 9.0).epsilon(1e-12));
  CHECK(rep.pass());
}

TEST_CASE("descent bound detects an understated smoothness constant") {
  const Problem p = Problem::least_squares_at({0.0}, 1, 0.0);
  // exact gradient, but alpha = 3 with a claimed L of 0.01: ascends
  const RunResult r = one_step_result(Variant::csgd, 3.0, 1.0, 1.0, 0.0);
  const DescentReport rep =
      check_descent(p, schedule_with_alpha(3.0), r, 0.01);
  CHECK(rep.rows[0].lhs == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(rep.rows[0].rhs < 0.0);
  CHECK_FALSE(rep.rows[0].pass);
  CHECK(rep.violations == 1);
}

TEST_CASE("descent bound holds over a real censored run") {
  const Problem p = Problem::least_squares(6, 4, 5, 0.02);
  ScheduleSet s;
  s.alpha = 0.02;
  s.batch_cap = 200;
  RunSettings st;
  st.variant = Variant::csgd;
  st.iterations = 120;
  st.seed = 3;
  st.trace = true;
  const RunResult r = run(p, s, st);
  const DescentReport rep =
      check_descent(p, s, r, p.estimate_constants().smoothness);
  CHECK(rep.rows.size() == 120);
  CHECK(rep.violations == 0);
}

TEST_CASE("descent needs a trace and sane parameters") {
  const Problem p = Problem::least_squares_at({0.0}, 1, 0.0);
  RunResult bare;
  bare.rounds.resize(3);
  CHECK_THROWS_AS(
      (void)check_descent(p, schedule_with_alpha(0.1), bare, 1.0),
      CapabilityError);
  const RunResult r = one_step_result(Variant::csgd, 0.1, 1.0, 1.0, 0.0);
  CHECK_THROWS_AS(
      (void)check_descent(p, schedule_with_alpha(0.1), r, 0.0),
      ParameterError);
  CHECK_THROWS_AS(
      (void)check_descent(p, schedule_with_alpha(0.1), r, 1.0, -1.0),
      ParameterError);
}

TEST_CASE("geometric decay accepts an exact geometric series") {
  std::vector<double> v;
  for (int k = 1; k <= 100; ++k) v.push_back(2.0 * std::pow(0.99, k));
  const DecayReport rep = check_geometric_decay({v, v}, 0.01);
  CHECK(rep.slope == doctest::Approx(std::log(0.99)).epsilon(1e-9));
  CHECK(rep.slope_bound ==
        doctest::Approx(std::log(0.99) - 0.5 * std::log(0.99)).epsilon(1e-12));
  CHECK(rep.pass);
  CHECK(rep.mean_series.size() == 100);
}

TEST_CASE("geometric decay rejects flat series") {
  std::vector<double> v(100, 3.0);
  const DecayReport rep = check_geometric_decay({v}, 0.01);
  CHECK(rep.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(rep.pass);
}

TEST_CASE("geometric decay input validation") {
  std::vector<double> v(100, 1.0), w(99, 1.0);
  CHECK_THROWS_AS((void)check_geometric_decay({}, 0.01), ParameterError);
  CHECK_THROWS_AS((void)check_geometric_decay({v}, 0.0), ParameterError);
  CHECK_THROWS_AS((void)check_geometric_decay({v}, 1.0), ParameterError);
  CHECK_THROWS_AS((void)check_geometric_decay({v, w}, 0.01), ParameterError);
  std::vector<double> tiny(49, 1.0);
  CHECK_THROWS_AS((void)check_geometric_decay({tiny}, 0.01), ParameterError);
}

TEST_CASE("decay constants") {
  ScheduleSet s;
  s.sigma0 = 1.0;
  s.control_decay = 0.9;  // eta2 = 0.1
  s.batch_growth = 1.25;  // eta1 = 0.2
  s.batch0 = 2;
  CHECK(decay_constant_csgd(1.0, 0.09, 0.01, s, 3.0) ==
        doctest::Approx(5.941315789473684).epsilon(1e-12));
  CHECK(decay_constant_sgd(1.0, 0.09, 0.01, s, 3.0) ==
        doctest::Approx(2.6413157894736843).epsilon(1e-12));
  CHECK(std::isinf(decay_constant_csgd(1.0, 0.09, 0.15, s, 3.0)));
  CHECK(std::isinf(decay_constant_sgd(1.0, 0.09, 0.25, s, 3.0)));
}

TEST_CASE("sparsity counts repeated uploads in sliding windows") {
  auto rec = [](std::vector<std::uint8_t> mask) {
    RoundRecord r;
    r.upload_mask = std::move(mask);
    return r;
  };
  std::vector<RoundRecord> rounds = {rec({1, 1}), rec({0, 0}), rec({1, 0}),
                                     rec({0, 1}), rec({1, 0})};
  SparsityReport rep = check_sparsity(rounds, 2);
  CHECK(rep.windows_checked == 8);
  CHECK(rep.violations == 0);
  CHECK_FALSE(rep.any());

  rounds.push_back(rec({1, 1}));  // worker 0 now uploads in rounds 5 and 6
  rep = check_sparsity(rounds, 2);
  CHECK(rep.windows_checked == 10);
  CHECK(rep.violations == 1);
  REQUIRE(rep.per_worker.size() == 2);
  CHECK(rep.per_worker[0] == 1);
  CHECK(rep.per_worker[1] == 0);
  CHECK(rep.any());
}

TEST_CASE("min-gradient trend check") {
  std::vector<double> inv_sq;
  for (int k = 1; k <= 64; ++k) inv_sq.push_back(1.0 / (double(k) * k));
  MinGradReport rep = check_min_grad_decay(inv_sq, {8, 16, 32, 64});
  CHECK(rep.pass);
  CHECK(rep.all_decreasing);
  REQUIRE(rep.scaled.size() == 4);
  CHECK(rep.scaled[0] == doctest::Approx(8.0 / 64.0).epsilon(1e-12));
  CHECK(rep.scaled[3] == doctest::Approx(64.0 / 4096.0).epsilon(1e-12));

  std::vector<double> flat(64, 2.0);
  rep = check_min_grad_decay(flat, {8, 16, 32, 64});
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.all_decreasing);

  CHECK_THROWS_AS((void)check_min_grad_decay(inv_sq, {16}), ParameterError);
  CHECK_THROWS_AS((void)check_min_grad_decay(inv_sq, {16, 8}),
                  ParameterError);
  CHECK_THROWS_AS((void)check_min_grad_decay(inv_sq, {0, 8}), ParameterError);
  CHECK_THROWS_AS((void)check_min_grad_decay(inv_sq, {8, 100}),
                  ParameterError);
}

TEST_CASE("threshold forms agree on real runs, including epochs") {
  const Problem p = Problem::least_squares(5, 4, 11, 0.02);
  ScheduleSet s;
  s.alpha = 0.02;
  s.batch_cap = 100;
  s.window = 4;
  RunSettings st;
  st.variant = Variant::csgd;
  st.iterations = 80;
  st.seed = 2;
  st.trace = true;

  const RunResult r = run(p, s, st);
  const ThresholdAgreement a = check_threshold_forms(r, s, p.workers());
  CHECK(a.max_rel_err <= 1e-12);

  ScheduleSet staircase = s;
  staircase.epoch_len = 7;
  const RunResult r2 = run(p, staircase, st);
  const ThresholdAgreement a2 =
      check_threshold_forms(r2, staircase, p.workers());
  CHECK(a2.max_rel_err <= 1e-12);

  st.variant = Variant::lag_s;
  const RunResult r3 = run(p, s, st);
  const ThresholdAgreement a3 = check_threshold_forms(r3, s, p.workers());
  CHECK(a3.max_rel_err <= 1e-12);
}

TEST_CASE("threshold check refuses sgd and untraced runs") {
  const Problem p = Problem::least_squares(3, 2, 1, 0.01);
  ScheduleSet s;
  s.alpha = 0.02;
  s.window = 3;
  RunSettings st;
  st.variant = Variant::sgd;
  st.iterations = 10;
  st.trace = true;
  const RunResult r = run(p, s, st);
  CHECK_THROWS_AS((void)check_threshold_forms(r, s, p.workers()),
                  CapabilityError);
  st.variant = Variant::csgd;
  st.trace = false;
  const RunResult r2 = run(p, s, st);
  CHECK_THROWS_AS((void)check_threshold_forms(r2, s, p.workers()),
                  CapabilityError);
}

}  // TEST_SUITE
