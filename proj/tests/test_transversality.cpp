#include "doctest.h"

#include <cmath>
#include <set>

#include "pinch/bohm_wilking.hpp"
#include "pinch/samples.hpp"
#include "pinch/transversality.hpp"

using namespace pinch;

namespace {

OptimizerBudget small_budget() {
  OptimizerBudget b;
  b.starts = 8;
  b.iterations = 80;
  return b;
}

double cond3_value(const CurvatureTensor& s, const FirstConeParams& p) {
  const Spectrum sp = ricci(s).spectrum();
  return sp.values(0) + sp.values(1) + 2 * p.gamma / p.n * scalar(s);
}

}  // namespace

TEST_CASE("activation shift puts condition 3 on the boundary") {
  const auto p = first_cone_params(9, first_b_max(9));
  // id^id alone: Ric = 2(n-1) id, so the shift cancels the whole tensor.
  const CurvatureTensor round = round_tensor(9);
  const double c = cond3_activation_shift(round, p.gamma);
  CHECK(c == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK((round + c * round).norm() < 1e-13);

  Rng rng(4);
  const CurvatureTensor s = random_nonnegative(9, rng) + cylinder_tensor(9);
  const double cs = cond3_activation_shift(s, p.gamma);
  CHECK(std::abs(cond3_value(s + cs * round, p)) < 1e-12 * scalar(s));
}

TEST_CASE("sampled certificates: activity and separation") {
  for (int n : {9, 11}) {
    for (double b : {first_b_max(n) / 2, first_b_max(n)}) {
      const auto p = first_cone_params(n, b);
      std::set<double> shifts;
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto c3 = sample_boundary_cond3(p, seed);
        CHECK(std::abs(c3.margin[2]) < 1e-10 * c3.scal);
        CHECK(c3.margin[0] > 1e-6 * c3.scal);
        CHECK(c3.margin[1] > 1e-6 * c3.scal);
        CHECK(c3.margin[3] > 1e-6 * c3.scal);
        shifts.insert(c3.shift);

        const auto c4 = sample_boundary_cond4(p, seed);
        CHECK(std::abs(c4.margin[3]) < 1e-9 * c4.scal);
        CHECK(c4.margin[2] > 1e-6 * c4.scal);
        CHECK(c4.margin[1] > 1e-6 * c4.scal);
      }
      CHECK(shifts.size() == 10);
    }
  }
  const auto p = first_cone_params(10, first_b_max(10));
  const auto x = sample_boundary_cond3(p, 77), y = sample_boundary_cond3(p, 77);
  CHECK((x.cert.S - y.cert.S).norm() == 0.0);
  CHECK(x.theta == y.theta);
}

TEST_CASE("sampled margins agree with the generic condition check") {
  const auto p = first_cone_params(10, first_b_max(10));
  const auto c = sample_boundary_cond3(p, 5);
  const ConditionReport rep = check_first_cone_cert(c.cert, p, small_budget());
  CHECK(rep.margin[0] == doctest::Approx(c.margin[0]).epsilon(1e-9));
  CHECK(std::abs(rep.margin[2] - c.margin[2]) < 1e-12 * c.scal);
  // Condition 2 from the sampler is a certified lower bound.
  CHECK(rep.margin[1] >= c.margin[1] - 1e-9 * c.scal);
  CHECK(std::abs(rep.margin[3] - c.margin[3]) < 1e-6 * c.scal);
}

TEST_CASE("condition 3 identity") {
  for (int n = 9; n <= 11; ++n) {
    for (double b : {1e-4, first_b_max(n) / 3, first_b_max(n)}) {
      const auto r = check_cond3_identity(first_cone_params(n, b));
      CHECK(r.pass);
    }
  }
}

TEST_CASE("condition 3 derivative") {
  for (int n = 9; n <= 11; ++n) {
    const auto p = first_cone_params(n, first_b_max(n));
    const auto r = sweep_cond3_derivative(p, 20, 11);
    MESSAGE(r.line());
    CHECK(r.pass);
    CHECK(r.margin > 0);
  }
  const auto p = first_cone_params(9, first_b_max(9));
  Rng rng(1);
  const CurvatureTensor s = random_nonnegative(9, rng);
  CHECK_THROWS_AS(check_prop_cond3_derivative(FirstConeCertificate(s, s), p),
                  std::invalid_argument);
}

TEST_CASE("condition 3 derivative matches a finite difference") {
  const auto p = first_cone_params(9, first_b_max(9));
  const auto c = sample_boundary_cond3(p, 3);
  const CurvatureTensor& s = c.cert.S;
  const Spectrum sp = ricci(s).spectrum();
  REQUIRE(sp.values(2) - sp.values(1) > 1e-4 * c.scal);
  REQUIRE(sp.values(1) - sp.values(0) > 1e-4 * c.scal);
  const CurvatureTensor ds = evolution_rhs(s, p.lab());
  const double h = 1e-6;
  const double fd =
      (cond3_value(s + h * ds, p) - cond3_value(s + (-h) * ds, p)) / (2 * h);
  const auto r = check_prop_cond3_derivative(c.cert, p);
  CHECK(0.5 * fd / (c.scal * c.scal) == doctest::Approx(r.margin).epsilon(1e-5));
}

TEST_CASE("condition 4 derivative") {
  for (int n = 9; n <= 11; ++n) {
    const auto p = first_cone_params(n, first_b_max(n));
    const auto eps = estimate_epsilon(p, 4, 2, small_budget());
    CHECK(eps.epsilon > 0);
    const auto r = sweep_cond4_derivative(p, 20, 13, eps.epsilon);
    MESSAGE(r.line());
    CHECK(r.pass);
    // The claim has to survive a tenfold smaller epsilon too.
    CHECK(sweep_cond4_derivative(p, 10, 13, eps.epsilon / 10).pass);
  }
}

TEST_CASE("epsilon estimate") {
  const auto p = first_cone_params(9, first_b_max(9));
  const auto one = estimate_epsilon(p, {round_tensor(9)}, small_budget());
  CHECK(one.epsilon > 0);
  CHECK(one.samples == 1);
  CHECK_THROWS_AS(estimate_epsilon(p, std::vector<CurvatureTensor>{}, small_budget()),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_epsilon(p, 0, 1, small_budget()), std::invalid_argument);
  const auto x = estimate_epsilon(p, 4, 8, small_budget());
  const auto y = estimate_epsilon(p, 4, 8, small_budget());
  CHECK(x.epsilon == y.epsilon);
  CHECK(x.epsilon <= 0.5 * one.min_ratio + 1e-15);
}

TEST_CASE("sharp is nonnegative at PIC tangent probes") {
  // S = T: no room in S - T, every probe is tangent.
  Rng rng(6);
  const CurvatureTensor t = random_nonnegative(9, rng);
  const auto same = check_prop_sharp_tangent(t, t, small_budget());
  CHECK(!same.skipped);
  CHECK(same.pass);

  // Strictly PIC difference: nothing to check.
  const auto strict = check_prop_sharp_tangent(t + round_tensor(9), t, small_budget());
  CHECK(strict.skipped);

  // The cylinder is strictly PIC; against itself every probe is tangent and
  // S# is a nonnegative operator.
  const CurvatureTensor cyl = cylinder_tensor(9);
  CHECK(check_prop_sharp_tangent(cyl, CurvatureTensor::zero(9), small_budget()).skipped);
  const auto cyl_rec = check_prop_sharp_tangent(cyl, cyl, small_budget());
  CHECK(!cyl_rec.skipped);
  CHECK(cyl_rec.margin >= 0);

  for (int n : {9, 10}) {
    const auto r = sweep_sharp_tangent(n, 6, 3, small_budget());
    MESSAGE(r.line());
    CHECK(r.pass);
  }
}

TEST_CASE("second family derivative at boundary points") {
  for (int n = 9; n <= 11; ++n) {
    const auto p = second_cone_params(n, second_b_max(n), true);
    const auto rs = check_secondcone_dZ(p, 4, 19, small_budget());
    REQUIRE(rs.size() == 3);
    for (const auto& r : rs) {
      MESSAGE(r.line());
      CHECK(!r.skipped);
      CHECK(r.pass);
    }
    CHECK(rs[0].id == "second_cone_dZ");
  }
}

TEST_CASE("glue: first family boundary lands in the second family") {
  for (int n = 9; n <= 11; ++n) {
    const auto r = check_glue_membership(n, 4, 23, small_budget());
    MESSAGE(r.line());
    CHECK(r.pass);
  }
}

TEST_CASE("ODE: id^id ray against the exact solution") {
  const int n = 9;
  const auto p = first_cone_params(n, first_b_max(n));
  const LabParams lab = p.lab();
  // D(id^id) = (k - 1) Q(id^id) with k the scal factor of l_{a,b}, so
  // f' = 4(n-1) k f^2.
  const double f0 = 1.0, rate = 4.0 * (n - 1) * lab.scal_factor();
  const double td = 1.0 / (2 * rate * f0);  // f doubles at td
  auto exact = [&](double t) { return f0 / (1 - rate * f0 * t); };
  const CurvatureTensor round = round_tensor(n);
  IntegrateOptions opts;
  opts.record_every = 1000000;

  auto run = [&](int steps) {
    EvolutionState st(f0 * round, CurvatureTensor::zero(n), lab, 0.0);
    const Trajectory tr = ode_integrate(st, td / steps, steps, opts);
    REQUIRE(!tr.truncated);
    const CurvatureTensor& s = tr.final_state.S;
    return (s - exact(td) * round).norm() / round.norm();
  };
  const double e1 = run(50), e2 = run(100);
  CHECK(e1 < 1e-6);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
  CHECK(run(400) < 1e-8);
}

TEST_CASE("ODE: zero is a fixed point and blow-up truncates") {
  const int n = 9;
  const auto p = first_cone_params(n, first_b_max(n));
  EvolutionState zero(CurvatureTensor::zero(n), CurvatureTensor::zero(n), p.lab(), 0.1);
  const Trajectory tz = ode_integrate(zero, 0.1, 10);
  CHECK(tz.final_state.S.norm() == 0.0);
  CHECK(tz.final_state.T.norm() == 0.0);
  CHECK(tz.points.size() == 11);

  const CurvatureTensor round = round_tensor(n);
  EvolutionState st(round, CurvatureTensor::zero(n), p.lab(), 0.0);
  const double t_blow = 1.0 / (4.0 * (n - 1) * p.lab().scal_factor());
  const Trajectory tb = ode_integrate(st, t_blow / 100, 200);
  CHECK(tb.truncated);
  CHECK(tb.steps_taken < 200);
  CHECK(tb.final_state.S.norm() <= kBlowUpNorm);
  CHECK(tb.points.back().t <= t_blow);

  CHECK_THROWS_AS(ode_integrate(st, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(ode_integrate(st, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(EvolutionState(round, round, p.lab(), -1.0), std::invalid_argument);
}

TEST_CASE("ODE: trajectories started in the first family stay there") {
  const int n = 9;
  const auto p = first_cone_params(n, first_b_max(n));
  const auto eps = estimate_epsilon(p, 4, 2, small_budget());
  for (std::uint64_t seed : {1, 2}) {
    const auto c = sample_certificate(p, ActiveCondition::none, seed);
    EvolutionState st(c.cert.S, c.cert.T, p.lab(), eps.epsilon, p);
    // Time unit: 1 / scal, a few percent of the blow-up time scale.
    const double dt = 0.002 / c.scal;
    IntegrateOptions opts;
    opts.record_every = 5;
    const Trajectory tr = ode_integrate(st, dt, 20, opts);
    CHECK(!tr.truncated);
    for (const auto& pt : tr.points) {
      for (double m : pt.margin) CHECK(m >= -1e-8 * pt.scal);
    }
    CHECK(trajectory_line(tr.points.front()).rfind("t=", 0) == 0);
  }
}
