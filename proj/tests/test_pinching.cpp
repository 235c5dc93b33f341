#include "doctest.h"

#include <gmpxx.h>

#include <cmath>
#include <limits>

#include "pinch/pinching.hpp"
#include "pinch/samples.hpp"

using namespace pinch;

namespace {

OptimizerBudget small_budget() {
  OptimizerBudget b;
  b.starts = 12;
  b.iterations = 120;
  return b;
}

mpq_class exact_a(int n, const mpq_class& b) {
  const mpq_class u = 2 + (n - 2) * b;
  return u * u * b / (2 * (2 + (n - 3) * b));
}

}  // namespace

TEST_CASE("first family data at b_max, n = 9") {
  const auto p = first_cone_params(9, 0.05);
  const mpq_class b(1, 20);
  const mpq_class a = exact_a(9, b);
  const mpq_class gamma = b / (2 + 6 * b);
  CHECK(p.a == doctest::Approx(a.get_d()).epsilon(1e-14));
  CHECK(p.gamma == doctest::Approx(gamma.get_d()).epsilon(1e-14));
  CHECK(p.a == doctest::Approx(0.0600272).epsilon(1e-6));
  CHECK(p.gamma == doctest::Approx(0.0217391).epsilon(1e-5));
  CHECK(p.P_coef + 9 * p.Q_coef == doctest::Approx(2 + 32 * p.a).epsilon(1e-13));
  CHECK(!p.outside_verified_range);

  // rho through the exact rationals.
  const mpq_class sa = 1 + 16 * a;
  const mpq_class rho = b - 16 * gamma * (1 - 2 * b) / 81 -
                        16 * (1 + gamma) * (81 * b * b - 16 * (a - b) * (1 - 2 * b)) / (81 * sa);
  CHECK(p.rho == doctest::Approx(rho.get_d()).epsilon(1e-13));
}

TEST_CASE("first family limits and ranges") {
  for (int n : {9, 10, 11}) {
    const auto p = first_cone_params(n, 1e-9);
    CHECK(p.a / p.b == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(p.gamma < 1e-9);
    CHECK(p.rho < 1e-8);
    CHECK(p.rho > 0);
    CHECK(g_func(n, 1e-12) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(h_func(n, 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(first_cone_params(9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(first_cone_params(9, 0.06), std::invalid_argument);
  CHECK_THROWS_AS(g_func(9, -1.0), std::invalid_argument);
  CHECK(first_cone_params(12, 0.01).outside_verified_range);
}

TEST_CASE("parameter identity and rho on a grid") {
  for (int n : {9, 10, 11}) {
    const double bm = first_b_max(n);
    for (int i = 1; i <= 500; ++i) {
      const auto p = first_cone_params(n, bm * i / 500.0);
      CHECK(p.P_coef + n * p.Q_coef == doctest::Approx(2 + 4 * (n - 1) * p.a).epsilon(1e-12));
      const auto pq = scal_coefficients(n, p.a, p.b);
      CHECK(pq.P == p.P_coef);
      CHECK(p.rho > 0);
    }
  }
}

TEST_CASE("g and h increase") {
  for (int n : {9, 10, 11}) {
    const double bm = first_b_max(n);
    double g_prev = g_func(n, bm / 1000), h_prev = h_func(n, bm / 1000);
    for (int i = 2; i <= 1000; ++i) {
      const double g = g_func(n, bm * i / 1000), h = h_func(n, bm * i / 1000);
      CHECK(g > g_prev);
      CHECK(h > h_prev);
      g_prev = g;
      h_prev = h;
    }
  }
}

TEST_CASE("f quadratic") {
  for (int n : {9, 10, 11}) {
    for (double frac : {0.1, 0.5, 1.0}) {
      const auto p = first_cone_params(n, frac * first_b_max(n));
      CHECK(f_quadratic(0, 0, p) == doctest::Approx(8 * p.a).epsilon(1e-14));
      const double x0 = -2 * p.gamma - 2;
      for (double y : {-3.0, -1.0, 0.0, 0.7, 5.0}) {
        CHECK(std::abs(f_quadratic(x0, y, p) - p.b * p.b * y * y) < 1e-12);
      }
      double lo = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j)
          lo = std::min(lo, f_quadratic(x0 + 0.1 * i, x0 + 0.1 * j, p));
      CHECK(lo >= -1e-10);
    }
  }
}

TEST_CASE("certificate margins of the model operators") {
  const int n = 9;
  const auto p = first_cone_params(n, first_b_max(n));
  const auto zero = CurvatureTensor::zero(n, false);

  const auto round = check_first_cone_cert({round_tensor(n), zero}, p, small_budget());
  CHECK(round.margin[0] == doctest::Approx(0.0));
  CHECK(round.margin[1] == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(round.margin[2] > 0);
  CHECK(std::abs(round.margin[3]) < 1e-9);
  CHECK(round.holds(1e-9));

  const auto cyl = check_first_cone_cert({cylinder_tensor(n), zero}, p, small_budget());
  CHECK(cyl.margin[2] == doctest::Approx(7.0 + 2 * p.gamma / 9 * 56).epsilon(1e-12));
  // With T = 0 condition 4 fails as soon as Ricci is not a multiple of id.
  CHECK(cyl.margin[3] == doctest::Approx(-7.0).epsilon(1e-9));

  CHECK_THROWS_AS(check_first_cone_cert({-1.0 * round_tensor(n), zero}, p),
                  std::domain_error);
  CHECK_THROWS_AS(check_first_cone_cert({round_tensor(n), CurvatureTensor::zero(8, false)}, p),
                  std::invalid_argument);
}

TEST_CASE("certificate margins are homogeneous") {
  const int n = 9;
  const auto p = first_cone_params(n, 0.03);
  Rng rng(11);
  const CurvatureTensor s = random_nonnegative(n, rng) + 0.3 * round_tensor(n);
  const CurvatureTensor t = 0.2 * random_nonnegative(n, rng);
  const auto r1 = check_first_cone_cert({s, t}, p, small_budget());
  const auto r2 = check_first_cone_cert({3.0 * s, 3.0 * t}, p, small_budget());
  for (int k = 0; k < 3; ++k) {
    CHECK(r2.margin[k] == doctest::Approx(3.0 * r1.margin[k]).epsilon(1e-7));
  }
  CHECK((r1.margin[3] >= 0) == (r2.margin[3] >= 0));
  CHECK(r2.margin[3] == doctest::Approx(3.0 * r1.margin[3]).epsilon(1e-6));
}

TEST_CASE("condition 3 pair minimum is the sum of the two lowest Ricci eigenvalues") {
  Rng rng(12);
  for (int n : {5, 9}) {
    const SymmetricForm ric = ricci(random_bianchi(n, rng));
    const auto sp = ric.spectrum();
    const double exact = sp.values(0) + sp.values(1);
    double scan = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1000; ++k) {
      const Eigen::MatrixXd e = gaussian_matrix(n, 2, rng);
      Eigen::MatrixXd q = e;
      orthonormalize_columns(q);
      scan = std::min(scan, ric.quadratic(q.col(0)) + ric.quadratic(q.col(1)));
      CHECK(ric.quadratic(q.col(0)) + ric.quadratic(q.col(1)) >= exact - 1e-10);
    }
    CHECK(scan >= exact - 1e-10);
  }
}

TEST_CASE("condition 4 minimum is below every sampled pair") {
  Rng rng(13);
  const int n = 7;
  const auto p = first_cone_params(n, 0.02);
  for (int rep = 0; rep < 4; ++rep) {
    const CurvatureTensor s = random_nonnegative(n, rng) + 0.1 * round_tensor(n);
    const CurvatureTensor t = 0.05 * random_nonnegative(n, rng);
    const auto [m, pair] = cond4_min(s, t, p.omega);
    CHECK(cond4_margin_at(s, t, p.omega, pair) == doctest::Approx(m));
    CHECK((pair.transpose() * pair - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
    for (int k = 0; k < 2000; ++k) {
      Eigen::MatrixXd e = gaussian_matrix(n, 2, rng);
      orthonormalize_columns(e);
      CHECK(cond4_margin_at(s, t, p.omega, e) >= m - 1e-9);
    }
  }
}

TEST_CASE("transverse sum") {
  const int n = 9;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, 2);
  e(0, 0) = 1;
  e(1, 1) = 1;
  // id ^ id has T_1p1p = 2 for p != 1.
  CHECK(transverse_sum(round_tensor(n), e) == doctest::Approx(4.0 * (n - 2)));
  Rng rng(14);
  const CurvatureTensor t = random_pair_symmetric(n, rng);
  double direct = 0;
  for (int q = 2; q < n; ++q) direct += t(0, q, 0, q) + t(1, q, 1, q);
  CHECK(transverse_sum(t, e) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("second family functional") {
  const int n = 9;
  const auto p = second_cone_params(n, second_b_max(n));
  CHECK(p.a == doctest::Approx(1.0 / 45 + 3.5 / (45.0 * 45.0)).epsilon(1e-14));
  const auto f = second_cone_functional(round_tensor(n), p);
  const IsotropicProbe at1(FourFrame::coordinate(n, 0, 1, 2, 3), 1.0, 1.0);
  const IsotropicProbe at0(FourFrame::coordinate(n, 0, 1, 2, 3), 0.0, 1.0);
  CHECK(f.value(at1) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(f.value(at0) == doctest::Approx(4.0 + std::sqrt(2 * p.a) * 32).epsilon(1e-14));
  CHECK(second_cone_z_min(round_tensor(n), p, small_budget()).min_value > 0);
  CHECK(second_cone_z_min(CurvatureTensor::zero(n), p, small_budget()).min_value == 0.0);

  // Cylinder with e3 along the flat direction at lambda = 0.
  const auto cyl = second_cone_functional(cylinder_tensor(n), p);
  const IsotropicProbe flat(FourFrame::coordinate(n, 0, 1, 8, 2), 0.0, 1.0);
  CHECK(cyl.value(flat) == doctest::Approx(std::sqrt(2 * p.a) * 14).epsilon(1e-14));
  CHECK(second_cone_z_min(cylinder_tensor(n), p, small_budget()).min_value > 0);

  // Without the 2424 term the lambda = 1 value drops to the missing 2.
  const auto lit = second_cone_params(n, second_b_max(n), true, false);
  CHECK(second_cone_functional(round_tensor(n), lit).value(at1) == doctest::Approx(6.0));
}

TEST_CASE("zeta variants") {
  const double reference[3] = {0.824287, 0.822096, 0.820267};
  for (int n = 9; n <= 11; ++n) {
    const auto off = second_cone_params(n, second_b_max(n), false);
    const auto on = second_cone_params(n, second_b_max(n), true);
    CHECK(std::abs(zeta(off) - reference[n - 9]) < 1e-5);
    CHECK(zeta(on) == doctest::Approx(zeta(off) * (1 + on.gamma_max)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(second_cone_params(9, 0.03), std::invalid_argument);
}

TEST_CASE("glue family") {
  CHECK(glue_length(9) == doctest::Approx(13.0 / 180.0).epsilon(1e-15));
  const auto at = glue_family(9, 0.05);
  CHECK(at.family == Family::first);
  CHECK(at.local_b == 0.05);
  const auto past = glue_family(9, 0.05 + 1e-4);
  CHECK(past.family == Family::second);
  CHECK(past.local_b == doctest::Approx(1.0 / 45 - 1e-4).epsilon(1e-12));
  CHECK_THROWS_AS(glue_family(9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(glue_family(9, glue_length(9)), std::invalid_argument);
}

TEST_CASE("parameter report") {
  const std::string r = parameter_report(first_cone_params(9, 0.05));
  CHECK(r.find("a = 6.00271739") != std::string::npos);
  CHECK(r.find("omega = ") != std::string::npos);
  const std::string s = parameter_report(second_cone_params(9, 0.02, false));
  CHECK(s.find("gamma_factor = off") != std::string::npos);
}
