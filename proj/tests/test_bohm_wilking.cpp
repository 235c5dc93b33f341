#include "doctest.h"

#include <cmath>

#include "pinch/bohm_wilking.hpp"
#include "pinch/samples.hpp"

using namespace pinch;

namespace {

double rel_diff(const CurvatureTensor& a, const CurvatureTensor& b, double scale) {
  return (a.pair_matrix() - b.pair_matrix()).cwiseAbs().maxCoeff() / std::max(scale, 1e-300);
}

double max_entry(const CurvatureTensor& r) { return r.pair_matrix().cwiseAbs().maxCoeff(); }

// a from the first-family data block; kept local so this test does not depend
// on the pinching module.
double first_family_a(int n, double b) {
  return (2 + (n - 2) * b) * (2 + (n - 2) * b) * b / (2 * (2 + (n - 3) * b));
}

}  // namespace

TEST_CASE("LabParams rejects singular maps") {
  CHECK_THROWS_AS(LabParams(9, -1.0 / 16.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(LabParams(9, 0.0, -1.0 / 7.0), std::invalid_argument);
  CHECK_THROWS_AS(LabParams(3, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("l_ab basics") {
  Rng rng(1);
  const CurvatureTensor r = random_bianchi(9, rng);
  CHECK(rel_diff(l_ab(r, LabParams(9, 0, 0)), r, max_entry(r)) == 0.0);
  const LabParams p(9, 0.06, 0.05);
  CHECK(scalar(l_ab(round_tensor(9), p)) / scalar(round_tensor(9)) ==
        doctest::Approx(1.96).epsilon(1e-14));
  CHECK(scalar(l_ab_inverse(round_tensor(9), p)) / scalar(round_tensor(9)) ==
        doctest::Approx(1.0 / 1.96).epsilon(1e-14));
  // Ric_0 scales by 1 + (n-2)b.
  const SymmetricForm r0 = ricci_tracefree(r);
  const SymmetricForm l0 = ricci_tracefree(l_ab(r, p));
  CHECK((l0.matrix() - (1 + 7 * 0.05) * r0.matrix()).cwiseAbs().maxCoeff() <
        1e-12 * r0.matrix().cwiseAbs().maxCoeff());
}

TEST_CASE("l_ab scal factor and linearity on random tensors") {
  Rng rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 9 + rep % 3;
    const LabParams p(n, 0.01 + 0.001 * rep, 0.02);
    const CurvatureTensor r = random_bianchi(n, rng);
    const double s = scalar(r);
    CHECK(scalar(l_ab(r, p)) / s == doctest::Approx(p.scal_factor()).epsilon(1e-12));
    const CurvatureTensor r2 = random_bianchi(n, rng);
    const CurvatureTensor lhs = l_ab(1.5 * r - 0.25 * r2, p);
    const CurvatureTensor rhs = 1.5 * l_ab(r, p) - 0.25 * l_ab(r2, p);
    CHECK(rel_diff(lhs, rhs, max_entry(rhs)) < 1e-13);
  }
}

TEST_CASE("l_ab inverse round trip") {
  Rng rng(3);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 9 + rep % 3;
    const double b = 0.002 * (rep + 1) / 4.0;
    const LabParams p(n, first_family_a(n, b), b);
    const CurvatureTensor r = rep % 2 ? random_bianchi(n, rng) : random_pair_symmetric(n, rng);
    worst = std::max(worst, rel_diff(l_ab(l_ab_inverse(r, p), p), r, max_entry(r)));
    worst = std::max(worst, rel_diff(l_ab_inverse(l_ab(r, p), p), r, max_entry(r)));
  }
  CHECK(worst < 1e-11);
  const CurvatureTensor z = random_bianchi(9, rng);
  CHECK(rel_diff(l_ab_inverse(z, LabParams(9, 0, 0)), z, 1.0) == 0.0);
}

TEST_CASE("D_ab closed form matches the conjugation definition") {
  Rng rng(4);
  CHECK(d_ab_closed_form(CurvatureTensor::zero(9), LabParams(9, 0.06, 0.05)).norm() == 0.0);
  CHECK(d_ab_conjugation_oracle(CurvatureTensor::zero(9), LabParams(9, 0.06, 0.05)).norm() == 0.0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 9 + rep % 3;
    const double bmax = 1.0 / (2 * n + 2);
    const double b = bmax * (rep + 1) / 100.0;
    const LabParams p(n, first_family_a(n, b), b);
    const CurvatureTensor s = random_bianchi(n, rng);
    const double scale = s.norm() * s.norm();
    worst = std::max(worst,
                     rel_diff(d_ab_closed_form(s, p), d_ab_conjugation_oracle(s, p), scale));
    // a = b = 0 conjugates by the identity.
    CHECK(d_ab_conjugation_oracle(s, LabParams(n, 0, 0)).norm() < 1e-12 * scale);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("D_ab for an Einstein tensor with a = b") {
  const int n = 9;
  const LabParams p(n, 0.04, 0.04);
  const CurvatureTensor r = round_tensor(n);
  const SymmetricForm ric = ricci(r);
  const CurvatureTensor expected = 0.08 * kulkarni_nomizu(ric, ric);
  CHECK(rel_diff(d_ab_closed_form(r, p), expected, max_entry(expected)) < 1e-14);
}

TEST_CASE("Ricci and scal of D_ab agree with traces of the closed form") {
  Rng rng(5);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 9 + rep % 3;
    const double b = 0.001 * (rep + 1) / 2.0;
    const LabParams p(n, rep % 4 == 0 ? b : first_family_a(n, b), b);
    const CurvatureTensor s = random_bianchi(n, rng);
    const double scale = s.norm() * s.norm();
    const SymmetricForm traced = ricci(d_ab_closed_form(s, p));
    const SymmetricForm direct = ricci_of_dab(s, p);
    CHECK((traced.matrix() - direct.matrix()).cwiseAbs().maxCoeff() < 1e-10 * scale);
    CHECK(std::abs(scal_of_dab(s, p) - direct.trace()) < 1e-10 * scale);
    CHECK(std::abs(scal_of_dab(s, p) - scalar(d_ab_closed_form(s, p))) < 1e-10 * scale);
  }
  CHECK(scal_of_dab(CurvatureTensor::zero(9), LabParams(9, 0.06, 0.05)) == 0.0);
}

TEST_CASE("scal evolution coefficients") {
  const auto c0 = scal_coefficients(9, 0.0, 0.0);
  CHECK(c0.P == 2.0);
  CHECK(c0.Q == 0.0);
  for (int n : {9, 10, 11}) {
    for (int k = 1; k <= 50; ++k) {
      const double b = k / 50.0 / (2 * n + 2);
      const double a = first_family_a(n, b);
      const auto c = scal_coefficients(n, a, b);
      CHECK(c.P + n * c.Q == doctest::Approx(2 + 4 * (n - 1) * a).epsilon(1e-12));
    }
  }
}

TEST_CASE("scal evolution check on random tensors") {
  Rng rng(6);
  const auto zero = scal_evolution_check(CurvatureTensor::zero(9), LabParams(9, 0.06, 0.05));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 9;
    const LabParams p(n, first_family_a(n, 0.05), 0.05);
    const CurvatureTensor s = random_bianchi(n, rng);
    const auto chk = scal_evolution_check(s, p);
    CHECK(std::abs(chk.lhs - chk.rhs) < 1e-9 * s.norm() * s.norm());
  }
}

TEST_CASE("quadratic homogeneity") {
  Rng rng(7);
  const LabParams p(10, 0.03, 0.02);
  const CurvatureTensor s = random_bianchi(10, rng);
  for (double c : {-2.0, 0.5, 3.0}) {
    const CurvatureTensor d1 = d_ab_closed_form(c * s, p);
    const CurvatureTensor d2 = (c * c) * d_ab_closed_form(s, p);
    CHECK(rel_diff(d1, d2, max_entry(d2)) < 1e-13);
    const CurvatureTensor q1 = q_quadratic(c * s);
    const CurvatureTensor q2 = (c * c) * q_quadratic(s);
    CHECK(rel_diff(q1, q2, max_entry(q2)) < 1e-13);
  }
}
