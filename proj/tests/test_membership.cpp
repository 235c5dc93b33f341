#include "doctest.h"

#include <cmath>

#include "pinch/membership.hpp"
#include "pinch/samples.hpp"

using namespace pinch;

namespace {

OptimizerBudget small_budget(std::uint64_t seed = 1) {
  OptimizerBudget b;
  b.starts = 16;
  b.iterations = 150;
  b.seed = seed;
  return b;
}

}  // namespace

TEST_CASE("model tensors") {
  const int n = 9;
  CHECK(min_isotropic(round_tensor(n), ConeMode::PIC, small_budget()).min_value ==
        doctest::Approx(8.0).epsilon(1e-12));
  const CurvatureTensor cyl = cylinder_tensor(n);
  CHECK(std::abs(min_isotropic(cyl, ConeMode::PIC).min_value - 2.0) < 1e-6);
  CHECK(std::abs(min_isotropic(cyl, ConeMode::PIC2).min_value) < 1e-6);
  const CurvatureTensor zero = round_tensor(n) - round_tensor(n);
  for (ConeMode m : {ConeMode::PIC, ConeMode::PIC1, ConeMode::PIC2}) {
    CHECK(min_isotropic(zero, m, small_budget()).min_value == 0.0);
  }
}

TEST_CASE("zero starts is an error") {
  OptimizerBudget b;
  b.starts = 0;
  CHECK_THROWS_AS(min_isotropic(round_tensor(5), ConeMode::PIC, b), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_frame_scan(round_tensor(5), ConeMode::PIC, 0),
                  std::invalid_argument);
}

TEST_CASE("report value matches the probe") {
  Rng rng(2);
  for (ConeMode m : {ConeMode::PIC, ConeMode::PIC1, ConeMode::PIC2}) {
    const CurvatureTensor r = random_bianchi(7, rng);
    const auto rep = min_isotropic(r, m, small_budget());
    CHECK(std::abs(rep.min_value - isotropic_value(r, rep.argmin_probe, m)) < 1e-10);
    CHECK(rep.seed == 1);
    CHECK(rep.samples_used > 0);
  }
}

TEST_CASE("inner minimization is exact against a dense grid") {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const CurvatureTensor r = rep % 2 ? random_bianchi(6, rng) : random_pair_symmetric(6, rng);
    const SymmetricForm h = random_symmetric(6, rng);
    const double w = rep % 3 == 0 ? 0.0 : 0.4;
    for (ConeMode m : {ConeMode::PIC1, ConeMode::PIC2}) {
      const IsotropicFunctional f(r, m, h, w, rep % 4 != 1);
      const FrameComponents c = f.components(random_frame(6, rng).matrix());
      const auto inner = f.minimize_inner(c);
      double grid = inner.value;
      const int steps = 200;
      for (int i = 0; i <= steps; ++i) {
        for (int j = 0; j <= (m == ConeMode::PIC2 ? steps : 0); ++j) {
          grid = std::min(grid, f.value(c, double(i) / steps, double(j) / steps));
        }
      }
      // The grid can only approach the exact minimum from above.
      CHECK(inner.value <= grid + 1e-12);
      CHECK(inner.value == doctest::Approx(f.value(c, inner.lambda, inner.mu)));
    }
  }
}

TEST_CASE("frame gradient matches finite differences") {
  Rng rng(4);
  for (ConeMode m : {ConeMode::PIC, ConeMode::PIC1, ConeMode::PIC2}) {
    for (bool full : {true, false}) {
      const CurvatureTensor r = random_pair_symmetric(6, rng);
      const IsotropicFunctional f(r, m, random_symmetric(6, rng), 0.3, full);
      const Eigen::MatrixXd e = gaussian_matrix(6, 4, rng);
      const double l = 0.35, mu = 0.6;
      const Eigen::MatrixXd g = f.frame_gradient(e, l, mu);
      const double h = 1e-6;
      for (int i = 0; i < 6; ++i) {
        for (int k = 0; k < 4; ++k) {
          Eigen::MatrixXd ep = e, em = e;
          ep(i, k) += h;
          em(i, k) -= h;
          const double fd =
              (f.value(f.components(ep), l, mu) - f.value(f.components(em), l, mu)) / (2 * h);
          CHECK(g(i, k) == doctest::Approx(fd).epsilon(1e-6));
        }
      }
    }
  }
}

TEST_CASE("optimizer is never worse than the brute-force scan, n = 4") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const CurvatureTensor r = rep % 2 ? random_nonnegative(4, rng) - 0.1 * round_tensor(4)
                                      : random_bianchi(4, rng);
    for (ConeMode m : {ConeMode::PIC, ConeMode::PIC1, ConeMode::PIC2}) {
      const double opt = min_isotropic(r, m, small_budget(rep)).min_value;
      const double scan = brute_force_frame_scan(r, m, 2000).min_value;
      CHECK(opt <= scan + 1e-8);
    }
  }
}

TEST_CASE("scan recovers the cylinder value from coordinate frames") {
  const auto rep = brute_force_frame_scan(cylinder_tensor(9), ConeMode::PIC, 1);
  CHECK(rep.min_value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rep.method == SearchMethod::scan);
  const auto round = brute_force_frame_scan(round_tensor(5), ConeMode::PIC, 50);
  CHECK(round.min_value == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("rotation invariance") {
  Rng rng(6);
  for (int rep = 0; rep < 4; ++rep) {
    const CurvatureTensor r = random_nonnegative(7, rng) - 0.2 * round_tensor(7) +
                              0.05 * random_bianchi(7, rng);
    const Eigen::MatrixXd g = random_orthogonal(7, rng);
    for (ConeMode m : {ConeMode::PIC, ConeMode::PIC2}) {
      const double a = min_isotropic(r, m).min_value;
      const double b = min_isotropic(rotate(r, g), m).min_value;
      CHECK(std::abs(a - b) < 1e-7);
    }
  }
}

TEST_CASE("cone nesting") {
  Rng rng(7);
  int members = 0;
  for (int rep = 0; rep < 12; ++rep) {
    const CurvatureTensor r = random_nonnegative(6, rng) + 0.02 * random_bianchi(6, rng);
    const double pic2 = min_isotropic(r, ConeMode::PIC2, small_budget()).min_value;
    if (pic2 >= 0) {
      ++members;
      CHECK(min_isotropic(r, ConeMode::PIC1, small_budget()).min_value >= -1e-9);
      CHECK(min_isotropic(r, ConeMode::PIC, small_budget()).min_value >= -1e-9);
    }
  }
  CHECK(members > 0);
}

TEST_CASE("shifted membership") {
  const CurvatureTensor cyl = cylinder_tensor(9);
  const auto plain = min_isotropic(cyl, ConeMode::PIC, small_budget());
  const auto same = shifted_membership(cyl, ConeMode::PIC, 0.0, 0.0, small_budget());
  CHECK(same.min_value == doctest::Approx(plain.min_value).epsilon(1e-14));
  const auto shifted = shifted_membership(cyl, ConeMode::PIC, 1.0 / 56.0, 0.0, small_budget());
  CHECK(shifted.min_value == doctest::Approx(-6.0).epsilon(1e-9));
  CHECK(!shifted.member());

  Rng rng(8);
  const CurvatureTensor r = random_bianchi(6, rng);
  const double big = r.norm() * 36;
  CHECK(shifted_membership(r, ConeMode::PIC2, 0.0, big, small_budget()).min_value > 0);
}
