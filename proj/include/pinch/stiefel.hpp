#pragma once
// Armijo / Barzilai-Borwein descent on orthonormal k-frames (columns of an
// n x k matrix) with a Gram-Schmidt retraction. The four-frame optimizer in
// membership.cpp has its own copy because its objective carries the inner
// (lambda, mu) minimizer along; this one is for plain smooth objectives.

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

#include "pinch/curvature.hpp"

namespace pinch {

struct StiefelResult {
  Eigen::MatrixXd frame;
  double value = 0.0;
  int evaluations = 0;
};

// f(x, grad) returns the objective at x and writes the Euclidean gradient.
// Stops early once the Riemannian gradient norm drops to grad_tol.
template <class F>
StiefelResult stiefel_descent(F&& f, Eigen::MatrixXd x, int iterations, double grad_tol = 0.0) {
  if (!orthonormalize_columns(x)) throw std::invalid_argument("stiefel_descent: degenerate frame");
  StiefelResult out;
  Eigen::MatrixXd g(x.rows(), x.cols());
  auto project = [](const Eigen::MatrixXd& at, const Eigen::MatrixXd& grad) {
    const Eigen::MatrixXd xtg = at.transpose() * grad;
    return Eigen::MatrixXd(grad - at * (0.5 * (xtg + xtg.transpose())));
  };
  double cur = f(x, g);
  ++out.evaluations;
  Eigen::MatrixXd xi = project(x, g);
  double step = 0.2 / std::max(xi.norm(), 1e-300);
  for (int it = 0; it < iterations; ++it) {
    const double gn2 = xi.squaredNorm();
    if (gn2 <= 1e-28 * std::max(1.0, cur * cur) || gn2 <= grad_tol * grad_tol) break;
    bool accepted = false;
    Eigen::MatrixXd x_new;
    double trial = cur;
    Eigen::MatrixXd g_new(x.rows(), x.cols());
    for (int halving = 0; halving < 40; ++halving) {
      x_new = x - step * xi;
      if (orthonormalize_columns(x_new)) {
        trial = f(x_new, g_new);
        ++out.evaluations;
        if (trial <= cur - 1e-4 * step * gn2) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::MatrixXd xi_new = project(x_new, g_new);
    const Eigen::MatrixXd s = x_new - x;
    const Eigen::MatrixXd y = xi_new - xi;
    const double sy = (s.array() * y.array()).sum();
    step = sy > 0 ? s.squaredNorm() / sy : 2 * step;
    step = std::min(step, 1.0 / std::max(xi_new.norm(), 1e-300));
    x = x_new;
    cur = trial;
    xi = xi_new;
  }
  out.frame = x;
  out.value = cur;
  return out;
}

}  // namespace pinch
