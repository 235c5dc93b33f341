#include "pinch/membership.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pinch/kernels.hpp"
#include "pinch/parallel.hpp"
#include "pinch/samples.hpp"

namespace pinch {

std::string_view to_string(SearchMethod m) {
  return m == SearchMethod::scan ? "scan" : "optimized";
}

namespace {

Eigen::VectorXd pair_times(const Eigen::MatrixXd& p, const Eigen::VectorXd& w) {
  const auto N = static_cast<std::size_t>(p.rows());
  Eigen::VectorXd out(p.rows());
  // p is symmetric, so its column-major buffer doubles as row-major.
  kernels::gemv({p.data(), N * N}, N, N, {w.data(), N}, {out.data(), N});
  return out;
}

double dotv(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return kernels::dot({a.data(), static_cast<std::size_t>(a.size())},
                      {b.data(), static_cast<std::size_t>(b.size())});
}

// Antisymmetric matrix with entries u at positions (i, j), i < j.
Eigen::MatrixXd antisym(const Eigen::VectorXd& u, int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0, a = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++a) {
      m(i, j) = u(a);
      m(j, i) = -u(a);
    }
  return m;
}

// The functional after folding the H term and the 2424 weight in:
//   F = k13 + l^2 k14 + m^2 c23 + l^2 m^2 k24 - 2 l m x
struct Folded {
  double k13, k14, c23, k24, x;
};

double folded_value(const Folded& f, double l, double m) {
  return f.k13 + l * l * f.k14 + m * m * f.c23 + l * l * m * m * f.k24 - 2 * l * m * f.x;
}

// Minimizer of q(t) = c0 + A t^2 - 2 B t over t in [0, 1].
double quad_argmin(double A, double B) {
  const double q0 = 0.0;
  const double q1 = A - 2 * B;
  double best_t = q0 <= q1 ? 0.0 : 1.0;
  double best = std::min(q0, q1);
  if (A > 0) {
    const double t = B / A;
    if (t > 0 && t < 1) {
      const double q = A * t * t - 2 * B * t;
      if (q < best) best_t = t;
    }
  }
  return best_t;
}

}  // namespace

IsotropicFunctional::IsotropicFunctional(const CurvatureTensor& r, ConeMode mode)
    : IsotropicFunctional(r, mode, SymmetricForm::zero(r.dim()), 0.0, true) {}

IsotropicFunctional::IsotropicFunctional(const CurvatureTensor& r, ConeMode mode,
                                         const SymmetricForm& h, double h_weight,
                                         bool include_2424)
    : n_(Dimension(r.dim()).value()),
      mode_(mode),
      pair_(r.pair_matrix()),
      h_(h.matrix()),
      h_weight_(h_weight),
      w2424_(include_2424 ? 1.0 : 0.0) {
  require_same_dimension(r.dim(), h.dim(), "IsotropicFunctional");
  ricci_vectors_ = ricci(r).spectrum().vectors;
}

FrameComponents IsotropicFunctional::components(const Eigen::MatrixXd& e) const {
  const Eigen::VectorXd w13 = wedge(e.col(0), e.col(2));
  const Eigen::VectorXd w14 = wedge(e.col(0), e.col(3));
  const Eigen::VectorXd w23 = wedge(e.col(1), e.col(2));
  const Eigen::VectorXd w24 = wedge(e.col(1), e.col(3));
  const Eigen::VectorXd p23 = pair_times(pair_, w23);
  const Eigen::VectorXd p24 = pair_times(pair_, w24);
  FrameComponents c;
  c.c13 = dotv(w13, pair_times(pair_, w13));
  c.c14 = dotv(w14, pair_times(pair_, w14));
  c.c23 = dotv(w23, p23);
  c.c24 = dotv(w24, p24);
  c.x = dotv(w13, p24) - dotv(w14, p23);
  if (h_weight_ != 0.0) {
    c.h12 = e.col(0).dot(h_ * e.col(0)) + e.col(1).dot(h_ * e.col(1));
  }
  return c;
}

double IsotropicFunctional::value(const FrameComponents& c, double lambda, double mu) const {
  if (mode_ == ConeMode::PIC) lambda = mu = 1.0;
  if (mode_ == ConeMode::PIC1) mu = 1.0;
  return c.c13 + lambda * lambda * c.c14 + mu * mu * c.c23 +
         w2424_ * lambda * lambda * mu * mu * c.c24 - 2 * lambda * mu * c.x +
         h_weight_ * (1 - lambda * lambda) * c.h12;
}

double IsotropicFunctional::value(const IsotropicProbe& probe) const {
  require_same_dimension(n_, probe.frame.dim(), "IsotropicFunctional::value");
  return value(components(probe.frame.matrix()), probe.lambda, probe.mu);
}

IsotropicFunctional::Inner IsotropicFunctional::minimize_inner(const FrameComponents& c) const {
  const Folded f{c.c13 + h_weight_ * c.h12, c.c14 - h_weight_ * c.h12, c.c23, w2424_ * c.c24,
                 c.x};
  if (mode_ == ConeMode::PIC) return {value(c, 1, 1), 1.0, 1.0};
  if (mode_ == ConeMode::PIC1) {
    const double l = quad_argmin(f.k14 + f.k24, f.x);
    return {value(c, l, 1.0), l, 1.0};
  }
  // PIC2: every edge of the unit square is a one-variable quadratic, and an
  // interior critical point must satisfy l^2 k14 = m^2 c23.
  std::array<std::pair<double, double>, 8> cand{};
  int count = 0;
  cand[count++] = {0.0, 0.0};
  cand[count++] = {0.0, 1.0};
  cand[count++] = {1.0, 0.0};
  cand[count++] = {1.0, quad_argmin(f.c23 + f.k24, f.x)};
  cand[count++] = {quad_argmin(f.k14 + f.k24, f.x), 1.0};
  if (f.k14 * f.c23 > 0 && f.k24 != 0) {
    const double k = std::sqrt(f.c23 / f.k14);
    const double m2 = (f.x - k * f.k14) / (k * f.k24);
    if (m2 > 0 && m2 <= 1) {
      const double m = std::sqrt(m2);
      const double l = k * m;
      if (l > 0 && l <= 1) cand[count++] = {l, m};
    }
  }
  Inner best{std::numeric_limits<double>::infinity(), 0, 0};
  for (int i = 0; i < count; ++i) {
    const double v = folded_value(f, cand[i].first, cand[i].second);
    if (v < best.value) best = {v, cand[i].first, cand[i].second};
  }
  // Report the value through the unfolded formula so it matches value() exactly.
  best.value = value(c, best.lambda, best.mu);
  return best;
}

Eigen::MatrixXd IsotropicFunctional::frame_gradient(const Eigen::MatrixXd& e, double lambda,
                                                    double mu) const {
  if (mode_ == ConeMode::PIC) lambda = mu = 1.0;
  if (mode_ == ConeMode::PIC1) mu = 1.0;
  const Eigen::VectorXd e1 = e.col(0), e2 = e.col(1), e3 = e.col(2), e4 = e.col(3);
  const Eigen::VectorXd re = wedge(e1, e3) - lambda * mu * wedge(e2, e4);
  const Eigen::VectorXd im = lambda * wedge(e1, e4) + mu * wedge(e2, e3);
  const Eigen::MatrixXd U = antisym(pair_times(pair_, re), n_);
  const Eigen::MatrixXd V = antisym(pair_times(pair_, im), n_);
  Eigen::MatrixXd g(n_, 4);
  g.col(0) = 2 * (U * e3 + lambda * (V * e4));
  g.col(1) = 2 * (-lambda * mu * (U * e4) + mu * (V * e3));
  g.col(2) = 2 * (-(U * e1) - mu * (V * e2));
  g.col(3) = 2 * (lambda * mu * (U * e2) - lambda * (V * e1));
  const double drop = (1.0 - w2424_) * lambda * lambda * mu * mu;
  if (drop != 0.0) {
    const Eigen::MatrixXd W = antisym(pair_times(pair_, wedge(e2, e4)), n_);
    g.col(1) -= drop * 2 * (W * e4);
    g.col(3) += drop * 2 * (W * e2);
  }
  if (h_weight_ != 0.0) {
    const double s = 2 * h_weight_ * (1 - lambda * lambda);
    g.col(0) += s * (h_ * e1);
    g.col(1) += s * (h_ * e2);
  }
  return g;
}

std::vector<Eigen::MatrixXd> IsotropicFunctional::structured_starts() const {
  const Eigen::MatrixXd& v = ricci_vectors_;
  std::vector<Eigen::MatrixXd> out;
  // The three ways of splitting four eigenvectors into the planes (e1,e2) and
  // (e3,e4), each with both orientations of e4.
  const int low[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  const int hi0 = n_ - 4;
  for (const auto& perm : low) {
    for (double sign : {1.0, -1.0}) {
      Eigen::MatrixXd m(n_, 4);
      for (int k = 0; k < 4; ++k) m.col(k) = v.col(perm[k]);
      m.col(3) *= sign;
      out.push_back(m);
    }
  }
  // Lowest pair against highest pair.
  Eigen::MatrixXd m(n_, 4);
  m.col(0) = v.col(0);
  m.col(1) = v.col(1);
  m.col(2) = v.col(n_ - 1);
  m.col(3) = v.col(n_ - 2);
  out.push_back(m);
  if (hi0 > 3) {
    for (int k = 0; k < 4; ++k) m.col(k) = v.col(hi0 + k);
    out.push_back(m);
  }
  return out;
}

MembershipReport descend_from(const IsotropicFunctional& f, const Eigen::MatrixXd& frame,
                              int iterations) {
  Eigen::MatrixXd e = frame;
  if (!orthonormalize_columns(e)) throw std::invalid_argument("descend_from: degenerate frame");
  const double scale = std::max(f.pair_matrix().cwiseAbs().maxCoeff(), 1e-300);
  int evals = 0;

  auto eval = [&](const Eigen::MatrixXd& x) {
    ++evals;
    return f.minimize_inner(f.components(x));
  };
  auto riemannian_grad = [&](const Eigen::MatrixXd& x, const IsotropicFunctional::Inner& in) {
    const Eigen::MatrixXd g = f.frame_gradient(x, in.lambda, in.mu);
    const Eigen::MatrixXd xtg = x.transpose() * g;
    return Eigen::MatrixXd(g - x * (0.5 * (xtg + xtg.transpose())));
  };

  IsotropicFunctional::Inner cur = eval(e);
  Eigen::MatrixXd xi = riemannian_grad(e, cur);
  double step = 0.2 / std::max(xi.norm(), 1e-300);
  for (int it = 0; it < iterations; ++it) {
    const double gn2 = xi.squaredNorm();
    if (gn2 <= 1e-26 * scale * scale) break;
    bool accepted = false;
    Eigen::MatrixXd e_new;
    IsotropicFunctional::Inner trial{};
    for (int halving = 0; halving < 40; ++halving) {
      e_new = e - step * xi;
      if (orthonormalize_columns(e_new)) {
        trial = eval(e_new);
        if (trial.value <= cur.value - 1e-4 * step * gn2) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::MatrixXd xi_new = riemannian_grad(e_new, trial);
    const Eigen::MatrixXd s = e_new - e;
    const Eigen::MatrixXd y = xi_new - xi;
    const double sy = (s.array() * y.array()).sum();
    // Barzilai-Borwein step, kept within a sane window.
    step = sy > 0 ? s.squaredNorm() / sy : 2 * step;
    step = std::min(step, 1.0 / std::max(xi_new.norm(), 1e-300));
    e = e_new;
    cur = trial;
    xi = xi_new;
  }
  MembershipReport rep;
  rep.mode = f.mode();
  rep.min_value = cur.value;
  rep.argmin_probe = IsotropicProbe(FourFrame(e), cur.lambda, cur.mu);
  rep.min_value = f.value(rep.argmin_probe);
  rep.method = SearchMethod::optimized;
  rep.samples_used = evals;
  return rep;
}

MembershipReport minimize_functional(const IsotropicFunctional& f, const OptimizerBudget& budget,
                                     const std::vector<Eigen::MatrixXd>& extra_starts) {
  if (budget.starts <= 0) throw std::invalid_argument("optimizer budget has zero starts");
  if (budget.iterations < 0) throw std::invalid_argument("negative iteration budget");
  const auto total = static_cast<std::size_t>(budget.starts);
  std::vector<Eigen::MatrixXd> starts;
  starts.reserve(total);
  for (const auto& s : extra_starts) {
    if (starts.size() < total) starts.push_back(s);
  }
  for (const auto& s : f.structured_starts()) {
    if (starts.size() < total) starts.push_back(s);
  }
  Rng rng(budget.seed);
  while (starts.size() < total) starts.push_back(gaussian_matrix(f.dim(), 4, rng));

  const auto reports = parallel_map<MembershipReport>(
      starts.size(), budget.workers,
      [&](std::size_t i) { return descend_from(f, starts[i], budget.iterations); });
  MembershipReport best = reports.front();
  int samples = 0;
  for (const auto& r : reports) {
    samples += r.samples_used;
    if (r.min_value < best.min_value) best = r;
  }
  best.samples_used = samples;
  best.seed = budget.seed;
  best.tol = budget.tol;
  return best;
}

MembershipReport min_isotropic(const CurvatureTensor& r, ConeMode mode,
                               const OptimizerBudget& budget) {
  return minimize_functional(IsotropicFunctional(r, mode), budget);
}

namespace {

double radical_inverse(std::uint64_t k, int base) {
  double inv = 1.0 / base, f = inv, out = 0.0;
  while (k > 0) {
    out += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return out;
}

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                           41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

}  // namespace

MembershipReport brute_force_frame_scan(const CurvatureTensor& r, ConeMode mode, int resolution) {
  return brute_force_frame_scan(IsotropicFunctional(r, mode), resolution);
}

MembershipReport brute_force_frame_scan(const IsotropicFunctional& f, int resolution) {
  if (resolution <= 0) throw std::invalid_argument("scan resolution must be positive");
  const int n = f.dim();
  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_frame;
  IsotropicFunctional::Inner best_inner{};
  int samples = 0;
  auto consider = [&](const Eigen::MatrixXd& e) {
    const auto in = f.minimize_inner(f.components(e));
    ++samples;
    if (in.value < best) {
      best = in.value;
      best_frame = e;
      best_inner = in;
    }
  };
  // Flipping e1, e2 or e3 changes the functional the same way as flipping e4,
  // so two orientations cover all sign patterns.
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
          for (double s : {1.0, -1.0}) {
            e.setZero();
            e(a, 0) = 1;
            e(b, 1) = 1;
            e(c, 2) = 1;
            e(d, 3) = s;
            consider(e);
          }
        }
  if (n <= 6) {
    const int dims = 4 * n;
    for (int k = 1; k <= resolution; ++k) {
      Eigen::MatrixXd g(n, 4);
      for (int j = 0; j < dims; j += 2) {
        const double u1 = radical_inverse(k, kPrimes[j]);
        const double u2 = radical_inverse(k, kPrimes[j + 1]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        g(j / 4, j % 4) = rad * std::cos(2 * std::numbers::pi * u2);
        g((j + 1) / 4, (j + 1) % 4) = rad * std::sin(2 * std::numbers::pi * u2);
      }
      if (orthonormalize_columns(g)) consider(g);
    }
  }
  MembershipReport rep;
  rep.mode = f.mode();
  rep.argmin_probe = IsotropicProbe(FourFrame(best_frame), best_inner.lambda, best_inner.mu);
  rep.min_value = f.value(rep.argmin_probe);
  rep.method = SearchMethod::scan;
  rep.samples_used = samples;
  return rep;
}

MembershipReport shifted_membership(const CurvatureTensor& r, ConeMode mode, double theta,
                                    double shift_n, const OptimizerBudget& budget) {
  if (!std::isfinite(theta) || !std::isfinite(shift_n)) {
    throw std::invalid_argument("shifted_membership: theta and N must be finite");
  }
  const double c = shift_n - theta * scalar(r);
  const CurvatureTensor shifted = r + c * round_tensor(r.dim());
  return min_isotropic(shifted.with_bianchi_expected(r.bianchi_expected()), mode, budget);
}

ShiftResult boundary_shift(const std::function<IsotropicFunctional(double)>& family,
                           const std::function<double(const IsotropicProbe&)>& slope, double c0,
                           const OptimizerBudget& budget, double abs_tol, int max_iter) {
  ShiftResult out;
  double c = c0;
  std::vector<Eigen::MatrixXd> warm;
  for (int it = 0; it < max_iter; ++it) {
    out.shift = c;
    out.report = minimize_functional(family(c), budget, warm);
    out.iterations = it + 1;
    const double v = out.report.min_value;
    if (std::abs(v) <= abs_tol) {
      out.converged = true;
      return out;
    }
    const double g = slope(out.report.argmin_probe);
    if (!(g > 0) || !std::isfinite(g)) return out;
    c -= v / g;
    warm.assign(1, out.report.argmin_probe.frame.matrix());
  }
  return out;
}

}  // namespace pinch
