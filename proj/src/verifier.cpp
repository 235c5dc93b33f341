#include "pinch/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pinch/samples.hpp"

namespace pinch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string uniform(int size) { return "uniform:" + std::to_string(size); }

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void require_grid(int grid_size, int minimum = 2) {
  if (grid_size < minimum) throw std::invalid_argument("grid size too small");
}

void require_glue_dimension(int n) {
  if (n < 9 || n > 11) throw std::invalid_argument("gluing inequalities are stated for n in 9..11");
}

// Right-hand side shared by the two omega/4 bounds after clearing denominators.
double omega_rhs(const FirstConeParams& p) {
  const double n = p.n, b = p.b;
  return 0.5 * std::sqrt(27.0 * b * (2 + (n - 2) * b) / (8 * n * n * p.rho * p.rho * p.rho));
}

struct KBounds {
  double margin[3];
  double lhs[3];
  double rhs[3];
};

KBounds k_bounds(int n, double b) {
  const auto p = first_cone_params(n, b);
  const double k = 1 + 0.5 * p.A_coef * std::sqrt(double(n) * (n - 2));
  const double s = 1 + b * std::sqrt(double(n - 2));
  KBounds r;
  r.lhs[0] = s * s;
  r.rhs[0] = k;
  r.lhs[1] = k * k / (p.P_coef + n * p.Q_coef);
  r.rhs[1] = p.omega / 4;
  r.lhs[2] = k / p.P_coef;
  r.rhs[2] = p.omega / 4;
  for (int i = 0; i < 3; ++i) r.margin[i] = r.rhs[i] - r.lhs[i];
  return r;
}

}  // namespace

std::array<double, 3> first_family_gaps(int n, double b) {
  const KBounds kb = k_bounds(n, b);
  return {kb.margin[0], kb.margin[1], kb.margin[2]};
}

std::vector<CheckRecord> verify_monotonicity(int n, int grid_size) {
  require_grid(grid_size);
  const double bm = first_b_max(n);
  double dg = kInf, dh = kInf, at_g = 0, at_h = 0;
  double g_prev = g_func(n, bm / grid_size), h_prev = h_func(n, bm / grid_size);
  for (int i = 2; i <= grid_size; ++i) {
    const double b = bm * i / grid_size;
    const double g = g_func(n, b), h = h_func(n, b);
    if (g - g_prev < dg) dg = g - g_prev, at_g = b;
    if (h - h_prev < dh) dh = h - h_prev, at_h = b;
    g_prev = g;
    h_prev = h;
  }
  return {make_record("g_increasing", n, uniform(grid_size), 0.0, dg, dg, 0.0,
                      "min_forward_difference_at_b=" + fmt("%.6e", at_g)),
          make_record("h_increasing", n, uniform(grid_size), 0.0, dh, dh, 0.0,
                      "min_forward_difference_at_b=" + fmt("%.6e", at_h))};
}

CheckRecord verify_rho_slope(int n, int grid_size, double threshold) {
  require_grid(grid_size);
  const double bm = first_b_max(n);
  auto rho = [n](double b) { return first_cone_params(n, b).rho; };
  double min_slope = kInf, min_rho = kInf, worst_fd = 0, at = 0;
  int used = 0;
  for (int i = 1; i < grid_size; ++i) {
    const double b = bm * i / grid_size;
    if (b - 1e-6 <= 0 || b + 1e-6 > bm) continue;
    const double s7 = (rho(b + 1e-7) - rho(b - 1e-7)) / 2e-7;
    const double s6 = (rho(b + 1e-6) - rho(b - 1e-6)) / 2e-6;
    worst_fd = std::max(worst_fd, std::abs(s7 - s6));
    if (s7 < min_slope) min_slope = s7, at = b;
    min_rho = std::min(min_rho, rho(b));
    ++used;
  }
  min_rho = std::min(min_rho, rho(bm));
  if (used == 0) return skipped_record("rho_slope", n, uniform(grid_size), "no_interior_points");
  double margin = min_slope - threshold;
  std::string prov = "h=1e-7_check_h=1e-6_max_fd_gap=" + fmt("%.3e", worst_fd) +
                     "_min_at_b=" + fmt("%.6e", at) + "_min_rho=" + fmt("%.6e", min_rho);
  if (min_rho <= 0) margin = std::min(margin, min_rho);
  CheckRecord r = make_record("rho_slope", n, uniform(grid_size), threshold, min_slope, margin,
                              0.0, prov);
  if (worst_fd > 1e-4) {
    r.pass = false;
    r.provenance += "_FLAGGED_fd_disagreement";
  }
  return r;
}

std::vector<CheckRecord> verify_lemma34(int n, int grid_size) {
  require_grid(grid_size);
  const double bm = first_b_max(n);
  const char* ids[3] = {"k_bound", "k2_bound", "kp_bound"};
  std::vector<CheckRecord> out;
  for (int s = 0; s < 3; ++s) {
    double best = kInf, lhs = 0, rhs = 0;
    int at = 1;
    for (int i = 1; i <= grid_size; ++i) {
      const auto kb = k_bounds(n, bm * i / grid_size);
      if (kb.margin[s] < best) best = kb.margin[s], lhs = kb.lhs[s], rhs = kb.rhs[s], at = i;
    }
    // Ten times denser around the tightest grid point.
    const double lo = bm * std::max(at - 1, 0) / grid_size;
    const double hi = bm * std::min(at + 1, grid_size) / grid_size;
    for (int j = 1; j <= 20; ++j) {
      const auto kb = k_bounds(n, lo + (hi - lo) * j / 20);
      if (kb.margin[s] < best) best = kb.margin[s], lhs = kb.lhs[s], rhs = kb.rhs[s];
    }
    out.push_back(make_record(ids[s], n, uniform(grid_size) + "+refine10x", lhs, rhs, best, 0.0,
                              "tightest_b=" + fmt("%.6e", bm * at / grid_size)));
  }

  // Endpoint reductions.
  const auto pm = first_cone_params(n, bm);
  const double r = double(n - 3) / (n - 4);
  const double gm = g_func(n, bm), hm = h_func(n, bm), rhs_m = omega_rhs(pm);
  out.push_back(make_record("k2_reduced", n, "endpoint", r * r * gm, rhs_m, rhs_m - r * r * gm,
                            0.0, "g(b_max)"));
  out.push_back(make_record("kp_reduced", n, "endpoint", r * gm * hm, rhs_m, rhs_m - r * gm * hm,
                            0.0, "g(b_max)h(b_max)"));

  double chain = kInf, worst_rise = -kInf;
  double prev = omega_rhs(first_cone_params(n, bm / grid_size));
  for (int i = 1; i <= grid_size; ++i) {
    const auto p = first_cone_params(n, bm * i / grid_size);
    const double k = 1 + 0.5 * p.A_coef * std::sqrt(double(n) * (n - 2));
    chain = std::min(chain, r * (1 + 2.0 * (n - 2) * p.a) - k);
    if (i > 1) {
      const double cur = omega_rhs(p);
      worst_rise = std::max(worst_rise, cur - prev);
      prev = cur;
    }
  }
  out.push_back(make_record("k_chain", n, uniform(grid_size), 0.0, chain, chain, 0.0,
                            "(n-3)/(n-4)(1+2(n-2)a)-K"));
  out.push_back(make_record("rhs_decreasing", n, uniform(grid_size), worst_rise, 0.0, -worst_rise,
                            0.0, "max_forward_difference"));
  return out;
}

std::vector<CheckRecord> verify_ric0_gap(int n, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("verify_ric0_gap: samples must be >= 1");
  Rng rng(seed);
  double best = kInf, lhs = 0, rhs = 0;
  for (int k = 0; k < samples; ++k) {
    Eigen::MatrixXd h = k % 2 == 0 ? ricci(random_bianchi(n, rng)).matrix()
                                   : random_symmetric(n, rng).matrix();
    h /= std::max(h.norm(), 1e-300);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd l = es.eigenvalues();
    const double mean = l.mean();
    const double r0 = (l.array() - mean).square().sum();
    const double gap = l(1) - l(0);
    const double bound = double(n - 1) / n * gap * gap;
    if (r0 - bound < best) best = r0 - bound, lhs = bound, rhs = r0;
  }
  std::vector<CheckRecord> out;
  out.push_back(make_record("ric0_gap", n, "samples:" + std::to_string(samples), lhs, rhs, best,
                            1e-12, "seed=" + std::to_string(seed) + "_unit_frobenius"));

  // Equality on the spectrum (-1, 0, ..., 0).
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  d[0] = -1.0;
  const SymmetricForm e = SymmetricForm::diagonal(d);
  const double r0 = e.tracefree().norm_squared();
  const double bound = double(n - 1) / n;
  out.push_back(make_record("ric0_gap_equality", n, "spectrum:-1,0,...,0", bound, r0,
                            -std::abs(r0 - bound), 1e-14, "equality_expected"));
  return out;
}

GlueSides glue_sides(int n) {
  require_glue_dimension(n);
  const double bm = first_b_max(n), bt = second_b_max(n);
  const auto p = second_cone_params(n, bt);
  const double at = p.a, am = p.a_max, gm = p.gamma_max;
  const double ratio = (1 + (n - 2) * bm) / (1 + (n - 2) * bt);
  const double root = std::sqrt(2 * at);
  const double u = (am - at) / (1 + 2.0 * (n - 1) * at);
  const double v = (bm - bt) / (1 + (n - 2) * bt);
  GlueSides g;
  g.lhs[0] = ratio * root;
  g.rhs[0] = double(n * n - 5 * n + 4) / (n * n - 7 * n + 14) / (n - 4);
  g.lhs[1] = u - v;
  g.rhs[1] = 0.0;
  g.lhs[2] = 2 * (u - (1 + gm) * v) + (2.0 * (n - 1) * u - (n - 2) * v) * root;
  g.rhs[2] = ratio * n * root / (n * n - 5 * n + 4);
  return g;
}

std::vector<CheckRecord> verify_lemma42(int n) {
  const GlueSides g = glue_sides(n);
  const char* ids[3] = {"glue_sqrt", "glue_ab", "glue_mixed"};
  std::vector<CheckRecord> out;
  for (int i = 0; i < 3; ++i) {
    out.push_back(make_record(ids[i], n, "exact", g.lhs[i], g.rhs[i], g.lhs[i] - g.rhs[i], 0.0,
                              "b_max=1/(2n+2)_b~max=1/(5n)"));
  }
  return out;
}

ZetaMax zeta_max(int n, bool include_gamma_factor) {
  const auto p = second_cone_params(n, second_b_max(n), include_gamma_factor);
  const double z = p.zeta;
  const double nn = n;
  return {z, 1 + (nn - 2) * (1 - z) - 2 * z * z * (nn * nn - 2 * nn + 2) / ((nn - 2) * (nn - 2))};
}

std::vector<CheckRecord> verify_lemma44(int n, bool include_gamma_factor, int grid_size) {
  require_glue_dimension(n);
  require_grid(grid_size, 1);
  const double bt = second_b_max(n);
  double p1 = kInf, p2 = kInf, zmono = kInf;
  const ZetaMax zm = zeta_max(n, include_gamma_factor);
  for (int i = 1; i <= grid_size; ++i) {
    const double b = bt * i / grid_size;
    const double a = second_a(n, b);
    p1 = std::min(p1, (n * b * b * (1 - 2 * b) - 2 * (a - b) * (1 - 2 * b + n * b * b)) / (b * b));
    p2 = std::min(p2, (n * n * b * b - 2.0 * (n - 1) * (a - b) * (1 - 2 * b)) / (b * b));
    zmono = std::min(zmono, zm.zeta_max - second_cone_params(n, b, include_gamma_factor).zeta);
  }
  const std::string suffix = include_gamma_factor ? "_on" : "_off";
  const std::string grid = uniform(grid_size);
  std::vector<CheckRecord> out;
  out.push_back(make_record("second_poly1", n, grid, 0.0, p1, p1, 0.0, "divided_by_b^2"));
  out.push_back(make_record("second_poly2", n, grid, 0.0, p2, p2, 0.0, "divided_by_b^2"));
  out.push_back(make_record("zeta_max" + suffix, n, "endpoint", zm.zeta_max, 1.0,
                            1.0 - zm.zeta_max, 0.0, "min_grid_zeta_max_minus_zeta=" +
                                                        fmt("%.3e", zmono)));
  const double nn = n;
  const double rhs = 2 * zm.zeta_max * zm.zeta_max * (nn * nn - 2 * nn + 2) / ((nn - 2) * (nn - 2));
  out.push_back(make_record("zeta_quadratic" + suffix, n, "endpoint", rhs + zm.quadratic_margin,
                            rhs, zm.quadratic_margin, 0.0, "1+(n-2)(1-z)_vs_2z^2(n^2-2n+2)/(n-2)^2"));
  if (zmono < -1e-15) out[2].pass = false, out[2].provenance += "_FLAGGED_not_monotone";
  return out;
}

std::vector<CheckRecord> verify_d_interior(int n, int grid_size) {
  require_grid(grid_size, 1);
  const double bm = first_b_max(n);
  double pos = kInf, ident = 0, fid = 0;
  for (int i = 1; i <= grid_size; ++i) {
    const auto p = first_cone_params(n, bm * i / grid_size);
    const double b = p.b, a = p.a, nn = n;
    const double c = nn * b * b * (1 - 2 * b) - 2 * (a - b) * (1 - 2 * b + nn * b * b);
    const double factored = b * b / (2 + (nn - 3) * b) *
                            (2 + (nn - 8) * b - 2 * (nn + 2) * (nn - 2) * b * b -
                             nn * (nn - 2) * (nn - 2) * b * b * b);
    pos = std::min(pos, c / (b * b));
    ident = std::max(ident, std::abs(c - factored) / (b * b));
    for (double y : {-4.0, -1.5, 0.0, 0.5, 3.0}) {
      const double f = f_quadratic(-2 * p.gamma - 2, y, p);
      fid = std::max(fid, std::abs(f - b * b * y * y));
    }
  }
  const std::string grid = uniform(grid_size);
  return {make_record("d_constant_positive", n, grid, 0.0, pos, pos, 0.0, "divided_by_b^2"),
          make_record("d_constant_identity", n, grid, ident, 0.0, -ident, 1e-10,
                      "max_abs_difference_over_b^2"),
          make_record("f_boundary_identity", n, grid, fid, 0.0, -fid, 1e-12,
                      "max_abs_difference_y_in_-4..3")};
}

CheckRecord verify_lemmaA1_sampled(int n, double zeta, double rho, int samples,
                                   std::uint64_t seed) {
  if (!(zeta >= 0 && zeta <= 1) || !(rho > 0 && rho <= 1)) {
    throw std::invalid_argument("verify_lemmaA1_sampled: need 0 <= zeta <= 1, 0 < rho <= 1");
  }
  if (samples < 1) throw std::invalid_argument("verify_lemmaA1_sampled: samples must be >= 1");
  const double nn = n;
  const double coef = 2 / (nn * nn) *
                      ((nn - 2) * (1 - zeta) - 2 * zeta * zeta * rho * (nn * nn - 2 * nn + 2) /
                                                   ((nn - 2) * (nn - 2)));
  Rng rng(seed);
  std::uniform_real_distribution<double> spread(0.0, 1.5);
  double best = kInf, lhs = 0, rhs = 0;
  int accepted = 0, rejected = 0;
  for (int k = 0; k < samples; ++k) {
    Eigen::MatrixXd h;
    bool ok = false;
    // The first sample is H = id, admissible for every zeta (the only one at zeta = 0).
    if (k == 0) {
      h = Eigen::MatrixXd::Identity(n, n);
      ok = true;
    }
    for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
      Eigen::MatrixXd g = random_symmetric(n, rng).matrix();
      h = Eigen::MatrixXd::Identity(n, n) + spread(rng) * g / g.norm();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
      const auto& l = es.eigenvalues();
      const double tr = l.sum();
      ok = l(n - 1) <= 0.5 * tr && l(0) + l(1) >= 2 * (1 - zeta) / nn * tr;
      if (!ok) ++rejected;
    }
    if (!ok) continue;
    ++accepted;
    const double tr = h.trace();
    const Eigen::MatrixXd h0 = h - tr / nn * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd h02 = h0 * h0;
    auto lhs_at = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
      return (nn - 2) / nn * tr * (u.dot(h * u) + v.dot(h * v)) -
             rho * (u.dot(h02 * u) + v.dot(h02 * v));
    };
    const double r = coef * tr * tr;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::MatrixXd& q = es.eigenvectors();
    auto consider = [&](double l) {
      if ((l - r) / (tr * tr) < best) best = (l - r) / (tr * tr), lhs = l, rhs = r;
    };
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) consider(lhs_at(q.col(i), q.col(j)));
    for (int t = 0; t < 8; ++t) {
      Eigen::MatrixXd e = gaussian_matrix(n, 2, rng);
      orthonormalize_columns(e);
      consider(lhs_at(e.col(0), e.col(1)));
    }
  }
  const std::string grid = "samples:" + std::to_string(samples);
  if (accepted == 0) return skipped_record("tracefree_square_bound", n, grid, "no_admissible_H");
  return make_record("tracefree_square_bound", n, grid, rhs, lhs, best, 1e-12,
                     "seed=" + std::to_string(seed) + "_zeta=" + fmt("%.9g", zeta) + "_rho=" +
                         fmt("%.9g", rho) + "_accepted=" + std::to_string(accepted) +
                         "_rejected=" + std::to_string(rejected) + "_margin_over_tr^2");
}

CheckRecord verify_lemmaA8_sampled(int n, int samples, std::uint64_t seed,
                                   const OptimizerBudget& budget) {
  if (samples < 1) throw std::invalid_argument("verify_lemmaA8_sampled: samples must be >= 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const CurvatureTensor round = round_tensor(n);
  double best = kInf, lhs_best = 0, rhs_best = 0;
  int checked = 0, skipped_lambda1 = 0, skipped_fail = 0;
  double lambda_min = kInf, lambda_max = -kInf;
  for (int k = 0; k < samples; ++k) {
    // Strictly PIC S: a Gaussian operator shifted along id^id; the PIC value of
    // id^id is 8 on every probe, so the shift is exact.
    const CurvatureTensor x = random_bianchi(n, rng);
    const double scale = x.norm();
    const double m = min_isotropic(x, ConeMode::PIC, budget).min_value;
    const CurvatureTensor s = x + ((0.05 + 0.3 * unit(rng)) * scale / n - m) / 8.0 * round;
    const Eigen::MatrixXd h0 = (scale / n) * random_symmetric(n, rng).matrix();
    auto family = [&](double c) {
      return IsotropicFunctional(s, ConeMode::PIC1,
                                 SymmetricForm(h0 + c * Eigen::MatrixXd::Identity(n, n)), 1.0);
    };
    auto slope = [](const IsotropicProbe& p) { return 2 * (1 - p.lambda * p.lambda); };
    const ShiftResult sr = boundary_shift(family, slope, 0.0, budget, 1e-11 * s.norm());
    if (!sr.converged) {
      ++skipped_fail;
      continue;
    }
    const IsotropicProbe& pr = sr.report.argmin_probe;
    if (pr.lambda >= 1 - 1e-9) {
      ++skipped_lambda1;
      continue;
    }
    const SymmetricForm h(h0 + sr.shift * Eigen::MatrixXd::Identity(n, n));
    const double l2 = pr.lambda * pr.lambda;
    const Eigen::VectorXd e1 = pr.frame.e(0), e2 = pr.frame.e(1);
    const double zq = IsotropicFunctional(q_quadratic(s), ConeMode::PIC1).value(pr);
    const double zh = IsotropicFunctional(kulkarni_nomizu(h, h), ConeMode::PIC1).value(pr);
    const SymmetricForm sh = star_contract(s, h);
    const double lhs = zq + zh + 2 * (1 - l2) * (sh.quadratic(e1) + sh.quadratic(e2));
    const double h12 = h.quadratic(e1) + h.quadratic(e2);
    const double rhs = (1 + l2) * h12 * h12;
    const double norm2 = s.norm() * s.norm();
    ++checked;
    lambda_min = std::min(lambda_min, pr.lambda);
    lambda_max = std::max(lambda_max, pr.lambda);
    if ((lhs - rhs) / norm2 < best) best = (lhs - rhs) / norm2, lhs_best = lhs, rhs_best = rhs;
  }
  const std::string grid = "samples:" + std::to_string(samples);
  const std::string prov = "seed=" + std::to_string(seed) + "_checked=" + std::to_string(checked) +
                           "_skipped_lambda1=" + std::to_string(skipped_lambda1) +
                           "_skipped_construction=" + std::to_string(skipped_fail);
  if (checked == 0) return skipped_record("zero_probe_bound", n, grid, prov);
  return make_record("zero_probe_bound", n, grid, rhs_best, lhs_best, best, 1e-7,
                     prov + "_lambda_range=" + fmt("%.3f", lambda_min) + ".." +
                         fmt("%.3f", lambda_max) + "_margin_over_|S|^2");
}

}  // namespace pinch
