#include "pinch/pinching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pinch/stiefel.hpp"

namespace pinch {

namespace {

void require_b(double b, double b_max, const char* what) {
  if (!(b > 0.0) || b > b_max * (1.0 + 1e-15)) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "%s: b = %.17g outside (0, %.17g]", what, b, b_max);
    throw std::invalid_argument(msg);
  }
}

void require_n(int n, const char* what) {
  if (n < 5 || n > kMaxDimension) {
    throw std::invalid_argument(std::string(what) + ": dimension must lie in [5, 32]");
  }
}

double first_a(int n, double b) {
  const double u = 2.0 + (n - 2) * b;
  return u * u * b / (2.0 * (2.0 + (n - 3) * b));
}

double first_gamma(int n, double b) { return b / (2.0 + (n - 3) * b); }

}  // namespace

FirstConeParams first_cone_params(int n, double b) {
  require_n(n, "first_cone_params");
  FirstConeParams p;
  p.n = n;
  p.b_max = first_b_max(n);
  require_b(b, p.b_max, "first_cone_params");
  p.b = b;
  p.outside_verified_range = n < 9 || n > 11;
  const double nn = n;
  p.a = first_a(n, b);
  p.gamma = first_gamma(n, b);
  const double sa = 1.0 + 2.0 * (nn - 1) * p.a;
  const double sb = 1.0 + (nn - 2) * b;
  p.rho = b - 2.0 * (nn - 1) * p.gamma * (1 - 2 * b) / (nn * nn) -
          2.0 * (nn - 1) * (1 + p.gamma) *
              (nn * nn * b * b - 2.0 * (nn - 1) * (p.a - b) * (1 - 2 * b)) / (nn * nn * sa);
  if (!(p.rho > 0)) throw std::invalid_argument("first_cone_params: rho(b) <= 0, omega undefined");
  const double c3 = 2.0 + (nn - 3) * b;
  p.omega = std::sqrt(27.0 * (2.0 + (nn - 2) * b) / 8.0 * b * sb * sb /
                      (nn * nn * p.rho * p.rho * p.rho * c3 * c3));
  p.A_coef = (2.0 + 8.0 * b) / ((nn - 1) * (nn - 4)) + 4.0 / nn * (2 * b + (nn - 2) * p.a);
  const auto pq = scal_coefficients(n, p.a, b);
  p.P_coef = pq.P;
  p.Q_coef = pq.Q;
  return p;
}

double g_func(int n, double b) {
  require_n(n, "g_func");
  require_b(b, first_b_max(n), "g_func");
  const double a = first_a(n, b);
  const double u = 1.0 + 2.0 * (n - 2) * a;
  return u * u / (1.0 + 2.0 * (n - 1) * a) * (2.0 + (n - 3) * b) / (1.0 + (n - 2) * b);
}

double h_func(int n, double b) {
  require_n(n, "h_func");
  require_b(b, first_b_max(n), "h_func");
  const double a = first_a(n, b);
  const double sa = 1.0 + 2.0 * (n - 1) * a;
  const double sb = 1.0 + (n - 2) * b;
  return sa * sa / ((1.0 + 2.0 * (n - 2) * a) * sb * sb);
}

double f_quadratic(double x, double y, const FirstConeParams& p) {
  const double b = p.b, a = p.a;
  return (2 * b + (p.n - 2) * b * b - 2 * a) * x * y + 2 * a * (x + 2) * (y + 2) +
         b * b * (x * x + y * y);
}

SecondConeParams second_cone_params(int n, double b, bool include_gamma_factor,
                                    bool include_2424) {
  require_n(n, "second_cone_params");
  SecondConeParams p;
  p.n = n;
  p.b_tilde_max = second_b_max(n);
  require_b(b, p.b_tilde_max, "second_cone_params");
  p.b = b;
  p.a = second_a(n, b);
  p.b_max = first_b_max(n);
  p.a_max = first_a(n, p.b_max);
  p.gamma_max = first_gamma(n, p.b_max);
  p.include_gamma_factor = include_gamma_factor;
  p.include_2424 = include_2424;
  p.zeta = (1.0 + 2.0 * (n - 1) * p.a) / (1.0 + 2.0 * (n - 1) * p.a_max) *
           (1.0 + (n - 2) * p.b_max) / (1.0 + (n - 2) * b) *
           (include_gamma_factor ? 1.0 + p.gamma_max : 1.0);
  return p;
}

FirstConeCertificate::FirstConeCertificate(CurvatureTensor s, CurvatureTensor t)
    : S(std::move(s)), T(t.with_bianchi_expected(false)) {
  require_same_dimension(S.dim(), T.dim(), "certificate");
}

namespace {

// Everything condition 4 needs, precomputed once per certificate.
struct Cond4 {
  Eigen::MatrixXd ric_s, ric_t, pair_t;
  double c = 0;  // omega * scal(S)

  Cond4(const CurvatureTensor& s, const CurvatureTensor& t, double omega)
      : ric_s(ricci(s).matrix()), ric_t(ricci(t).matrix()), pair_t(t.pair_matrix()) {
    c = omega * scalar(s);
  }

  double tau(const Eigen::VectorXd& e1, const Eigen::VectorXd& e2) const {
    const Eigen::VectorXd w = wedge(e1, e2);
    return e1.dot(ric_t * e1) + e2.dot(ric_t * e2) - 2 * w.dot(pair_t * w);
  }

  double value(const Eigen::MatrixXd& e) const {
    const Eigen::VectorXd e1 = e.col(0), e2 = e.col(1);
    const double gap = e2.dot(ric_s * e2) - e1.dot(ric_s * e1);
    return std::sqrt(std::max(c * tau(e1, e2), 0.0)) - gap;
  }

  // With z = P (e1 ^ e2) spread into an antisymmetric matrix Z, the partial
  // curvature contractions are Z e2 and -Z e1, so no N x N product is needed.
  double value_grad(const Eigen::MatrixXd& e, Eigen::MatrixXd& g) const {
    const int n = static_cast<int>(e.rows());
    const Eigen::VectorXd e1 = e.col(0), e2 = e.col(1);
    const Eigen::VectorXd w = wedge(e1, e2);
    const Eigen::VectorXd z = pair_t * w;
    Eigen::MatrixXd zm = Eigen::MatrixXd::Zero(n, n);
    for (int p = 0, k = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q, ++k) {
        zm(p, q) = z(k);
        zm(q, p) = -z(k);
      }
    }
    const Eigen::VectorXd rt1 = ric_t * e1, rt2 = ric_t * e2;
    const Eigen::VectorXd rs1 = ric_s * e1, rs2 = ric_s * e2;
    const double t = e1.dot(rt1) + e2.dot(rt2) - 2 * w.dot(z);
    const double root = std::sqrt(std::max(c * t, 0.0));
    const double k = root > 1e-300 ? 0.5 * c / root : 0.0;
    g.resize(n, 2);
    g.col(0) = k * (2 * rt1 - 4 * zm * e2) + 2 * rs1;
    g.col(1) = k * (2 * rt2 + 4 * zm * e1) - 2 * rs2;
    return root - (e2.dot(rs2) - e1.dot(rs1));
  }
};

}  // namespace

double transverse_sum(const CurvatureTensor& t, const Eigen::MatrixXd& e) {
  const Eigen::VectorXd e1 = e.col(0), e2 = e.col(1);
  const Eigen::MatrixXd rt = ricci(t).matrix();
  const Eigen::VectorXd w = wedge(e1, e2);
  return e1.dot(rt * e1) + e2.dot(rt * e2) - 2 * w.dot(t.pair_matrix() * w);
}

double cond4_margin_at(const CurvatureTensor& s, const CurvatureTensor& t, double omega,
                       const Eigen::MatrixXd& pair) {
  require_same_dimension(s.dim(), t.dim(), "cond4_margin_at");
  return Cond4(s, t, omega).value(pair);
}

std::pair<double, Eigen::MatrixXd> cond4_min(const CurvatureTensor& s, const CurvatureTensor& t,
                                             double omega, int iterations) {
  require_same_dimension(s.dim(), t.dim(), "cond4_min");
  const int n = s.dim();
  const Cond4 c4(s, t, omega);
  const Spectrum sp = ricci(s).spectrum();
  struct Cand {
    double v;
    Eigen::MatrixXd e;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<std::size_t>(n * (n - 1)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Eigen::MatrixXd e(n, 2);
      e.col(0) = sp.vectors.col(i);
      e.col(1) = sp.vectors.col(j);
      cands.push_back({c4.value(e), e});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& x, const Cand& y) { return x.v < y.v; });
  Cand best = cands.front();
  // Margins are compared at 1e-9 scal; a gradient of 1e-10 of the Ricci scale
  // leaves a value error far below that.
  const double grad_tol = 1e-10 * (c4.ric_s.norm() + std::sqrt(std::abs(c4.c) * c4.ric_t.norm()));
  const std::size_t refine = std::min<std::size_t>(3, cands.size());
  for (std::size_t r = 0; r < refine && iterations > 0; ++r) {
    auto res = stiefel_descent(
        [&](const Eigen::MatrixXd& x, Eigen::MatrixXd& g) { return c4.value_grad(x, g); },
        cands[r].e, iterations, grad_tol);
    const double v = c4.value(res.frame);
    if (v < best.v) best = {v, res.frame};
  }
  return {best.v, best.e};
}

bool ConditionReport::holds(double tol) const {
  return std::all_of(margin.begin(), margin.end(), [tol](double m) { return m >= -tol; });
}

ConditionReport check_first_cone_cert(const FirstConeCertificate& cert, const FirstConeParams& p,
                                      const OptimizerBudget& budget) {
  const CurvatureTensor& s = cert.S;
  const CurvatureTensor& t = cert.T;
  require_same_dimension(s.dim(), t.dim(), "check_first_cone_cert");
  require_same_dimension(s.dim(), p.n, "check_first_cone_cert");
  ConditionReport rep;
  rep.scal = scalar(s);
  if (rep.scal < 0) throw std::domain_error("check_first_cone_cert: scal(S) < 0");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.pair_matrix(), Eigen::EigenvaluesOnly);
  rep.margin[0] = es.eigenvalues()(0);

  rep.cond2 = min_isotropic(s - t, ConeMode::PIC, budget);
  rep.margin[1] = rep.cond2.min_value;

  const Spectrum sp = ricci(s).spectrum();
  rep.margin[2] = sp.values(0) + sp.values(1) + 2 * p.gamma / p.n * rep.scal;
  rep.cond3_pair = sp.vectors.leftCols(2);

  auto [m4, pair] = cond4_min(s, t, p.omega, budget.iterations);
  rep.margin[3] = m4;
  rep.cond4_pair = pair;
  return rep;
}

IsotropicFunctional second_cone_functional(const CurvatureTensor& s, const SecondConeParams& p) {
  require_same_dimension(s.dim(), p.n, "second_cone_functional");
  return IsotropicFunctional(s, ConeMode::PIC1, ricci(s), std::sqrt(2 * p.a), p.include_2424);
}

MembershipReport second_cone_z_min(const CurvatureTensor& s, const SecondConeParams& p,
                                   const OptimizerBudget& budget) {
  return minimize_functional(second_cone_functional(s, p), budget);
}

std::string_view to_string(Family f) { return f == Family::first ? "first" : "second"; }

GluePoint glue_family(int n, double beta) {
  require_n(n, "glue_family");
  const double bm = first_b_max(n);
  const double len = glue_length(n);
  if (!(beta > 0) || !(beta < len)) {
    throw std::invalid_argument("glue_family: beta outside (0, b_max + b~_max)");
  }
  if (beta <= bm) return {Family::first, beta};
  return {Family::second, len - beta};
}

namespace {

void kv(std::string& out, const char* key, double v) {
  char line[96];
  std::snprintf(line, sizeof line, "%s = %.16e\n", key, v);
  out += line;
}

}  // namespace

std::string parameter_report(const FirstConeParams& p) {
  std::string out = "family = first\n";
  out += "n = " + std::to_string(p.n) + "\n";
  kv(out, "b", p.b);
  kv(out, "b_max", p.b_max);
  kv(out, "a", p.a);
  kv(out, "gamma", p.gamma);
  kv(out, "rho", p.rho);
  kv(out, "omega", p.omega);
  kv(out, "A", p.A_coef);
  kv(out, "P", p.P_coef);
  kv(out, "Q", p.Q_coef);
  if (p.outside_verified_range) out += "warning = dimension outside 9..11\n";
  return out;
}

std::string parameter_report(const SecondConeParams& p) {
  std::string out = "family = second\n";
  out += "n = " + std::to_string(p.n) + "\n";
  out += std::string("gamma_factor = ") + (p.include_gamma_factor ? "on" : "off") + "\n";
  kv(out, "b", p.b);
  kv(out, "b_tilde_max", p.b_tilde_max);
  kv(out, "a", p.a);
  kv(out, "a_max", p.a_max);
  kv(out, "gamma_max", p.gamma_max);
  kv(out, "zeta", p.zeta);
  return out;
}

}  // namespace pinch
