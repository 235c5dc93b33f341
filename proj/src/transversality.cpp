#include "pinch/transversality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "pinch/parallel.hpp"
#include "pinch/samples.hpp"

namespace pinch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kCond4Iterations = 100;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double min_pair_eigenvalue(const CurvatureTensor& r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.pair_matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Nonnegative base operator with scal = 1 and a certified lower bound for its
// PIC minimum: PIC minima add up to at most the minimum of the sum; id^id has
// PIC value 8 everywhere, the cylinder has minimum 2, and R(phi, conj phi) >=
// 4 lambda_min(R) since |Re phi|^2 = |Im phi|^2 = 2.
struct BaseOperator {
  CurvatureTensor s0;
  double m0 = 0;
  double lambda_min = 0;
};

// Putting condition 3 on the boundary costs a PIC budget that only
// cylinder-dominated bases have (the neck is the extremal model there), so
// that sampler uses neck_heavy weights.
BaseOperator draw_base(int n, Rng& rng, bool neck_heavy) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double nn = n;
  double w_round, w_nonneg;
  if (neck_heavy) {
    w_round = 0.01 + 0.14 * unit(rng);
    w_nonneg = 0.25 * unit(rng) * (1 - w_round);
  } else {
    w_round = 0.05 + 0.35 * unit(rng);
    w_nonneg = (1 - w_round) * unit(rng);
  }
  const double w_cyl = 1 - w_round - w_nonneg;

  const CurvatureTensor round = (1.0 / (2 * nn * (nn - 1))) * round_tensor(n);
  CurvatureTensor nonneg = random_nonnegative(n, rng);
  nonneg = (1.0 / scalar(nonneg)) * nonneg;
  Eigen::VectorXd v = gaussian_matrix(n, 1, rng).col(0);
  const CurvatureTensor cyl = (1.0 / ((nn - 1) * (nn - 2))) * cylinder_tensor(v);

  BaseOperator b;
  b.s0 = w_round * round + w_nonneg * nonneg + w_cyl * cyl;
  b.m0 = w_round * 8 / (2 * nn * (nn - 1)) + w_cyl * 2 / ((nn - 1) * (nn - 2)) +
         w_nonneg * 4 * std::max(min_pair_eigenvalue(nonneg), 0.0);
  b.lambda_min = min_pair_eigenvalue(b.s0);
  return b;
}

double cond3_margin(const CurvatureTensor& s, double gamma) {
  const Spectrum sp = ricci(s).spectrum();
  return sp.values(0) + sp.values(1) + 2 * gamma / s.dim() * scalar(s);
}

// Smallest u >= 0 with sqrt(omega scal(S) tau_{u^2 S0}(e)) >= gap(e) on every
// pair, i.e. the maximal ratio gap / sqrt(omega scal tau_{S0}); Dinkelbach
// iteration on that ratio. After the first step the iterates increase
// monotonically to the threshold.
struct Threshold {
  double u = 0;
  bool converged = false;
};

// Gives up early when the threshold provably exceeds theta_cap.
Threshold cond4_threshold(const CurvatureTensor& s, const CurvatureTensor& s0, double omega,
                          double theta_cap) {
  const double scal = scalar(s);
  const Eigen::MatrixXd ric = ricci(s).matrix();
  // Start from the best Ricci eigen-pair ratio, a lower bound for the threshold.
  auto [m_c, e_c] = cond4_min(s, s0, omega, 0);
  double u = std::max((e_c.col(1).dot(ric * e_c.col(1)) - e_c.col(0).dot(ric * e_c.col(0))) /
                          std::sqrt(std::max(omega * scal * transverse_sum(s0, e_c), 1e-300)),
                      1e-3);
  if (u * u >= theta_cap) return {u, false};
  for (int it = 0; it < 40; ++it) {
    auto [m, e] = cond4_min(s, (u * u) * s0, omega, kCond4Iterations);
    const double gap = e.col(1).dot(ric * e.col(1)) - e.col(0).dot(ric * e.col(0));
    const double alpha = std::sqrt(std::max(omega * scal * transverse_sum(s0, e), 0.0));
    if (!(alpha > 0)) return {u, false};
    const double next = gap / alpha;
    if (next <= 0) return {0.0, true};
    if (it > 0 && std::abs(m) <= 1e-13 * scal) return {std::max(u, next), true};
    if (it > 0 && next <= u * (1 + 1e-13)) return {u, true};
    u = next;
    if (it > 0 && u * u >= theta_cap) return {u, false};
  }
  return {u, false};
}

// Derivative at t = 0 of the sum of the two smallest eigenvalues of A + t B,
// with eigenvalue clusters resolved by the restriction of B.
struct LowestPairDerivative {
  double value;
  Eigen::MatrixXd pair;
};

LowestPairDerivative lowest_pair_derivative(const Spectrum& sp, const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(sp.values.size());
  const double tol = 1e-9 * std::max(sp.values.cwiseAbs().maxCoeff(), 1e-300);
  auto cluster = [&](int start) {
    int end = start + 1;
    while (end < n && sp.values(end) <= sp.values(start) + tol) ++end;
    return sp.vectors.middleCols(start, end - start).eval();
  };
  auto restricted = [&](const Eigen::MatrixXd& v) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v.transpose() * b * v);
    return std::make_pair(es.eigenvalues(), (v * es.eigenvectors()).eval());
  };
  const Eigen::MatrixXd c1 = cluster(0);
  LowestPairDerivative out;
  out.pair.resize(n, 2);
  auto [mu1, vec1] = restricted(c1);
  if (c1.cols() >= 2) {
    out.value = mu1(0) + mu1(1);
    out.pair = vec1.leftCols(2);
    return out;
  }
  const Eigen::MatrixXd c2 = cluster(1);
  auto [mu2, vec2] = restricted(c2);
  out.value = mu1(0) + mu2(0);
  out.pair.col(0) = vec1.col(0);
  out.pair.col(1) = vec2.col(0);
  return out;
}

CheckRecord aggregate(const std::string& id, int n, int samples, std::uint64_t seed,
                      const std::vector<CheckRecord>& rs, const std::vector<std::string>& errors,
                      double tol) {
  double best = kInf, lhs = 0, rhs = 0;
  int failed = 0, skipped = 0;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (!errors[i].empty()) continue;
    if (rs[i].skipped) {
      ++skipped;
      continue;
    }
    if (!rs[i].pass) ++failed;
    if (rs[i].margin < best) best = rs[i].margin, lhs = rs[i].lhs, rhs = rs[i].rhs, worst = i;
  }
  const int sampler_failures =
      static_cast<int>(std::count_if(errors.begin(), errors.end(), [](auto& e) { return !e.empty(); }));
  std::string prov = "seed=" + std::to_string(seed) + "_failed=" + std::to_string(failed) +
                     "_skipped=" + std::to_string(skipped) +
                     "_sampler_failures=" + std::to_string(sampler_failures);
  const std::string grid = "samples:" + std::to_string(samples);
  if (best == kInf) {
    CheckRecord r = skipped_record(id, n, grid, prov);
    if (sampler_failures > 0) r.skipped = false, r.pass = false;
    return r;
  }
  prov += "_worst_index=" + std::to_string(worst) + "_" + rs[worst].provenance;
  CheckRecord r = make_record(id, n, grid, lhs, rhs, best, tol, prov);
  if (failed > 0 || sampler_failures > 0) r.pass = false;
  return r;
}

}  // namespace

double cond3_activation_shift(const CurvatureTensor& s, double gamma) {
  const int n = s.dim();
  const Spectrum sp = ricci(s).spectrum();
  const double sigma = sp.values(0) + sp.values(1);
  return -(sigma + 2 * gamma / n * scalar(s)) / (4.0 * (n - 1) * (1 + gamma));
}

SampledCertificate sample_certificate(const FirstConeParams& p, ActiveCondition active,
                                      std::uint64_t seed, int max_attempts) {
  if (max_attempts < 1) throw std::invalid_argument("sample_certificate: max_attempts < 1");
  const int n = p.n;
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const CurvatureTensor round = round_tensor(n);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const BaseOperator base = draw_base(n, rng, active == ActiveCondition::cond3);
    const double c_active = cond3_activation_shift(base.s0, p.gamma);
    const double c = active == ActiveCondition::cond3 ? c_active : 0.8 * unit(rng) * c_active;
    const double r = 0.2 + 0.6 * unit(rng);
    const CurvatureTensor s = base.s0 + c * round;
    const double scal = scalar(s);
    if (scal < 1e-2) continue;  // near-round base: S almost vanishes

    const double theta_hi = 1 + 8 * std::min(c, 0.0) / base.m0;
    if (!(theta_hi > 0)) continue;
    const Threshold th = cond4_threshold(s, base.s0, p.omega, theta_hi);
    if (!th.converged) continue;
    const double theta_lo = th.u * th.u;
    if (!(theta_lo < theta_hi)) continue;
    const double theta =
        active == ActiveCondition::cond4 ? theta_lo : theta_lo + r * (theta_hi - theta_lo);
    if (!(theta > 0)) continue;

    SampledCertificate out{FirstConeCertificate(s, theta * base.s0), {}, {}, {}};
    out.shift = c;
    out.theta = theta;
    out.scal = scal;
    out.attempts = attempt;
    out.margin[0] = theta * base.lambda_min;
    out.margin[1] = (1 - theta) * base.m0 + 8 * c;
    const Spectrum sp = ricci(s).spectrum();
    out.margin[2] = sp.values(0) + sp.values(1) + 2 * p.gamma / n * scal;
    out.cond3_pair = sp.vectors.leftCols(2);
    auto [m4, pair] = cond4_min(s, out.cert.T, p.omega, kCond4Iterations);
    out.margin[3] = m4;
    out.cond4_pair = pair;

    const double sep = 1e-6 * scal;
    bool ok = out.margin[0] > sep && out.margin[1] > sep;
    if (active == ActiveCondition::cond3) {
      ok = ok && std::abs(out.margin[2]) < 1e-10 * scal && out.margin[3] > sep;
    } else if (active == ActiveCondition::cond4) {
      ok = ok && out.margin[2] > sep && std::abs(out.margin[3]) < 1e-9 * scal;
    } else {
      ok = ok && out.margin[2] > sep && out.margin[3] > sep;
    }
    if (ok) return out;
  }
  throw std::runtime_error("sample_certificate: rejection budget exhausted after " +
                           std::to_string(max_attempts) + " attempts");
}

EpsilonEstimate estimate_epsilon(const FirstConeParams& p,
                                 const std::vector<CurvatureTensor>& tensors,
                                 const OptimizerBudget& budget) {
  if (tensors.empty()) throw std::invalid_argument("estimate_epsilon: samples must be >= 1");
  const LabParams lab = p.lab();
  double best = kInf;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const CurvatureTensor& s = tensors[i];
    const double scal = scalar(s);
    const MembershipReport rep = min_isotropic(d_ab_closed_form(s, lab), ConeMode::PIC, budget);
    if (rep.min_value < 0) {
      throw std::runtime_error("estimate_epsilon: D_{a,b}(S) has negative PIC minimum " +
                               fmt("%.6e", rep.min_value) + " at sample " + std::to_string(i));
    }
    if (scal > 0) best = std::min(best, rep.min_value / (8 * scal * scal));
  }
  EpsilonEstimate e;
  e.min_ratio = best;
  e.epsilon = std::max(0.5 * best, 1e-12);
  e.samples = static_cast<int>(tensors.size());
  e.seed = budget.seed;
  e.provenance = "explicit_tensors=" + std::to_string(tensors.size()) + "_optimizer_seed=" +
                 std::to_string(budget.seed);
  return e;
}

EpsilonEstimate estimate_epsilon(const FirstConeParams& p, int samples, std::uint64_t seed,
                                 const OptimizerBudget& budget) {
  if (samples < 1) throw std::invalid_argument("estimate_epsilon: samples must be >= 1");
  auto certs = parallel_map<CurvatureTensor>(
      static_cast<std::size_t>(samples), budget.workers, [&](std::size_t i) {
        const auto kind = i % 2 == 0 ? ActiveCondition::none : ActiveCondition::cond3;
        return sample_certificate(p, kind, derive_seed(seed, i)).cert.S;
      });
  OptimizerBudget b = budget;
  b.workers = 1;
  auto ratios = parallel_map<double>(certs.size(), budget.workers, [&](std::size_t i) {
    return estimate_epsilon(p, {certs[i]}, b).min_ratio;
  });
  EpsilonEstimate e;
  e.min_ratio = *std::min_element(ratios.begin(), ratios.end());
  e.epsilon = std::max(0.5 * e.min_ratio, 1e-12);
  e.samples = samples;
  e.seed = seed;
  e.provenance = "seed=" + std::to_string(seed) + "_samples=" + std::to_string(samples) +
                 "_interior_and_cond3_active";
  return e;
}

CheckRecord check_cond3_identity(const FirstConeParams& p) {
  const double n = p.n, b = p.b;
  const double lhs = 2 * (p.a - b) + p.gamma * (1 - 2 * b);
  const double rhs = b * (1 + (n - 2) * b) * (1 + (n - 2) * b) / (2 + (n - 3) * b);
  const double rel = std::abs(lhs - rhs) / std::abs(rhs);
  return make_record("cond3_identity", p.n, "b=" + fmt("%.17g", b), lhs, rhs, -rel, 1e-13,
                     "relative_difference");
}

CheckRecord check_prop_cond3_derivative(const FirstConeCertificate& cert,
                                        const FirstConeParams& p) {
  const CurvatureTensor& s = cert.S;
  require_same_dimension(s.dim(), p.n, "check_prop_cond3_derivative");
  const int n = p.n;
  const double scal = scalar(s);
  const Spectrum sp = ricci(s).spectrum();
  const double m3 = sp.values(0) + sp.values(1) + 2 * p.gamma / n * scal;
  if (!(scal > 0) || std::abs(m3) > 1e-8 * scal) {
    throw std::invalid_argument("check_prop_cond3_derivative: condition 3 is not active");
  }
  const CurvatureTensor ds = evolution_rhs(s, p.lab());
  const LowestPairDerivative d = lowest_pair_derivative(sp, ricci(ds).matrix());
  const double deriv = 0.5 * (d.value + 2 * p.gamma / n * scalar(ds));
  const CheckRecord id = check_cond3_identity(p);
  std::string prov = "gap=" + fmt("%.3e", (sp.values(1) - sp.values(0)) / scal) +
                     "_identity_rel=" + fmt("%.1e", -id.margin);
  CheckRecord r = make_record("cond3_derivative", n, "b=" + fmt("%.17g", p.b), 0.0, deriv,
                              deriv / (scal * scal), 0.0, prov);
  if (!id.pass) r.pass = false, r.provenance += "_FLAGGED_identity";
  return r;
}

CheckRecord check_prop_cond4_derivative(const FirstConeCertificate& cert,
                                        const FirstConeParams& p, double epsilon) {
  const CurvatureTensor& s = cert.S;
  const CurvatureTensor& t = cert.T;
  require_same_dimension(s.dim(), p.n, "check_prop_cond4_derivative");
  const int n = p.n;
  const double scal = scalar(s);
  const std::string grid = "b=" + fmt("%.17g", p.b);
  auto [m4, pair] = cond4_min(s, t, p.omega, 200);
  if (!(scal > 0) || std::abs(m4) > 1e-8 * scal) {
    throw std::invalid_argument("check_prop_cond4_derivative: condition 4 is not active");
  }
  const double tau = transverse_sum(t, pair);
  if (!(tau > 1e-14 * std::max(t.norm(), 1e-300))) {
    return skipped_record("cond4_derivative", n, grid, "tau_T=0_bound_vacuous");
  }
  const Eigen::VectorXd e1 = pair.col(0), e2 = pair.col(1);
  const CurvatureTensor ds = evolution_rhs(s, p.lab());
  const Eigen::MatrixXd dric = ricci(ds).matrix();
  const double dscal = scalar(ds);
  const CurvatureTensor s2 = square(s);
  const CurvatureTensor dt = s2 + (epsilon * scal * scal) * round_tensor(n);
  const double dgap = e2.dot(dric * e2) - e1.dot(dric * e1);
  const double dtau = transverse_sum(dt, pair);
  const double root_omega = std::sqrt(p.omega);
  const double drhs = 0.5 * root_omega * (dscal * tau + scal * dtau) / std::sqrt(scal * tau);

  const double sigma = std::sqrt(scal / tau);
  const double ric2 = ricci(s).norm_squared();
  const double claim = 0.5 * root_omega * sigma * transverse_sum(s2, pair) +
                       0.5 * root_omega / sigma * (p.P_coef * ric2 + p.Q_coef * scal * scal);
  const double claim_margin = (claim - dgap) / (scal * scal);
  CheckRecord r = make_record("cond4_derivative", n, grid, dgap, drhs,
                              (drhs - dgap) / (scal * scal), 0.0,
                              "eps=" + fmt("%.3e", epsilon) + "_claim_margin=" +
                                  fmt("%.6e", claim_margin));
  if (!(claim_margin > 0)) r.pass = false, r.provenance += "_FLAGGED_claim";
  return r;
}

CheckRecord sweep_cond3_derivative(const FirstConeParams& p, int samples, std::uint64_t seed,
                                   int workers) {
  if (samples < 1) throw std::invalid_argument("sweep_cond3_derivative: samples must be >= 1");
  std::vector<std::string> errors(static_cast<std::size_t>(samples));
  auto rs = parallel_map<CheckRecord>(errors.size(), workers, [&](std::size_t i) {
    try {
      return check_prop_cond3_derivative(sample_boundary_cond3(p, derive_seed(seed, i)).cert, p);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      return CheckRecord{};
    }
  });
  return aggregate("cond3_derivative", p.n, samples, seed, rs, errors, 0.0);
}

CheckRecord sweep_cond4_derivative(const FirstConeParams& p, int samples, std::uint64_t seed,
                                   double epsilon, int workers) {
  if (samples < 1) throw std::invalid_argument("sweep_cond4_derivative: samples must be >= 1");
  std::vector<std::string> errors(static_cast<std::size_t>(samples));
  auto rs = parallel_map<CheckRecord>(errors.size(), workers, [&](std::size_t i) {
    try {
      return check_prop_cond4_derivative(sample_boundary_cond4(p, derive_seed(seed, i)).cert, p,
                                         epsilon);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      return CheckRecord{};
    }
  });
  return aggregate("cond4_derivative", p.n, samples, seed, rs, errors, 0.0);
}

namespace {

CheckRecord sharp_at_probe(const CurvatureTensor& s, const IsotropicProbe& probe,
                           double tangent_value, const std::string& grid) {
  const double v = isotropic_value(sharp(s), probe, ConeMode::PIC);
  const double norm2 = std::max(s.norm() * s.norm(), 1e-300);
  return make_record("sharp_tangent", s.dim(), grid, 0.0, v, v / norm2, 1e-7,
                     "tangent_value=" + fmt("%.3e", tangent_value) + "_margin_over_|S|^2");
}

}  // namespace

CheckRecord check_prop_sharp_tangent(const CurvatureTensor& s, const CurvatureTensor& t,
                                     const OptimizerBudget& budget) {
  require_same_dimension(s.dim(), t.dim(), "check_prop_sharp_tangent");
  const CurvatureTensor d = s - t;
  const MembershipReport rep = min_isotropic(d, ConeMode::PIC, budget);
  const double scale = std::max(d.norm(), std::numeric_limits<double>::min());
  if (rep.min_value >= 1e-8 * scale) {
    return skipped_record("sharp_tangent", s.dim(), "probe",
                          "no_tangent_probe_min=" + fmt("%.3e", rep.min_value));
  }
  return sharp_at_probe(s, rep.argmin_probe, rep.min_value, "probe");
}

CheckRecord sweep_sharp_tangent(int n, int samples, std::uint64_t seed,
                                const OptimizerBudget& budget) {
  if (samples < 1) throw std::invalid_argument("sweep_sharp_tangent: samples must be >= 1");
  const CurvatureTensor round = round_tensor(n);
  std::vector<std::string> errors(static_cast<std::size_t>(samples));
  OptimizerBudget b = budget;
  b.workers = 1;
  auto rs = parallel_map<CheckRecord>(errors.size(), budget.workers, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    CurvatureTensor t = random_nonnegative(n, rng);
    const CurvatureTensor x = random_bianchi(n, rng);
    t = (x.norm() / t.norm()) * t;
    auto family = [&](double c) { return IsotropicFunctional(x + c * round, ConeMode::PIC); };
    const ShiftResult sr =
        boundary_shift(family, [](const IsotropicProbe&) { return 8.0; }, 0.0, b,
                       1e-12 * x.norm());
    if (!sr.converged) {
      errors[i] = "boundary shift did not converge";
      return CheckRecord{};
    }
    const CurvatureTensor s = t + x + sr.shift * round;
    return sharp_at_probe(s, sr.report.argmin_probe, sr.report.min_value,
                          "samples:" + std::to_string(samples));
  });
  return aggregate("sharp_tangent", n, samples, seed, rs, errors, 1e-7);
}

namespace {

struct SecondBoundary {
  CurvatureTensor s;
  IsotropicProbe probe;
  double z_value = 0;
};

// S0 = nonnegative part + cylinder + Weyl-carrying Gaussian perturbation,
// shifted along id^id until min Z = 0.
std::optional<SecondBoundary> second_boundary(const SecondConeParams& p, Rng& rng,
                                              const OptimizerBudget& budget) {
  const int n = p.n;
  const double nn = n;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CurvatureTensor nonneg = random_nonnegative(n, rng);
  nonneg = (1.0 / scalar(nonneg)) * nonneg;
  const CurvatureTensor cyl =
      (1.0 / ((nn - 1) * (nn - 2))) * cylinder_tensor(gaussian_matrix(n, 1, rng).col(0));
  const CurvatureTensor g = random_bianchi(n, rng);
  const double w = unit(rng), wg = 0.3 * unit(rng);
  const CurvatureTensor s0 =
      w * nonneg + (1 - w) * cyl + (wg * nonneg.norm() / g.norm()) * g;

  const CurvatureTensor round = round_tensor(n);
  const IsotropicFunctional z_round = second_cone_functional(round, p);
  auto family = [&](double c) { return second_cone_functional(s0 + c * round, p); };
  auto slope = [&](const IsotropicProbe& probe) { return z_round.value(probe); };
  const ShiftResult sr = boundary_shift(family, slope, 0.0, budget, 1e-12 * s0.norm());
  if (!sr.converged) return std::nullopt;
  SecondBoundary out{s0 + sr.shift * round, sr.report.argmin_probe, sr.report.min_value};
  if (!(scalar(out.s) > 0)) return std::nullopt;

  // Necessary part of l_{a,b}(S) in C(b_max): condition 3 of the pulled-back tensor.
  const CurvatureTensor tp =
      l_ab_inverse(l_ab(out.s, p.lab()), LabParams(n, p.a_max, p.b_max));
  if (cond3_margin(tp, p.gamma_max) < 0) return std::nullopt;
  return out;
}

}  // namespace

std::vector<CheckRecord> check_secondcone_dZ(const SecondConeParams& p, int samples,
                                             std::uint64_t seed, const OptimizerBudget& budget) {
  if (samples < 1) throw std::invalid_argument("check_secondcone_dZ: samples must be >= 1");
  const int n = p.n;
  const double nn = n;
  const double c = (nn * nn - 2 * nn + 2) / ((nn - 2) * (nn - 2));
  const double kappa = p.a * (1 + (nn - 2) * (1 - p.zeta)) - 2 * p.b * p.zeta * p.zeta * c;
  OptimizerBudget b = budget;
  b.workers = 1;

  struct Sample {
    bool ok = false;
    double dz = 0, bound = 0, lambda = 0, scal = 0;
    double ric_sum = 0, ric_bound = 0, wedge_min = kNaN;
  };
  auto res = parallel_map<Sample>(static_cast<std::size_t>(samples), budget.workers,
                                  [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    Sample out;
    std::optional<SecondBoundary> sb;
    for (int attempt = 0; attempt < 20 && !sb; ++attempt) sb = second_boundary(p, rng, b);
    if (!sb) return out;
    out.ok = true;
    const CurvatureTensor& s = sb->s;
    out.scal = scalar(s);
    out.lambda = sb->probe.lambda;
    out.dz = second_cone_functional(evolution_rhs(s, p.lab()), p).value(sb->probe);
    const double l2 = out.lambda * out.lambda;
    out.bound = out.lambda < 1 - 1e-12
                    ? 8 * std::sqrt(2 * p.a) * (1 - l2) / (nn * nn) * kappa * out.scal * out.scal
                    : 0.0;
    const SymmetricForm ric = ricci(s);
    const Spectrum sp = ric.spectrum();
    out.ric_sum = sp.values(0) + sp.values(1);
    out.ric_bound = 2 * (1 - p.zeta) / nn * out.scal;
    if (out.ric_sum > 1e-9 * out.scal) {
      out.wedge_min = min_isotropic(kulkarni_nomizu(ric, ric), ConeMode::PIC, b).min_value;
    }
    return out;
  });

  const std::string grid = "samples:" + std::to_string(samples);
  double dz_best = kInf, dz_l = 0, dz_r = 0, rb_best = kInf, rb_l = 0, rb_r = 0;
  double wedge_best = kInf;
  int built = 0, lambda_one = 0, wedge_checked = 0;
  for (const Sample& s : res) {
    if (!s.ok) continue;
    ++built;
    if (s.lambda >= 1 - 1e-12) ++lambda_one;
    const double s2 = s.scal * s.scal;
    if ((s.dz - s.bound) / s2 < dz_best) dz_best = (s.dz - s.bound) / s2, dz_l = s.bound, dz_r = s.dz;
    if ((s.ric_sum - s.ric_bound) / s.scal < rb_best) {
      rb_best = (s.ric_sum - s.ric_bound) / s.scal, rb_l = s.ric_bound, rb_r = s.ric_sum;
    }
    if (!std::isnan(s.wedge_min)) {
      ++wedge_checked;
      wedge_best = std::min(wedge_best, s.wedge_min / s2);
    }
  }
  const std::string prov = "seed=" + std::to_string(seed) + "_built=" + std::to_string(built) +
                           "_lambda1=" + std::to_string(lambda_one) + "_zeta=" +
                           fmt("%.9g", p.zeta) + (p.include_gamma_factor ? "_factor_on" : "_factor_off");
  if (built == 0) {
    return {skipped_record("second_cone_dZ", n, grid, prov),
            skipped_record("two_smallest_ricci", n, grid, prov),
            skipped_record("ric_wedge_positive", n, grid, prov)};
  }
  std::vector<CheckRecord> out;
  out.push_back(make_record("second_cone_dZ", n, grid, dz_l, dz_r, dz_best, 1e-6,
                            prov + "_margin_over_scal^2"));
  out.push_back(make_record("two_smallest_ricci", n, grid, rb_l, rb_r, rb_best, 1e-12,
                            prov + "_margin_over_scal"));
  if (wedge_checked == 0) {
    out.push_back(skipped_record("ric_wedge_positive", n, grid, prov + "_no_positive_pair_sum"));
  } else {
    out.push_back(make_record("ric_wedge_positive", n, grid, 0.0, wedge_best, wedge_best, 0.0,
                              prov + "_checked=" + std::to_string(wedge_checked)));
  }
  return out;
}

CheckRecord check_glue_membership(int n, int samples, std::uint64_t seed,
                                  const OptimizerBudget& budget) {
  if (samples < 1) throw std::invalid_argument("check_glue_membership: samples must be >= 1");
  const FirstConeParams p1 = first_cone_params(n, first_b_max(n));
  const SecondConeParams p2 = second_cone_params(n, second_b_max(n));
  OptimizerBudget b = budget;
  b.workers = 1;
  std::vector<std::string> errors(static_cast<std::size_t>(samples));
  auto rs = parallel_map<CheckRecord>(errors.size(), budget.workers, [&](std::size_t i) {
    try {
      const SampledCertificate c = sample_boundary_cond3(p1, derive_seed(seed, i));
      const CurvatureTensor s2 = l_ab_inverse(l_ab(c.cert.S, p1.lab()), p2.lab());
      const double zmin = second_cone_z_min(s2, p2, b).min_value;
      const double scal = scalar(s2);
      return make_record("glue_membership", n, "", 0.0, zmin, zmin / scal, 1e-9,
                         "margin_over_scal");
    } catch (const std::exception& e) {
      errors[i] = e.what();
      return CheckRecord{};
    }
  });
  return aggregate("glue_membership", n, samples, seed, rs, errors, 1e-9);
}

// ODE ------------------------------------------------------------------------

EvolutionState::EvolutionState(CurvatureTensor s, CurvatureTensor t_, LabParams lab_,
                               double epsilon_, std::optional<FirstConeParams> cone_)
    : S(std::move(s)), T(t_.with_bianchi_expected(false)), lab(lab_), epsilon(epsilon_),
      cone(std::move(cone_)) {
  require_same_dimension(S.dim(), T.dim(), "EvolutionState");
  require_same_dimension(S.dim(), lab.n, "EvolutionState");
  if (cone) require_same_dimension(S.dim(), cone->n, "EvolutionState");
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("EvolutionState: epsilon must be finite and >= 0");
  }
}

std::string trajectory_line(const TrajectoryPoint& p) {
  std::string out = "t=" + fmt("%.16e", p.t) + " scal=" + fmt("%.16e", p.scal);
  for (int k = 0; k < 4; ++k) out += " m" + std::to_string(k + 1) + "=" + fmt("%.16e", p.margin[k]);
  out += " norm=" + fmt("%.16e", p.norm);
  return out;
}

namespace {

struct Rates {
  CurvatureTensor ds, dt;
};

Rates rates(const CurvatureTensor& s, const LabParams& lab, double eps,
            const CurvatureTensor& round) {
  const double scal = scalar(s);
  return {evolution_rhs(s, lab), square(s) + (eps * scal * scal) * round};
}

TrajectoryPoint observe(const EvolutionState& st, const OptimizerBudget& budget) {
  TrajectoryPoint pt;
  pt.t = st.t;
  pt.scal = scalar(st.S);
  pt.norm = st.S.norm();
  pt.margin.fill(kNaN);
  if (st.cone && pt.scal >= 0) {
    const ConditionReport rep =
        check_first_cone_cert(FirstConeCertificate(st.S, st.T), *st.cone, budget);
    pt.margin = rep.margin;
  }
  return pt;
}

}  // namespace

Trajectory ode_integrate(const EvolutionState& state, double dt, int steps,
                         const IntegrateOptions& opts) {
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("ode_integrate: dt must be > 0");
  if (steps < 1) throw std::invalid_argument("ode_integrate: steps must be >= 1");
  const int every = std::max(opts.record_every, 1);
  const CurvatureTensor round = round_tensor(state.S.dim());
  Trajectory tr{{}, state, 0, false};
  EvolutionState& cur = tr.final_state;
  tr.points.push_back(observe(cur, opts.margin_budget));
  for (int k = 1; k <= steps; ++k) {
    const CurvatureTensor& s = cur.S;
    const CurvatureTensor& t = cur.T;
    const Rates k1 = rates(s, cur.lab, cur.epsilon, round);
    const Rates k2 = rates(s + (0.5 * dt) * k1.ds, cur.lab, cur.epsilon, round);
    const Rates k3 = rates(s + (0.5 * dt) * k2.ds, cur.lab, cur.epsilon, round);
    const Rates k4 = rates(s + dt * k3.ds, cur.lab, cur.epsilon, round);
    const double w = dt / 6;
    CurvatureTensor s_next = s + w * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
    CurvatureTensor t_next = t + w * (k1.dt + 2.0 * k2.dt + 2.0 * k3.dt + k4.dt);
    const double norm = s_next.norm();
    if (!std::isfinite(norm) || norm > kBlowUpNorm) {
      tr.truncated = true;
      break;
    }
    cur.S = std::move(s_next);
    cur.T = t_next.with_bianchi_expected(false);
    cur.t = state.t + k * dt;
    tr.steps_taken = k;
    if (k % every == 0 || k == steps) tr.points.push_back(observe(cur, opts.margin_budget));
  }
  if (tr.truncated && (tr.points.empty() || tr.points.back().t != cur.t)) {
    tr.points.push_back(observe(cur, opts.margin_budget));
  }
  return tr;
}

}  // namespace pinch
