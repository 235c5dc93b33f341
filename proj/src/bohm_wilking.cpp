#include "pinch/bohm_wilking.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pinch {

LabParams::LabParams(int n_, double a_, double b_) : n(Dimension(n_).value()), a(a_), b(b_) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("l_ab parameters must be finite");
  }
  if (scal_factor() == 0.0 || ric0_factor() == 0.0) {
    throw std::invalid_argument("l_ab is singular for a=" + std::to_string(a) +
                                ", b=" + std::to_string(b));
  }
}

LabParams LabParams::inverse() const {
  // l_{a,b} scales the scal part by 1 + 2(n-1)a and the Ric_0 part by
  // 1 + (n-2)b and fixes the Weyl part, so the inverse has the reciprocal factors.
  const double b_inv = -b / ric0_factor();
  const double a_inv = -a / scal_factor();
  return LabParams(n, a_inv, b_inv);
}

CurvatureTensor l_ab(const CurvatureTensor& r, const LabParams& p) {
  require_same_dimension(r.dim(), p.n, "l_ab");
  const int n = p.n;
  const SymmetricForm id = SymmetricForm::identity(n);
  const SymmetricForm ric = ricci(r);
  const double scal = ric.trace();
  return r + p.b * kulkarni_nomizu(ric, id) +
         ((p.a - p.b) / n * scal) * kulkarni_nomizu(id, id);
}

CurvatureTensor l_ab_inverse(const CurvatureTensor& r, const LabParams& p) {
  return l_ab(r, p.inverse());
}

CurvatureTensor d_ab_closed_form(const CurvatureTensor& s, const LabParams& p) {
  require_same_dimension(s.dim(), p.n, "d_ab_closed_form");
  const int n = p.n;
  const double a = p.a;
  const double b = p.b;
  const SymmetricForm id = SymmetricForm::identity(n);
  const SymmetricForm ric = ricci(s);
  const SymmetricForm ric0 = ric.tracefree();
  const double ric0_sq = ric0.norm_squared();
  const double c_last = (n * b * b * (1 - 2 * b) - 2 * (a - b) * (1 - 2 * b + n * b * b)) /
                        (n * p.scal_factor());
  return (2 * b + (n - 2) * b * b - 2 * a) * kulkarni_nomizu(ric0, ric0) +
         (2 * a) * kulkarni_nomizu(ric, ric) +
         (2 * b * b) * kulkarni_nomizu(ric0.squared(), id) +
         (c_last * ric0_sq) * kulkarni_nomizu(id, id);
}

CurvatureTensor d_ab_conjugation_oracle(const CurvatureTensor& s, const LabParams& p) {
  require_same_dimension(s.dim(), p.n, "d_ab_conjugation_oracle");
  return l_ab_inverse(q_quadratic(l_ab(s, p)), p) - q_quadratic(s);
}

SymmetricForm ricci_of_dab(const CurvatureTensor& s, const LabParams& p) {
  require_same_dimension(s.dim(), p.n, "ricci_of_dab");
  const int n = p.n;
  const double a = p.a;
  const double b = p.b;
  const SymmetricForm id = SymmetricForm::identity(n);
  const SymmetricForm ric = ricci(s);
  const double scal = ric.trace();
  const double ric0_sq = ric.tracefree().norm_squared();
  const double c_ric0 = 2 * (n * n * b * b - 2 * (n - 1) * (a - b) * (1 - 2 * b)) /
                        (n * p.scal_factor());
  return (-4 * b) * ric.squared() + (4.0 / n * (2 * b + (n - 2) * a) * scal) * ric +
         (c_ric0 * ric0_sq + 4.0 / (n * n) * (a - b) * scal * scal) * id;
}

double scal_of_dab(const CurvatureTensor& s, const LabParams& p) {
  require_same_dimension(s.dim(), p.n, "scal_of_dab");
  const int n = p.n;
  const double a = p.a;
  const double b = p.b;
  const SymmetricForm ric = ricci(s);
  const double scal = ric.trace();
  const double ric_sq = ric.norm_squared();
  const double ric0_sq = ric.tracefree().norm_squared();
  return -4 * b * ric_sq + 4.0 / n * (b + (n - 1) * a) * scal * scal +
         2 * (n * n * b * b - 2 * (n - 1) * (a - b) * (1 - 2 * b)) / p.scal_factor() * ric0_sq;
}

ScalCoefficients scal_coefficients(int n, double a, double b) {
  const double sa = 1 + 2 * (n - 1) * a;
  const double sb = 1 + (n - 2) * b;
  return {2 * sb * sb / sa, 2 * (sa * sa - sb * sb) / (n * sa)};
}

CurvatureTensor evolution_rhs(const CurvatureTensor& s, const LabParams& p) {
  return (q_quadratic(s) + d_ab_closed_form(s, p)).with_bianchi_expected(s.bianchi_expected());
}

ScalEvolutionCheck scal_evolution_check(const CurvatureTensor& s, const LabParams& p) {
  const SymmetricForm ric = ricci(s);
  const double scal = ric.trace();
  const ScalCoefficients c = scal_coefficients(p.n, p.a, p.b);
  return {scalar(evolution_rhs(s, p)), c.P * ric.norm_squared() + c.Q * scal * scal};
}

}  // namespace pinch
