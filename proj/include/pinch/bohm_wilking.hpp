#pragma once
// The linear map l_{a,b}, its inverse, and the correction D_{a,b} that appears
// when the reaction ODE dR/dt = Q(R) is conjugated by l_{a,b}:
//   D_{a,b}(S) = l_{a,b}^{-1}(Q(l_{a,b}(S))) - Q(S).
// If R solves dR/dt = Q(R) then S = l_{a,b}^{-1}(R) solves dS/dt = Q(S) + D_{a,b}(S).

#include "pinch/curvature.hpp"

namespace pinch {

struct LabParams {
  int n = 0;
  double a = 0.0;
  double b = 0.0;

  // Throws std::invalid_argument when l_{a,b} is singular or n is out of range.
  LabParams(int n_, double a_, double b_);

  // Factor by which l_{a,b} multiplies scal.
  double scal_factor() const { return 1.0 + 2.0 * (n - 1) * a; }
  // Factor by which l_{a,b} multiplies Ric_0.
  double ric0_factor() const { return 1.0 + (n - 2) * b; }
  // Parameters of l_{a,b}^{-1}.
  LabParams inverse() const;
};

// R + b Ric(R) ^ id + (a - b)/n scal(R) id ^ id
CurvatureTensor l_ab(const CurvatureTensor& r, const LabParams& p);
CurvatureTensor l_ab_inverse(const CurvatureTensor& r, const LabParams& p);

CurvatureTensor d_ab_closed_form(const CurvatureTensor& s, const LabParams& p);
// Literal definition; cross-check for d_ab_closed_form.
CurvatureTensor d_ab_conjugation_oracle(const CurvatureTensor& s, const LabParams& p);

SymmetricForm ricci_of_dab(const CurvatureTensor& s, const LabParams& p);
double scal_of_dab(const CurvatureTensor& s, const LabParams& p);

// Coefficients of d scal/dt = P |Ric|^2 + Q scal^2 under dS/dt = Q(S) + D_{a,b}(S).
struct ScalCoefficients {
  double P;
  double Q;
};
ScalCoefficients scal_coefficients(int n, double a, double b);

CurvatureTensor evolution_rhs(const CurvatureTensor& s, const LabParams& p);

struct ScalEvolutionCheck {
  double lhs;  // scal(evolution_rhs(S))
  double rhs;  // P |Ric(S)|^2 + Q scal(S)^2
};
ScalEvolutionCheck scal_evolution_check(const CurvatureTensor& s, const LabParams& p);

}  // namespace pinch
