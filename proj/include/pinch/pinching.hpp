#pragma once
// The two pinching families and their glued concatenation.
//
// First family (0 < b <= b_max = 1/(2n+2)): a cone E(b) of curvature
// operators S that admit a certificate T with
//   (1) T >= 0 on Lambda^2,
//   (2) S - T weakly PIC,
//   (3) Ric(S)_11 + Ric(S)_22 + (2 gamma / n) scal(S) >= 0 for all pairs,
//   (4) Ric(S)_22 - Ric(S)_11 <= sqrt(omega scal(S) tau_T(e1, e2)) for all pairs,
// where tau_T(e1, e2) = sum_{p >= 3} (T_1p1p + T_2p2p).
//
// Second family (0 < b <= b~_max = 1/(5n)): operators with
//   Z = S_1313 + l^2 S_1414 + S_2323 + l^2 S_2424 - 2 l S_1234
//       + sqrt(2a) (1 - l^2) (Ric_11 + Ric_22) >= 0
// for every four-frame and l in [0, 1], with a = b + (n-2) b^2 / 2.

#include <array>
#include <string>
#include <string_view>

#include "pinch/bohm_wilking.hpp"
#include "pinch/membership.hpp"

namespace pinch {

inline double first_b_max(int n) { return 1.0 / (2.0 * n + 2.0); }
inline double second_b_max(int n) { return 1.0 / (5.0 * n); }
inline double second_a(int n, double b) { return b + 0.5 * (n - 2) * b * b; }
// Right end of the glued parameter interval.
inline double glue_length(int n) { return first_b_max(n) + second_b_max(n); }

struct FirstConeParams {
  int n = 0;
  double b = 0, a = 0, gamma = 0, rho = 0, omega = 0;
  double A_coef = 0, P_coef = 0, Q_coef = 0;
  double b_max = 0;
  // Set when n is outside 9..11, where the family is not known to be invariant.
  bool outside_verified_range = false;

  LabParams lab() const { return LabParams(n, a, b); }
};

// Throws std::invalid_argument unless 0 < b <= b_max and 5 <= n <= kMaxDimension,
// or if rho(b) <= 0 (omega undefined).
FirstConeParams first_cone_params(int n, double b);

// Coefficients in the monotonicity lemma for the first family.
double g_func(int n, double b);
double h_func(int n, double b);

// (2b + (n-2) b^2 - 2a) x y + 2a (x+2)(y+2) + b^2 (x^2 + y^2)
double f_quadratic(double x, double y, const FirstConeParams& p);

struct SecondConeParams {
  int n = 0;
  double b = 0, a = 0, zeta = 0;
  double a_max = 0, gamma_max = 0, b_max = 0, b_tilde_max = 0;
  bool include_gamma_factor = true;
  bool include_2424 = true;

  LabParams lab() const { return LabParams(n, a, b); }
};

// zeta = (1+2(n-1)a)/(1+2(n-1)a_max) * (1+(n-2)b_max)/(1+(n-2)b) * (1+gamma_max)^t
// with t = 1 when include_gamma_factor. Throws unless 0 < b <= b~_max.
SecondConeParams second_cone_params(int n, double b, bool include_gamma_factor = true,
                                    bool include_2424 = true);
inline double zeta(const SecondConeParams& p) { return p.zeta; }

struct FirstConeCertificate {
  CurvatureTensor S;
  CurvatureTensor T;  // bianchi_expected = false

  FirstConeCertificate(CurvatureTensor s, CurvatureTensor t);
};

// sum_{p >= 3} (T_1p1p + T_2p2p) for the orthonormal pair given as the columns of e.
double transverse_sum(const CurvatureTensor& t, const Eigen::MatrixXd& e);

struct ConditionReport {
  std::array<double, 4> margin{};
  MembershipReport cond2;
  Eigen::MatrixXd cond3_pair;  // n x 2, two lowest Ricci eigenvectors
  Eigen::MatrixXd cond4_pair;  // n x 2, minimizing pair for condition 4
  double scal = 0;

  bool holds(double tol) const;
};

// Margins of the four conditions; each is >= 0 iff the condition holds (up to
// the optimizer for conditions 2 and 4). Throws on dimension mismatch and when
// scal(S) < 0.
ConditionReport check_first_cone_cert(const FirstConeCertificate& cert, const FirstConeParams& p,
                                      const OptimizerBudget& budget = {});

// Condition 4 margin at a fixed pair.
double cond4_margin_at(const CurvatureTensor& s, const CurvatureTensor& t, double omega,
                       const Eigen::MatrixXd& pair);
// Minimum of the condition 4 margin over pairs: Ricci eigen-pair enumeration,
// then local refinement of the best few candidates.
std::pair<double, Eigen::MatrixXd> cond4_min(const CurvatureTensor& s, const CurvatureTensor& t,
                                             double omega, int iterations = 200);

IsotropicFunctional second_cone_functional(const CurvatureTensor& s, const SecondConeParams& p);
MembershipReport second_cone_z_min(const CurvatureTensor& s, const SecondConeParams& p,
                                   const OptimizerBudget& budget = {});

enum class Family { first, second };
std::string_view to_string(Family f);
struct GluePoint {
  Family family;
  double local_b;
};
// Throws unless 0 < beta < b_max + b~_max.
GluePoint glue_family(int n, double beta);

// key = value lines, 17 significant digits.
std::string parameter_report(const FirstConeParams& p);
std::string parameter_report(const SecondConeParams& p);

}  // namespace pinch
