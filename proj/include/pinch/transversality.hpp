#pragma once
// Sampled transversality checks for both pinching families, and the coupled
// (S, T) reaction ODE
//   dS/dt = Q(S) + D_{a,b}(S),   dT/dt = S^2 + eps scal(S)^2 id^id.
//
// First-family certificates are built from a nonnegative base operator S0
// with scal(S0) = 1 (a mixture of id^id, sums A^A with A >= 0, and a rotated
// cylinder):
//   S = S0 + c id^id,   T = theta S0.
// Along id^id, Ric shifts by 2(n-1)c id and scal by 2n(n-1)c, so condition 3
// is affine in c; the PIC value of id^id is 8 on every probe, so condition 2
// has margin (1 - theta) m0 + 8c with m0 a certified lower bound for the PIC
// minimum of S0. Condition 4 only sees T through sqrt(theta), and its
// threshold in theta is found by a Dinkelbach iteration.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pinch/check_record.hpp"
#include "pinch/membership.hpp"
#include "pinch/pinching.hpp"

namespace pinch {

// c with condition 3 of S + c id^id exactly active for the two lowest Ricci
// eigenvalues of S.
double cond3_activation_shift(const CurvatureTensor& s, double gamma);

struct SampledCertificate {
  FirstConeCertificate cert;
  // Condition margins: 1 and 3 exact, 2 a certified lower bound, 4 from the
  // pair optimizer.
  std::array<double, 4> margin{};
  Eigen::MatrixXd cond3_pair;
  Eigen::MatrixXd cond4_pair;
  double shift = 0;  // c
  double theta = 0;
  double scal = 0;
  int attempts = 0;
};

enum class ActiveCondition { none, cond3, cond4 };

// Draws certificates until one is accepted; throws std::runtime_error when the
// rejection budget is exhausted. `active` selects which condition is put on
// the boundary; every other margin stays above 1e-6 scal(S).
SampledCertificate sample_certificate(const FirstConeParams& p, ActiveCondition active,
                                      std::uint64_t seed, int max_attempts = 200);
inline SampledCertificate sample_boundary_cond3(const FirstConeParams& p, std::uint64_t seed,
                                                int max_attempts = 200) {
  return sample_certificate(p, ActiveCondition::cond3, seed, max_attempts);
}
inline SampledCertificate sample_boundary_cond4(const FirstConeParams& p, std::uint64_t seed,
                                                int max_attempts = 200) {
  return sample_certificate(p, ActiveCondition::cond4, seed, max_attempts);
}

// eps = (1/2) min_S minPIC(D_{a,b}(S)) / (8 scal(S)^2), clamped below at 1e-12.
struct EpsilonEstimate {
  double epsilon = 0;
  double min_ratio = 0;  // minPIC(D) / (8 scal^2) before halving
  int samples = 0;
  std::uint64_t seed = 0;
  std::string provenance;
};
// Samples alternate between interior and condition-3-active certificates.
// Throws std::invalid_argument for samples < 1 and std::runtime_error when a
// sampled D_{a,b}(S) has negative PIC minimum.
EpsilonEstimate estimate_epsilon(const FirstConeParams& p, int samples, std::uint64_t seed,
                                 const OptimizerBudget& budget = {});
EpsilonEstimate estimate_epsilon(const FirstConeParams& p,
                                 const std::vector<CurvatureTensor>& tensors,
                                 const OptimizerBudget& budget = {});

// 2(a - b) + gamma (1 - 2b) against b (1 + (n-2)b)^2 / (2 + (n-3)b).
CheckRecord check_cond3_identity(const FirstConeParams& p);

// (1/2) d/dt (Ric_11 + Ric_22 + (2 gamma / n) scal) along dS/dt = Q(S) + D(S)
// at a certificate whose condition 3 is active, divided by scal^2. When the
// lowest Ricci eigenvalues are degenerate the derivative is minimized over the
// eigenspaces. Throws std::invalid_argument for a non-active certificate.
CheckRecord check_prop_cond3_derivative(const FirstConeCertificate& cert,
                                        const FirstConeParams& p);

// d/dt sqrt(omega scal tau_T) - d/dt (Ric_22 - Ric_11) at the pair where
// condition 4 is active, with dT/dt = S^2 + eps scal^2 id^id, divided by
// scal^2. The record also carries the spot check
//   d/dt gap < (sqrt(omega) sigma / 2) tau_{S^2} + sqrt(omega) / (2 sigma) (P|Ric|^2 + Q scal^2)
// with sigma = sqrt(scal / tau_T); it fails if either inequality fails.
// Skipped when tau_T vanishes at the pair.
CheckRecord check_prop_cond4_derivative(const FirstConeCertificate& cert,
                                        const FirstConeParams& p, double epsilon);

// Aggregates over `samples` sampled active certificates: one record whose
// margin is the minimum, failing on any violation or sampler failure.
CheckRecord sweep_cond3_derivative(const FirstConeParams& p, int samples, std::uint64_t seed,
                                   int workers = 1);
CheckRecord sweep_cond4_derivative(const FirstConeParams& p, int samples, std::uint64_t seed,
                                   double epsilon, int workers = 1);

// Where (S - T) has a near-zero PIC value, S# must be >= -1e-7 |S|^2 there.
// Skipped when no probe of S - T is within 1e-8 |S - T| of zero.
CheckRecord check_prop_sharp_tangent(const CurvatureTensor& s, const CurvatureTensor& t,
                                     const OptimizerBudget& budget = {});
// Random T >= 0 and S = T + B with B on the PIC boundary.
CheckRecord sweep_sharp_tangent(int n, int samples, std::uint64_t seed,
                                const OptimizerBudget& budget = {});

// Boundary points of the second family: S0 shifted along id^id until min Z = 0,
// kept when l_{a_max,b_max}^{-1}(l_{a,b}(S)) satisfies condition 3 at b_max.
// Returns three records:
//   second_cone_dZ       dZ/dt - lower bound at the zero probe (lambda < 1
//                        bound from the proof, 0 at lambda = 1), / scal^2
//   two_smallest_ricci   Ric_11 + Ric_22 - 2(1 - zeta)/n scal, / scal
//   ric_wedge_positive   minPIC(Ric ^ Ric) / scal^2 when Ric_11 + Ric_22 > 0
std::vector<CheckRecord> check_secondcone_dZ(const SecondConeParams& p, int samples,
                                             std::uint64_t seed,
                                             const OptimizerBudget& budget = {});

// Condition-3-active certificates S1 at b_max mapped into the second family
// at b~_max: min Z(l_{a~,b~}^{-1}(l_{a_max,b_max}(S1))) / scal >= -tol.
CheckRecord check_glue_membership(int n, int samples, std::uint64_t seed,
                                  const OptimizerBudget& budget = {});

// Coupled ODE --------------------------------------------------------------

struct EvolutionState {
  CurvatureTensor S;
  CurvatureTensor T;
  double t = 0;
  LabParams lab;
  double epsilon = 0;
  // When set, trajectory points carry the four condition margins.
  std::optional<FirstConeParams> cone;

  // Throws unless dimensions match and epsilon >= 0.
  EvolutionState(CurvatureTensor s, CurvatureTensor t_, LabParams lab_, double epsilon_,
                 std::optional<FirstConeParams> cone_ = std::nullopt);
};

struct TrajectoryPoint {
  double t = 0;
  double scal = 0;
  double norm = 0;
  std::array<double, 4> margin{};  // NaN without cone parameters
};
std::string trajectory_line(const TrajectoryPoint& p);

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  EvolutionState final_state;
  int steps_taken = 0;
  bool truncated = false;  // |S| exceeded 1e12 or became non-finite
};

struct IntegrateOptions {
  int record_every = 1;
  OptimizerBudget margin_budget{8, 60};
};

inline constexpr double kBlowUpNorm = 1e12;

// Classical RK4 on (S, T). Throws std::invalid_argument unless dt > 0 and
// steps >= 1.
Trajectory ode_integrate(const EvolutionState& state, double dt, int steps,
                         const IntegrateOptions& opts = {});

}  // namespace pinch
