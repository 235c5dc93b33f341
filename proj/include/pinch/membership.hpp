#pragma once
// Membership in C_PIC, C_PIC1, C_PIC2 by minimizing isotropic functionals over
// orthonormal four-frames and (lambda, mu) in [0,1]^2.
//
// For a fixed frame the functional is a polynomial of bidegree (2,2) in
// (lambda, mu) and is minimized exactly; the frame is optimized by multi-start
// Riemannian descent on the Stiefel manifold V_4(R^n) with a Gram-Schmidt
// retraction. Results are best-found upper bounds on the infimum.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "pinch/curvature.hpp"

namespace pinch {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct OptimizerBudget {
  int starts = 64;
  int iterations = 200;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  double tol = 1e-9;  // membership predicate: min_value >= -tol
};

enum class SearchMethod { scan, optimized };
std::string_view to_string(SearchMethod m);

struct MembershipReport {
  ConeMode mode = ConeMode::PIC;
  double min_value = 0.0;
  IsotropicProbe argmin_probe;
  SearchMethod method = SearchMethod::optimized;
  int samples_used = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;

  bool member() const { return min_value >= -tol; }
};

// Components of a tensor in a four-frame, in the notation of the functional
//   F = c13 + l^2 c14 + m^2 c23 + l^2 m^2 c24 - 2 l m x + w (1 - l^2) h12
// where x = R(e1^e3, e2^e4) - R(e1^e4, e2^e3) and h12 = H(e1,e1) + H(e2,e2).
struct FrameComponents {
  double c13 = 0, c14 = 0, c23 = 0, c24 = 0, x = 0, h12 = 0;
};

// An isotropic-type functional of a curvature-type tensor. The optional H
// term is the first-order correction of the second pinching family; with
// h_weight = 0 this is R(phi, conj phi) restricted by the mode.
class IsotropicFunctional {
 public:
  IsotropicFunctional(const CurvatureTensor& r, ConeMode mode);
  IsotropicFunctional(const CurvatureTensor& r, ConeMode mode, const SymmetricForm& h,
                      double h_weight, bool include_2424 = true);

  int dim() const { return n_; }
  ConeMode mode() const { return mode_; }

  FrameComponents components(const Eigen::MatrixXd& frame) const;
  double value(const FrameComponents& c, double lambda, double mu) const;
  double value(const IsotropicProbe& probe) const;

  // Exact minimum over the admissible (lambda, mu) for this mode.
  struct Inner {
    double value, lambda, mu;
  };
  Inner minimize_inner(const FrameComponents& c) const;

  // Euclidean gradient of F with respect to the n x 4 frame at fixed (lambda, mu).
  Eigen::MatrixXd frame_gradient(const Eigen::MatrixXd& frame, double lambda, double mu) const;

  // Frames built from Ricci eigenvectors; good starting points for most tensors.
  std::vector<Eigen::MatrixXd> structured_starts() const;

  const Eigen::MatrixXd& pair_matrix() const { return pair_; }

 private:
  int n_;
  ConeMode mode_;
  Eigen::MatrixXd pair_;
  Eigen::MatrixXd h_;
  double h_weight_ = 0.0;
  double w2424_ = 1.0;
  Eigen::MatrixXd ricci_vectors_;  // ascending Ricci eigenvalues
};

// Multi-start minimization. extra_starts are tried before the structured and
// random starts and count against budget.starts.
MembershipReport minimize_functional(const IsotropicFunctional& f, const OptimizerBudget& budget,
                                     const std::vector<Eigen::MatrixXd>& extra_starts = {});

// Local descent from a single frame; exposed for warm-started callers.
MembershipReport descend_from(const IsotropicFunctional& f, const Eigen::MatrixXd& frame,
                              int iterations);

MembershipReport min_isotropic(const CurvatureTensor& r, ConeMode mode,
                               const OptimizerBudget& budget = {});

// Exhaustive evaluation over every ordered coordinate four-frame (with both
// orientations of e4) plus `resolution` quasi-random frames from a Halton
// sequence. The quasi-random part is skipped for n > 6.
MembershipReport brute_force_frame_scan(const CurvatureTensor& r, ConeMode mode, int resolution);
MembershipReport brute_force_frame_scan(const IsotropicFunctional& f, int resolution);

// min_isotropic of R - theta scal(R) id^id + N id^id.
MembershipReport shifted_membership(const CurvatureTensor& r, ConeMode mode, double theta,
                                    double shift_n, const OptimizerBudget& budget = {});

// Moves a one-parameter family of functionals F_c = F_0 + c G (G > 0 on every
// probe) onto the boundary of its cone: finds c with min F_c = 0. The minimum
// is concave and increasing in c, so the Newton-type update
//   c <- c - min F_c / G(argmin)
// converges monotonically once it is left of the root.
struct ShiftResult {
  double shift = 0.0;
  MembershipReport report;  // minimization of F_shift
  int iterations = 0;
  bool converged = false;
};
ShiftResult boundary_shift(const std::function<IsotropicFunctional(double)>& family,
                           const std::function<double(const IsotropicProbe&)>& slope, double c0,
                           const OptimizerBudget& budget, double abs_tol, int max_iter = 40);

}  // namespace pinch
