#pragma once
// Algebraic curvature operators on R^n: storage, contractions, the
// Kulkarni-Nomizu product and the reaction quadratic Q(R) = R^2 + R#.
//
// Conventions (orthonormal frame, indices 0-based in code):
//   (A ^ B)_{ijkl} = A_ik B_jl - A_il B_jk - A_jk B_il + A_jl B_ik
//   Ric_{ik}       = sum_j R_{ijkj}
//   (R^2)_{ijkl}   = sum_{p,q} R_{ijpq} R_{klpq}
//   (R#)_{ijkl}    = 2 sum_{p,q} (R_{ipkq} R_{jplq} - R_{iplq} R_{jpkq})
// With these, id ^ id has sectional curvature 2 and Q(id ^ id) = 4(n-1) id ^ id.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace pinch {

inline constexpr int kMinDimension = 4;
inline constexpr int kMaxDimension = 32;

class Dimension {
 public:
  explicit Dimension(int n);
  int value() const { return n_; }
  int pairs() const { return n_ * (n_ - 1) / 2; }
  friend bool operator==(Dimension, Dimension) = default;

 private:
  int n_;
};

// Throws std::invalid_argument when the two dimensions differ.
void require_same_dimension(int n1, int n2, std::string_view what);

// Index of the basis two-form e_i ^ e_j (i < j) in the lexicographic basis of
// Lambda^2.
inline int pair_index(int n, int i, int j) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

// Coordinates of x ^ y in the orthonormal basis {e_i ^ e_j : i < j}.
Eigen::VectorXd wedge(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct Spectrum {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns match values
};

class SymmetricForm {
 public:
  SymmetricForm() = default;
  // Symmetrizes (M + M^T) / 2; M must be square with 1 <= n <= kMaxDimension.
  explicit SymmetricForm(const Eigen::MatrixXd& m);

  static SymmetricForm zero(int n);
  static SymmetricForm identity(int n);
  static SymmetricForm diagonal(std::span<const double> d);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const { return m_; }

  double trace() const { return m_.trace(); }
  double norm_squared() const { return m_.squaredNorm(); }
  double quadratic(const Eigen::VectorXd& x) const { return x.dot(m_ * x); }
  SymmetricForm tracefree() const;
  SymmetricForm squared() const;
  Spectrum spectrum() const;

  friend SymmetricForm operator+(const SymmetricForm& a, const SymmetricForm& b);
  friend SymmetricForm operator-(const SymmetricForm& a, const SymmetricForm& b);
  friend SymmetricForm operator*(double c, const SymmetricForm& a);

 private:
  Eigen::MatrixXd m_;
};

// Rank-4 tensor with R_{ijkl} = -R_{jikl} = -R_{ijlk} = R_{klij}. Immutable;
// every constructor symmetrizes, so the pair symmetries hold exactly.
class CurvatureTensor {
 public:
  CurvatureTensor() = default;

  static CurvatureTensor zero(int n, bool bianchi_expected = true);
  // raw is indexed ((i*n + j)*n + k)*n + l; projected onto the pair symmetries.
  static CurvatureTensor from_components(int n, std::span<const double> raw,
                                         bool bianchi_expected);
  // Symmetric N x N matrix of R(e_i ^ e_j, e_k ^ e_l), i < j, k < l.
  static CurvatureTensor from_pair_matrix(const Eigen::MatrixXd& m,
                                          bool bianchi_expected);

  int dim() const { return n_; }
  bool bianchi_expected() const { return bianchi_; }
  CurvatureTensor with_bianchi_expected(bool flag) const;

  double operator()(int i, int j, int k, int l) const {
    return full_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
  }
  std::span<const double> components() const { return full_; }
  const Eigen::MatrixXd& pair_matrix() const { return pair_; }

  // Frobenius norm over all n^4 components.
  double norm() const;
  // max |R_ijkl + R_iklj + R_iljk| over all index quadruples.
  double bianchi_defect() const;
  // bianchi_defect() <= rel_tol * max(norm(), 1e-300)
  bool satisfies_bianchi(double rel_tol = 1e-9) const;

  friend CurvatureTensor operator+(const CurvatureTensor& a, const CurvatureTensor& b);
  friend CurvatureTensor operator-(const CurvatureTensor& a, const CurvatureTensor& b);
  friend CurvatureTensor operator*(double c, const CurvatureTensor& a);

 private:
  CurvatureTensor(int n, Eigen::MatrixXd pair, bool bianchi);

  int n_ = 0;
  bool bianchi_ = true;
  Eigen::MatrixXd pair_;
  std::vector<double> full_;
};

// Orthonormal four-frame, stored as the columns of an n x 4 matrix.
class FourFrame {
 public:
  FourFrame() = default;
  // Re-orthonormalizes the columns (modified Gram-Schmidt, two passes).
  // Throws std::invalid_argument on rank deficiency or n < 4.
  explicit FourFrame(const Eigen::MatrixXd& columns);
  static FourFrame coordinate(int n, int i1, int i2, int i3, int i4);

  int dim() const { return static_cast<int>(e_.rows()); }
  Eigen::VectorXd e(int k) const { return e_.col(k); }
  const Eigen::MatrixXd& matrix() const { return e_; }

 private:
  Eigen::MatrixXd e_;
};

// Orthonormalizes the columns of m in place. Returns false on rank deficiency.
bool orthonormalize_columns(Eigen::MatrixXd& m);

struct IsotropicProbe {
  FourFrame frame;
  double lambda = 1.0;
  double mu = 1.0;

  IsotropicProbe() = default;
  IsotropicProbe(FourFrame f, double lambda_, double mu_);
};

enum class ConeMode { PIC, PIC1, PIC2 };
std::string_view to_string(ConeMode mode);
ConeMode parse_cone_mode(std::string_view s);

// Operations ---------------------------------------------------------------

CurvatureTensor kulkarni_nomizu(const SymmetricForm& a, const SymmetricForm& b);

SymmetricForm ricci(const CurvatureTensor& r);
double scalar(const CurvatureTensor& r);
SymmetricForm ricci_tracefree(const CurvatureTensor& r);

CurvatureTensor square(const CurvatureTensor& r);
CurvatureTensor sharp(const CurvatureTensor& r);
CurvatureTensor q_quadratic(const CurvatureTensor& r);

// R# evaluated through the structure constants of so(n):
//   R#(x, y) = sum_{g,d} <[R e_g, R e_d], x> <[e_g, e_d], y>
// over an orthonormal basis e_g of so(n). Cross-check for sharp().
CurvatureTensor sharp_lie_oracle(const CurvatureTensor& r);

// (S * H)_{ik} = sum_{p,q} S_{ipkq} H_{pq}
SymmetricForm star_contract(const CurvatureTensor& s, const SymmetricForm& h);

// R(phi, conj phi) for phi = (e1 + i mu e2) ^ (e3 + i lambda e4). PIC uses
// lambda = mu = 1, PIC1 uses mu = 1. For tensors satisfying the first Bianchi
// identity this is
//   R1313 + l^2 R1414 + m^2 R2323 + l^2 m^2 R2424 - 2 l m R1234.
double isotropic_value(const CurvatureTensor& r, const IsotropicProbe& probe,
                       ConeMode mode);

// g R g^{-1} for an orthogonal n x n matrix g.
CurvatureTensor rotate(const CurvatureTensor& r, const Eigen::MatrixXd& g);

// Lambda^2 g acting on pair coordinates.
Eigen::MatrixXd lambda2(const Eigen::MatrixXd& g);

}  // namespace pinch
