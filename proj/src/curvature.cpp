#include "pinch/curvature.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pinch/kernels.hpp"

namespace pinch {

Dimension::Dimension(int n) : n_(n) {
  if (n < kMinDimension || n > kMaxDimension) {
    throw std::invalid_argument("dimension n=" + std::to_string(n) +
                                " outside [4, 32]");
  }
}

void require_same_dimension(int n1, int n2, std::string_view what) {
  if (n1 != n2) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(n1) + " vs " + std::to_string(n2) + ")");
  }
}

Eigen::VectorXd wedge(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.size());
  require_same_dimension(n, static_cast<int>(y.size()), "wedge");
  Eigen::VectorXd w(n * (n - 1) / 2);
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) w(idx++) = x(i) * y(j) - x(j) * y(i);
  }
  return w;
}

// SymmetricForm --------------------------------------------------------------

SymmetricForm::SymmetricForm(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxDimension) {
    throw std::invalid_argument("SymmetricForm: matrix must be square with 1 <= n <= 32");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymmetricForm SymmetricForm::zero(int n) {
  return SymmetricForm(Eigen::MatrixXd::Zero(n, n));
}

SymmetricForm SymmetricForm::identity(int n) {
  return SymmetricForm(Eigen::MatrixXd::Identity(n, n));
}

SymmetricForm SymmetricForm::diagonal(std::span<const double> d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()),
                                            static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return SymmetricForm(m);
}

SymmetricForm SymmetricForm::tracefree() const {
  SymmetricForm out = *this;
  const double mean = m_.trace() / static_cast<double>(dim());
  for (int i = 0; i < dim(); ++i) out.m_(i, i) -= mean;
  return out;
}

SymmetricForm SymmetricForm::squared() const { return SymmetricForm(m_ * m_); }

Spectrum SymmetricForm::spectrum() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_);
  return {es.eigenvalues(), es.eigenvectors()};
}

SymmetricForm operator+(const SymmetricForm& a, const SymmetricForm& b) {
  require_same_dimension(a.dim(), b.dim(), "SymmetricForm +");
  return SymmetricForm(a.m_ + b.m_);
}

SymmetricForm operator-(const SymmetricForm& a, const SymmetricForm& b) {
  require_same_dimension(a.dim(), b.dim(), "SymmetricForm -");
  return SymmetricForm(a.m_ - b.m_);
}

SymmetricForm operator*(double c, const SymmetricForm& a) {
  return SymmetricForm(c * a.m_);
}

// CurvatureTensor ------------------------------------------------------------

CurvatureTensor::CurvatureTensor(int n, Eigen::MatrixXd pair, bool bianchi)
    : n_(n), bianchi_(bianchi) {
  const int N = n * (n - 1) / 2;
  if (pair.rows() != N || pair.cols() != N) {
    throw std::invalid_argument("pair matrix has wrong size for n=" + std::to_string(n));
  }
  pair_ = 0.5 * (pair + pair.transpose());
  full_.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  const auto at = [n](int i, int j, int k, int l) {
    return ((static_cast<std::size_t>(i) * n + j) * n + k) * n + l;
  };
  for (int i = 0, a = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++a) {
      for (int k = 0, b = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l, ++b) {
          const double v = pair_(a, b);
          full_[at(i, j, k, l)] = v;
          full_[at(j, i, k, l)] = -v;
          full_[at(i, j, l, k)] = -v;
          full_[at(j, i, l, k)] = v;
        }
      }
    }
  }
}

CurvatureTensor CurvatureTensor::zero(int n, bool bianchi_expected) {
  Dimension d(n);
  return CurvatureTensor(n, Eigen::MatrixXd::Zero(d.pairs(), d.pairs()), bianchi_expected);
}

CurvatureTensor CurvatureTensor::from_components(int n, std::span<const double> raw,
                                                 bool bianchi_expected) {
  Dimension d(n);
  if (raw.size() != static_cast<std::size_t>(n) * n * n * n) {
    throw std::invalid_argument("from_components: expected n^4 entries");
  }
  const auto r = [&](int i, int j, int k, int l) {
    return raw[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  };
  Eigen::MatrixXd m(d.pairs(), d.pairs());
  for (int i = 0, a = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++a) {
      for (int k = 0, b = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l, ++b) {
          m(a, b) = (r(i, j, k, l) - r(j, i, k, l) - r(i, j, l, k) + r(j, i, l, k) +
                     r(k, l, i, j) - r(l, k, i, j) - r(k, l, j, i) + r(l, k, j, i)) /
                    8.0;
        }
      }
    }
  }
  return CurvatureTensor(n, std::move(m), bianchi_expected);
}

CurvatureTensor CurvatureTensor::from_pair_matrix(const Eigen::MatrixXd& m,
                                                  bool bianchi_expected) {
  const double N = static_cast<double>(m.rows());
  const int n = static_cast<int>(std::lround((1.0 + std::sqrt(1.0 + 8.0 * N)) / 2.0));
  Dimension d(n);
  return CurvatureTensor(n, m, bianchi_expected);
}

CurvatureTensor CurvatureTensor::with_bianchi_expected(bool flag) const {
  CurvatureTensor out = *this;
  out.bianchi_ = flag;
  return out;
}

double CurvatureTensor::norm() const {
  double s = 0.0;
  for (double v : full_) s += v * v;
  return std::sqrt(s);
}

double CurvatureTensor::bianchi_defect() const {
  double worst = 0.0;
  const CurvatureTensor& r = *this;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l)
          worst = std::max(worst, std::abs(r(i, j, k, l) + r(i, k, l, j) + r(i, l, j, k)));
  return worst;
}

bool CurvatureTensor::satisfies_bianchi(double rel_tol) const {
  return bianchi_defect() <= rel_tol * std::max(norm(), 1e-300);
}

CurvatureTensor operator+(const CurvatureTensor& a, const CurvatureTensor& b) {
  require_same_dimension(a.n_, b.n_, "CurvatureTensor +");
  return CurvatureTensor(a.n_, a.pair_ + b.pair_, a.bianchi_ && b.bianchi_);
}

CurvatureTensor operator-(const CurvatureTensor& a, const CurvatureTensor& b) {
  require_same_dimension(a.n_, b.n_, "CurvatureTensor -");
  return CurvatureTensor(a.n_, a.pair_ - b.pair_, a.bianchi_ && b.bianchi_);
}

CurvatureTensor operator*(double c, const CurvatureTensor& a) {
  return CurvatureTensor(a.n_, c * a.pair_, a.bianchi_);
}

// Frames ---------------------------------------------------------------------

bool orthonormalize_columns(Eigen::MatrixXd& m) {
  for (int c = 0; c < m.cols(); ++c) {
    const double original = m.col(c).norm();
    if (!(original > 0.0) || !std::isfinite(original)) return false;
    for (int pass = 0; pass < 2; ++pass) {
      for (int p = 0; p < c; ++p) m.col(c) -= m.col(p).dot(m.col(c)) * m.col(p);
    }
    const double len = m.col(c).norm();
    if (len <= 1e-10 * original) return false;
    m.col(c) /= len;
  }
  return true;
}

FourFrame::FourFrame(const Eigen::MatrixXd& columns) : e_(columns) {
  if (e_.cols() != 4 || e_.rows() < 4) {
    throw std::invalid_argument("FourFrame: need an n x 4 matrix with n >= 4");
  }
  if (!orthonormalize_columns(e_)) {
    throw std::invalid_argument("FourFrame: columns are linearly dependent");
  }
}

FourFrame FourFrame::coordinate(int n, int i1, int i2, int i3, int i4) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, 4);
  m(i1, 0) = 1.0;
  m(i2, 1) = 1.0;
  m(i3, 2) = 1.0;
  m(i4, 3) = 1.0;
  return FourFrame(m);
}

IsotropicProbe::IsotropicProbe(FourFrame f, double lambda_, double mu_)
    : frame(std::move(f)), lambda(lambda_), mu(mu_) {
  if (!(lambda >= 0.0 && lambda <= 1.0) || !(mu >= 0.0 && mu <= 1.0)) {
    throw std::invalid_argument("IsotropicProbe: lambda and mu must lie in [0, 1]");
  }
}

std::string_view to_string(ConeMode mode) {
  switch (mode) {
    case ConeMode::PIC: return "PIC";
    case ConeMode::PIC1: return "PIC1";
    case ConeMode::PIC2: return "PIC2";
  }
  return "?";
}

ConeMode parse_cone_mode(std::string_view s) {
  std::string up(s);
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "PIC") return ConeMode::PIC;
  if (up == "PIC1") return ConeMode::PIC1;
  if (up == "PIC2") return ConeMode::PIC2;
  throw std::invalid_argument("unknown cone mode '" + std::string(s) + "'");
}

// Operations -----------------------------------------------------------------

CurvatureTensor kulkarni_nomizu(const SymmetricForm& a, const SymmetricForm& b) {
  require_same_dimension(a.dim(), b.dim(), "kulkarni_nomizu");
  const int n = a.dim();
  Dimension d(n);
  Eigen::MatrixXd m(d.pairs(), d.pairs());
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      for (int k = 0, q = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l, ++q) {
          m(p, q) = a(i, k) * b(j, l) - a(i, l) * b(j, k) - a(j, k) * b(i, l) +
                    a(j, l) * b(i, k);
        }
      }
    }
  }
  return CurvatureTensor::from_pair_matrix(m, true);
}

SymmetricForm ricci(const CurvatureTensor& r) {
  const int n = r.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += r(i, j, k, j);
      m(i, k) = s;
      m(k, i) = s;
    }
  return SymmetricForm(m);
}

double scalar(const CurvatureTensor& r) { return ricci(r).trace(); }

SymmetricForm ricci_tracefree(const CurvatureTensor& r) { return ricci(r).tracefree(); }

CurvatureTensor square(const CurvatureTensor& r) {
  const Eigen::Index N = r.pair_matrix().rows();
  // pair_ is symmetric, so its column-major storage is also its row-major one.
  Eigen::MatrixXd g(N, N);
  kernels::gram({r.pair_matrix().data(), static_cast<std::size_t>(N * N)},
                static_cast<std::size_t>(N), static_cast<std::size_t>(N),
                {g.data(), static_cast<std::size_t>(N * N)});
  return CurvatureTensor::from_pair_matrix(2.0 * g, false);
}

CurvatureTensor sharp(const CurvatureTensor& r) {
  const int n = r.dim();
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  // X[(i,k), (p,q)] = R_ipkq, row-major.
  std::vector<double> x(n2 * n2);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          x[(static_cast<std::size_t>(i) * n + k) * n2 + static_cast<std::size_t>(p) * n + q] =
              r(i, p, k, q);
  std::vector<double> g(n2 * n2);
  kernels::gram(x, n2, n2, g);
  const auto G = [&](int i, int k, int j, int l) {
    return g[(static_cast<std::size_t>(i) * n + k) * n2 + static_cast<std::size_t>(j) * n + l];
  };
  const int N = n * (n - 1) / 2;
  Eigen::MatrixXd m(N, N);
  for (int i = 0, a = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++a)
      for (int k = 0, b = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l, ++b)
          m(a, b) = 2.0 * (G(i, k, j, l) - G(i, l, j, k));
  return CurvatureTensor::from_pair_matrix(m, false);
}

CurvatureTensor q_quadratic(const CurvatureTensor& r) {
  return (square(r) + sharp(r)).with_bianchi_expected(r.bianchi_expected());
}

namespace {

struct StructureConstant {
  int alpha, beta, gamma;
  double c;  // <[E_alpha, E_beta], E_gamma>
};

// Nonzero structure constants of so(n) in the basis E_ab = e_a e_b^T - e_b e_a^T,
// a < b, obtained by multiplying out the matrices.
std::vector<StructureConstant> so_structure_constants(int n) {
  const int N = n * (n - 1) / 2;
  std::vector<std::pair<int, int>> idx;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) idx.emplace_back(a, b);
  const auto basis = [&](int alpha) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    e(idx[alpha].first, idx[alpha].second) = 1.0;
    e(idx[alpha].second, idx[alpha].first) = -1.0;
    return e;
  };
  std::vector<StructureConstant> out;
  for (int al = 0; al < N; ++al) {
    const Eigen::MatrixXd ea = basis(al);
    for (int be = 0; be < N; ++be) {
      const auto [a1, b1] = idx[al];
      const auto [a2, b2] = idx[be];
      if (a1 != a2 && a1 != b2 && b1 != a2 && b1 != b2) continue;
      const Eigen::MatrixXd eb = basis(be);
      const Eigen::MatrixXd br = ea * eb - eb * ea;
      for (int ga = 0; ga < N; ++ga) {
        const double v = br(idx[ga].first, idx[ga].second);
        if (v != 0.0) out.push_back({al, be, ga, v});
      }
    }
  }
  return out;
}

}  // namespace

CurvatureTensor sharp_lie_oracle(const CurvatureTensor& r) {
  const int n = r.dim();
  const int N = n * (n - 1) / 2;
  const Eigen::MatrixXd& P = r.pair_matrix();
  const auto sc = so_structure_constants(n);
  // Bucket the constants by output index gamma.
  std::vector<std::vector<StructureConstant>> by_gamma(N);
  for (const auto& s : sc) by_gamma[s.gamma].push_back(s);
  // R e_g = sum_m P(m, g) e_m, so
  //   R#(x, y) = sum_{g,d} sum_{m,v} P(m,g) P(v,d) c_{mv}^x c_{gd}^y
  //            = sum_{(g,d) in c^y} c_{gd}^y (P^T C^x P)_{gd}.
  Eigen::MatrixXd out(N, N);
  for (int x = 0; x < N; ++x) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
    for (const auto& s : by_gamma[x]) {
      B.noalias() += s.c * P.row(s.alpha).transpose() * P.row(s.beta);
    }
    for (int y = 0; y < N; ++y) {
      double v = 0.0;
      for (const auto& s : by_gamma[y]) v += s.c * B(s.alpha, s.beta);
      out(x, y) = v;
    }
  }
  return CurvatureTensor::from_pair_matrix(out, false);
}

SymmetricForm star_contract(const CurvatureTensor& s, const SymmetricForm& h) {
  require_same_dimension(s.dim(), h.dim(), "star_contract");
  const int n = s.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      double v = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) v += s(i, p, k, q) * h(p, q);
      m(i, k) = v;
      m(k, i) = v;
    }
  return SymmetricForm(m);
}

double isotropic_value(const CurvatureTensor& r, const IsotropicProbe& probe,
                       ConeMode mode) {
  require_same_dimension(r.dim(), probe.frame.dim(), "isotropic_value");
  double lambda = probe.lambda;
  double mu = probe.mu;
  if (mode == ConeMode::PIC) lambda = mu = 1.0;
  if (mode == ConeMode::PIC1) mu = 1.0;
  const Eigen::MatrixXd& e = probe.frame.matrix();
  const Eigen::VectorXd re = wedge(e.col(0), e.col(2)) - lambda * mu * wedge(e.col(1), e.col(3));
  const Eigen::VectorXd im = lambda * wedge(e.col(0), e.col(3)) + mu * wedge(e.col(1), e.col(2));
  const Eigen::MatrixXd& P = r.pair_matrix();
  return re.dot(P * re) + im.dot(P * im);
}

Eigen::MatrixXd lambda2(const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  const int N = n * (n - 1) / 2;
  Eigen::MatrixXd L(N, N);
  for (int i = 0, a = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++a)
      for (int k = 0, b = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l, ++b) L(a, b) = g(i, k) * g(j, l) - g(i, l) * g(j, k);
  return L;
}

CurvatureTensor rotate(const CurvatureTensor& r, const Eigen::MatrixXd& g) {
  require_same_dimension(r.dim(), static_cast<int>(g.rows()), "rotate");
  const Eigen::MatrixXd L = lambda2(g);
  return CurvatureTensor::from_pair_matrix(L * r.pair_matrix() * L.transpose(),
                                           r.bianchi_expected());
}

}  // namespace pinch
