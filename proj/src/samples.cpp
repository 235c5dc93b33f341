#include "pinch/samples.hpp"

#include <vector>

namespace pinch {

CurvatureTensor round_tensor(int n) {
  const SymmetricForm id = SymmetricForm::identity(n);
  return kulkarni_nomizu(id, id);
}

CurvatureTensor cylinder_tensor(int n) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(n - 1) = 1.0;
  return cylinder_tensor(v);
}

CurvatureTensor cylinder_tensor(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  const Eigen::VectorXd u = v.normalized();
  const SymmetricForm p(Eigen::MatrixXd::Identity(n, n) - u * u.transpose());
  return 0.5 * kulkarni_nomizu(p, p);
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  // Fill in a fixed order so results do not depend on Eigen's traversal.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

SymmetricForm random_symmetric(int n, Rng& rng) {
  return SymmetricForm(gaussian_matrix(n, n, rng));
}

Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  const Eigen::MatrixXd a = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

FourFrame random_frame(int n, Rng& rng) { return FourFrame(gaussian_matrix(n, 4, rng)); }

CurvatureTensor bianchi_projection(const CurvatureTensor& r) {
  const int n = r.dim();
  std::vector<double> raw(static_cast<std::size_t>(n) * n * n * n);
  std::size_t at = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          raw[at++] = r(i, j, k, l) - (r(i, j, k, l) + r(j, k, i, l) + r(k, i, j, l)) / 3.0;
  return CurvatureTensor::from_components(n, raw, true);
}

CurvatureTensor random_pair_symmetric(int n, Rng& rng) {
  const int N = n * (n - 1) / 2;
  return CurvatureTensor::from_pair_matrix(gaussian_matrix(N, N, rng), false);
}

CurvatureTensor random_bianchi(int n, Rng& rng) {
  return bianchi_projection(random_pair_symmetric(n, rng));
}

CurvatureTensor random_nonnegative(int n, Rng& rng, int terms) {
  CurvatureTensor out = CurvatureTensor::zero(n);
  for (int t = 0; t < terms; ++t) {
    const Eigen::MatrixXd b = gaussian_matrix(n, n, rng);
    const SymmetricForm a(b * b.transpose() / static_cast<double>(n));
    out = out + kulkarni_nomizu(a, a);
  }
  return out;
}

}  // namespace pinch
