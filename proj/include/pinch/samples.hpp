#pragma once
// Model tensors and seeded random generators used by tests, samplers and the
// CLI. All randomness flows through Rng so runs are reproducible from a seed.

#include <cstdint>
#include <random>

#include "pinch/curvature.hpp"

namespace pinch {

using Rng = std::mt19937_64;

// Independent stream seed for task `index` of a run seeded with `seed`
// (splitmix64 finalizer), so parallel tasks never share a generator.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// id ^ id: constant sectional curvature 2.
CurvatureTensor round_tensor(int n);
// (1/2) P ^ P with P = diag(1, ..., 1, 0): the curvature of S^{n-1} x R.
CurvatureTensor cylinder_tensor(int n);
// Same, with the flat direction along the unit vector v.
CurvatureTensor cylinder_tensor(const Eigen::VectorXd& v);

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng);
SymmetricForm random_symmetric(int n, Rng& rng);
// Haar-distributed element of O(n).
Eigen::MatrixXd random_orthogonal(int n, Rng& rng);
// Random n x 4 orthonormal frame.
FourFrame random_frame(int n, Rng& rng);

// Removes the totally antisymmetric part: R - b(R) with
// b(R)_ijkl = (R_ijkl + R_jkil + R_kijl) / 3.
CurvatureTensor bianchi_projection(const CurvatureTensor& r);

// Gaussian element of S^2(so(n)), no Bianchi identity.
CurvatureTensor random_pair_symmetric(int n, Rng& rng);
// Gaussian algebraic curvature operator (Weyl part included).
CurvatureTensor random_bianchi(int n, Rng& rng);
// sum_k A_k ^ A_k with A_k positive semidefinite: nonnegative curvature
// operator, so in particular weakly PIC2.
CurvatureTensor random_nonnegative(int n, Rng& rng, int terms = 3);

}  // namespace pinch
