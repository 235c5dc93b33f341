#pragma once
// Numerical verification of the elementary inequalities behind both pinching
// families. Every function returns CheckRecords reproducible from (n, grid,
// seed); none of them throws on a failed inequality.

#include <array>
#include <cstdint>
#include <vector>

#include "pinch/check_record.hpp"
#include "pinch/membership.hpp"
#include "pinch/pinching.hpp"

namespace pinch {

// Forward differences of g and h on the grid b_i = b_max i / grid_size.
std::vector<CheckRecord> verify_monotonicity(int n, int grid_size);

// Central differences of rho (step 1e-7, cross-checked at 1e-6) against the
// slope threshold at interior grid points; also requires rho > 0.
CheckRecord verify_rho_slope(int n, int grid_size, double threshold = 4.0 / 9.0);

// The three first-family bounds on K = 1 + (A/2) sqrt(n(n-2)):
//   (1 + b sqrt(n-2))^2 <= K,  K^2 / (P + nQ) <= omega/4,  K / P <= omega/4,
// on the grid plus a 10x refined grid around the tightest point, followed by
// the endpoint reductions through g(b_max), h(b_max) and the monotone
// right-hand side.
std::vector<CheckRecord> verify_lemma34(int n, int grid_size);
// rhs - lhs of the three bounds at a single b.
std::array<double, 3> first_family_gaps(int n, double b);

// |Ric_0|^2 >= (n-1)/n (l_2 - l_1)^2 for the two smallest eigenvalues, on
// random forms, plus the equality case spectrum (-1, 0, ..., 0).
std::vector<CheckRecord> verify_ric0_gap(int n, int samples, std::uint64_t seed);

// Both sides of the three gluing inequalities in a_max, b_max, a~_max, b~_max.
struct GlueSides {
  double lhs[3];
  double rhs[3];
};
GlueSides glue_sides(int n);
std::vector<CheckRecord> verify_lemma42(int n);

// zeta at b = b~_max and 1 + (n-2)(1-zeta) - 2 zeta^2 (n^2-2n+2)/(n-2)^2.
struct ZetaMax {
  double zeta_max;
  double quadratic_margin;
};
ZetaMax zeta_max(int n, bool include_gamma_factor);
std::vector<CheckRecord> verify_lemma44(int n, bool include_gamma_factor, int grid_size = 1000);

// Positivity of the id^id coefficient of D_{a,b} on the first family, and the
// boundary identity f(-2 gamma - 2, y) = b^2 y^2 of the Hessian argument.
std::vector<CheckRecord> verify_d_interior(int n, int grid_size);

// (n-2)/n tr(H)(H_11 + H_22) - rho((H_0^2)_11 + (H_0^2)_22)
//   >= (2/n^2)((n-2)(1-zeta) - 2 zeta^2 rho (n^2-2n+2)/(n-2)^2) tr(H)^2
// for H with lambda_max <= tr/2 and l_1 + l_2 >= 2(1-zeta)/n tr, minimized over
// all eigenvector pairs and random pairs.
CheckRecord verify_lemmaA1_sampled(int n, double zeta, double rho, int samples,
                                   std::uint64_t seed);

// For S, H with Z >= 0 everywhere and Z = 0 at a probe with lambda < 1:
//   Z_{Q(S)} + Z_{H^H} + 2(1 - l^2)((S*H)_11 + (S*H)_22) >= (1 + l^2)(H_11 + H_22)^2
// where Z_X is the H-free part of Z evaluated on X. Constructed by shifting H
// along id until the minimum of Z reaches zero.
CheckRecord verify_lemmaA8_sampled(int n, int samples, std::uint64_t seed,
                                   const OptimizerBudget& budget);

}  // namespace pinch
