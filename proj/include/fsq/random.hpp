// Seeded randomness helpers shared by the stochastic rules and baseline maps.
#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace fsq {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Stream-splitting: derive an independent seed for sub-task `stream` of `base`
// so parallel jobs stay reproducible regardless of scheduling (splitmix64 mix).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double normal_draw(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

// chi(k) draw: the square root of a gamma(k/2, 2) variate.
inline double chi_draw(Rng& rng, double dof) {
  std::gamma_distribution<double> g(dof / 2.0, 2.0);
  return std::sqrt(g(rng));
}

inline Eigen::MatrixXd gaussian_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
// Q columns sign-corrected by the R diagonal.
inline Eigen::MatrixXd haar_orthogonal(Rng& rng, int n) {
  Eigen::MatrixXd g = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd r_diag = qr.matrixQR().diagonal();
  for (int j = 0; j < n; ++j)
    if (r_diag[j] < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace fsq
