// Common explicit feature-map representation. A map is a (possibly sparse)
// column-per-node transform, an activation, and signed node weights. Negative
// weights are carried as per-column sign metadata (the real embedding of the
// imaginary blocks), so Gram reconstruction is a sign-weighted inner product
// and all arithmetic stays real.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "fsq/rules.hpp"

namespace fsq {

enum class MapKind { Dfs3, Dfs5, Sfs, Rff, Orf, Rom, Qmc, Gq, Sgq, Ssr };

// CosSin realizes each node as a cosine and a sine column (Gaussian-type
// kernels); Relu and Heaviside realize one column per node (arc-cosine
// kernels) and carry the sqrt(2) normalization that matches the closed forms.
enum class Activation { CosSin, Relu, Heaviside };

std::string map_kind_name(MapKind kind);
std::string activation_name(Activation activation);
MapKind map_kind_from_name(const std::string& name);

struct FeatureMap {
  MapKind kind = MapKind::Rff;
  Activation activation = Activation::CosSin;
  int input_dim = 0;
  double input_scale = 1.0;  // applied to samples before the transform
  bool sparse = false;
  Eigen::MatrixXd dense;                   // input_dim x N when !sparse
  Eigen::SparseMatrix<double> sparse_mat;  // input_dim x N when sparse
  Eigen::VectorXd weights;                 // N signed node weights

  int node_count() const { return static_cast<int>(weights.size()); }
  int output_width_per_node() const {
    return activation == Activation::CosSin ? 2 : 1;
  }
  int realized_width() const { return node_count() * output_width_per_node(); }

  // Projections X * (scale * transform): one row per sample, one column per node.
  Eigen::MatrixXd projections(const Eigen::MatrixXd& X) const;
};

struct FeatureMatrix {
  Eigen::MatrixXd values;     // n x realized_width, sqrt|w|-scaled activations
  Eigen::VectorXd col_signs;  // +/-1 per realized column
};

// Width scale for Gaussian-kernel maps built from canonical rules.
inline double gaussian_input_scale(int d, double sigma2) {
  return 1.0 / std::sqrt(static_cast<double>(d) * sigma2);
}

// Deterministic rule as a feature map; nodes stay canonical and the kernel
// width enters through input_scale.
FeatureMap build_dfs_map(const QuadratureRule& rule,
                         Activation activation = Activation::CosSin,
                         double input_scale = 1.0);

// Stochastic variance-reduced map: [Monte-Carlo block | stochastic-rule block
// with draw-averaged weights and negative signs | deterministic block], node
// width D + (2d+1) + (2d+1). The signed inner product of two transformed
// samples reproduces rbar_estimate on the same draws.
FeatureMap build_sfs_map(const QuadratureRule& rule3, const Eigen::MatrixXd& omegas,
                         Activation activation = Activation::CosSin,
                         double input_scale = 1.0);
FeatureMap build_sfs_map(const QuadratureRule& rule3, int D, std::uint64_t seed,
                         Activation activation = Activation::CosSin,
                         double input_scale = 1.0);

FeatureMatrix transform(const FeatureMap& map, const Eigen::MatrixXd& X);

// K_hat[i,j] = sum_c sign_c A[i,c] B[j,c].
Eigen::MatrixXd approx_gram(const FeatureMatrix& A, const FeatureMatrix& B);

// Direct evaluation of the map's quadrature sum for one pair (the estimator
// the factored features must reproduce).
double direct_kernel_estimate(const FeatureMap& map, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y);

std::string map_to_json(const FeatureMap& map);
FeatureMap map_from_json(const std::string& text);

void write_feature_csv(const FeatureMatrix& features, const std::string& path);

}  // namespace fsq
