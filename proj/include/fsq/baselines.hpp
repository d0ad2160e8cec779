// Comparison feature-map generators: Monte-Carlo features, orthogonal and
// structured-orthogonal variants, low-discrepancy sequences, dense and sparse
// Gaussian quadrature grids, and the stochastic spherical-radial rule.
#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "fsq/feature_map.hpp"
#include "fsq/rules.hpp"

namespace fsq {

// Monte-Carlo features: W_ij ~ N(0, 1/(d sigma^2)) for the Gaussian kernel,
// N(0, 1) for arc-cosine activations; equal weights 1/N.
FeatureMap rff_matrix(int d, int N, double sigma, std::uint64_t seed,
                      Activation activation = Activation::CosSin);

// Orthogonal features: per d x d block W = Lambda Q with Lambda_ii ~ chi(d)
// and Haar orthogonal Q; blocks stacked and truncated to N rows.
FeatureMap orf_matrix(int d, int N, double sigma, std::uint64_t seed,
                      Activation activation = Activation::CosSin);

// Structured orthogonal features: per block, a product of t normalized
// Hadamard-Rademacher factors on the padded power-of-two dimension, scaled by
// the family constant; blocks stacked and truncated to N rows.
FeatureMap rom_matrix(int d, int N, double sigma, int t, std::uint64_t seed,
                      Activation activation = Activation::CosSin);

// Halton points (bases: first d primes, index from 1) through the inverse
// normal CDF; deterministic, equal weights 1/N.
FeatureMap qmc_matrix(int d, int N, double sigma,
                      Activation activation = Activation::CosSin);

// N nodes subsampled from the 3-point-per-axis Gauss-Hermite product grid
// with probability proportional to the product weight (which factors, so the
// coordinates are sampled independently); weights 1/N for unbiasedness. When
// N >= 3^d the full product grid is returned exactly.
FeatureMap gq_map(int d, int N, double sigma, std::uint64_t seed,
                  Activation activation = Activation::CosSin);

// Sparse-grid third-degree map: nodes {0, +/-p1 e_j}, origin weight
// 1 - d + d*a0_hat, axis weight a1_hat.
FeatureMap sgq_third_map(int d, double lambda1 = kLambda1Default,
                         Activation activation = Activation::CosSin,
                         double input_scale = 1.0);

// Stochastic spherical-radial blocks: per block draw Haar Q and rho ~
// chi(d+2); nodes {0, +/- rho Q e_j}, weights {1 - d/rho^2, 1/(2 rho^2)}
// divided by the block count; truncated to N nodes.
FeatureMap ssr_map(int d, int N, std::uint64_t seed,
                   Activation activation = Activation::CosSin,
                   double input_scale = 1.0);

// Single spherical-radial block with fixed rotation and radius. With Q = I
// and rho = lambda1 the node set and weights match the third-degree rule.
FeatureMap ssr_block_map(const Eigen::MatrixXd& Q, double rho,
                         Activation activation = Activation::CosSin,
                         double input_scale = 1.0);

// Inverse standard-normal CDF (rational approximation, <= 1e-9 absolute error
// over (1e-12, 1 - 1e-12)).
double inverse_normal_cdf(double p);

// Radical-inverse Halton value for index >= 1 in the given base.
double halton_value(std::uint64_t index, int base);

// Spherical rule over the d-sphere surface measure: nodes +/- Q e_j, equal
// weights |U_d|/(2d); paired with the projection construction below.
struct SphericalRule {
  Eigen::MatrixXd nodes;    // d x 2d unit vectors
  Eigen::VectorXd weights;  // surface-measure weights
};
SphericalRule spherical_rule(const Eigen::MatrixXd& Q);

// Project the third-degree rule's axis nodes (rescaled by 1/sqrt(2)) through
// Q onto the unit sphere with the degree-compensated weights; reproduces
// spherical_rule(Q) node-for-node.
SphericalRule project_third_degree_to_sphere(const QuadratureRule& rule3,
                                             const Eigen::MatrixXd& Q);

// Surface area of the unit (d-1)-sphere in R^d.
double sphere_surface_area(int d);

}  // namespace fsq
