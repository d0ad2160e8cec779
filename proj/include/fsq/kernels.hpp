// Exact kernel evaluation: the width-normalized Gaussian kernel and the
// order-0/order-1 arc-cosine kernels, used as ground truth for all
// approximation-error measurements.
#pragma once

#include <string>

#include <Eigen/Dense>

namespace fsq {

enum class KernelFamily { Gaussian, ArcCos0, ArcCos1 };

struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double sigma2 = 1.0;  // Gaussian width parameter
  int dim = 1;          // enters the Gaussian normalization exp(-||x-y||^2/(2 d sigma^2))
};

KernelFamily kernel_family_from_name(const std::string& name);
std::string kernel_family_name(KernelFamily family);

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

// Symmetric Gram matrix over the rows of X.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X);

// Cross Gram: K[i,j] = k(A.row(i), B.row(j)).
Eigen::MatrixXd cross_gram_matrix(const KernelSpec& spec,
                                  const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B);

// Order-0 arc-cosine angular profile: 2 P(u > 0, v > 0) for standard
// bivariate normals with correlation cos(theta). Computed by numerical
// integration of the smooth conditional-CDF form and cached on a theta grid.
double arccos0_angular(double theta);

}  // namespace fsq
