// Stochastic fully symmetric rules: randomized interpolatory weights driven
// by Gaussian draws, the single-draw stochastic rule, the variance-reduced
// estimator that couples it with plain Monte Carlo, and the triple-stochastic
// rule unifying the deterministic and spherical-radial constructions.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fsq/rules.hpp"

namespace fsq {

struct RandomizedThirdWeights {
  double origin = 0.0;  // 1 - sum(omega_i^2)/lambda1^2
  double axis = 0.0;    // sum(omega_i^2)/(2 d lambda1^2), shared by all 2d axis nodes
};

// Third-degree randomized weights; origin + 2d * axis == 1 identically.
RandomizedThirdWeights randomized_third_weights(const Eigen::VectorXd& omega,
                                                double lambda1 = kLambda1Default);

// Randomized interpolatory weight for one partition (m <= 2). Each Gaussian
// moment factor b_l of the deterministic weight is replaced by its realized
// single-coordinate counterpart prod_{j<l}(omega_c^2 - level_j^2), averaged
// over distinct coordinate placements c, which keeps the expectation equal to
// the deterministic weight and reproduces the third-degree closed form at m=1.
double randomized_weight_general(const std::vector<int>& partition, int m,
                                 const Eigen::VectorXd& omega,
                                 const GeneratorVector& gen);

// Single-draw stochastic third-degree rule: randomized weights applied to the
// deterministic rule's node set.
template <class F>
double stochastic_third_eval(F&& f, const Eigen::VectorXd& omega,
                             const QuadratureRule& rule3) {
  RandomizedThirdWeights w = randomized_third_weights(omega, rule3.levels.at(1));
  double sum = w.origin * f(rule3.nodes.col(0));
  for (int k = 1; k < rule3.count(); ++k) sum += w.axis * f(rule3.nodes.col(k));
  return sum;
}

// One control-variate residual: deterministic rule value + Monte-Carlo draw
// minus its stochastic-rule counterpart on the same omega.
template <class F>
double residual_eval(F&& f, const Eigen::VectorXd& omega,
                     const QuadratureRule& rule3) {
  return apply_rule(rule3, f) + f(omega) - stochastic_third_eval(f, omega, rule3);
}

struct ControlVariateEstimate {
  double value = 0.0;              // mean of per-draw residuals
  std::vector<double> residuals;   // one per omega draw
};

// Variance-reduced estimator: average of residual_eval over the columns of
// omegas (d x D draws from N(0, I_d)).
template <class F>
ControlVariateEstimate rbar_estimate(F&& f, const Eigen::MatrixXd& omegas,
                                     const QuadratureRule& rule3) {
  if (omegas.rows() != rule3.dim)
    throw std::invalid_argument("draw dimension differs from rule dimension");
  if (omegas.cols() < 1) throw std::invalid_argument("need at least one draw");
  ControlVariateEstimate est;
  est.residuals.reserve(omegas.cols());
  double q = apply_rule(rule3, f);
  for (int i = 0; i < omegas.cols(); ++i) {
    Eigen::VectorXd omega = omegas.col(i);
    double r = q + f(omega) - stochastic_third_eval(f, omega, rule3);
    est.residuals.push_back(r);
    est.value += r;
  }
  est.value /= static_cast<double>(omegas.cols());
  return est;
}

// Triple-stochastic rule: f(0)(1 - beta/rho^2) + beta/(2 d rho^2) *
// sum_j [f(-rho Q e_j) + f(rho Q e_j)]. Exact on constants for any
// (Q, rho, beta); beta := d recovers the spherical-radial block, and
// additionally rho := lambda1, Q := I recovers the deterministic rule.
template <class F>
double triple_stochastic_eval(F&& f, const Eigen::MatrixXd& Q, double rho,
                              double beta) {
  int d = static_cast<int>(Q.rows());
  if (Q.cols() != d) throw std::invalid_argument("Q must be square");
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  double sum = (1.0 - beta / (rho * rho)) * f(zero);
  double node_w = beta / (2.0 * d * rho * rho);
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd node = rho * Q.col(j);
    sum += node_w * (f(node) + f(-node));
  }
  return sum;
}

}  // namespace fsq
