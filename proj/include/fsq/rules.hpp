// Deterministic fully symmetric interpolatory quadrature rules for the
// standard Gaussian measure on R^d: generator levels, distinct partitions,
// interpolatory weights, and the third/fifth-degree node constructions.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fsq {

inline const double kLambda1Default = std::sqrt(3.0);
inline const double kLambda2Default = 2.0 * std::sqrt(3.0);

// Generator levels 0 = level[0] < ... ; level i is the axis offset used by
// nodes of partition entry i. Levels must be distinct for the interpolatory
// denominators to exist.
struct GeneratorVector {
  std::vector<double> levels;

  // Levels {0, sqrt(3), 2 sqrt(3), ...} up to index max_level.
  static GeneratorVector standard(int max_level);
  void validate() const;
  int max_level() const { return static_cast<int>(levels.size()) - 1; }
};

// All distinct d-partitions p_1 >= p_2 >= ... >= p_d >= 0 with sum <= m,
// each truncated to its nonzero prefix plus padding (full length d vectors).
std::vector<std::vector<int>> enumerate_partitions(int m, int d);

// Gaussian moment of the interpolatory basis polynomial:
// b_0 = 1, b_i = E[ prod_{j<i} (x^2 - level_j^2) ] for x ~ N(0,1).
double coefficient_b(int i, const GeneratorVector& gen);

// Generic interpolatory weight for one partition (reference evaluator; the
// closed-form rule builders are cross-checked against it).
double interpolatory_weight(const std::vector<int>& partition, int m, int d,
                            const GeneratorVector& gen);

struct QuadratureRule {
  int dim = 0;
  int degree = 0;               // polynomial exactness degree (2m+1)
  std::vector<double> levels;   // generator levels used
  Eigen::MatrixXd nodes;        // dim x count, one node per column
  Eigen::VectorXd weights;      // signed, sum to 1

  int count() const { return static_cast<int>(weights.size()); }
};

// Degree-3 rule: origin plus +/- lambda1 along each axis, 2d+1 nodes.
QuadratureRule third_degree_rule(int d, double lambda1 = kLambda1Default);

// Degree-5 rule: origin, +/- lambda1 axis nodes, lambda1 (+/-e_i +/- e_t)
// pair nodes, and +/- lambda2 axis nodes; the lambda2 family is dropped when
// its weight vanishes (lambda1 = sqrt(3) up to roundoff), giving 1 + 2d^2
// nodes.
QuadratureRule fifth_degree_rule(int d, double lambda1 = kLambda1Default,
                                 double lambda2 = kLambda2Default);

// Compensated weighted sum of f over the rule nodes.
template <class F>
double apply_rule(const QuadratureRule& rule, F&& f) {
  double sum = 0.0, comp = 0.0;
  for (int k = 0; k < rule.count(); ++k) {
    double term = rule.weights[k] * f(rule.nodes.col(k)) - comp;
    double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

std::string rule_to_json(const QuadratureRule& rule);
QuadratureRule rule_from_json(const std::string& text);

}  // namespace fsq
