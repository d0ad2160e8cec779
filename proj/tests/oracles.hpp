// Independent reference values for the quadrature tests: closed-form normal
// moments and a tensor Gauss-Hermite integrator, both derived from facts the
// library under test does not supply.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fsq/analysis.hpp"

namespace oracle {

// E[w^k] for w ~ N(0,1): (k-1)!! for even k, 0 for odd k.
inline double normal_moment(int k) {
  if (k % 2 != 0) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 1; j -= 2) m *= j;
  return m;
}

// E[prod_i w_i^{p_i}] for independent standard normal coordinates.
inline double normal_moment(const std::vector<int>& powers) {
  double m = 1.0;
  for (int p : powers) m *= normal_moment(p);
  return m;
}

// Every exponent vector of length d with total degree <= max_degree.
inline std::vector<std::vector<int>> monomials_up_to(int d, int max_degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(d, 0);
  std::function<void(int, int)> descend = [&](int pos, int remaining) {
    if (pos == d) {
      out.push_back(current);
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      current[pos] = k;
      descend(pos + 1, remaining - k);
    }
    current[pos] = 0;
  };
  descend(0, max_degree);
  return out;
}

inline double monomial_eval(const Eigen::VectorXd& w,
                            const std::vector<int>& powers) {
  double v = 1.0;
  for (int i = 0; i < static_cast<int>(powers.size()); ++i) {
    for (int k = 0; k < powers[i]; ++k) v *= w[i];
  }
  return v;
}

// Tensor-product Gauss-Hermite integral of f over N(0, I_d); exact for
// per-coordinate polynomial degree <= 2n-1.
template <typename F>
double tensor_gauss_hermite(int d, int n, F&& f) {
  fsq::GaussHermite gh = fsq::gauss_hermite(n);
  std::vector<int> idx(d, 0);
  Eigen::VectorXd w(d);
  double total = 0.0;
  double comp = 0.0;
  while (true) {
    double weight = 1.0;
    for (int i = 0; i < d; ++i) {
      w[i] = gh.nodes[idx[i]];
      weight *= gh.weights[idx[i]];
    }
    double term = weight * f(w) - comp;
    double next = total + term;
    comp = (next - total) - term;
    total = next;
    int pos = 0;
    while (pos < d && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == d) break;
  }
  return total;
}

}  // namespace oracle
