#include "fsq/stochastic.hpp"

#include <stdexcept>

namespace fsq {

RandomizedThirdWeights randomized_third_weights(const Eigen::VectorXd& omega,
                                                double lambda1) {
  if (lambda1 <= 0.0) throw std::invalid_argument("lambda1 must be positive");
  int d = static_cast<int>(omega.size());
  if (d < 1) throw std::invalid_argument("omega must be nonempty");
  double s = omega.squaredNorm();
  double l2 = lambda1 * lambda1;
  RandomizedThirdWeights w;
  w.origin = 1.0 - s / l2;
  w.axis = s / (2.0 * d * l2);
  return w;
}

namespace {

// prod_{j=0..l, j != q} (level_q^2 - level_j^2)
double denominator(int l, int q, const GeneratorVector& gen) {
  double lq2 = gen.levels[q] * gen.levels[q];
  double prod = 1.0;
  for (int j = 0; j <= l; ++j) {
    if (j == q) continue;
    prod *= lq2 - gen.levels[j] * gen.levels[j];
  }
  return prod;
}

// realized counterpart of b_l at a single coordinate: prod_{j<l}(w^2 - level_j^2)
double realized_b(int l, double w2, const GeneratorVector& gen) {
  double prod = 1.0;
  for (int j = 0; j < l; ++j) prod *= w2 - gen.levels[j] * gen.levels[j];
  return prod;
}

template <class Cb>
void bounded_vectors_rec(std::vector<int>& u, int start, int remaining, Cb&& cb) {
  cb(u);
  if (remaining == 0) return;
  int d = static_cast<int>(u.size());
  for (int i = start; i < d; ++i) {
    for (int v = 1; v <= remaining; ++v) {
      u[i] = v;
      bounded_vectors_rec(u, i + 1, remaining - v, cb);
    }
    u[i] = 0;
  }
}

}  // namespace

double randomized_weight_general(const std::vector<int>& partition, int m,
                                 const Eigen::VectorXd& omega,
                                 const GeneratorVector& gen) {
  int d = static_cast<int>(omega.size());
  if (static_cast<int>(partition.size()) != d)
    throw std::invalid_argument("partition length must equal draw dimension");
  gen.validate();
  if (m > 2) throw std::invalid_argument("randomized weights implemented for m <= 2");
  if (m > gen.max_level())
    throw std::invalid_argument("rule level exceeds generator length");
  int psum = 0, nonzero = 0;
  for (size_t i = 0; i < partition.size(); ++i) {
    if (partition[i] < 0) throw std::invalid_argument("partition entries must be >= 0");
    if (i > 0 && partition[i] > partition[i - 1])
      throw std::invalid_argument("partition must be non-increasing");
    psum += partition[i];
    if (partition[i] > 0) ++nonzero;
  }
  if (psum > m) throw std::invalid_argument("partition sum exceeds rule level");

  // per-level coordinate sums of the realized moment factors
  std::vector<double> level_sum(m + 1, 0.0);       // sum_c realized_b(l, w_c^2)
  std::vector<std::vector<double>> level_val(m + 1, std::vector<double>(d));
  for (int l = 0; l <= m; ++l) {
    for (int c = 0; c < d; ++c) {
      level_val[l][c] = realized_b(l, omega[c] * omega[c], gen);
      level_sum[l] += level_val[l][c];
    }
  }

  double total = 0.0;
  std::vector<int> u(d, 0);
  bounded_vectors_rec(u, 0, m - psum, [&](const std::vector<int>& uv) {
    // active levels of this term and the deterministic denominator product
    double denom = 1.0;
    std::vector<int> levels;
    for (int i = 0; i < d; ++i) {
      int l = uv[i] + partition[i];
      if (l == 0) continue;
      levels.push_back(l);
      denom *= denominator(l, partition[i], gen);
    }
    // realized numerator: U-statistic over distinct coordinate placements
    double numer = 1.0;
    if (levels.size() == 1) {
      numer = level_sum[levels[0]] / d;
    } else if (levels.size() == 2) {
      if (d < 2) throw std::invalid_argument("two active levels need d >= 2");
      double cross = 0.0;
      for (int c = 0; c < d; ++c)
        cross += level_val[levels[0]][c] * level_val[levels[1]][c];
      numer = (level_sum[levels[0]] * level_sum[levels[1]] - cross) /
              (static_cast<double>(d) * (d - 1));
    } else if (levels.size() > 2) {
      throw std::invalid_argument("more than two active levels unsupported");
    }
    total += numer / denom;
  });
  return total / static_cast<double>(1 << nonzero);
}

}  // namespace fsq
