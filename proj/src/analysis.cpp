#include "fsq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "fsq/random.hpp"
#include "fsq/rules.hpp"
#include "fsq/stochastic.hpp"

namespace fsq {

double h_sfs(double z, double Q, int d, int D) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (D < 1) throw std::invalid_argument("draw count must be >= 1");
  double q = std::clamp(Q, 0.0, 1.0);
  double decay = std::exp(-0.5 * z * z);
  double bracket = (1.0 - q) - 0.5 * z * z * decay;
  double h = bracket * bracket - 0.25 * z * z * z * z * decay * decay;
  return 2.0 / (static_cast<double>(D) * d) * h;
}

double h_ssr(double z, int d) {
  if (d <= 2) throw std::invalid_argument("bound requires d > 2");
  double tail = 1.0 - std::exp(-z * z);
  return (8.0 * d + 12.0) / (d - 2.0) - 0.5 * tail * tail;
}

double h_orf(double z, int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  double z2 = z * z, z4 = z2 * z2, z6 = z4 * z2, z8 = z4 * z4;
  double g = std::exp(z2) * (z8 + 6.0 * z6 + 7.0 * z4 + z2) / 4.0 +
             std::exp(z2) * z4 * (z6 + 2.0 * z4) / (2.0 * d);
  return g / d - (d - 1.0) * std::exp(-z2) * z4 / (2.0 * d);
}

double condition_J(const Eigen::VectorXd& z, double lambda1) {
  if (lambda1 <= 0.0) throw std::invalid_argument("lambda1 must be positive");
  int d = static_cast<int>(z.size());
  double cos_sum = 0.0;
  for (int i = 0; i < d; ++i) cos_sum += std::cos(lambda1 * z[i]);
  double norm2 = z.squaredNorm();
  return (d - cos_sum) / (lambda1 * lambda1) -
         norm2 * std::exp(-0.5 * norm2);
}

namespace {

// worst-case direction z = (r/sqrt(d))(1,...,1): J reduces to d times this
double rmax_boundary(double r, int d) {
  double scaled = std::sqrt(3.0) * r / std::sqrt(static_cast<double>(d));
  return (1.0 - std::cos(scaled)) / 3.0 -
         (r * r / d) * std::exp(-0.5 * r * r);
}

}  // namespace

double rmax_solve(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  // the boundary function is negative just above 0; scan for the sign change
  double lo = 0.05;
  if (rmax_boundary(lo, d) >= 0.0)
    throw std::runtime_error("boundary function not negative near zero");
  double hi = lo;
  while (rmax_boundary(hi, d) < 0.0) {
    hi += 0.01;
    if (hi > 50.0) throw std::runtime_error("no boundary root below r = 50");
  }
  lo = hi - 0.01;
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    double mid = 0.5 * (lo + hi);
    (rmax_boundary(mid, d) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double third_degree_kernel_estimate(const Eigen::VectorXd& z) {
  int d = static_cast<int>(z.size());
  QuadratureRule rule = third_degree_rule(d);
  return apply_rule(rule, [&](const Eigen::VectorXd& node) {
    return std::cos(node.dot(z));
  });
}

SampleStats empirical_variance(
    const std::function<double(std::uint64_t)>& estimator, long long trials,
    std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("need at least two trials");
  // Welford with second and fourth central-moment accumulators
  double mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  long long n = 0;
  for (long long t = 0; t < trials; ++t) {
    double x = estimator(derive_seed(seed, static_cast<std::uint64_t>(t)));
    ++n;
    double delta = x - mean;
    double delta_n = delta / n;
    double delta_n2 = delta_n * delta_n;
    double term = delta * delta_n * (n - 1);
    mean += delta_n;
    m4 += term * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 -
          4.0 * delta_n * m3;
    m3 += term * delta_n * (n - 2) - 3.0 * delta_n * m2;
    m2 += term;
  }
  SampleStats stats;
  stats.count = n;
  stats.mean = mean;
  stats.variance = m2 / (n - 1);
  stats.se_mean = std::sqrt(stats.variance / n);
  double mu4 = m4 / n;
  double s2 = m2 / n;
  double var_of_var = (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
  stats.se_variance = std::sqrt(std::max(var_of_var, 0.0));
  return stats;
}

double frobenius_error(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Khat) {
  if (K.rows() != Khat.rows() || K.cols() != Khat.cols())
    throw std::invalid_argument("matrix shapes differ");
  double denom = K.norm();
  if (denom == 0.0) throw std::invalid_argument("reference matrix is zero");
  return (K - Khat).norm() / denom;
}

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("need at least one node");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite family;
  // nodes from the tridiagonal eigenvalues, weights from the Christoffel
  // identity w = 1 / sum_k p_k(x)^2 over the orthonormal polynomials.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd subdiag(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) subdiag[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag, Eigen::EigenvaluesOnly);
  GaussHermite gh;
  gh.nodes = solver.eigenvalues();
  gh.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = gh.nodes[i];
    double prev = 0.0, cur = 1.0, sum = 1.0;
    int shifts = 0;  // binary exponent peeled off to keep the sum in range
    for (int k = 0; k < n - 1; ++k) {
      double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                    std::sqrt(static_cast<double>(k + 1));
      prev = cur;
      cur = next;
      sum += cur * cur;
      if (sum > 1e280) {
        sum = std::ldexp(sum, -1000);
        prev = std::ldexp(prev, -500);
        cur = std::ldexp(cur, -500);
        shifts += 1000;
      }
    }
    gh.weights[i] = std::ldexp(1.0 / sum, -shifts);
  }
  return gh;
}

Lemma1Result lemma1_check(int d, const Eigen::VectorXd& z, long long mc_trials,
                          std::uint64_t seed) {
  if (z.size() != d) throw std::invalid_argument("z length differs from d");
  Lemma1Result result;
  double norm2 = z.squaredNorm();
  result.analytic = std::exp(-0.5 * norm2) * (d - norm2);

  auto integrand = [&](const Eigen::VectorXd& w) {
    return std::cos(w.dot(z)) * w.squaredNorm();
  };
  if (d <= 3) {
    GaussHermite gh = gauss_hermite(48);
    int n = static_cast<int>(gh.nodes.size());
    double total = 0.0;
    Eigen::VectorXd w(d);
    std::vector<int> idx(d, 0);
    long long grid = 1;
    for (int i = 0; i < d; ++i) grid *= n;
    for (long long k = 0; k < grid; ++k) {
      double weight = 1.0;
      for (int i = 0; i < d; ++i) {
        w[i] = gh.nodes[idx[i]];
        weight *= gh.weights[idx[i]];
      }
      total += weight * integrand(w);
      for (int i = 0; i < d; ++i) {
        if (++idx[i] < n) break;
        idx[i] = 0;
      }
    }
    result.numeric = total;
  } else {
    Rng rng = make_rng(seed);
    double total = 0.0, comp = 0.0;
    for (long long t = 0; t < mc_trials; ++t) {
      Eigen::VectorXd w(d);
      for (int i = 0; i < d; ++i) w[i] = normal_draw(rng);
      double y = integrand(w) - comp;
      double next = total + y;
      comp = (next - total) - y;
      total = next;
    }
    result.numeric = total / static_cast<double>(mc_trials);
  }
  return result;
}

DistanceHistogram z_histogram(const Eigen::MatrixXd& X, int subsample_points,
                              int bins, std::uint64_t seed, double sigma2) {
  long long n = X.rows();
  if (n < 2) throw std::invalid_argument("need at least two samples");
  if (bins < 1) throw std::invalid_argument("need at least one bin");
  if (subsample_points < 2)
    throw std::invalid_argument("need at least two subsample points");
  if (sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be positive");
  int d = static_cast<int>(X.cols());

  std::vector<long long> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  long long take = std::min<long long>(n, subsample_points);

  double scale = 1.0 / std::sqrt(sigma2 * d);
  std::vector<double> dists;
  dists.reserve(take * (take - 1) / 2);
  for (long long i = 0; i < take; ++i)
    for (long long j = i + 1; j < take; ++j)
      dists.push_back((X.row(order[i]) - X.row(order[j])).norm() * scale);

  DistanceHistogram hist;
  hist.total_pairs = static_cast<long long>(dists.size());
  hist.r_max = rmax_solve(d);
  double max_z = *std::max_element(dists.begin(), dists.end());
  if (max_z == 0.0) max_z = 1.0;  // all points identical: one bin catches 0
  hist.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) hist.edges[b] = max_z * b / bins;
  hist.counts.assign(bins, 0);
  long long below = 0;
  for (double v : dists) {
    int b = std::min(bins - 1, static_cast<int>(v / max_z * bins));
    ++hist.counts[b];
    if (v <= hist.r_max) ++below;
  }
  hist.fraction_below_rmax = static_cast<double>(below) / hist.total_pairs;
  return hist;
}

VarianceReport make_variance_report(int d, double z, int D, long long trials,
                                    std::uint64_t seed) {
  if (d < 1 || D < 1) throw std::invalid_argument("d and D must be >= 1");
  Eigen::VectorXd zvec = Eigen::VectorXd::Zero(d);
  zvec[0] = z;
  auto f = [&](const Eigen::VectorXd& w) { return std::cos(w.dot(zvec)); };
  QuadratureRule rule = third_degree_rule(d);

  auto sfs_estimator = [&](std::uint64_t trial_seed) {
    Rng rng = make_rng(trial_seed);
    Eigen::MatrixXd omegas = gaussian_matrix(rng, d, D);
    return rbar_estimate(f, omegas, rule).value;
  };
  auto rff_estimator = [&](std::uint64_t trial_seed) {
    Rng rng = make_rng(trial_seed);
    double total = 0.0;
    for (int i = 0; i < D; ++i) {
      Eigen::VectorXd w(d);
      for (int j = 0; j < d; ++j) w[j] = normal_draw(rng);
      total += f(w);
    }
    return total / D;
  };

  SampleStats sfs = empirical_variance(sfs_estimator, trials, seed);
  SampleStats rff =
      empirical_variance(rff_estimator, trials, derive_seed(seed, 0x5eedULL));

  VarianceReport report;
  report.z = z;
  report.d = d;
  report.D = D;
  report.trials = trials;
  report.theoretical_gap = h_sfs(z, third_degree_kernel_estimate(zvec), d, D);
  report.empirical_var_sfs = sfs.variance;
  report.empirical_var_rff = rff.variance;
  report.se_var_sfs = sfs.se_variance;
  report.se_var_rff = rff.se_variance;
  return report;
}

std::string variance_report_to_json(const VarianceReport& report) {
  nlohmann::json j{{"z", report.z},
                   {"d", report.d},
                   {"D", report.D},
                   {"trials", report.trials},
                   {"theoretical_gap", report.theoretical_gap},
                   {"empirical_var_sfs", report.empirical_var_sfs},
                   {"empirical_var_rff", report.empirical_var_rff},
                   {"se_var_sfs", report.se_var_sfs},
                   {"se_var_rff", report.se_var_rff}};
  return j.dump(2);
}

std::string histogram_to_json(const DistanceHistogram& hist) {
  nlohmann::json j{{"edges", hist.edges},
                   {"counts", hist.counts},
                   {"r_max", hist.r_max},
                   {"fraction_below_rmax", hist.fraction_below_rmax},
                   {"total_pairs", hist.total_pairs}};
  return j.dump(2);
}

}  // namespace fsq
