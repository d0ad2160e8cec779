// Variance bounds, the variance-reduction condition region, and empirical
// statistics plumbing for comparing stochastic kernel estimators.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fsq {

// Variance gap of the stochastic rule against Monte-Carlo features at D
// draws: (2/(Dd)) * ([(1-Q) - z^2 e^{-z^2/2}/2]^2 - z^4 e^{-z^2}/4).
// Q is the deterministic third-degree estimate of the kernel and is clamped
// to [0, 1] before use, which also bounds |result| by 2/(Dd).
double h_sfs(double z, double Q, int d, int D);

// Bound functions multiplying 1/D in the respective variance-gap bounds.
double h_ssr(double z, int d);  // (8d+12)/(d-2) - (1-e^{-z^2})^2/2, d > 2
double h_orf(double z, int d);

// Condition function: (d - sum_i cos(lambda1 z_i))/lambda1^2
// - ||z||^2 exp(-||z||^2/2). Negative means variance reduction holds at z.
double condition_J(const Eigen::VectorXd& z, double lambda1);

// Largest r such that every radius below it keeps the worst-case direction
// of condition_J negative: first positive root of
// 1/3 - cos(sqrt(3) r/sqrt(d))/3 - (r^2/d) exp(-r^2/2), by bisection.
double rmax_solve(int d);

// Deterministic third-degree estimate of the Gaussian kernel at displacement
// z (already width-normalized), used as the Q input of h_sfs.
double third_degree_kernel_estimate(const Eigen::VectorXd& z);

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double se_mean = 0.0;
  double se_variance = 0.0;  // standard error of the variance estimate
  long long count = 0;
};

// Statistics of estimator(trial_seed) over independent seeded trials.
// Welford accumulation with a fourth-moment track for se_variance.
SampleStats empirical_variance(
    const std::function<double(std::uint64_t)>& estimator, long long trials,
    std::uint64_t seed);

// Relative error ||K - Khat||_F / ||K||_F.
double frobenius_error(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Khat);

// Probabilists' Gauss-Hermite rule (weight = standard normal density):
// nodes and weights exact for polynomial degree 2n-1.
struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussHermite gauss_hermite(int n);

struct Lemma1Result {
  double analytic = 0.0;  // e^{-||z||^2/2} (d - ||z||^2)
  double numeric = 0.0;   // tensor quadrature (d <= 3) or Monte-Carlo
};

// Checks E[cos(w'z) sum_j w_j^2] over the standard normal against its closed
// form.
Lemma1Result lemma1_check(int d, const Eigen::VectorXd& z,
                          long long mc_trials = 1000000,
                          std::uint64_t seed = 7);

struct DistanceHistogram {
  std::vector<double> edges;   // bins + 1 ascending
  std::vector<long long> counts;
  double r_max = 0.0;
  double fraction_below_rmax = 0.0;
  long long total_pairs = 0;
};

// Histogram of width-normalized pairwise distances ||x_i - x_j||/(sigma
// sqrt(d)) over a seeded subsample of the rows of X, each off-diagonal pair
// counted once.
DistanceHistogram z_histogram(const Eigen::MatrixXd& X, int subsample_points,
                              int bins, std::uint64_t seed,
                              double sigma2 = 1.0);

struct VarianceReport {
  double z = 0.0;
  int d = 0;
  int D = 0;
  double theoretical_gap = 0.0;
  double empirical_var_sfs = 0.0;
  double empirical_var_rff = 0.0;
  double se_var_sfs = 0.0;
  double se_var_rff = 0.0;
  long long trials = 0;
};

// Empirical variances of the stochastic-rule and Monte-Carlo kernel
// estimators at displacement z * e_1, with the theoretical gap alongside.
VarianceReport make_variance_report(int d, double z, int D, long long trials,
                                    std::uint64_t seed);

std::string variance_report_to_json(const VarianceReport& report);
std::string histogram_to_json(const DistanceHistogram& hist);

}  // namespace fsq
