#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fsq/analysis.hpp"
#include "fsq/baselines.hpp"
#include "fsq/feature_map.hpp"
#include "fsq/kernels.hpp"
#include "fsq/random.hpp"
#include "fsq/rules.hpp"

using fsq::Activation;
using fsq::FeatureMap;
using fsq::MapKind;

namespace {

const double kRoot3 = std::sqrt(3.0);

double gaussian_pair(const FeatureMap& map, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y) {
  return fsq::direct_kernel_estimate(map, x, y);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::MatrixXd random_points(std::uint64_t seed, int n, int d, double spread) {
  fsq::Rng rng = fsq::make_rng(seed);
  return spread * fsq::gaussian_matrix(rng, n, d);
}

}  // namespace

TEST_CASE("random features reproduce the Gaussian kernel in expectation") {
  const int d = 5;
  const double sigma = 1.0;
  FeatureMap map = fsq::rff_matrix(d, 100000, sigma, 11);
  REQUIRE(map.dense.cols() == 100000);

  // separation with ||x - y|| / (sigma sqrt(d)) = 1, so k(x, y) = e^{-1/2}
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  y[0] = std::sqrt(static_cast<double>(d));
  double exact = std::exp(-0.5);

  Eigen::VectorXd diff = (x - y) * map.input_scale;
  std::vector<double> per_feature(map.dense.cols());
  for (int k = 0; k < map.dense.cols(); ++k)
    per_feature[k] = std::cos(map.dense.col(k).dot(diff));

  double mean = 0.0;
  for (double v : per_feature) mean += v;
  mean /= per_feature.size();
  double var = 0.0;
  for (double v : per_feature) var += (v - mean) * (v - mean);
  var /= per_feature.size() - 1;
  double se = std::sqrt(var / per_feature.size());

  CHECK(std::abs(mean - exact) < 3.0 * se);
  CHECK(std::abs(gaussian_pair(map, x, y) - mean) < 1e-12);

  // per-feature variance of cos(w'(x - y)) is (1 - e^{-z^2})^2 / 2 at z = 1
  double var_expected = std::pow(1.0 - std::exp(-1.0), 2) / 2.0;
  CHECK(std::abs(var - var_expected) < 0.05 * var_expected);
}

TEST_CASE("random features evaluate to one at coincident inputs") {
  FeatureMap map = fsq::rff_matrix(4, 64, 0.7, 3);
  Eigen::VectorXd x = random_points(5, 1, 4, 1.0).row(0);
  CHECK(gaussian_pair(map, x, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("orthogonal features have orthogonal blocks and chi column norms") {
  const int d = 6;
  FeatureMap map = fsq::orf_matrix(d, 2 * d, 1.0, 17);
  for (int b = 0; b < 2; ++b) {
    Eigen::MatrixXd block = map.dense.middleCols(b * d, d);
    Eigen::MatrixXd unit = block;
    for (int j = 0; j < d; ++j) unit.col(j).normalize();
    Eigen::MatrixXd gram = unit.transpose() * unit;
    CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <
          1e-10);
  }

  // squared column norms are chi-squared with d degrees of freedom
  const int wide = 4096;
  FeatureMap big = fsq::orf_matrix(8, wide, 1.0, 23);
  double mean_sq = big.dense.colwise().squaredNorm().mean();
  double se = std::sqrt(2.0 * 8.0 / wide);
  CHECK(std::abs(mean_sq - 8.0) < 4.0 * se);
}

TEST_CASE("structured orthogonal blocks are signed Hadamard frames") {
  const int d = 8;  // power of two, no padding
  FeatureMap map = fsq::rom_matrix(d, 2 * d, 1.0, 1, 29);
  for (int b = 0; b < 2; ++b) {
    Eigen::MatrixXd block = map.dense.middleCols(b * d, d);
    CHECK((block.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    Eigen::MatrixXd gram = block.transpose() * block / static_cast<double>(d);
    CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <
          1e-10);
  }

  // triple-factor blocks stay orthogonal with exactly d squared column norm
  FeatureMap deep = fsq::rom_matrix(d, d, 1.0, 3, 31);
  Eigen::MatrixXd gram =
      deep.dense.transpose() * deep.dense / static_cast<double>(d);
  CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);

  // with one factor the leading column of each block carries the sign
  // diagonal; signs are +/-1 with empirical frequency near one half
  const int blocks = 256;
  FeatureMap wide = fsq::rom_matrix(d, blocks * d, 1.0, 1, 37);
  int plus = 0, total = 0;
  for (int b = 0; b < blocks; ++b) {
    Eigen::VectorXd signs = wide.dense.col(b * d);
    for (int i = 0; i < d; ++i) {
      CHECK(std::abs(std::abs(signs[i]) - 1.0) < 1e-12);
      plus += signs[i] > 0 ? 1 : 0;
      ++total;
    }
  }
  double frac = static_cast<double>(plus) / total;
  CHECK(std::abs(frac - 0.5) < 3.0 * 0.5 / std::sqrt(total));

  CHECK_THROWS(fsq::rom_matrix(4, 4, 1.0, 0, 1));
}

TEST_CASE("structured blocks keep unit entries under padding truncation") {
  FeatureMap map = fsq::rom_matrix(5, 8, 1.0, 1, 41);  // padded to 8
  CHECK((map.dense.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
  for (int j = 0; j < map.dense.cols(); ++j)
    CHECK(map.dense.col(j).squaredNorm() == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("radical inverse values match the hand expansion") {
  CHECK(fsq::halton_value(1, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fsq::halton_value(2, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(fsq::halton_value(3, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(fsq::halton_value(1, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(fsq::halton_value(5, 3) == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
  CHECK_THROWS(fsq::halton_value(1, 1));
}

TEST_CASE("inverse normal quantile agrees with the erfc-based CDF") {
  CHECK(fsq::inverse_normal_cdf(0.5) == 0.0);
  for (double p : {1e-9, 1e-6, 0.01, 0.3, 0.7, 0.99, 1.0 - 1e-6}) {
    double x = fsq::inverse_normal_cdf(p);
    double back = 0.5 * std::erfc(-x / std::sqrt(2.0));
    CHECK(std::abs(back - p) < 1e-9);
  }
  CHECK_THROWS(fsq::inverse_normal_cdf(0.0));
  CHECK_THROWS(fsq::inverse_normal_cdf(1.0));
}

TEST_CASE("low-discrepancy features are deterministic and refine with width") {
  const int d = 5;
  FeatureMap a = fsq::qmc_matrix(d, 32, 1.0);
  FeatureMap b = fsq::qmc_matrix(d, 32, 1.0);
  CHECK((a.dense - b.dense).cwiseAbs().maxCoeff() == 0.0);

  // first node is the index-1 Halton point through the quantile function
  CHECK(a.dense(0, 0) == 0.0);
  CHECK(a.dense(1, 0) ==
        doctest::Approx(fsq::inverse_normal_cdf(1.0 / 3.0)).epsilon(1e-14));
  CHECK(a.dense(0, 1) ==
        doctest::Approx(fsq::inverse_normal_cdf(0.25)).epsilon(1e-14));

  fsq::KernelSpec spec;
  spec.family = fsq::KernelFamily::Gaussian;
  spec.sigma2 = 1.0;
  spec.dim = d;
  Eigen::MatrixXd pts = random_points(43, 18, d, 0.8);
  std::vector<double> med;
  for (int n : {32, 128, 512}) {
    FeatureMap map = fsq::qmc_matrix(d, n, 1.0);
    std::vector<double> errs;
    for (int i = 0; i < 9; ++i) {
      Eigen::VectorXd x = pts.row(2 * i), y = pts.row(2 * i + 1);
      double exact = fsq::kernel_eval(spec, x, y);
      errs.push_back(std::abs(gaussian_pair(map, x, y) - exact));
    }
    med.push_back(median(errs));
  }
  CHECK(med[1] < med[0]);
  CHECK(med[2] < med[1]);
}

TEST_CASE("quadrature subsampling returns the exact grid when affordable") {
  FeatureMap one = fsq::gq_map(1, 3, 1.0, 7);
  fsq::QuadratureRule rule = fsq::third_degree_rule(1);
  std::vector<std::pair<double, double>> got, want;
  for (int k = 0; k < 3; ++k) {
    got.emplace_back(one.dense(0, k), one.weights[k]);
    want.emplace_back(rule.nodes(0, k), rule.weights[k]);
  }
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (int k = 0; k < 3; ++k) {
    CHECK(got[k].first == doctest::Approx(want[k].first).epsilon(1e-14));
    CHECK(got[k].second == doctest::Approx(want[k].second).epsilon(1e-14));
  }

  FeatureMap grid = fsq::gq_map(2, 9, 1.0, 7);
  REQUIRE(grid.dense.cols() == 9);
  CHECK(grid.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  // product weights: corners 1/36, edges 1/9, center 4/9
  std::vector<double> w(grid.weights.data(), grid.weights.data() + 9);
  std::sort(w.begin(), w.end());
  CHECK(w[0] == doctest::Approx(1.0 / 36.0).epsilon(1e-14));
  CHECK(w[4] == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(w[8] == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("quadrature subsampling is unbiased for the full product rule") {
  const int d = 3;
  Eigen::VectorXd x = random_points(47, 2, d, 0.9).row(0);
  Eigen::VectorXd y = random_points(47, 2, d, 0.9).row(1);
  FeatureMap full = fsq::gq_map(d, 27, 1.0, 0);
  double exact = gaussian_pair(full, x, y);

  fsq::SampleStats stats = fsq::empirical_variance(
      [&](std::uint64_t s) {
        FeatureMap sub = fsq::gq_map(d, 7, 1.0, s);
        return gaussian_pair(sub, x, y);
      },
      20000, 51);
  CHECK(std::abs(stats.mean - exact) < 3.0 * stats.se_mean);
}

TEST_CASE("sparse-grid map coincides with the third-degree rule") {
  for (int d : {1, 4, 9}) {
    FeatureMap sgq = fsq::sgq_third_map(d);
    fsq::QuadratureRule rule = fsq::third_degree_rule(d);
    REQUIRE(sgq.node_count() == 2 * d + 1);
    Eigen::MatrixXd nodes = sgq.sparse_mat.toDense();
    CHECK((nodes - rule.nodes).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sgq.weights - rule.weights).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sgq.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS(fsq::sgq_third_map(0));
  CHECK_THROWS(fsq::sgq_third_map(3, 0.0));
}

TEST_CASE("spherical-radial blocks integrate constants exactly") {
  fsq::Rng rng = fsq::make_rng(53);
  for (int d : {2, 5}) {
    Eigen::MatrixXd q = fsq::haar_orthogonal(rng, d);
    FeatureMap block = fsq::ssr_block_map(q, 1.7);
    CHECK(block.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::VectorXd x = random_points(59, 1, d, 1.0).row(0);
    CHECK(gaussian_pair(block, x, x) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS(fsq::ssr_block_map(Eigen::MatrixXd::Zero(3, 2), 1.0));
  CHECK_THROWS(fsq::ssr_block_map(Eigen::MatrixXd::Identity(3, 3), 0.0));
}

TEST_CASE("spherical-radial map with identity rotation recovers the rule") {
  const int d = 4;
  FeatureMap block =
      fsq::ssr_block_map(Eigen::MatrixXd::Identity(d, d), kRoot3);
  fsq::QuadratureRule rule = fsq::third_degree_rule(d);
  CHECK((block.dense - rule.nodes).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((block.weights - rule.weights).cwiseAbs().maxCoeff() < 1e-12);

  // stacked map with a whole number of blocks also sums to one
  FeatureMap stacked = fsq::ssr_map(d, 3 * (2 * d + 1), 61);
  CHECK(stacked.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spherical-radial estimates are unbiased for the Gaussian kernel") {
  const int d = 5;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  y[0] = 1.0;  // unit separation at input_scale 1
  double exact = std::exp(-0.5);

  fsq::SampleStats stats = fsq::empirical_variance(
      [&](std::uint64_t s) {
        FeatureMap block = fsq::ssr_map(d, 2 * d + 1, s);
        return gaussian_pair(block, x, y);
      },
      100000, 67);
  CHECK(std::abs(stats.mean - exact) < 3.0 * stats.se_mean);
}

TEST_CASE("every baseline evaluates to one at coincident inputs") {
  const int d = 6;
  Eigen::VectorXd x = random_points(71, 1, d, 1.1).row(0);
  std::vector<FeatureMap> maps;
  maps.push_back(fsq::rff_matrix(d, 40, 0.9, 1));
  maps.push_back(fsq::orf_matrix(d, 40, 0.9, 2));
  maps.push_back(fsq::rom_matrix(d, 40, 0.9, 3, 3));
  maps.push_back(fsq::qmc_matrix(d, 40, 0.9));
  maps.push_back(fsq::gq_map(d, 40, 0.9, 4));
  maps.push_back(fsq::sgq_third_map(d, kRoot3, Activation::CosSin,
                                    fsq::gaussian_input_scale(d, 0.81)));
  maps.push_back(fsq::ssr_map(d, 2 * (2 * d + 1), 5, Activation::CosSin,
                              fsq::gaussian_input_scale(d, 0.81)));
  for (const FeatureMap& map : maps)
    CHECK(gaussian_pair(map, x, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("map generators validate their arguments") {
  CHECK_THROWS(fsq::rff_matrix(0, 8, 1.0, 1));
  CHECK_THROWS(fsq::rff_matrix(3, 0, 1.0, 1));
  CHECK_THROWS(fsq::rff_matrix(3, 8, 0.0, 1));
  CHECK_NOTHROW(fsq::rff_matrix(3, 8, -1.0, 1, Activation::Relu));
  CHECK_THROWS(fsq::orf_matrix(3, 8, -1.0, 1));
  CHECK_THROWS(fsq::qmc_matrix(3, 8, 0.0));
  CHECK_THROWS(fsq::gq_map(3, 8, 0.0, 1));
}

TEST_CASE("surface areas match the closed forms in low dimension") {
  CHECK(fsq::sphere_surface_area(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fsq::sphere_surface_area(2) ==
        doctest::Approx(2.0 * M_PI).epsilon(1e-12));
  CHECK(fsq::sphere_surface_area(3) ==
        doctest::Approx(4.0 * M_PI).epsilon(1e-12));
  CHECK_THROWS(fsq::sphere_surface_area(0));
}

TEST_CASE("spherical rule places antipodal unit nodes with uniform weights") {
  const int d = 5;
  fsq::Rng rng = fsq::make_rng(73);
  Eigen::MatrixXd q = fsq::haar_orthogonal(rng, d);
  fsq::SphericalRule rule = fsq::spherical_rule(q);
  REQUIRE(rule.nodes.cols() == 2 * d);
  CHECK(rule.weights.sum() ==
        doctest::Approx(fsq::sphere_surface_area(d)).epsilon(1e-12));
  for (int j = 0; j < d; ++j) {
    CHECK(rule.nodes.col(2 * j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((rule.nodes.col(2 * j) + rule.nodes.col(2 * j + 1)).norm() < 1e-12);
    CHECK((rule.nodes.col(2 * j) - q.col(j)).norm() < 1e-12);
  }
}

TEST_CASE("projected third-degree rule reproduces the spherical rule") {
  fsq::Rng rng = fsq::make_rng(79);
  for (int d : {3, 7}) {
    fsq::QuadratureRule rule3 = fsq::third_degree_rule(d);
    for (int rep = 0; rep < 5; ++rep) {
      Eigen::MatrixXd q = fsq::haar_orthogonal(rng, d);
      fsq::SphericalRule projected =
          fsq::project_third_degree_to_sphere(rule3, q);
      fsq::SphericalRule direct = fsq::spherical_rule(q);
      CHECK((projected.nodes - direct.nodes).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((projected.weights - direct.weights).cwiseAbs().maxCoeff() <
            1e-10);
    }
  }
  CHECK_THROWS(fsq::project_third_degree_to_sphere(
      fsq::fifth_degree_rule(3), Eigen::MatrixXd::Identity(3, 3)));
  CHECK_THROWS(fsq::project_third_degree_to_sphere(
      fsq::third_degree_rule(3), Eigen::MatrixXd::Identity(4, 4)));
}
