#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "fsq/analysis.hpp"
#include "fsq/random.hpp"
#include "fsq/rules.hpp"
#include "fsq/stochastic.hpp"
#include "oracles.hpp"

using fsq::GeneratorVector;
using fsq::QuadratureRule;

namespace {

const double kRoot3 = std::sqrt(3.0);

Eigen::VectorXd random_omega(std::uint64_t seed, int d) {
  fsq::Rng rng = fsq::make_rng(seed);
  return fsq::gaussian_matrix(rng, d, 1).col(0);
}

}  // namespace

TEST_CASE("randomized third-degree weights") {
  Eigen::VectorXd unit = Eigen::VectorXd::Ones(4);  // squared norm = d
  fsq::RandomizedThirdWeights w = fsq::randomized_third_weights(unit);
  CHECK(w.origin == doctest::Approx(1.0 - 4.0 / 3.0).epsilon(1e-14));
  CHECK(w.axis == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  w = fsq::randomized_third_weights(zero);
  CHECK(w.origin == 1.0);
  CHECK(w.axis == 0.0);

  CHECK_THROWS(fsq::randomized_third_weights(Eigen::VectorXd(), kRoot3));
  CHECK_THROWS(fsq::randomized_third_weights(unit, 0.0));
}

TEST_CASE("randomized weights stay normalized for every draw") {
  for (int d : {1, 3, 10, 20}) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      Eigen::VectorXd omega = random_omega(1000 + s, d);
      fsq::RandomizedThirdWeights w = fsq::randomized_third_weights(omega);
      CHECK(std::abs(w.origin + 2.0 * d * w.axis - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("randomized weight expectations recover the deterministic weights") {
  int d = 5;
  QuadratureRule r3 = fsq::third_degree_rule(d);
  auto origin_est = [&](std::uint64_t s) {
    return fsq::randomized_third_weights(random_omega(s, d)).origin;
  };
  auto axis_est = [&](std::uint64_t s) {
    return fsq::randomized_third_weights(random_omega(s, d)).axis;
  };
  fsq::SampleStats so = fsq::empirical_variance(origin_est, 100000, 11);
  fsq::SampleStats sa = fsq::empirical_variance(axis_est, 100000, 12);
  CHECK(std::abs(so.mean - r3.weights[0]) < 3.0 * so.se_mean);
  CHECK(std::abs(sa.mean - r3.weights[1]) < 3.0 * sa.se_mean);
}

TEST_CASE("general randomized weight specializes to the closed form") {
  GeneratorVector gen = GeneratorVector::standard(2);
  for (int d : {1, 2, 6}) {
    std::vector<int> axis(d, 0);
    axis[0] = 1;
    std::vector<int> origin(d, 0);
    for (std::uint64_t s = 0; s < 10; ++s) {
      Eigen::VectorXd omega = random_omega(40 + s, d);
      fsq::RandomizedThirdWeights w = fsq::randomized_third_weights(omega);
      CHECK(fsq::randomized_weight_general(axis, 1, omega, gen) ==
            doctest::Approx(w.axis).epsilon(1e-13));
      CHECK(fsq::randomized_weight_general(origin, 1, omega, gen) ==
            doctest::Approx(w.origin).epsilon(1e-13));
    }
  }
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  CHECK(fsq::randomized_weight_general({0, 0, 0}, 1, zero, gen) == 1.0);
}

TEST_CASE("general randomized weight is unbiased for the deterministic weight") {
  GeneratorVector gen = GeneratorVector::standard(2);
  int d = 3;
  for (std::vector<int> p : {std::vector<int>{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}) {
    double target = fsq::interpolatory_weight(p, 2, d, gen);
    auto est = [&](std::uint64_t s) {
      return fsq::randomized_weight_general(p, 2, random_omega(s, d), gen);
    };
    fsq::SampleStats stats = fsq::empirical_variance(est, 100000, 21);
    CHECK(std::abs(stats.mean - target) < 3.0 * stats.se_mean);
  }
}

TEST_CASE("general randomized weight rejects bad input") {
  GeneratorVector gen = GeneratorVector::standard(3);
  Eigen::VectorXd omega = random_omega(3, 3);
  CHECK_THROWS(fsq::randomized_weight_general({1, 0, 0}, 3, omega, gen));
  CHECK_THROWS(fsq::randomized_weight_general({0, 1, 0}, 2, omega, gen));
  CHECK_THROWS(fsq::randomized_weight_general({1, 0}, 1, omega, gen));
  GeneratorVector dup;
  dup.levels = {0.0, 2.0, 2.0};
  CHECK_THROWS(fsq::randomized_weight_general({1, 0, 0}, 1, omega, dup));
}

TEST_CASE("single-draw rule matches the deterministic rule at the pivot draw") {
  int d = 4;
  QuadratureRule r3 = fsq::third_degree_rule(d);
  Eigen::VectorXd z(d);
  z << 0.3, -0.9, 0.5, 0.1;
  auto f = [&](const auto& w) { return std::cos(w.dot(z)); };
  Eigen::VectorXd pivot = Eigen::VectorXd::Ones(d);  // squared norm = d
  CHECK(fsq::stochastic_third_eval(f, pivot, r3) ==
        doctest::Approx(fsq::apply_rule(r3, f)).epsilon(1e-13));

  auto one = [](const auto&) { return 1.0; };
  for (std::uint64_t s = 0; s < 5; ++s) {
    CHECK(fsq::stochastic_third_eval(one, random_omega(s, d), r3) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("single-draw rule is unbiased for the deterministic value") {
  int d = 4;
  QuadratureRule r3 = fsq::third_degree_rule(d);
  Eigen::VectorXd z(d);
  z << 0.4, 0.2, -0.6, 0.8;
  auto f = [&](const auto& w) { return std::cos(w.dot(z)); };
  double target = fsq::apply_rule(r3, f);
  auto est = [&](std::uint64_t s) {
    return fsq::stochastic_third_eval(f, random_omega(s, d), r3);
  };
  fsq::SampleStats stats = fsq::empirical_variance(est, 200000, 31);
  CHECK(std::abs(stats.mean - target) < 3.0 * stats.se_mean);
}

TEST_CASE("variance-reduced estimator basics") {
  int d = 5;
  QuadratureRule r3 = fsq::third_degree_rule(d);
  fsq::Rng rng = fsq::make_rng(77);
  Eigen::MatrixXd omegas = fsq::gaussian_matrix(rng, d, 64);

  auto one = [](const auto&) { return 1.0; };
  fsq::ControlVariateEstimate est = fsq::rbar_estimate(one, omegas, r3);
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(est.residuals.size() == 64);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  auto kernel_at_zero = [&](const auto& w) { return std::cos(w.dot(zero)); };
  CHECK(fsq::rbar_estimate(kernel_at_zero, omegas, r3).value ==
        doctest::Approx(1.0).epsilon(1e-13));

  Eigen::MatrixXd empty(d, 0);
  CHECK_THROWS(fsq::rbar_estimate(one, empty, r3));
  Eigen::MatrixXd wrong(d + 1, 3);
  CHECK_THROWS(fsq::rbar_estimate(one, wrong, r3));
}

TEST_CASE("variance-reduced estimator is unbiased for the Gaussian kernel") {
  int d = 5;
  QuadratureRule r3 = fsq::third_degree_rule(d);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
  z[0] = 1.0;  // unit displacement
  auto f = [&](const auto& w) { return std::cos(w.dot(z)); };
  fsq::Rng rng = fsq::make_rng(123);
  Eigen::MatrixXd omegas = fsq::gaussian_matrix(rng, d, 100000);
  fsq::ControlVariateEstimate est = fsq::rbar_estimate(f, omegas, r3);

  double mean = est.value;
  double var = 0.0;
  for (double r : est.residuals) var += (r - mean) * (r - mean);
  var /= static_cast<double>(est.residuals.size() - 1);
  double se = std::sqrt(var / static_cast<double>(est.residuals.size()));
  CHECK(std::abs(mean - std::exp(-0.5)) < 3.0 * se);
}

TEST_CASE("residuals integrate symmetric low-degree integrands exactly") {
  int d = 4;
  QuadratureRule r3 = fsq::third_degree_rule(d);
  auto norm2 = [](const auto& w) { return w.squaredNorm(); };
  for (std::uint64_t s = 0; s < 10; ++s) {
    Eigen::VectorXd omega = random_omega(500 + s, d);
    // constant and symmetrized second-moment integrands: the Monte-Carlo and
    // stochastic-rule terms cancel, leaving the deterministic value
    CHECK(fsq::residual_eval([](const auto&) { return 1.0; }, omega, r3) ==
          doctest::Approx(1.0).epsilon(1e-13));
    CHECK(fsq::residual_eval(norm2, omega, r3) ==
          doctest::Approx(static_cast<double>(d)).epsilon(1e-12));
  }
}

TEST_CASE("sign-flipped residual pairs kill odd monomials") {
  int d = 3;
  QuadratureRule r3 = fsq::third_degree_rule(d);
  for (std::vector<int> powers :
       {std::vector<int>{1, 0, 0}, {3, 0, 0}, {1, 1, 1}, {2, 1, 0}}) {
    auto f = [&](const auto& w) { return oracle::monomial_eval(w, powers); };
    for (std::uint64_t s = 0; s < 8; ++s) {
      Eigen::VectorXd omega = random_omega(900 + s, d);
      double plus = fsq::residual_eval(f, omega, r3);
      Eigen::VectorXd neg = -omega;
      double minus = fsq::residual_eval(f, neg, r3);
      CHECK(std::abs(0.5 * (plus + minus)) < 1e-12);
    }
  }
}

TEST_CASE("triple-stochastic rule") {
  int d = 4;
  fsq::Rng rng = fsq::make_rng(9);
  Eigen::MatrixXd Q = fsq::haar_orthogonal(rng, d);
  auto one = [](const auto&) { return 1.0; };
  for (double rho : {0.7, 2.0, 3.5}) {
    for (double beta : {1.0, 2.5, 4.0}) {
      CHECK(fsq::triple_stochastic_eval(one, Q, rho, beta) ==
            doctest::Approx(1.0).epsilon(1e-13));
    }
  }

  Eigen::VectorXd z(d);
  z << 0.5, -0.2, 0.9, 0.3;
  auto f = [&](const auto& w) { return std::cos(w.dot(z)); };

  // beta pinned to d: one spherical-radial block
  double rho = fsq::chi_draw(rng, d + 2);
  double block = (1.0 - d / (rho * rho)) * f(Eigen::VectorXd::Zero(d).eval());
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd node = rho * Q.col(j);
    Eigen::VectorXd neg = -node;
    block += (f(node) + f(neg)) / (2.0 * rho * rho);
  }
  CHECK(fsq::triple_stochastic_eval(f, Q, rho, static_cast<double>(d)) ==
        doctest::Approx(block).epsilon(1e-12));

  // additionally pinning the rotation and radius: the deterministic rule
  QuadratureRule r3 = fsq::third_degree_rule(d);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  CHECK(fsq::triple_stochastic_eval(f, eye, kRoot3, static_cast<double>(d)) ==
        doctest::Approx(fsq::apply_rule(r3, f)).epsilon(1e-12));

  CHECK_THROWS(fsq::triple_stochastic_eval(f, Q, 0.0, 1.0));
  Eigen::MatrixXd rect(d, d + 1);
  CHECK_THROWS(fsq::triple_stochastic_eval(f, rect, 1.0, 1.0));
}
