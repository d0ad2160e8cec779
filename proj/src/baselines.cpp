#include "fsq/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fsq/random.hpp"

namespace fsq {

namespace {

// Canonical transforms store standard-normal-like frequencies; the kernel
// width enters through input_scale for the cosine-sine activation only
// (arc-cosine features use unit-variance frequencies directly).
double width_scale(int d, double sigma, Activation activation) {
  if (activation != Activation::CosSin) return 1.0;
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  return 1.0 / (sigma * std::sqrt(static_cast<double>(d)));
}

void check_dims(int d, int N) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (N < 1) throw std::invalid_argument("node count must be >= 1");
}

FeatureMap dense_equal_weight_map(MapKind kind, Activation activation, int d,
                                  Eigen::MatrixXd columns, double scale) {
  FeatureMap map;
  map.kind = kind;
  map.activation = activation;
  map.input_dim = d;
  map.input_scale = scale;
  map.sparse = false;
  map.dense = std::move(columns);
  map.weights =
      Eigen::VectorXd::Constant(map.dense.cols(), 1.0 / map.dense.cols());
  return map;
}

int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Unnormalized Walsh-Hadamard transform applied to every column in place.
void walsh_hadamard_columns(Eigen::MatrixXd& M) {
  int n = static_cast<int>(M.rows());
  for (int len = 1; len < n; len <<= 1) {
    for (int i = 0; i < n; i += len << 1) {
      for (int j = i; j < i + len; ++j) {
        Eigen::RowVectorXd a = M.row(j);
        Eigen::RowVectorXd b = M.row(j + len);
        M.row(j) = a + b;
        M.row(j + len) = a - b;
      }
    }
  }
}

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  int candidate = 2;
  while (static_cast<int>(primes.size()) < count) {
    bool is_prime = true;
    for (int p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(candidate);
    ++candidate;
  }
  return primes;
}

}  // namespace

FeatureMap rff_matrix(int d, int N, double sigma, std::uint64_t seed,
                      Activation activation) {
  check_dims(d, N);
  Rng rng = make_rng(seed);
  return dense_equal_weight_map(MapKind::Rff, activation, d,
                                gaussian_matrix(rng, d, N),
                                width_scale(d, sigma, activation));
}

FeatureMap orf_matrix(int d, int N, double sigma, std::uint64_t seed,
                      Activation activation) {
  check_dims(d, N);
  Rng rng = make_rng(seed);
  Eigen::MatrixXd columns(d, N);
  int filled = 0;
  while (filled < N) {
    Eigen::MatrixXd q = haar_orthogonal(rng, d);
    int take = std::min(d, N - filled);
    for (int i = 0; i < take; ++i)
      columns.col(filled + i) = chi_draw(rng, d) * q.col(i);
    filled += take;
  }
  return dense_equal_weight_map(MapKind::Orf, activation, d, std::move(columns),
                                width_scale(d, sigma, activation));
}

FeatureMap rom_matrix(int d, int N, double sigma, int t, std::uint64_t seed,
                      Activation activation) {
  check_dims(d, N);
  if (t < 1) throw std::invalid_argument("need at least one factor");
  int n_pad = next_power_of_two(d);
  Rng rng = make_rng(seed);
  std::bernoulli_distribution coin(0.5);
  double h_norm = std::sqrt(static_cast<double>(n_pad));

  Eigen::MatrixXd columns(d, N);
  int filled = 0;
  while (filled < N) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Identity(n_pad, n_pad);
    for (int rep = 0; rep < t; ++rep) {
      for (int i = 0; i < n_pad; ++i)
        if (coin(rng)) block.row(i) = -block.row(i);
      walsh_hadamard_columns(block);
      block /= h_norm;
    }
    // rows of sqrt(n_pad) * block mimic standard-normal frequency vectors;
    // truncate each to the leading d input coordinates
    int take = std::min(n_pad, N - filled);
    for (int r = 0; r < take; ++r)
      columns.col(filled + r) = h_norm * block.row(r).head(d).transpose();
    filled += take;
  }

  // family constant: sqrt(2/sigma^2) for the Gaussian kernel, sqrt(d) for
  // arc-cosine; divided by sqrt(n_pad) because the stored columns already
  // carry the sqrt(n_pad) standard-normal calibration
  double c;
  if (activation == Activation::CosSin) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
    c = std::sqrt(2.0) / sigma;
  } else {
    c = std::sqrt(static_cast<double>(d));
  }
  double scale = c / h_norm;
  return dense_equal_weight_map(MapKind::Rom, activation, d, std::move(columns),
                                scale);
}

double halton_value(std::uint64_t index, int base) {
  if (base < 2) throw std::invalid_argument("base must be >= 2");
  double value = 0.0, inv = 1.0 / base;
  double factor = inv;
  while (index > 0) {
    value += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv;
  }
  return value;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("probability must lie in (0, 1)");
  // rational approximation (central + tail branches), then one Halley step
  // against the exact erfc-based CDF for ~1e-15 accuracy
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00, 2.938163982698783e+00};
  static const double e[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425, p_high = 1.0 - p_low;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
  } else if (p <= p_high) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
  }
  double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

FeatureMap qmc_matrix(int d, int N, double sigma, Activation activation) {
  check_dims(d, N);
  std::vector<int> bases = first_primes(d);
  Eigen::MatrixXd columns(d, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < d; ++i)
      columns(i, j) = inverse_normal_cdf(
          halton_value(static_cast<std::uint64_t>(j) + 1, bases[i]));
  return dense_equal_weight_map(MapKind::Qmc, activation, d, std::move(columns),
                                width_scale(d, sigma, activation));
}

FeatureMap gq_map(int d, int N, double sigma, std::uint64_t seed,
                  Activation activation) {
  check_dims(d, N);
  const double node_vals[3] = {-std::sqrt(3.0), 0.0, std::sqrt(3.0)};
  const double node_probs[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};

  // full grid when affordable: exact product rule, product weights
  double grid_size = std::pow(3.0, d);
  if (grid_size <= static_cast<double>(N)) {
    int total = static_cast<int>(grid_size);
    FeatureMap map;
    map.kind = MapKind::Gq;
    map.activation = activation;
    map.input_dim = d;
    map.input_scale = width_scale(d, sigma, activation);
    map.sparse = false;
    map.dense.resize(d, total);
    map.weights.resize(total);
    std::vector<int> idx(d, 0);
    for (int k = 0; k < total; ++k) {
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        map.dense(i, k) = node_vals[idx[i]];
        w *= node_probs[idx[i]];
      }
      map.weights[k] = w;
      for (int i = 0; i < d; ++i) {
        if (++idx[i] < 3) break;
        idx[i] = 0;
      }
    }
    return map;
  }

  // subsample: product weights factor into independent per-coordinate draws
  Rng rng = make_rng(seed);
  std::discrete_distribution<int> pick({node_probs[0], node_probs[1], node_probs[2]});
  Eigen::MatrixXd columns(d, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < d; ++i) columns(i, j) = node_vals[pick(rng)];
  return dense_equal_weight_map(MapKind::Gq, activation, d, std::move(columns),
                                width_scale(d, sigma, activation));
}

FeatureMap sgq_third_map(int d, double lambda1, Activation activation,
                         double input_scale) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (lambda1 <= 0.0) throw std::invalid_argument("lambda1 must be positive");
  double l2 = lambda1 * lambda1;
  double a0_hat = 1.0 - 1.0 / l2;        // univariate origin weight
  double a1_hat = 1.0 / (2.0 * l2);      // univariate axis weight
  FeatureMap map;
  map.kind = MapKind::Sgq;
  map.activation = activation;
  map.input_dim = d;
  map.input_scale = input_scale;
  map.sparse = true;
  Eigen::MatrixXd columns = Eigen::MatrixXd::Zero(d, 2 * d + 1);
  map.weights.resize(2 * d + 1);
  map.weights[0] = 1.0 - d + d * a0_hat;  // sparse-grid combination at level 1
  for (int i = 0; i < d; ++i) {
    columns(i, 1 + 2 * i) = lambda1;
    columns(i, 2 + 2 * i) = -lambda1;
    map.weights[1 + 2 * i] = a1_hat;
    map.weights[2 + 2 * i] = a1_hat;
  }
  map.sparse_mat = columns.sparseView();
  map.sparse_mat.makeCompressed();
  return map;
}

namespace {

void fill_ssr_block(Eigen::MatrixXd& columns, Eigen::VectorXd& weights,
                    int offset, int take, const Eigen::MatrixXd& Q, double rho,
                    double block_scale) {
  int d = static_cast<int>(Q.rows());
  double origin_w = (1.0 - d / (rho * rho)) * block_scale;
  double axis_w = 1.0 / (2.0 * rho * rho) * block_scale;
  for (int k = 0; k < take; ++k) {
    int c = offset + k;
    if (k == 0) {
      columns.col(c).setZero();
      weights[c] = origin_w;
    } else {
      int j = (k - 1) / 2;
      double sign = (k - 1) % 2 == 0 ? 1.0 : -1.0;
      columns.col(c) = sign * rho * Q.col(j);
      weights[c] = axis_w;
    }
  }
}

}  // namespace

FeatureMap ssr_block_map(const Eigen::MatrixXd& Q, double rho,
                         Activation activation, double input_scale) {
  int d = static_cast<int>(Q.rows());
  if (Q.cols() != d) throw std::invalid_argument("Q must be square");
  if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
  FeatureMap map;
  map.kind = MapKind::Ssr;
  map.activation = activation;
  map.input_dim = d;
  map.input_scale = input_scale;
  map.sparse = false;
  map.dense.resize(d, 2 * d + 1);
  map.weights.resize(2 * d + 1);
  fill_ssr_block(map.dense, map.weights, 0, 2 * d + 1, Q, rho, 1.0);
  return map;
}

FeatureMap ssr_map(int d, int N, std::uint64_t seed, Activation activation,
                   double input_scale) {
  check_dims(d, N);
  int block_nodes = 2 * d + 1;
  int blocks = (N + block_nodes - 1) / block_nodes;
  Rng rng = make_rng(seed);

  FeatureMap map;
  map.kind = MapKind::Ssr;
  map.activation = activation;
  map.input_dim = d;
  map.input_scale = input_scale;
  map.sparse = false;
  map.dense.resize(d, N);
  map.weights.resize(N);
  for (int b = 0; b < blocks; ++b) {
    Eigen::MatrixXd q = haar_orthogonal(rng, d);
    double rho = chi_draw(rng, d + 2);
    int offset = b * block_nodes;
    int take = std::min(block_nodes, N - offset);
    fill_ssr_block(map.dense, map.weights, offset, take, q, rho, 1.0 / blocks);
  }
  return map;
}

double sphere_surface_area(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  return std::exp(std::log(2.0) + 0.5 * d * std::log(M_PI) -
                  std::lgamma(0.5 * d));
}

SphericalRule spherical_rule(const Eigen::MatrixXd& Q) {
  int d = static_cast<int>(Q.rows());
  if (Q.cols() != d) throw std::invalid_argument("Q must be square");
  SphericalRule rule;
  rule.nodes.resize(d, 2 * d);
  rule.weights =
      Eigen::VectorXd::Constant(2 * d, sphere_surface_area(d) / (2.0 * d));
  for (int j = 0; j < d; ++j) {
    rule.nodes.col(2 * j) = Q.col(j);
    rule.nodes.col(2 * j + 1) = -Q.col(j);
  }
  return rule;
}

SphericalRule project_third_degree_to_sphere(const QuadratureRule& rule3,
                                             const Eigen::MatrixXd& Q) {
  if (rule3.degree != 3) throw std::invalid_argument("need a third-degree rule");
  int d = rule3.dim;
  if (Q.rows() != d || Q.cols() != d)
    throw std::invalid_argument("Q shape differs from rule dimension");
  double lambda1 = rule3.levels.at(1);

  // weights of the rule for the non-normalized Gaussian weight e^{-||x||^2}:
  // nodes shrink by 1/sqrt(2), weights gain pi^{d/2}
  double log_pi_half_d = 0.5 * d * std::log(M_PI);
  double axis_weight = std::exp(log_pi_half_d) / (2.0 * lambda1 * lambda1);
  double radius2 = lambda1 * lambda1 / 2.0;  // ||gamma_bar||^2 after rescale

  // degree-2 moment compensation: divide by Gamma(d/2 + 1)/2
  double compensation = std::exp(std::lgamma(0.5 * d + 1.0)) / 2.0;

  SphericalRule rule;
  rule.nodes.resize(d, 2 * d);
  rule.weights.resize(2 * d);
  int out = 0;
  for (int k = 0; k < rule3.count(); ++k) {
    Eigen::VectorXd gamma_bar = rule3.nodes.col(k) / std::sqrt(2.0);
    double norm = gamma_bar.norm();
    if (norm == 0.0) continue;  // the origin has no spherical image
    Eigen::VectorXd projected = Q * gamma_bar;
    rule.nodes.col(out) = projected / norm;
    rule.weights[out] = axis_weight * radius2 / compensation;
    ++out;
  }
  if (out != 2 * d) throw std::logic_error("unexpected node count");
  return rule;
}

}  // namespace fsq
