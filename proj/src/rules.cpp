#include "fsq/rules.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace fsq {

GeneratorVector GeneratorVector::standard(int max_level) {
  if (max_level < 0) throw std::invalid_argument("generator level must be >= 0");
  GeneratorVector gen;
  gen.levels.resize(max_level + 1);
  gen.levels[0] = 0.0;
  for (int i = 1; i <= max_level; ++i) gen.levels[i] = i * std::sqrt(3.0);
  return gen;
}

void GeneratorVector::validate() const {
  if (levels.empty() || levels[0] != 0.0)
    throw std::invalid_argument("generator levels must start at 0");
  for (size_t i = 0; i < levels.size(); ++i)
    for (size_t j = i + 1; j < levels.size(); ++j)
      if (levels[i] * levels[i] == levels[j] * levels[j])
        throw std::invalid_argument("generator levels must have distinct squares");
}

namespace {

void partitions_rec(int d, int slot, int remaining, int cap,
                    std::vector<int>& current,
                    std::vector<std::vector<int>>& out) {
  if (slot == d) {
    out.push_back(current);
    return;
  }
  for (int v = std::min(cap, remaining); v >= 0; --v) {
    current[slot] = v;
    partitions_rec(d, slot + 1, remaining - v, v, current, out);
  }
  current[slot] = 0;
}

}  // namespace

std::vector<std::vector<int>> enumerate_partitions(int m, int d) {
  if (m < 0 || d < 1) throw std::invalid_argument("need m >= 0 and d >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> current(d, 0);
  partitions_rec(d, 0, m, m, current, out);
  // stable, documented order: ascending by sum, then ascending lexicographic
  // within a sum ([1,1] before [2,0])
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    int sa = 0, sb = 0;
    for (int v : a) sa += v;
    for (int v : b) sb += v;
    if (sa != sb) return sa < sb;
    return a < b;
  });
  return out;
}

double coefficient_b(int i, const GeneratorVector& gen) {
  if (i < 0) throw std::invalid_argument("coefficient index must be >= 0");
  if (i > gen.max_level() + 1)
    throw std::invalid_argument("coefficient index exceeds generator length");
  // expand prod_{j<i} (y - level_j^2) in y = x^2
  std::vector<double> poly{1.0};
  for (int j = 0; j < i; ++j) {
    double l2 = gen.levels[j] * gen.levels[j];
    std::vector<double> next(poly.size() + 1, 0.0);
    for (size_t k = 0; k < poly.size(); ++k) {
      next[k + 1] += poly[k];
      next[k] -= l2 * poly[k];
    }
    poly = std::move(next);
  }
  // E[x^{2k}] = (2k-1)!! for x ~ N(0,1)
  double moment = 1.0, value = 0.0;
  for (size_t k = 0; k < poly.size(); ++k) {
    if (k > 0) moment *= static_cast<double>(2 * k - 1);
    value += poly[k] * moment;
  }
  return value;
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

// Enumerate all nonnegative integer vectors u with sum(u) <= budget, calling
// cb once per vector. Vectors are visited by lowest-index nonzero entry, so
// the count is the number of monomials of degree <= budget in d variables.
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

double interpolatory_weight(const std::vector<int>& partition, int m, int d,
                            const GeneratorVector& gen) {
  if (static_cast<int>(partition.size()) != d)
    throw std::invalid_argument("partition length must equal d");
  gen.validate();
  int psum = 0, nonzero = 0;
  for (size_t i = 0; i < partition.size(); ++i) {
    if (partition[i] < 0) throw std::invalid_argument("partition entries must be >= 0");
    if (i > 0 && partition[i] > partition[i - 1])
      throw std::invalid_argument("partition must be non-increasing");
    psum += partition[i];
    if (partition[i] > 0) ++nonzero;
  }
  if (psum > m) throw std::invalid_argument("partition sum exceeds rule level");
  if (m > gen.max_level())
    throw std::invalid_argument("rule level exceeds generator length");

  double total = 0.0;
  std::vector<int> u(d, 0);
  bounded_vectors_rec(u, 0, m - psum, [&](const std::vector<int>& uv) {
    double term = 1.0;
    for (int i = 0; i < d; ++i) {
      int l = uv[i] + partition[i];
      if (l == 0) continue;  // b_0 = 1 over an empty denominator
      term *= coefficient_b(l, gen) / denominator(l, partition[i], gen);
    }
    total += term;
  });
  return total / static_cast<double>(1 << nonzero);
}

QuadratureRule third_degree_rule(int d, double lambda1) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (lambda1 <= 0.0) throw std::invalid_argument("lambda1 must be positive");
  double l2 = lambda1 * lambda1;
  QuadratureRule rule;
  rule.dim = d;
  rule.degree = 3;
  rule.levels = {0.0, lambda1};
  rule.nodes = Eigen::MatrixXd::Zero(d, 2 * d + 1);
  rule.weights.resize(2 * d + 1);
  rule.weights[0] = 1.0 - d / l2;
  double axis_w = 1.0 / (2.0 * l2);
  for (int i = 0; i < d; ++i) {
    rule.nodes(i, 1 + 2 * i) = lambda1;
    rule.nodes(i, 2 + 2 * i) = -lambda1;
    rule.weights[1 + 2 * i] = axis_w;
    rule.weights[2 + 2 * i] = axis_w;
  }
  return rule;
}

QuadratureRule fifth_degree_rule(int d, double lambda1, double lambda2) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (lambda1 <= 0.0 || lambda2 <= 0.0)
    throw std::invalid_argument("levels must be positive");
  double l1 = lambda1 * lambda1, l2 = lambda2 * lambda2;
  if (l1 == l2) throw std::invalid_argument("levels must have distinct squares");

  double w_origin = 1.0 - d / l1 + d * (d - 1) / (2.0 * l1 * l1) +
                    d * (3.0 - l1) / (l1 * l2);
  double w_axis1 = 1.0 / (2.0 * l1) + (3.0 - l1) / (2.0 * l1 * (l1 - l2)) -
                   (d - 1) / (2.0 * l1 * l1);
  double w_pair = 1.0 / (4.0 * l1 * l1);
  double w_axis2 = (3.0 - l1) / (2.0 * l2 * (l2 - l1));

  double scale = std::max({1.0, std::abs(w_origin), std::abs(w_axis1), w_pair});
  bool keep_axis2 = std::abs(w_axis2) > 1e-14 * scale;

  int pair_nodes = 2 * d * (d - 1);  // 4 sign combinations per unordered pair
  int count = 1 + 2 * d + pair_nodes + (keep_axis2 ? 2 * d : 0);

  QuadratureRule rule;
  rule.dim = d;
  rule.degree = 5;
  rule.levels = {0.0, lambda1, lambda2};
  rule.nodes = Eigen::MatrixXd::Zero(d, count);
  rule.weights.resize(count);

  int c = 0;
  rule.weights[c++] = w_origin;
  for (int i = 0; i < d; ++i) {
    rule.nodes(i, c) = lambda1;
    rule.weights[c++] = w_axis1;
    rule.nodes(i, c) = -lambda1;
    rule.weights[c++] = w_axis1;
  }
  for (int i = 0; i < d; ++i) {
    for (int t = i + 1; t < d; ++t) {
      const double signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
      for (auto& s : signs) {
        rule.nodes(i, c) = s[0] * lambda1;
        rule.nodes(t, c) = s[1] * lambda1;
        rule.weights[c++] = w_pair;
      }
    }
  }
  if (keep_axis2) {
    for (int i = 0; i < d; ++i) {
      rule.nodes(i, c) = lambda2;
      rule.weights[c++] = w_axis2;
      rule.nodes(i, c) = -lambda2;
      rule.weights[c++] = w_axis2;
    }
  }
  return rule;
}

std::string rule_to_json(const QuadratureRule& rule) {
  nlohmann::json j;
  j["dim"] = rule.dim;
  j["degree"] = rule.degree;
  j["lambdas"] = rule.levels;
  std::vector<std::vector<double>> nodes(rule.count());
  for (int k = 0; k < rule.count(); ++k) {
    nodes[k].assign(rule.nodes.col(k).data(), rule.nodes.col(k).data() + rule.dim);
  }
  j["nodes"] = nodes;
  j["weights"] = std::vector<double>(rule.weights.data(),
                                     rule.weights.data() + rule.count());
  return j.dump();
}

QuadratureRule rule_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  QuadratureRule rule;
  rule.dim = j.at("dim").get<int>();
  rule.degree = j.at("degree").get<int>();
  rule.levels = j.at("lambdas").get<std::vector<double>>();
  auto nodes = j.at("nodes").get<std::vector<std::vector<double>>>();
  auto weights = j.at("weights").get<std::vector<double>>();
  if (nodes.size() != weights.size())
    throw std::invalid_argument("node and weight counts differ");
  rule.nodes.resize(rule.dim, static_cast<int>(nodes.size()));
  rule.weights.resize(static_cast<int>(weights.size()));
  for (size_t k = 0; k < nodes.size(); ++k) {
    if (static_cast<int>(nodes[k].size()) != rule.dim)
      throw std::invalid_argument("node length differs from dim");
    for (int i = 0; i < rule.dim; ++i) rule.nodes(i, k) = nodes[k][i];
    rule.weights[static_cast<int>(k)] = weights[k];
  }
  return rule;
}

}  // namespace fsq
