#include "fsq/feature_map.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "fsq/random.hpp"
#include "fsq/stochastic.hpp"

namespace fsq {

std::string map_kind_name(MapKind kind) {
  switch (kind) {
    case MapKind::Dfs3: return "dfs3";
    case MapKind::Dfs5: return "dfs5";
    case MapKind::Sfs: return "sfs";
    case MapKind::Rff: return "rff";
    case MapKind::Orf: return "orf";
    case MapKind::Rom: return "rom";
    case MapKind::Qmc: return "qmc";
    case MapKind::Gq: return "gq";
    case MapKind::Sgq: return "sgq";
    case MapKind::Ssr: return "ssr";
  }
  throw std::logic_error("unreachable");
}

MapKind map_kind_from_name(const std::string& name) {
  for (MapKind kind : {MapKind::Dfs3, MapKind::Dfs5, MapKind::Sfs, MapKind::Rff,
                       MapKind::Orf, MapKind::Rom, MapKind::Qmc, MapKind::Gq,
                       MapKind::Sgq, MapKind::Ssr}) {
    if (map_kind_name(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown map kind: " + name);
}

std::string activation_name(Activation activation) {
  switch (activation) {
    case Activation::CosSin: return "cossin";
    case Activation::Relu: return "relu";
    case Activation::Heaviside: return "heaviside";
  }
  throw std::logic_error("unreachable");
}

namespace {

Activation activation_from_name(const std::string& name) {
  for (Activation a : {Activation::CosSin, Activation::Relu, Activation::Heaviside})
    if (activation_name(a) == name) return a;
  throw std::invalid_argument("unknown activation: " + name);
}

double activate(Activation activation, double s, bool sine_part) {
  switch (activation) {
    case Activation::CosSin:
      return sine_part ? std::sin(s) : std::cos(s);
    case Activation::Relu:
      return std::sqrt(2.0) * std::max(s, 0.0);
    case Activation::Heaviside:
      if (s > 0.0) return std::sqrt(2.0);
      if (s < 0.0) return 0.0;
      return std::sqrt(2.0) * 0.5;
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Eigen::MatrixXd FeatureMap::projections(const Eigen::MatrixXd& X) const {
  if (X.cols() != input_dim)
    throw std::invalid_argument("sample width differs from map dimension");
  if (sparse) return (X * sparse_mat) * input_scale;
  return (X * dense) * input_scale;
}

FeatureMap build_dfs_map(const QuadratureRule& rule, Activation activation,
                         double input_scale) {
  FeatureMap map;
  map.kind = rule.degree >= 5 ? MapKind::Dfs5 : MapKind::Dfs3;
  map.activation = activation;
  map.input_dim = rule.dim;
  map.input_scale = input_scale;
  map.sparse = true;
  map.sparse_mat = rule.nodes.sparseView();
  map.sparse_mat.makeCompressed();
  map.weights = rule.weights;
  return map;
}

FeatureMap build_sfs_map(const QuadratureRule& rule3, const Eigen::MatrixXd& omegas,
                         Activation activation, double input_scale) {
  if (rule3.degree != 3) throw std::invalid_argument("need a third-degree rule");
  int d = rule3.dim;
  if (omegas.rows() != d)
    throw std::invalid_argument("draw dimension differs from rule dimension");
  int D = static_cast<int>(omegas.cols());
  if (D < 1) throw std::invalid_argument("need at least one draw");
  int rule_nodes = rule3.count();  // 2d + 1

  FeatureMap map;
  map.kind = MapKind::Sfs;
  map.activation = activation;
  map.input_dim = d;
  map.input_scale = input_scale;
  map.sparse = true;

  Eigen::MatrixXd columns(d, D + 2 * rule_nodes);
  columns.leftCols(D) = omegas;
  columns.middleCols(D, rule_nodes) = rule3.nodes;
  columns.rightCols(rule_nodes) = rule3.nodes;
  map.sparse_mat = columns.sparseView();
  map.sparse_mat.makeCompressed();

  // middle block: randomized weights averaged over the draws, negated (the
  // imaginary block of the estimator subtracts the stochastic rule)
  double lambda1 = rule3.levels.at(1);
  double mean_origin = 0.0, mean_axis = 0.0;
  for (int i = 0; i < D; ++i) {
    RandomizedThirdWeights w = randomized_third_weights(omegas.col(i), lambda1);
    mean_origin += w.origin;
    mean_axis += w.axis;
  }
  mean_origin /= D;
  mean_axis /= D;

  map.weights.resize(D + 2 * rule_nodes);
  map.weights.head(D).setConstant(1.0 / D);
  map.weights[D] = -mean_origin;
  map.weights.segment(D + 1, rule_nodes - 1).setConstant(-mean_axis);
  map.weights.tail(rule_nodes) = rule3.weights;
  return map;
}

FeatureMap build_sfs_map(const QuadratureRule& rule3, int D, std::uint64_t seed,
                         Activation activation, double input_scale) {
  if (D < 1) throw std::invalid_argument("need at least one draw");
  Rng rng = make_rng(seed);
  Eigen::MatrixXd omegas = gaussian_matrix(rng, rule3.dim, D);
  return build_sfs_map(rule3, omegas, activation, input_scale);
}

FeatureMatrix transform(const FeatureMap& map, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd proj = map.projections(X);
  int n = static_cast<int>(X.rows());
  int nodes = map.node_count();
  int per = map.output_width_per_node();

  FeatureMatrix out;
  out.values.resize(n, map.realized_width());
  out.col_signs.resize(map.realized_width());
  for (int k = 0; k < nodes; ++k) {
    double w = map.weights[k];
    double scale = std::sqrt(std::abs(w));
    double sign = w < 0.0 ? -1.0 : 1.0;
    for (int p = 0; p < per; ++p) out.col_signs[k * per + p] = sign;
    for (int i = 0; i < n; ++i) {
      double s = proj(i, k);
      out.values(i, k * per) = scale * activate(map.activation, s, false);
      if (per == 2) out.values(i, k * per + 1) = scale * activate(map.activation, s, true);
    }
  }
  return out;
}

Eigen::MatrixXd approx_gram(const FeatureMatrix& A, const FeatureMatrix& B) {
  if (A.col_signs.size() != B.col_signs.size() ||
      (A.col_signs - B.col_signs).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("feature sign metadata mismatch");
  return A.values * B.col_signs.asDiagonal() * B.values.transpose();
}

double direct_kernel_estimate(const FeatureMap& map, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) {
  Eigen::MatrixXd pair(2, x.size());
  pair.row(0) = x.transpose();
  pair.row(1) = y.transpose();
  Eigen::MatrixXd proj = map.projections(pair);
  double sum = 0.0, comp = 0.0;
  for (int k = 0; k < map.node_count(); ++k) {
    double fx, fy;
    if (map.activation == Activation::CosSin) {
      // cos(s_x - s_y) = cos s_x cos s_y + sin s_x sin s_y
      fx = 1.0;
      fy = std::cos(proj(0, k) - proj(1, k));
    } else {
      fx = activate(map.activation, proj(0, k), false);
      fy = activate(map.activation, proj(1, k), false);
    }
    double term = map.weights[k] * fx * fy - comp;
    double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

std::string map_to_json(const FeatureMap& map) {
  nlohmann::json j;
  j["kind"] = map_kind_name(map.kind);
  j["activation"] = activation_name(map.activation);
  j["input_dim"] = map.input_dim;
  j["input_scale"] = map.input_scale;
  j["weights"] = std::vector<double>(map.weights.data(),
                                     map.weights.data() + map.node_count());
  std::vector<std::vector<double>> columns(map.node_count());
  Eigen::MatrixXd dense = map.sparse ? Eigen::MatrixXd(map.sparse_mat) : map.dense;
  for (int k = 0; k < map.node_count(); ++k)
    columns[k].assign(dense.col(k).data(), dense.col(k).data() + map.input_dim);
  j["transform"] = columns;
  j["sparse"] = map.sparse;
  return j.dump();
}

FeatureMap map_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  FeatureMap map;
  map.kind = map_kind_from_name(j.at("kind").get<std::string>());
  map.activation = activation_from_name(j.at("activation").get<std::string>());
  map.input_dim = j.at("input_dim").get<int>();
  map.input_scale = j.at("input_scale").get<double>();
  auto weights = j.at("weights").get<std::vector<double>>();
  auto columns = j.at("transform").get<std::vector<std::vector<double>>>();
  if (weights.size() != columns.size())
    throw std::invalid_argument("column and weight counts differ");
  map.weights.resize(static_cast<int>(weights.size()));
  Eigen::MatrixXd dense(map.input_dim, static_cast<int>(columns.size()));
  for (size_t k = 0; k < columns.size(); ++k) {
    if (static_cast<int>(columns[k].size()) != map.input_dim)
      throw std::invalid_argument("column length differs from input_dim");
    map.weights[static_cast<int>(k)] = weights[k];
    for (int i = 0; i < map.input_dim; ++i) dense(i, k) = columns[k][i];
  }
  map.sparse = j.at("sparse").get<bool>();
  if (map.sparse) {
    map.sparse_mat = dense.sparseView();
    map.sparse_mat.makeCompressed();
  } else {
    map.dense = dense;
  }
  return map;
}

void write_feature_csv(const FeatureMatrix& features, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  for (int c = 0; c < features.col_signs.size(); ++c)
    out << (c ? "," : "") << features.col_signs[c];
  out << "\n";
  for (int i = 0; i < features.values.rows(); ++i) {
    for (int c = 0; c < features.values.cols(); ++c)
      out << (c ? "," : "") << features.values(i, c);
    out << "\n";
  }
}

}  // namespace fsq
