#include "fsq/krr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "fsq/kernels.hpp"
#include "fsq/random.hpp"

namespace fsq {

Eigen::MatrixXd Dataset::rows(const std::vector<int>& idx) const {
  Eigen::MatrixXd out(idx.size(), X.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(i) = X.row(idx[i]);
  return out;
}

Eigen::VectorXi Dataset::labels(const std::vector<int>& idx) const {
  Eigen::VectorXi out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
  return out;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line_no,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

Dataset parse_libsvm(const std::string& path, int min_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<int> labels;
  std::vector<std::vector<std::pair<int, double>>> rows;
  int max_index = min_dim;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;  // blank line
    if (token[0] == '#') continue;
    double label;
    try {
      size_t used = 0;
      label = std::stod(token, &used);
      if (used != token.size()) parse_fail(path, line_no, "bad label");
    } catch (const std::exception&) {
      parse_fail(path, line_no, "bad label");
    }
    std::vector<std::pair<int, double>> feats;
    while (ls >> token) {
      size_t colon = token.find(':');
      if (colon == std::string::npos)
        parse_fail(path, line_no, "expected index:value");
      try {
        size_t used = 0;
        int index = std::stoi(token.substr(0, colon), &used);
        if (used != colon) parse_fail(path, line_no, "bad feature index");
        std::string value_text = token.substr(colon + 1);
        double value = std::stod(value_text, &used);
        if (used != value_text.size())
          parse_fail(path, line_no, "bad feature value");
        if (index < 1) parse_fail(path, line_no, "indices are 1-based");
        feats.emplace_back(index, value);
        max_index = std::max(max_index, index);
      } catch (const std::runtime_error&) {
        throw;
      } catch (const std::exception&) {
        parse_fail(path, line_no, "bad index:value token");
      }
    }
    labels.push_back(static_cast<int>(std::llround(label)));
    rows.push_back(std::move(feats));
  }
  Dataset ds;
  ds.name = path;
  ds.X = Eigen::MatrixXd::Zero(rows.size(), max_index);
  ds.y.resize(labels.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    ds.y[i] = labels[i];
    for (auto& [index, value] : rows[i]) ds.X(i, index - 1) = value;
  }
  ds.train_idx.resize(rows.size());
  std::iota(ds.train_idx.begin(), ds.train_idx.end(), 0);
  return ds;
}

void write_libsvm(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
    out << ds.y[i];
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j)
      if (ds.X(i, j) != 0.0) out << ' ' << (j + 1) << ':' << ds.X(i, j);
    out << '\n';
  }
}

void split_dataset(Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction >= 1.0)
    throw std::invalid_argument("test fraction must lie in [0, 1)");
  std::vector<int> order(ds.X.rows());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  size_t test_count = static_cast<size_t>(test_fraction * order.size());
  ds.test_idx.assign(order.begin(), order.begin() + test_count);
  ds.train_idx.assign(order.begin() + test_count, order.end());
  std::sort(ds.test_idx.begin(), ds.test_idx.end());
  std::sort(ds.train_idx.begin(), ds.train_idx.end());
}

std::pair<Dataset, Dataset> minmax_normalize(Dataset train, Dataset test) {
  if (train.X.rows() == 0) throw std::invalid_argument("empty train set");
  Eigen::RowVectorXd lo = train.X.colwise().minCoeff();
  Eigen::RowVectorXd hi = train.X.colwise().maxCoeff();
  for (Eigen::Index j = 0; j < train.X.cols(); ++j) {
    double span = hi[j] - lo[j];
    if (span == 0.0) {
      train.X.col(j).setZero();
      if (test.X.cols() == train.X.cols()) test.X.col(j).setZero();
      continue;
    }
    train.X.col(j) = (train.X.col(j).array() - lo[j]) / span;
    if (test.X.cols() == train.X.cols())
      test.X.col(j) = ((test.X.col(j).array() - lo[j]) / span)
                          .cwiseMax(0.0)
                          .cwiseMin(1.0);
  }
  return {std::move(train), std::move(test)};
}

namespace {

std::vector<int> sorted_classes(const Eigen::VectorXi& y) {
  std::set<int> seen(y.data(), y.data() + y.size());
  return {seen.begin(), seen.end()};
}

// targets: one signed column for binary problems, one-vs-rest columns
// otherwise
Eigen::MatrixXd make_targets(const Eigen::VectorXi& y,
                             const std::vector<int>& classes) {
  Eigen::Index n = y.size();
  // a single class carries no separating information: zero targets, and
  // prediction falls back to that class through the zero-score convention
  if (classes.size() == 1) return Eigen::MatrixXd::Zero(n, 1);
  if (classes.size() <= 2) {
    Eigen::MatrixXd t(n, 1);
    for (Eigen::Index i = 0; i < n; ++i)
      t(i, 0) = y[i] == classes.back() ? 1.0 : -1.0;
    return t;
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(n, classes.size(), -1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto it = std::lower_bound(classes.begin(), classes.end(), y[i]);
    t(i, it - classes.begin()) = 1.0;
  }
  return t;
}

Eigen::MatrixXd refined_solve(const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B, bool& indefinite) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("factorization failed");
  indefinite = ldlt.vectorD().minCoeff() <= 0.0;
  Eigen::MatrixXd X = ldlt.solve(B);
  for (int it = 0; it < 2; ++it) X += ldlt.solve(B - A * X);
  if (!X.allFinite()) throw std::runtime_error("non-finite solve");
  double rel = (A * X - B).norm() / std::max(B.norm(), 1e-300);
  if (rel > 1e-8)
    throw std::runtime_error("solve residual above tolerance: " +
                             std::to_string(rel));
  return X;
}

}  // namespace

KrrModel krr_fit(const Eigen::MatrixXd& gram_or_features,
                 const Eigen::VectorXi& y, double lambda, bool dual) {
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (gram_or_features.rows() != y.size())
    throw std::invalid_argument("row count differs from label count");
  KrrModel model;
  model.dual = dual;
  model.lambda = lambda;
  model.classes = sorted_classes(y);
  Eigen::MatrixXd targets = make_targets(y, model.classes);
  if (dual) {
    if (gram_or_features.rows() != gram_or_features.cols())
      throw std::invalid_argument("dual mode needs a square Gram");
    Eigen::MatrixXd system = gram_or_features;
    system.diagonal().array() += lambda;
    model.coef = refined_solve(system, targets, model.indefinite);
  } else {
    const Eigen::MatrixXd& F = gram_or_features;
    Eigen::MatrixXd system = F.transpose() * F;
    system.diagonal().array() += lambda;
    model.coef = refined_solve(system, F.transpose() * targets,
                               model.indefinite);
  }
  return model;
}

Eigen::VectorXi predict(const KrrModel& model, const Eigen::MatrixXd& inputs) {
  if (inputs.cols() != model.coef.rows())
    throw std::invalid_argument("input width differs from model");
  Eigen::MatrixXd scores = inputs * model.coef;
  Eigen::VectorXi labels(scores.rows());
  if (model.classes.size() <= 2) {
    int neg = model.classes.front();
    int pos = model.classes.back();
    for (Eigen::Index i = 0; i < scores.rows(); ++i)
      labels[i] = scores(i, 0) >= 0.0 ? pos : neg;
  } else {
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      Eigen::Index best;
      scores.row(i).maxCoeff(&best);
      labels[i] = model.classes[best];
    }
  }
  return labels;
}

double accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("length mismatch");
  if (predicted.size() == 0) throw std::invalid_argument("empty prediction");
  return (predicted.array() == truth.array()).cast<double>().mean();
}

GramBuilder exact_gaussian_gram_builder() {
  return [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double sigma2,
            std::uint64_t) {
    KernelSpec spec{KernelFamily::Gaussian, sigma2,
                    static_cast<int>(A.cols())};
    return cross_gram_matrix(spec, A, B);
  };
}

std::vector<std::vector<int>> cv_fold_members(int n, int folds,
                                              std::uint64_t seed) {
  if (folds < 2 || n < folds)
    throw std::invalid_argument("need at least two samples per fold");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  // contiguous chunks of the shuffled order: every index lands in exactly
  // one validation fold
  std::vector<std::vector<int>> members(folds);
  for (size_t i = 0; i < order.size(); ++i)
    members[i * folds / order.size()].push_back(order[i]);
  return members;
}

CvResult cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                        const std::vector<double>& sigma2_grid,
                        const std::vector<double>& lambda_grid, int folds,
                        std::uint64_t seed, const GramBuilder& builder) {
  if (sigma2_grid.empty() || lambda_grid.empty())
    throw std::invalid_argument("empty grid");
  std::vector<std::vector<int>> fold_members =
      cv_fold_members(static_cast<int>(X.rows()), folds, seed);

  CvResult best;
  bool have_best = false;
  for (double sigma2 : sigma2_grid) {
    // per fold: build grams once per sigma2, reuse across the lambda grid
    std::vector<Eigen::MatrixXd> fit_grams(folds), val_grams(folds);
    std::vector<Eigen::VectorXi> fit_ys(folds), val_ys(folds);
    for (int f = 0; f < folds; ++f) {
      std::vector<int> fit_idx;
      for (int g = 0; g < folds; ++g)
        if (g != f)
          fit_idx.insert(fit_idx.end(), fold_members[g].begin(),
                         fold_members[g].end());
      const std::vector<int>& val_idx = fold_members[f];
      Eigen::MatrixXd fit_X(fit_idx.size(), X.cols());
      Eigen::MatrixXd val_X(val_idx.size(), X.cols());
      fit_ys[f].resize(fit_idx.size());
      val_ys[f].resize(val_idx.size());
      for (size_t i = 0; i < fit_idx.size(); ++i) {
        fit_X.row(i) = X.row(fit_idx[i]);
        fit_ys[f][i] = y[fit_idx[i]];
      }
      for (size_t i = 0; i < val_idx.size(); ++i) {
        val_X.row(i) = X.row(val_idx[i]);
        val_ys[f][i] = y[val_idx[i]];
      }
      std::uint64_t fold_seed = derive_seed(seed, static_cast<std::uint64_t>(f));
      fit_grams[f] = builder(fit_X, fit_X, sigma2, fold_seed);
      val_grams[f] = builder(val_X, fit_X, sigma2, fold_seed);
    }
    for (double lambda : lambda_grid) {
      double total = 0.0;
      for (int f = 0; f < folds; ++f) {
        KrrModel model = krr_fit(fit_grams[f], fit_ys[f], lambda, true);
        total += accuracy(predict(model, val_grams[f]), val_ys[f]);
      }
      double mean_acc = total / folds;
      bool better = false;
      if (!have_best || mean_acc > best.mean_accuracy + 1e-12) {
        better = true;
      } else if (std::abs(mean_acc - best.mean_accuracy) <= 1e-12) {
        if (lambda > best.lambda) better = true;
        else if (lambda == best.lambda && sigma2 < best.sigma2) better = true;
      }
      if (better) {
        best = {sigma2, lambda, mean_acc};
        have_best = true;
      }
    }
  }
  return best;
}

Dataset synthetic_blobs(int n, int d, int k_classes, std::uint64_t seed) {
  if (k_classes < 2 || d < k_classes)
    throw std::invalid_argument("need 2 <= k <= d classes");
  if (n < 2 * k_classes) throw std::invalid_argument("too few samples");
  Dataset ds;
  ds.name = "synthetic-blobs";
  ds.X.resize(n, d);
  ds.y.resize(n);
  Rng rng = make_rng(seed);
  const double noise = 0.08, offset = 0.35;
  for (int i = 0; i < n; ++i) {
    int c = i % k_classes;
    for (int j = 0; j < d; ++j) ds.X(i, j) = 0.5 + noise * normal_draw(rng);
    ds.X(i, c) += offset;
    ds.y[i] = k_classes == 2 ? (c == 0 ? -1 : 1) : c;
  }
  split_dataset(ds, 0.5, derive_seed(seed, 1));
  return ds;
}

std::string model_to_json(const KrrModel& model) {
  nlohmann::json j{{"mode", model.dual ? "dual" : "primal"},
                   {"lambda", model.lambda},
                   {"classes", model.classes},
                   {"coef_rows", model.coef.rows()},
                   {"coef_cols", model.coef.cols()},
                   {"indefinite", model.indefinite},
                   {"feature_ref", model.feature_ref}};
  return j.dump(2);
}

}  // namespace fsq
