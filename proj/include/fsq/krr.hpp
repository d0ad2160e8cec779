// Dataset ingestion, min-max normalization, kernel ridge regression with
// cross-validated grids, and classification accuracy.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fsq {

struct Dataset {
  Eigen::MatrixXd X;  // n x d, rows are samples
  Eigen::VectorXi y;  // integer class labels
  std::string name;
  std::vector<int> train_idx;
  std::vector<int> test_idx;

  Eigen::MatrixXd rows(const std::vector<int>& idx) const;
  Eigen::VectorXi labels(const std::vector<int>& idx) const;
};

// Sparse 1-based index:value lines; feature dimension is the largest index
// seen, or min_dim if larger. All rows land in train_idx. Malformed input
// raises an error naming the offending line.
Dataset parse_libsvm(const std::string& path, int min_dim = 0);
void write_libsvm(const std::string& path, const Dataset& ds);

// Seed-deterministic shuffle split filling train_idx/test_idx.
void split_dataset(Dataset& ds, double test_fraction, std::uint64_t seed);

// Per-column (x - min)/(max - min) with bounds from the train rows only;
// constant columns map to 0; test values clipped to [0, 1].
std::pair<Dataset, Dataset> minmax_normalize(Dataset train, Dataset test);

struct KrrModel {
  bool dual = true;
  double lambda = 0.0;
  std::vector<int> classes;  // sorted unique labels
  // dual: n_train x k columns of coefficients; primal: width x k weights.
  // Binary problems use a single column scored by sign.
  Eigen::MatrixXd coef;
  bool indefinite = false;  // regularized system was not positive definite
  std::string feature_ref;
};

// Dual mode solves (K + lambda I) alpha = targets on an n x n (possibly
// signed approximate) Gram; primal mode solves the regularized normal
// equations (F'F + lambda I) w = F' targets on n x width features.
KrrModel krr_fit(const Eigen::MatrixXd& gram_or_features,
                 const Eigen::VectorXi& y, double lambda, bool dual = true);

// Dual models take the test-by-train cross Gram; primal models take test
// features. Binary: sign of the score, ties to the larger label; multiclass:
// one-vs-rest argmax.
Eigen::VectorXi predict(const KrrModel& model, const Eigen::MatrixXd& inputs);

double accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth);

// Cross Gram builder for validation: rows of A scored against rows of B at
// the given width, seeded for stochastic feature maps.
using GramBuilder = std::function<Eigen::MatrixXd(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double sigma2,
    std::uint64_t seed)>;

GramBuilder exact_gaussian_gram_builder();

struct CvResult {
  double sigma2 = 0.0;
  double lambda = 0.0;
  double mean_accuracy = 0.0;
};

inline const std::vector<double> kSigma2Grid{0.1, 0.5, 1.0, 5.0, 10.0};
inline const std::vector<double> kLambdaGrid{1e-4, 1e-3, 1e-2, 0.1, 0.5,
                                             1.0,  10.0};

// Seed-deterministic fold assignment covering 0..n-1 exactly once.
std::vector<std::vector<int>> cv_fold_members(int n, int folds,
                                              std::uint64_t seed);

// Grid point maximizing mean fold accuracy over seed-deterministic folds
// that cover every index exactly once; ties broken by larger lambda, then
// smaller sigma2.
CvResult cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                        const std::vector<double>& sigma2_grid,
                        const std::vector<double>& lambda_grid, int folds,
                        std::uint64_t seed,
                        const GramBuilder& builder = exact_gaussian_gram_builder());

// Gaussian class blobs with orthogonal mean offsets, split half train half
// test; binary tasks label {-1, +1}, multiclass {0..k-1}.
Dataset synthetic_blobs(int n, int d, int k_classes, std::uint64_t seed);

std::string model_to_json(const KrrModel& model);

}  // namespace fsq
