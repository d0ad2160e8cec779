// Batch front end: kernel approximation error sweeps, feature-generation
// timing, KRR training, the condition-region table, and variance curves.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fsq/analysis.hpp"
#include "fsq/baselines.hpp"
#include "fsq/feature_map.hpp"
#include "fsq/kernels.hpp"
#include "fsq/krr.hpp"
#include "fsq/random.hpp"
#include "fsq/rules.hpp"
#include "fsq/stochastic.hpp"

namespace {

using fsq::Activation;
using fsq::Dataset;
using fsq::FeatureMap;
using fsq::KernelFamily;
using fsq::KernelSpec;

const std::vector<std::string> kAllMethods = {"dfs3", "dfs5", "sfs", "rff",
                                              "orf",  "rom",  "qmc", "gq",
                                              "sgq",  "ssr",  "exact"};

struct MethodTraits {
  bool stochastic;
  bool fixed_size;  // ignores the width schedule
};

const std::map<std::string, MethodTraits>& method_traits() {
  static const std::map<std::string, MethodTraits> traits{
      {"dfs3", {false, true}}, {"dfs5", {false, true}}, {"sfs", {true, false}},
      {"rff", {true, false}},  {"orf", {true, false}},  {"rom", {true, false}},
      {"qmc", {false, false}}, {"gq", {true, false}},   {"sgq", {false, true}},
      {"ssr", {true, false}},  {"exact", {false, true}}};
  return traits;
}

void validate_methods(const std::vector<std::string>& methods) {
  for (const auto& tag : methods) {
    if (method_traits().count(tag)) continue;
    std::string valid;
    for (const auto& m : kAllMethods) valid += (valid.empty() ? "" : ", ") + m;
    throw std::runtime_error("unknown method '" + tag + "' (valid: " + valid +
                             ")");
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

struct CommonOpts {
  std::uint64_t seed = 1;
  std::string out = "fsq-out";
  std::vector<std::string> methods;
  std::string dataset;
  std::string kernel = "gaussian";
  double sigma2 = 1.0;
  int trials = 10;
  int jobs = 0;
  int dim = 10;
  int samples = 1000;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--seed", opts.seed, "Master seed");
  sub->add_option("--out", opts.out, "Output directory");
  sub->add_option("--methods", opts.methods, "Comma-separated method tags")
      ->delimiter(',');
  sub->add_option("--dataset", opts.dataset, "libsvm dataset path");
  sub->add_option("--kernel", opts.kernel, "Kernel family")
      ->check(CLI::IsMember({"gaussian", "arccos0", "arccos1"}));
  sub->add_option("--sigma2", opts.sigma2, "Gaussian kernel width");
  sub->add_option("--trials", opts.trials, "Trials for stochastic methods");
  sub->add_option("--jobs", opts.jobs, "Worker threads (0 = auto)");
  sub->add_option("--dim", opts.dim, "Synthetic data dimension");
  sub->add_option("--samples", opts.samples, "Synthetic/subset sample count");
}

KernelFamily family_of(const std::string& name) {
  return fsq::kernel_family_from_name(name);
}

Activation activation_for(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return Activation::CosSin;
    case KernelFamily::ArcCos0: return Activation::Heaviside;
    case KernelFamily::ArcCos1: return Activation::Relu;
  }
  throw std::logic_error("unreachable");
}

double map_input_scale(Activation activation, int d, double sigma2) {
  return activation == Activation::CosSin
             ? fsq::gaussian_input_scale(d, sigma2)
             : 1.0;
}

FeatureMap build_method_map(const std::string& tag, int d, int width,
                            double sigma2, KernelFamily family,
                            std::uint64_t seed) {
  Activation act = activation_for(family);
  double scale = map_input_scale(act, d, sigma2);
  double sigma = std::sqrt(sigma2);
  if (tag == "dfs3") return fsq::build_dfs_map(fsq::third_degree_rule(d), act, scale);
  if (tag == "dfs5") return fsq::build_dfs_map(fsq::fifth_degree_rule(d), act, scale);
  if (tag == "sfs")
    return fsq::build_sfs_map(fsq::third_degree_rule(d), width, seed, act, scale);
  if (tag == "rff") return fsq::rff_matrix(d, width, sigma, seed, act);
  if (tag == "orf") return fsq::orf_matrix(d, width, sigma, seed, act);
  if (tag == "rom") return fsq::rom_matrix(d, width, sigma, 3, seed, act);
  if (tag == "qmc") return fsq::qmc_matrix(d, width, sigma, act);
  if (tag == "gq") return fsq::gq_map(d, width, sigma, seed, act);
  if (tag == "sgq") return fsq::sgq_third_map(d, fsq::kLambda1Default, act, scale);
  if (tag == "ssr") return fsq::ssr_map(d, width, seed, act, scale);
  throw std::runtime_error("method '" + tag + "' builds no feature map");
}

void run_pool(std::vector<std::function<void()>>& jobs, int workers) {
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min({workers, 16,
                                  static_cast<int>(jobs.size())}));
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto body = [&] {
    size_t i;
    while ((i = next.fetch_add(1)) < jobs.size()) {
      try {
        jobs[i]();
      } catch (...) {
        std::lock_guard<std::mutex> guard(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Dataset load_or_uniform(const CommonOpts& opts, std::uint64_t seed) {
  if (!opts.dataset.empty()) return fsq::parse_libsvm(opts.dataset);
  Dataset ds;
  ds.name = "synthetic-uniform";
  ds.X.resize(opts.samples, opts.dim);
  ds.y = Eigen::VectorXi::Zero(opts.samples);
  fsq::Rng rng = fsq::make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i)
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j) ds.X(i, j) = unit(rng);
  ds.train_idx.resize(opts.samples);
  std::iota(ds.train_idx.begin(), ds.train_idx.end(), 0);
  return ds;
}

Eigen::MatrixXd seeded_subset(const Eigen::MatrixXd& X, int target,
                              std::uint64_t seed) {
  if (X.rows() <= target) return X;
  std::vector<int> order(X.rows());
  std::iota(order.begin(), order.end(), 0);
  fsq::Rng rng = fsq::make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::MatrixXd out(target, X.cols());
  for (int i = 0; i < target; ++i) out.row(i) = X.row(order[i]);
  return out;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / (v.size() - 1));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::uint64_t job_seed(std::uint64_t seed, size_t method, size_t factor,
                       size_t trial) {
  return fsq::derive_seed(
      seed, (static_cast<std::uint64_t>(method) << 40) ^
                (static_cast<std::uint64_t>(factor) << 20) ^ trial);
}

// ---------------------------------------------------------------- approx --

struct ApproxOpts : CommonOpts {
  std::vector<int> factors = {2, 4, 8, 16, 32};
  std::string match = "none";  // none: width = factor*d; sfs: + 4d + 2
};

int cmd_approx(const ApproxOpts& opts) {
  validate_methods(opts.methods);
  KernelFamily family = family_of(opts.kernel);
  Dataset raw = load_or_uniform(opts, fsq::derive_seed(opts.seed, 0xda7aULL));
  auto [ds, unused] = fsq::minmax_normalize(raw, raw);
  (void)unused;
  int d = static_cast<int>(ds.X.cols());
  Eigen::MatrixXd S = seeded_subset(ds.X, opts.samples,
                                    fsq::derive_seed(opts.seed, 0x5ab5e7ULL));
  KernelSpec spec{family, opts.sigma2, d};
  Eigen::MatrixXd K = fsq::gram_matrix(spec, S);

  std::ostringstream config;
  config << "approx;seed=" << opts.seed << ";kernel=" << opts.kernel
         << ";sigma2=" << opts.sigma2 << ";dataset=" << ds.name
         << ";samples=" << S.rows() << ";trials=" << opts.trials
         << ";match=" << opts.match << ";factors=";
  for (int f : opts.factors) config << f << ",";
  std::uint64_t config_hash = fnv1a(config.str());

  struct Row {
    std::string method;
    int factor = 0;
    int nodes = 0;
    int width = 0;
    double err_mean = 0, err_std = 0, gen_ms = 0;
    int trials = 1;
  };
  struct Cell {
    double err = 0, ms = 0;
    int nodes = 0, width = 0;
  };

  std::vector<Row> rows;
  std::vector<std::vector<Cell>> cells;
  std::vector<std::function<void()>> jobs;
  for (size_t mi = 0; mi < opts.methods.size(); ++mi) {
    const std::string& tag = opts.methods[mi];
    MethodTraits traits = method_traits().at(tag);
    std::vector<int> factors = traits.fixed_size ? std::vector<int>{0}
                                                 : opts.factors;
    for (size_t fi = 0; fi < factors.size(); ++fi) {
      int trials = traits.stochastic ? opts.trials : 1;
      Row row;
      row.method = tag;
      row.factor = factors[fi];
      row.trials = trials;
      rows.push_back(row);
      size_t slot = cells.size();
      cells.emplace_back(trials);
      for (int t = 0; t < trials; ++t) {
        std::uint64_t seed = job_seed(opts.seed, mi, fi, t);
        int factor = factors[fi];
        jobs.push_back([&, slot, t, tag, factor, seed, d] {
          Cell cell;
          if (tag == "exact") {
            cell.err = 0.0;
            cell.nodes = cell.width = 0;
          } else {
            int width = factor * d;
            if (opts.match == "sfs" && tag != "sfs") width += 4 * d + 2;
            auto t0 = std::chrono::steady_clock::now();
            FeatureMap map =
                build_method_map(tag, d, width, opts.sigma2, family, seed);
            fsq::FeatureMatrix F = fsq::transform(map, S);
            auto t1 = std::chrono::steady_clock::now();
            cell.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            cell.nodes = map.node_count();
            cell.width = map.realized_width();
            cell.err = fsq::frobenius_error(K, fsq::approx_gram(F, F));
          }
          cells[slot][t] = cell;
        });
      }
    }
  }
  run_pool(jobs, opts.jobs);

  std::filesystem::create_directories(opts.out);
  std::ostringstream csv;
  csv.precision(12);
  csv << "method,factor,nodes,realized_width,err_mean,err_std,gen_ms,trials,"
         "seed,config_hash\n";
  nlohmann::json jrows = nlohmann::json::array();
  for (size_t i = 0; i < rows.size(); ++i) {
    Row& row = rows[i];
    std::vector<double> errs, times;
    for (const Cell& c : cells[i]) {
      errs.push_back(c.err);
      times.push_back(c.ms);
    }
    row.err_mean = mean_of(errs);
    row.err_std = std_of(errs);
    row.gen_ms = mean_of(times);
    row.nodes = cells[i][0].nodes;
    row.width = cells[i][0].width;
    csv << row.method << ',' << row.factor << ',' << row.nodes << ','
        << row.width << ',' << row.err_mean << ',' << row.err_std << ','
        << row.gen_ms << ',' << row.trials << ',' << opts.seed << ','
        << config_hash << '\n';
    jrows.push_back({{"method", row.method},
                     {"factor", row.factor},
                     {"nodes", row.nodes},
                     {"realized_width", row.width},
                     {"err_mean", row.err_mean},
                     {"err_std", row.err_std},
                     {"gen_ms", row.gen_ms},
                     {"trials", row.trials}});
  }
  nlohmann::json meta{{"seed", opts.seed},
                      {"config_hash", config_hash},
                      {"kernel", opts.kernel},
                      {"sigma2", opts.sigma2},
                      {"dataset", ds.name},
                      {"subset", S.rows()}};
  write_text(std::filesystem::path(opts.out) / "approx.csv", csv.str());
  write_text(std::filesystem::path(opts.out) / "approx.json",
             nlohmann::json{{"meta", meta}, {"rows", jrows}}.dump(2));
  std::cout << csv.str();
  return 0;
}

// ----------------------------------------------------------------- bench --

struct BenchOpts : CommonOpts {
  std::vector<int> dims = {64, 128, 256, 512, 1024};
  int batch = 256;
  int reps = 5;
  int width_factor = 8;
};

int cmd_bench(const BenchOpts& opts) {
  validate_methods(opts.methods);
  KernelFamily family = family_of(opts.kernel);
  std::filesystem::create_directories(opts.out);

  std::ostringstream config;
  config << "bench;seed=" << opts.seed << ";kernel=" << opts.kernel
         << ";batch=" << opts.batch << ";reps=" << opts.reps
         << ";factor=" << opts.width_factor;
  std::uint64_t config_hash = fnv1a(config.str());

  std::ostringstream csv;
  csv.precision(12);
  csv << "method,d,nodes,realized_width,median_ms,reps,seed,config_hash\n";
  // timing runs stay serial so measurements do not contend
  for (size_t mi = 0; mi < opts.methods.size(); ++mi) {
    const std::string& tag = opts.methods[mi];
    if (tag == "exact") continue;
    for (size_t di = 0; di < opts.dims.size(); ++di) {
      int d = opts.dims[di];
      fsq::Rng rng = fsq::make_rng(fsq::derive_seed(opts.seed, 0xbe + di));
      Eigen::MatrixXd X = fsq::gaussian_matrix(rng, opts.batch, d);
      int width = opts.width_factor * d;
      std::vector<double> times;
      int nodes = 0, realized = 0;
      for (int rep = -1; rep < std::max(5, opts.reps); ++rep) {
        std::uint64_t seed = job_seed(opts.seed, mi, di,
                                      static_cast<size_t>(rep + 1));
        auto t0 = std::chrono::steady_clock::now();
        FeatureMap map =
            build_method_map(tag, d, width, opts.sigma2, family, seed);
        fsq::FeatureMatrix F = fsq::transform(map, X);
        auto t1 = std::chrono::steady_clock::now();
        nodes = map.node_count();
        realized = map.realized_width();
        if (rep >= 0)  // first pass is warmup
          times.push_back(
              std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      std::sort(times.begin(), times.end());
      double median = times[times.size() / 2];
      csv << tag << ',' << d << ',' << nodes << ',' << realized << ','
          << median << ',' << times.size() << ',' << opts.seed << ','
          << config_hash << '\n';
    }
  }
  write_text(std::filesystem::path(opts.out) / "bench.csv", csv.str());
  std::cout << csv.str();
  return 0;
}

// ----------------------------------------------------------------- train --

struct TrainOpts : CommonOpts {
  int width_factor = 8;
  double test_fraction = 0.2;
  std::string test_path;
  bool no_normalize = false;
  double lambda = 0.0;  // 0 = cross-validate
};

int cmd_train(const TrainOpts& opts) {
  validate_methods(opts.methods);
  KernelFamily family = family_of(opts.kernel);

  Dataset ds;
  if (opts.dataset.empty()) {
    ds = fsq::synthetic_blobs(2 * opts.samples, opts.dim, 2, opts.seed);
  } else {
    ds = fsq::parse_libsvm(opts.dataset);
    if (!opts.test_path.empty()) {
      Dataset test = fsq::parse_libsvm(
          opts.test_path, static_cast<int>(ds.X.cols()));
      if (test.X.cols() > ds.X.cols()) {
        Eigen::MatrixXd widened =
            Eigen::MatrixXd::Zero(ds.X.rows(), test.X.cols());
        widened.leftCols(ds.X.cols()) = ds.X;
        ds.X = widened;
      }
      int base = static_cast<int>(ds.X.rows());
      Eigen::MatrixXd X(ds.X.rows() + test.X.rows(), ds.X.cols());
      X.topRows(ds.X.rows()) = ds.X;
      X.bottomRows(test.X.rows()) = test.X;
      Eigen::VectorXi y(ds.y.size() + test.y.size());
      y.head(ds.y.size()) = ds.y;
      y.tail(test.y.size()) = test.y;
      ds.X = X;
      ds.y = y;
      ds.test_idx.resize(test.X.rows());
      std::iota(ds.test_idx.begin(), ds.test_idx.end(), base);
    } else {
      fsq::split_dataset(ds, opts.test_fraction,
                         fsq::derive_seed(opts.seed, 0x7e57ULL));
    }
  }

  Dataset train, test;
  train.X = ds.rows(ds.train_idx);
  train.y = ds.labels(ds.train_idx);
  test.X = ds.rows(ds.test_idx);
  test.y = ds.labels(ds.test_idx);
  if (!opts.no_normalize) {
    auto normalized = fsq::minmax_normalize(train, test);
    train = std::move(normalized.first);
    test = std::move(normalized.second);
  }
  int d = static_cast<int>(train.X.cols());

  double best_sigma2 = opts.sigma2, best_lambda = opts.lambda;
  double cv_accuracy = 0.0;
  if (opts.lambda <= 0.0) {
    std::vector<double> sigma_grid = family == KernelFamily::Gaussian
                                         ? fsq::kSigma2Grid
                                         : std::vector<double>{1.0};
    fsq::GramBuilder builder = [family](const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& B,
                                        double sigma2, std::uint64_t) {
      KernelSpec spec{family, sigma2, static_cast<int>(A.cols())};
      return fsq::cross_gram_matrix(spec, A, B);
    };
    fsq::CvResult cv =
        fsq::cross_validate(train.X, train.y, sigma_grid, fsq::kLambdaGrid, 5,
                            fsq::derive_seed(opts.seed, 0xcfULL), builder);
    best_sigma2 = cv.sigma2;
    best_lambda = cv.lambda;
    cv_accuracy = cv.mean_accuracy;
  }

  KernelSpec spec{family, best_sigma2, d};
  Eigen::MatrixXd K_train = fsq::gram_matrix(spec, train.X);
  Eigen::MatrixXd K_cross = fsq::cross_gram_matrix(spec, test.X, train.X);

  std::ostringstream config;
  config << "train;seed=" << opts.seed << ";kernel=" << opts.kernel
         << ";dataset=" << ds.name << ";factor=" << opts.width_factor
         << ";sigma2=" << best_sigma2 << ";lambda=" << best_lambda
         << ";trials=" << opts.trials;
  std::uint64_t config_hash = fnv1a(config.str());

  struct Row {
    std::string method;
    int nodes = 0, width = 0, trials = 1;
    double acc_mean = 0, acc_std = 0;
  };
  std::vector<Row> rows(opts.methods.size());
  std::vector<std::vector<double>> accs(opts.methods.size());
  std::vector<std::vector<int>> dims(opts.methods.size());
  std::vector<std::function<void()>> jobs;
  for (size_t mi = 0; mi < opts.methods.size(); ++mi) {
    const std::string& tag = opts.methods[mi];
    MethodTraits traits = method_traits().at(tag);
    int trials = traits.stochastic ? opts.trials : 1;
    rows[mi].method = tag;
    rows[mi].trials = trials;
    accs[mi].resize(trials);
    dims[mi] = {0, 0};
    for (int t = 0; t < trials; ++t) {
      std::uint64_t seed = job_seed(opts.seed, mi, 0, t);
      jobs.push_back([&, mi, t, tag, seed, d] {
        if (tag == "exact") {
          fsq::KrrModel model =
              fsq::krr_fit(K_train, train.y, best_lambda, true);
          accs[mi][t] = fsq::accuracy(fsq::predict(model, K_cross), test.y);
          return;
        }
        FeatureMap map = build_method_map(tag, d, opts.width_factor * d,
                                          best_sigma2, family, seed);
        fsq::FeatureMatrix Ftr = fsq::transform(map, train.X);
        fsq::FeatureMatrix Fte = fsq::transform(map, test.X);
        fsq::KrrModel model = fsq::krr_fit(fsq::approx_gram(Ftr, Ftr), train.y,
                                           best_lambda, true);
        model.feature_ref = tag;
        accs[mi][t] =
            fsq::accuracy(fsq::predict(model, fsq::approx_gram(Fte, Ftr)),
                          test.y);
        if (t == 0) {
          dims[mi][0] = map.node_count();
          dims[mi][1] = map.realized_width();
        }
      });
    }
  }
  run_pool(jobs, opts.jobs);

  std::filesystem::create_directories(opts.out);
  std::ostringstream csv;
  csv.precision(12);
  csv << "method,nodes,realized_width,acc_mean,acc_std,trials,sigma2,lambda,"
         "seed,config_hash\n";
  nlohmann::json jrows = nlohmann::json::array();
  for (size_t mi = 0; mi < opts.methods.size(); ++mi) {
    Row& row = rows[mi];
    row.acc_mean = mean_of(accs[mi]);
    row.acc_std = std_of(accs[mi]);
    row.nodes = dims[mi][0];
    row.width = dims[mi][1];
    csv << row.method << ',' << row.nodes << ',' << row.width << ','
        << row.acc_mean << ',' << row.acc_std << ',' << row.trials << ','
        << best_sigma2 << ',' << best_lambda << ',' << opts.seed << ','
        << config_hash << '\n';
    jrows.push_back({{"method", row.method},
                     {"nodes", row.nodes},
                     {"realized_width", row.width},
                     {"acc_mean", row.acc_mean},
                     {"acc_std", row.acc_std},
                     {"trials", row.trials}});
  }
  std::set<int> classes(train.y.data(), train.y.data() + train.y.size());
  nlohmann::json meta{{"seed", opts.seed},
                      {"config_hash", config_hash},
                      {"kernel", opts.kernel},
                      {"sigma2", best_sigma2},
                      {"lambda", best_lambda},
                      {"cv_accuracy", cv_accuracy},
                      {"dataset", ds.name},
                      {"train_size", train.X.rows()},
                      {"test_size", test.X.rows()},
                      {"one_vs_rest", classes.size() > 2}};
  write_text(std::filesystem::path(opts.out) / "train.csv", csv.str());
  write_text(std::filesystem::path(opts.out) / "train.json",
             nlohmann::json{{"meta", meta}, {"rows", jrows}}.dump(2));
  std::cout << csv.str();
  return 0;
}

// ------------------------------------------------------------- condition --

struct ConditionOpts : CommonOpts {
  std::vector<int> dims = {10, 16, 20, 22, 50, 54, 100, 200};
};

int cmd_condition(const ConditionOpts& opts) {
  std::filesystem::create_directories(opts.out);
  std::ostringstream csv;
  csv << "d,r_max\n";
  csv.precision(6);
  csv << std::fixed;
  for (int d : opts.dims) csv << d << ',' << fsq::rmax_solve(d) << '\n';
  write_text(std::filesystem::path(opts.out) / "condition.csv", csv.str());
  std::cout << csv.str();

  if (!opts.dataset.empty()) {
    Dataset raw = fsq::parse_libsvm(opts.dataset);
    auto [ds, unused] = fsq::minmax_normalize(raw, raw);
    (void)unused;
    fsq::DistanceHistogram hist =
        fsq::z_histogram(ds.X, opts.samples, 30,
                         fsq::derive_seed(opts.seed, 0xd157ULL), opts.sigma2);
    write_text(std::filesystem::path(opts.out) / "histogram.json",
               fsq::histogram_to_json(hist));
    std::cout << "fraction_below_rmax=" << hist.fraction_below_rmax << '\n';
  }
  return 0;
}

// -------------------------------------------------------------- variance --

struct VarianceOpts : CommonOpts {
  double zmax = 3.0;
  double zstep = 0.25;
  int draws = 1;
  VarianceOpts() {
    dim = 58;
    trials = 2000;
  }
};

int cmd_variance(const VarianceOpts& opts) {
  std::filesystem::create_directories(opts.out);
  int d = opts.dim;
  std::ostringstream config;
  config << "variance;seed=" << opts.seed << ";d=" << d << ";D=" << opts.draws
         << ";trials=" << opts.trials << ";zmax=" << opts.zmax
         << ";zstep=" << opts.zstep;
  std::uint64_t config_hash = fnv1a(config.str());

  std::vector<double> zs;
  for (double z = 0.0; z <= opts.zmax + 1e-12; z += opts.zstep)
    zs.push_back(z);
  // h_ssr is plotted on an extended grid so its large-z plateau is visible
  std::vector<fsq::VarianceReport> reports(zs.size());
  std::vector<std::function<void()>> jobs;
  for (size_t i = 0; i < zs.size(); ++i)
    jobs.push_back([&, i] {
      reports[i] = fsq::make_variance_report(
          d, zs[i], opts.draws, opts.trials,
          fsq::derive_seed(opts.seed, 0x9a60 + i));
    });
  run_pool(jobs, opts.jobs);

  std::ostringstream csv;
  csv.precision(12);
  csv << "z,h_sfs,h_ssr,h_orf,theoretical_gap,var_sfs,var_rff,se_var_sfs,"
         "se_var_rff,seed,config_hash\n";
  nlohmann::json jrows = nlohmann::json::array();
  for (size_t i = 0; i < zs.size(); ++i) {
    const fsq::VarianceReport& rep = reports[i];
    double h_raw = rep.theoretical_gap * opts.draws * d / 2.0;
    double hs = d > 2 ? fsq::h_ssr(zs[i], d)
                      : std::numeric_limits<double>::quiet_NaN();
    csv << zs[i] << ',' << h_raw << ',' << hs << ','
        << fsq::h_orf(zs[i], d) << ',' << rep.theoretical_gap << ','
        << rep.empirical_var_sfs << ',' << rep.empirical_var_rff << ','
        << rep.se_var_sfs << ',' << rep.se_var_rff << ',' << opts.seed << ','
        << config_hash << '\n';
    jrows.push_back(nlohmann::json::parse(fsq::variance_report_to_json(rep)));
  }
  // plateau row: h_ssr at z = 10 documents the large-z value
  if (d > 2) {
    csv << 10.0 << ',' << ',' << fsq::h_ssr(10.0, d) << ',' << ',' << ',' << ','
        << ',' << ',' << ',' << opts.seed << ',' << config_hash << '\n';
  }
  nlohmann::json meta{{"seed", opts.seed},
                      {"config_hash", config_hash},
                      {"d", d},
                      {"D", opts.draws},
                      {"trials", opts.trials}};
  write_text(std::filesystem::path(opts.out) / "variance.csv", csv.str());
  write_text(std::filesystem::path(opts.out) / "variance.json",
             nlohmann::json{{"meta", meta}, {"rows", jrows}}.dump(2));
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fully symmetric quadrature feature maps: experiment runner"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (INI/TOML; [subcommand] sections)");

  ApproxOpts approx_opts;
  approx_opts.methods = kAllMethods;
  auto* approx = app.add_subcommand("approx", "Gram approximation error sweep");
  add_common(approx, approx_opts);
  approx->add_option("--factors", approx_opts.factors,
                     "Width schedule, multiples of d")
      ->delimiter(',');
  approx->add_option("--match", approx_opts.match,
                     "Width matching: none or sfs")
      ->check(CLI::IsMember({"none", "sfs"}));

  BenchOpts bench_opts;
  bench_opts.methods = {"dfs3", "sfs", "rff", "qmc", "sgq", "ssr"};
  auto* bench = app.add_subcommand("bench", "Feature-generation timing");
  add_common(bench, bench_opts);
  bench->add_option("--dims", bench_opts.dims, "Input dimensions")
      ->delimiter(',');
  bench->add_option("--batch", bench_opts.batch, "Batch rows per transform");
  bench->add_option("--reps", bench_opts.reps, "Timed repetitions (min 5)");
  bench->add_option("--width-factor", bench_opts.width_factor,
                    "Width = factor * d for tunable methods");

  TrainOpts train_opts;
  train_opts.methods = kAllMethods;
  train_opts.dim = 6;
  train_opts.samples = 200;
  auto* train = app.add_subcommand("train", "KRR train/test accuracy");
  add_common(train, train_opts);
  train->add_option("--width-factor", train_opts.width_factor,
                    "Width = factor * d for tunable methods");
  train->add_option("--test-fraction", train_opts.test_fraction,
                    "Holdout fraction when no test file given");
  train->add_option("--test-path", train_opts.test_path,
                    "Separate libsvm test file");
  train->add_flag("--no-normalize", train_opts.no_normalize,
                  "Skip min-max normalization (pre-scaled data)");
  train->add_option("--lambda", train_opts.lambda,
                    "Fixed ridge (0 = cross-validate)");

  ConditionOpts condition_opts;
  auto* condition =
      app.add_subcommand("condition", "Variance-reduction radius table");
  add_common(condition, condition_opts);
  condition->add_option("--dims", condition_opts.dims, "Dimensions to solve")
      ->delimiter(',');

  VarianceOpts variance_opts;
  auto* variance =
      app.add_subcommand("variance", "Theoretical and empirical variance curves");
  add_common(variance, variance_opts);
  variance->add_option("--zmax", variance_opts.zmax, "Grid upper end");
  variance->add_option("--zstep", variance_opts.zstep, "Grid step");
  variance->add_option("--draws", variance_opts.draws, "Draw count D");

  CLI11_PARSE(app, argc, argv);

  try {
    if (approx->parsed()) return cmd_approx(approx_opts);
    if (bench->parsed()) return cmd_bench(bench_opts);
    if (train->parsed()) return cmd_train(train_opts);
    if (condition->parsed()) return cmd_condition(condition_opts);
    if (variance->parsed()) return cmd_variance(variance_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
