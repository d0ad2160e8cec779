// Python bindings for the core operations: rule construction, feature maps,
// exact kernels, variance analysis, and the ridge-regression pipeline.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>

#include "fsq/analysis.hpp"
#include "fsq/baselines.hpp"
#include "fsq/feature_map.hpp"
#include "fsq/kernels.hpp"
#include "fsq/krr.hpp"
#include "fsq/random.hpp"
#include "fsq/rules.hpp"
#include "fsq/stochastic.hpp"

namespace py = pybind11;

namespace {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

fsq::Activation activation_from_name(const std::string& name) {
  if (name == "cossin") return fsq::Activation::CosSin;
  if (name == "relu") return fsq::Activation::Relu;
  if (name == "heaviside") return fsq::Activation::Heaviside;
  throw std::invalid_argument("unknown activation: " + name);
}

fsq::KernelSpec make_spec(const std::string& family, double sigma2, int dim) {
  return {fsq::kernel_family_from_name(family), sigma2, dim};
}

}  // namespace

PYBIND11_MODULE(fsquad, m) {
  m.doc() =
      "Fully symmetric interpolatory quadrature features for kernel "
      "approximation";

  py::class_<fsq::QuadratureRule>(m, "QuadratureRule")
      .def_readonly("dim", &fsq::QuadratureRule::dim)
      .def_readonly("degree", &fsq::QuadratureRule::degree)
      .def_readonly("nodes", &fsq::QuadratureRule::nodes)
      .def_readonly("weights", &fsq::QuadratureRule::weights)
      .def("count", &fsq::QuadratureRule::count)
      .def("__repr__", [](const fsq::QuadratureRule& r) {
        return "QuadratureRule(dim=" + std::to_string(r.dim) +
               ", degree=" + std::to_string(r.degree) +
               ", count=" + std::to_string(r.count()) + ")";
      });

  m.def("third_degree_rule", &fsq::third_degree_rule, py::arg("d"),
        py::arg("lambda1") = fsq::kLambda1Default);
  m.def("fifth_degree_rule", &fsq::fifth_degree_rule, py::arg("d"),
        py::arg("lambda1") = fsq::kLambda1Default,
        py::arg("lambda2") = fsq::kLambda2Default);
  m.def(
      "apply_rule",
      [](const fsq::QuadratureRule& rule, const ScalarFn& f) {
        return fsq::apply_rule(rule, f);
      },
      py::arg("rule"), py::arg("f"));

  py::class_<fsq::FeatureMap>(m, "FeatureMap")
      .def_property_readonly(
          "kind", [](const fsq::FeatureMap& m_) { return fsq::map_kind_name(m_.kind); })
      .def_property_readonly("activation",
                             [](const fsq::FeatureMap& m_) {
                               return fsq::activation_name(m_.activation);
                             })
      .def_readonly("input_dim", &fsq::FeatureMap::input_dim)
      .def_readonly("input_scale", &fsq::FeatureMap::input_scale)
      .def_property_readonly("nodes",
                             [](const fsq::FeatureMap& m_) {
                               return m_.sparse ? Eigen::MatrixXd(m_.sparse_mat)
                                                : m_.dense;
                             })
      .def_readonly("weights", &fsq::FeatureMap::weights)
      .def("node_count", &fsq::FeatureMap::node_count)
      .def("realized_width", &fsq::FeatureMap::realized_width)
      .def("__repr__", [](const fsq::FeatureMap& m_) {
        return "FeatureMap(kind=" + fsq::map_kind_name(m_.kind) +
               ", nodes=" + std::to_string(m_.node_count()) +
               ", width=" + std::to_string(m_.realized_width()) + ")";
      });

  py::class_<fsq::FeatureMatrix>(m, "FeatureMatrix")
      .def_readonly("values", &fsq::FeatureMatrix::values)
      .def_readonly("col_signs", &fsq::FeatureMatrix::col_signs);

  m.def("gaussian_input_scale", &fsq::gaussian_input_scale, py::arg("d"),
        py::arg("sigma2"));
  m.def(
      "build_dfs_map",
      [](const fsq::QuadratureRule& rule, const std::string& activation,
         double input_scale) {
        return fsq::build_dfs_map(rule, activation_from_name(activation),
                                  input_scale);
      },
      py::arg("rule"), py::arg("activation") = "cossin",
      py::arg("input_scale") = 1.0);
  m.def(
      "build_sfs_map",
      [](const fsq::QuadratureRule& rule3, int D, std::uint64_t seed,
         const std::string& activation, double input_scale) {
        return fsq::build_sfs_map(rule3, D, seed,
                                  activation_from_name(activation), input_scale);
      },
      py::arg("rule3"), py::arg("draws"), py::arg("seed"),
      py::arg("activation") = "cossin", py::arg("input_scale") = 1.0);
  m.def(
      "build_sfs_map_from",
      [](const fsq::QuadratureRule& rule3, const Eigen::MatrixXd& omegas,
         const std::string& activation, double input_scale) {
        return fsq::build_sfs_map(rule3, omegas,
                                  activation_from_name(activation), input_scale);
      },
      py::arg("rule3"), py::arg("omegas"), py::arg("activation") = "cossin",
      py::arg("input_scale") = 1.0);

  m.def(
      "rff_map",
      [](int d, int N, double sigma, std::uint64_t seed,
         const std::string& activation) {
        return fsq::rff_matrix(d, N, sigma, seed, activation_from_name(activation));
      },
      py::arg("d"), py::arg("n"), py::arg("sigma"), py::arg("seed"),
      py::arg("activation") = "cossin");
  m.def(
      "orf_map",
      [](int d, int N, double sigma, std::uint64_t seed,
         const std::string& activation) {
        return fsq::orf_matrix(d, N, sigma, seed, activation_from_name(activation));
      },
      py::arg("d"), py::arg("n"), py::arg("sigma"), py::arg("seed"),
      py::arg("activation") = "cossin");
  m.def(
      "rom_map",
      [](int d, int N, double sigma, int t, std::uint64_t seed,
         const std::string& activation) {
        return fsq::rom_matrix(d, N, sigma, t, seed,
                               activation_from_name(activation));
      },
      py::arg("d"), py::arg("n"), py::arg("sigma"), py::arg("t"),
      py::arg("seed"), py::arg("activation") = "cossin");
  m.def(
      "qmc_map",
      [](int d, int N, double sigma, const std::string& activation) {
        return fsq::qmc_matrix(d, N, sigma, activation_from_name(activation));
      },
      py::arg("d"), py::arg("n"), py::arg("sigma"),
      py::arg("activation") = "cossin");
  m.def(
      "gq_map",
      [](int d, int N, double sigma, std::uint64_t seed,
         const std::string& activation) {
        return fsq::gq_map(d, N, sigma, seed, activation_from_name(activation));
      },
      py::arg("d"), py::arg("n"), py::arg("sigma"), py::arg("seed"),
      py::arg("activation") = "cossin");
  m.def(
      "sgq_map",
      [](int d, double lambda1, const std::string& activation,
         double input_scale) {
        return fsq::sgq_third_map(d, lambda1, activation_from_name(activation),
                                  input_scale);
      },
      py::arg("d"), py::arg("lambda1") = fsq::kLambda1Default,
      py::arg("activation") = "cossin", py::arg("input_scale") = 1.0);
  m.def(
      "ssr_map",
      [](int d, int N, std::uint64_t seed, const std::string& activation,
         double input_scale) {
        return fsq::ssr_map(d, N, seed, activation_from_name(activation),
                            input_scale);
      },
      py::arg("d"), py::arg("n"), py::arg("seed"),
      py::arg("activation") = "cossin", py::arg("input_scale") = 1.0);

  m.def("transform", &fsq::transform, py::arg("map"), py::arg("X"));
  m.def("approx_gram", &fsq::approx_gram, py::arg("A"), py::arg("B"));
  m.def("direct_kernel_estimate", &fsq::direct_kernel_estimate, py::arg("map"),
        py::arg("x"), py::arg("y"));

  m.def(
      "kernel_eval",
      [](const std::string& family, double sigma2, int dim,
         const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return fsq::kernel_eval(make_spec(family, sigma2, dim), x, y);
      },
      py::arg("family"), py::arg("sigma2"), py::arg("dim"), py::arg("x"),
      py::arg("y"));
  m.def(
      "gram_matrix",
      [](const std::string& family, double sigma2, const Eigen::MatrixXd& X) {
        return fsq::gram_matrix(
            make_spec(family, sigma2, static_cast<int>(X.cols())), X);
      },
      py::arg("family"), py::arg("sigma2"), py::arg("X"));
  m.def(
      "cross_gram_matrix",
      [](const std::string& family, double sigma2, const Eigen::MatrixXd& A,
         const Eigen::MatrixXd& B) {
        return fsq::cross_gram_matrix(
            make_spec(family, sigma2, static_cast<int>(A.cols())), A, B);
      },
      py::arg("family"), py::arg("sigma2"), py::arg("A"), py::arg("B"));

  m.def(
      "rbar_estimate",
      [](const ScalarFn& f, const Eigen::MatrixXd& omegas,
         const fsq::QuadratureRule& rule3) {
        return fsq::rbar_estimate(f, omegas, rule3).value;
      },
      py::arg("f"), py::arg("omegas"), py::arg("rule3"));
  m.def(
      "triple_stochastic_eval",
      [](const ScalarFn& f, const Eigen::MatrixXd& Q, double rho, double beta) {
        return fsq::triple_stochastic_eval(f, Q, rho, beta);
      },
      py::arg("f"), py::arg("Q"), py::arg("rho"), py::arg("beta"));

  m.def("h_sfs", &fsq::h_sfs, py::arg("z"), py::arg("q"), py::arg("d"),
        py::arg("draws"));
  m.def("h_ssr", &fsq::h_ssr, py::arg("z"), py::arg("d"));
  m.def("h_orf", &fsq::h_orf, py::arg("z"), py::arg("d"));
  m.def("condition_negative", &fsq::condition_J, py::arg("z"),
        py::arg("lambda1") = fsq::kLambda1Default);
  m.def("rmax_solve", &fsq::rmax_solve, py::arg("d"));
  m.def("third_degree_kernel_estimate", &fsq::third_degree_kernel_estimate,
        py::arg("z"));
  m.def("frobenius_error", &fsq::frobenius_error, py::arg("K"),
        py::arg("K_hat"));
  m.def(
      "variance_report",
      [](int d, double z, int draws, long long trials, std::uint64_t seed) {
        fsq::VarianceReport rep =
            fsq::make_variance_report(d, z, draws, trials, seed);
        py::dict out;
        out["z"] = rep.z;
        out["d"] = rep.d;
        out["draws"] = rep.D;
        out["theoretical_gap"] = rep.theoretical_gap;
        out["var_sfs"] = rep.empirical_var_sfs;
        out["var_rff"] = rep.empirical_var_rff;
        out["se_var_sfs"] = rep.se_var_sfs;
        out["se_var_rff"] = rep.se_var_rff;
        return out;
      },
      py::arg("d"), py::arg("z"), py::arg("draws"), py::arg("trials"),
      py::arg("seed"));

  py::class_<fsq::KrrModel>(m, "KrrModel")
      .def_readonly("dual", &fsq::KrrModel::dual)
      .def_readonly("lambda_", &fsq::KrrModel::lambda)
      .def_readonly("classes", &fsq::KrrModel::classes)
      .def_readonly("coef", &fsq::KrrModel::coef)
      .def_readonly("indefinite", &fsq::KrrModel::indefinite);

  m.def("krr_fit", &fsq::krr_fit, py::arg("gram_or_features"), py::arg("y"),
        py::arg("lambda_"), py::arg("dual") = true);
  m.def("predict", &fsq::predict, py::arg("model"), py::arg("inputs"));
  m.def("accuracy", &fsq::accuracy, py::arg("predicted"), py::arg("truth"));
  m.def(
      "synthetic_blobs",
      [](int n, int d, int k_classes, std::uint64_t seed) {
        fsq::Dataset ds = fsq::synthetic_blobs(n, d, k_classes, seed);
        return py::make_tuple(ds.X, ds.y, ds.train_idx, ds.test_idx);
      },
      py::arg("n"), py::arg("d"), py::arg("k_classes"), py::arg("seed"));

  m.def(
      "gaussian_draws",
      [](int rows, int cols, std::uint64_t seed) {
        fsq::Rng rng = fsq::make_rng(seed);
        return fsq::gaussian_matrix(rng, rows, cols);
      },
      py::arg("rows"), py::arg("cols"), py::arg("seed"));
}
