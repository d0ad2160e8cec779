#include "fsq/kernels.hpp"

#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace fsq {

KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "arccos0") return KernelFamily::ArcCos0;
  if (name == "arccos1") return KernelFamily::ArcCos1;
  throw std::invalid_argument("unknown kernel family: " + name);
}

std::string kernel_family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::ArcCos0: return "arccos0";
    case KernelFamily::ArcCos1: return "arccos1";
  }
  throw std::logic_error("unreachable");
}

namespace {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// P(u > 0, v > 0) for standard bivariate normals with correlation c:
// integrate phi(u) * Phi(c u / sqrt(1 - c^2)) over u > 0 (the conditional CDF
// absorbs the discontinuity, leaving a smooth integrand).
double positive_quadrant_probability(double c) {
  if (c >= 1.0) return 0.5;
  if (c <= -1.0) return 0.0;
  double slope = c / std::sqrt(1.0 - c * c);
  auto integrand = [slope](double u) {
    return standard_normal_pdf(u) * standard_normal_cdf(slope * u);
  };
  // adaptive Simpson on [0, 10] (the tail beyond is below 1e-23)
  struct Simpson {
    double operator()(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb, double whole, double tol,
                      int depth) const {
      double m = 0.5 * (a + b);
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = f(lm), frm = f(rm);
      double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return (*this)(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
             (*this)(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
    }
  };
  std::function<double(double)> f = integrand;
  double a = 0.0, b = 10.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Simpson{}(f, a, b, fa, fm, fb, whole, 1e-12, 30);
}

constexpr int kThetaTableSize = 4097;

const std::vector<double>& theta_table() {
  static std::vector<double> table;
  static std::once_flag once;
  std::call_once(once, [] {
    table.resize(kThetaTableSize);
    for (int i = 0; i < kThetaTableSize; ++i) {
      double theta = M_PI * i / (kThetaTableSize - 1);
      table[i] = 2.0 * positive_quadrant_probability(std::cos(theta));
    }
  });
  return table;
}

double clamped_angle(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     double nx, double ny) {
  double c = x.dot(y) / (nx * ny);
  c = std::min(1.0, std::max(-1.0, c));
  return std::acos(c);
}

}  // namespace

double arccos0_angular(double theta) {
  if (theta < 0.0 || theta > M_PI + 1e-12)
    throw std::invalid_argument("angle must lie in [0, pi]");
  theta = std::min(theta, M_PI);
  const std::vector<double>& table = theta_table();
  double pos = theta / M_PI * (kThetaTableSize - 1);
  int i = std::min(static_cast<int>(pos), kThetaTableSize - 2);
  double frac = pos - i;
  return table[i] * (1.0 - frac) + table[i + 1] * frac;
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dimension mismatch");
  switch (spec.family) {
    case KernelFamily::Gaussian: {
      if (spec.sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be positive");
      if (spec.dim < 1) throw std::invalid_argument("kernel dim must be >= 1");
      double z2 = (x - y).squaredNorm() / (spec.dim * spec.sigma2);
      return std::exp(-0.5 * z2);
    }
    case KernelFamily::ArcCos0: {
      double nx = x.norm(), ny = y.norm();
      if (nx == 0.0 || ny == 0.0) return 0.0;  // continuity convention
      return arccos0_angular(clamped_angle(x, y, nx, ny));
    }
    case KernelFamily::ArcCos1: {
      double nx = x.norm(), ny = y.norm();
      if (nx == 0.0 || ny == 0.0) return 0.0;  // continuity convention
      double theta = clamped_angle(x, y, nx, ny);
      return nx * ny / M_PI *
             (std::sin(theta) + (M_PI - theta) * std::cos(theta));
    }
  }
  throw std::logic_error("unreachable");
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  int n = static_cast<int>(X.rows());
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = kernel_eval(spec, X.row(i).transpose(), X.row(j).transpose());
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::MatrixXd cross_gram_matrix(const KernelSpec& spec,
                                  const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B) {
  if (A.cols() != B.cols()) throw std::invalid_argument("dimension mismatch");
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < B.rows(); ++j)
      K(i, j) = kernel_eval(spec, A.row(i).transpose(), B.row(j).transpose());
  return K;
}

}  // namespace fsq
