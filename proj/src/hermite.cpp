#include "qng/hermite.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace qng {

double hermite(int n, double x) {
  if (n < 0) throw std::invalid_argument("Hermite order must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> hermite_roots(int n) {
  if (n < 1) throw std::invalid_argument("Hermite roots need order >= 1");

  // Jacobi matrix of the weight exp(-x^2): zero diagonal, off-diagonal sqrt(k/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * k);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Jacobi eigensolver failed");

  std::vector<double> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  for (double& x : roots) {
    // H_n' = 2n H_{n-1}
    const double d = 2.0 * n * hermite(n - 1, x);
    if (d != 0.0) x -= hermite(n, x) / d;
  }
  // The spectrum is symmetric; restore exact symmetry lost to rounding.
  for (int i = 0; i < n / 2; ++i) {
    const double m = 0.5 * (roots[n - 1 - i] - roots[i]);
    roots[i] = -m;
    roots[n - 1 - i] = m;
  }
  if (n % 2 == 1) roots[n / 2] = 0.0;
  return roots;
}

double asymptote_hermite_root(int order) {
  if (order < 1) throw std::invalid_argument("criterion order must be at least 1");
  const std::vector<double> roots = hermite_roots(order + 1);
  double best = roots.back();
  double best_value = -1.0;
  // Scanning down from the largest root keeps the positive member of each pair.
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    const double v = std::pow(hermite(order, *it), 4);
    if (v > best_value) {
      best_value = v;
      best = *it;
    }
  }
  return best;
}

double approx_threshold_coefficient(int order, double root) {
  if (order < 1) throw std::invalid_argument("criterion order must be at least 1");
  const double h = hermite(order, root);
  const double scale = 2.0 * std::pow(order + 1.0, 3);
  return std::pow(h, 4) / std::pow(scale, order);
}

double approx_threshold_coefficient(int order) {
  return approx_threshold_coefficient(order, asymptote_hermite_root(order));
}

double asymptotic_success_bound(int order, double error) {
  if (error < 0.0) throw std::invalid_argument("error probability must be nonnegative");
  const double c = approx_threshold_coefficient(order);
  // (C e^n)^{1/(n+2)} evaluated in logs to survive tiny errors
  if (error == 0.0) return 0.0;
  return std::exp((std::log(c) + order * std::log(error)) / (order + 2.0));
}

}  // namespace qng
