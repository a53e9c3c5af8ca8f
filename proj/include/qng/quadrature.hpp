#pragma once

#include <functional>
#include <vector>

namespace qng {

struct QuadratureOptions {
  double abs_tol = 1e-15;
  double rel_tol = 1e-14;
  int max_depth = 30;
};

/**
 * Adaptive Gauss-Kronrod (21-point) integration of a vector-valued integrand
 * over [a, b]. Every component is sampled at the same nodes, so a fixed
 * linear combination of components is integrated by the same rule as the
 * components themselves. A panel is accepted when its estimate agrees with
 * the sum over its two halves to within max(abs_tol, rel_tol * |I|) for every
 * component.
 */
std::vector<double> integrate_vector(
    const std::function<void(double, std::vector<double>&)>& integrand, std::size_t components,
    double a, double b, const QuadratureOptions& options = {});

}  // namespace qng
