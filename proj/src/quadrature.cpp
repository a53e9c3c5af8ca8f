#include "qng/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

namespace qng {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Panel {
  const std::function<void(double, std::vector<double>&)>& f;
  std::size_t components;
  std::vector<double> scratch;

  std::vector<double> rule(double a, double b) {
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<double> sum(components, 0.0);
    scratch.assign(components, 0.0);
    f(mid, scratch);
    for (std::size_t c = 0; c < components; ++c) sum[c] += w[0] * scratch[c];
    for (std::size_t i = 1; i < x.size(); ++i) {
      f(mid - half * x[i], scratch);
      for (std::size_t c = 0; c < components; ++c) sum[c] += w[i] * scratch[c];
      f(mid + half * x[i], scratch);
      for (std::size_t c = 0; c < components; ++c) sum[c] += w[i] * scratch[c];
    }
    for (double& s : sum) s *= half;
    return sum;
  }
};

void refine(Panel& p, double a, double b, const std::vector<double>& whole, int depth,
            const QuadratureOptions& opt, std::vector<double>& total) {
  const double mid = 0.5 * (a + b);
  const std::vector<double> left = p.rule(a, mid);
  const std::vector<double> right = p.rule(mid, b);
  bool accepted = true;
  for (std::size_t c = 0; c < whole.size(); ++c) {
    const double halves = left[c] + right[c];
    if (std::abs(halves - whole[c]) > std::max(opt.abs_tol, opt.rel_tol * std::abs(halves))) {
      accepted = false;
      break;
    }
  }
  if (accepted || depth >= opt.max_depth) {
    for (std::size_t c = 0; c < whole.size(); ++c) total[c] += left[c] + right[c];
    return;
  }
  refine(p, a, mid, left, depth + 1, opt, total);
  refine(p, mid, b, right, depth + 1, opt, total);
}

}  // namespace

std::vector<double> integrate_vector(
    const std::function<void(double, std::vector<double>&)>& integrand, std::size_t components,
    double a, double b, const QuadratureOptions& options) {
  if (!(std::isfinite(a) && std::isfinite(b))) throw std::invalid_argument("non-finite interval");
  std::vector<double> total(components, 0.0);
  if (a == b) return total;
  Panel panel{integrand, components, {}};
  const std::vector<double> whole = panel.rule(a, b);
  refine(panel, a, b, whole, 0, options, total);
  return total;
}

}  // namespace qng
