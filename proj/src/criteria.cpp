#include "qng/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qng/compensated_sum.hpp"

namespace qng {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
const double kAmpScale = 8.0 * std::numbers::ln10;
const double kVarScale = 3.0 * std::numbers::ln10;

// Optimizer coordinates u in [0,1]^3:
//   amp^2 = amp_max^2 * expm1(8 ln10 u0) / expm1(8 ln10)   (eight decades, 0 at u0 = 0)
//   angle = u1 * pi/2
//   log V = -log(1/V_floor) * expm1(3 ln10 u2) / expm1(3 ln10)
// Weak states, which dominate large |a|, sit at small u0 and u2.
struct SearchBox {
  double amp_max;
  double var_floor;

  struct Point {
    double amp_sq;
    double angle;
    double log_var;
  };

  Point map(const std::array<double, 3>& u) const {
    return {amp_max * amp_max * std::expm1(kAmpScale * u[0]) / std::expm1(kAmpScale),
            kHalfPi * u[1],
            std::log(var_floor) * std::expm1(kVarScale * u[2]) / std::expm1(kVarScale)};
  }

  std::array<double, 3> unmap(const SqueezedCoherentParams& s) const {
    const double a = std::log1p(s.amp * s.amp / (amp_max * amp_max) * std::expm1(kAmpScale)) /
                     kAmpScale;
    const double v =
        std::log1p(std::log(s.min_var) / std::log(var_floor) * std::expm1(kVarScale)) / kVarScale;
    return {std::clamp(a, 0.0, 1.0), std::clamp(s.angle / kHalfPi, 0.0, 1.0),
            std::clamp(v, 0.0, 1.0)};
  }

  SqueezedCoherentParams state(const std::array<double, 3>& u) const {
    const Point p = map(u);
    return {std::sqrt(p.amp_sq), p.angle, std::exp(p.log_var)};
  }
};

// Below this ratio of result to summed term magnitudes the alternating sums
// lose more than ~1e-10 relative precision to roundoff in the deficits.
constexpr double kResolvedFraction = 1e-6;

// R_n and R_{n+1} of a squeezed coherent state, with the inclusion-exclusion
// expanded once per (detector, order). Sums that cancel too deeply are redone
// from the photon-number distribution, where every term is positive.
class FunctionalKernel {
 public:
  FunctionalKernel(const DetectorConfig& config, int order)
      : config_(config), order_(order), plan_(InclusionExclusionPlan::build(config, order)) {}

  std::pair<double, double> click(double amp_sq, double angle, double log_var) const {
    const double sh = std::sinh(0.5 * log_var);
    const double spread = 4.0 * sh * sh;
    const double em = std::expm1(log_var);
    const double emn = std::expm1(-log_var);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double c2 = c * c;
    const double s2 = s * s;
    CompensatedSum success;
    CompensatedSum error;
    double success_scale = 0.0;
    double error_scale = 0.0;
    for (std::size_t i = 0; i < plan_.attenuations.size(); ++i) {
      const double t = plan_.attenuations[i];
      const double log_p = -0.5 * std::log1p(0.5 * t * (1.0 - 0.5 * t) * spread) -
                           t * amp_sq * (c2 / (1.0 + 0.5 * t * em) + s2 / (1.0 + 0.5 * t * emn));
      const double d = -std::expm1(log_p);
      success += plan_.success_weights[i] * d;
      error += plan_.error_weights[i] * d;
      success_scale += std::abs(plan_.success_weights[i] * d);
      error_scale += std::abs(plan_.error_weights[i] * d);
    }
    const double rn = success.value();
    const double rn1 = error.value();
    if (rn1 > kResolvedFraction * error_scale && rn > kResolvedFraction * success_scale) {
      return {rn, rn1};
    }
    return by_photon_number({std::sqrt(amp_sq), angle, std::exp(log_var)});
  }

  std::pair<double, double> click(const SqueezedCoherentParams& s) const {
    return click(s.amp * s.amp, s.angle, std::log(s.min_var));
  }

 private:
  std::pair<double, double> by_photon_number(const SqueezedCoherentParams& state) const {
    std::vector<double> p = photon_number_distribution(state);
    for (;;) {
      const ClickProbabilities r = photon_count_click_stats(p, config_, order_);
      // The truncated tail decays at least as fast as its last terms.
      const std::size_t k = p.size();
      const double tail = p[k - 1] + (k > 1 ? p[k - 2] : 0.0);
      if (tail <= 1e-13 * r.error || static_cast<int>(k) > kMaxCutoff / 2) {
        return {r.success, r.error};
      }
      p = photon_number_distribution(state, 2 * static_cast<int>(k - 1));
    }
  }

  DetectorConfig config_;
  int order_;
  InclusionExclusionPlan plan_;
};

std::vector<double> axis_seeds(int points) {
  if (points < 1) throw std::invalid_argument("multistart grid needs at least one point per axis");
  std::vector<double> u(points);
  for (int i = 0; i < points; ++i) u[i] = points == 1 ? 0.5 : static_cast<double>(i) / (points - 1);
  return u;
}

std::vector<std::array<double, 3>> multistart_seeds(const OptimizerOptions& opt) {
  const auto ua = axis_seeds(opt.amp_points);
  const auto uf = axis_seeds(opt.angle_points);
  const auto uv = axis_seeds(opt.var_points);
  std::vector<std::array<double, 3>> seeds;
  seeds.reserve(ua.size() * uf.size() * uv.size());
  for (double a : ua) {
    for (double f : uf) {
      for (double v : uv) seeds.push_back({a, f, v});
    }
  }
  if (opt.seed != 0) {
    std::mt19937_64 rng(opt.seed);
    const std::array<double, 3> cell = {
        opt.amp_points > 1 ? 1.0 / (opt.amp_points - 1) : 0.5,
        opt.angle_points > 1 ? 1.0 / (opt.angle_points - 1) : 0.5,
        opt.var_points > 1 ? 1.0 / (opt.var_points - 1) : 0.5};
    for (auto& s : seeds) {
      for (int d = 0; d < 3; ++d) {
        // 53 random bits -> [0, 1); spelled out so the sequence is portable.
        const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (s[d] > 0.0 && s[d] < 1.0) s[d] = std::clamp(s[d] + (r - 0.5) * 0.5 * cell[d], 0.0, 1.0);
      }
    }
  }
  return seeds;
}

void require_order(int order, const DetectorConfig& config) {
  if (order < 1) throw std::invalid_argument("criterion order must be at least 1");
  if (config.channels() != order + 1) {
    throw std::invalid_argument("a criterion of order n needs an (n+1)-channel detector");
  }
}

struct LocalResult {
  std::array<double, 3> u;
  double value;
};

LocalResult local_search(const FunctionalKernel& kernel, const SearchBox& box, double a,
                         const std::array<double, 3>& u0, const SimplexOptions& simplex) {
  auto objective = [&](const std::array<double, 3>& u) {
    const SearchBox::Point p = box.map(u);
    const auto [success, error] = kernel.click(p.amp_sq, p.angle, p.log_var);
    return -(success + a * error);
  };
  const auto r = minimize_in_box<3>(objective, u0, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, simplex);
  return {r.x, -r.f};
}

bool near_amp_boundary(const SqueezedCoherentParams& s, double amp_max) {
  return s.amp >= 0.99 * amp_max;
}

bool near_var_boundary(const SqueezedCoherentParams& s, double floor) {
  return s.min_var <= 1.01 * floor;
}

}  // namespace

OptimizerOptions OptimizerOptions::refined() const {
  OptimizerOptions r = *this;
  r.amp_points = 2 * amp_points - 1;
  r.angle_points = 2 * angle_points - 1;
  r.var_points = 2 * var_points - 1;
  return r;
}

ClickProbabilities gaussian_click_stats(const SqueezedCoherentParams& state,
                                        const DetectorConfig& config, int order) {
  require_order(order, config);
  state.validate();
  if (state.is_vacuum()) return {order, 0.0, 0.0};
  const auto [success, error] = FunctionalKernel(config, order).click(state);
  if (success < -kProbabilitySlack || error < -kProbabilitySlack) {
    throw std::domain_error("click probability left [0, 1]");
  }
  return {order, std::clamp(success, 0.0, 1.0), std::clamp(error, 0.0, 1.0)};
}

double functional_value(double a, int order, const SqueezedCoherentParams& state,
                        const DetectorConfig& config) {
  const ClickProbabilities p = gaussian_click_stats(state, config, order);
  return p.success + a * p.error;
}

FunctionalMaximum maximize_functional(double a, int order, const DetectorConfig& config,
                                      const OptimizerOptions& options) {
  if (!std::isfinite(a) || a >= 0.0) {
    throw std::invalid_argument("the functional is maximized only for finite a < 0");
  }
  require_order(order, config);
  if (!(options.amp_max > 0.0) || !(options.min_var_floor > 0.0 && options.min_var_floor < 1.0)) {
    throw std::invalid_argument("invalid optimizer search box");
  }

  const FunctionalKernel kernel(config, order);
  SearchBox box{options.amp_max, options.min_var_floor};

  const auto seeds = multistart_seeds(options);
  std::vector<LocalResult> starts(seeds.size());
  for_each_index(options.execution, seeds.size(), [&](std::size_t i) {
    starts[i] = local_search(kernel, box, a, seeds[i], options.simplex);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < starts.size(); ++i) {
    if (starts[i].value > starts[best].value) best = i;
  }

  FunctionalMaximum out;
  SqueezedCoherentParams argmax = box.state(starts[best].u);
  double value = starts[best].value;
  if (!(value > 0.0)) {
    // The vacuum attains 0, so F_n(a) >= 0.
    argmax = SqueezedCoherentParams::vacuum();
    value = 0.0;
  }

  bool converged = true;
  int expansions = 0;
  while (value > 0.0 && (near_amp_boundary(argmax, box.amp_max) ||
                         near_var_boundary(argmax, box.var_floor))) {
    if (expansions == options.max_expansions) {
      converged = false;
      break;
    }
    if (near_amp_boundary(argmax, box.amp_max)) box.amp_max *= 2.0;
    if (near_var_boundary(argmax, box.var_floor)) box.var_floor *= 0.5;
    ++expansions;
    const LocalResult r = local_search(kernel, box, a, box.unmap(argmax), options.simplex);
    const double gain = r.value - value;
    if (gain > 0.0) {
      value = r.value;
      argmax = box.state(r.u);
    }
    if (gain <= options.opt_tol * std::abs(value)) break;
  }

  out.value = value;
  out.argmax = argmax;
  const auto [success, error] = kernel.click(argmax);
  out.success = argmax.is_vacuum() ? 0.0 : success;
  out.error = argmax.is_vacuum() ? 0.0 : error;
  out.at_boundary = near_amp_boundary(argmax, box.amp_max) || near_var_boundary(argmax, box.var_floor);
  out.converged = converged;
  out.expansions = expansions;
  out.amp_max = box.amp_max;
  out.min_var_floor = box.var_floor;
  return out;
}

FunctionalMaximum maximize_functional(double a, int order, const OptimizerOptions& options) {
  return maximize_functional(a, order, DetectorConfig::symmetric(order + 1), options);
}

std::vector<double> log_a_grid(double a_most_negative, double a_least_negative, int points) {
  if (!(a_most_negative < 0.0 && a_least_negative < 0.0) || !std::isfinite(a_most_negative)) {
    throw std::invalid_argument("a grid must be strictly negative and finite");
  }
  if (!(a_most_negative <= a_least_negative)) {
    throw std::invalid_argument("a grid bounds are reversed");
  }
  if (points < 1) throw std::invalid_argument("a grid needs at least one point");
  if (points == 1) return {a_most_negative};
  const double lo = std::log(-a_most_negative);
  const double hi = std::log(-a_least_negative);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = -std::exp(lo + (hi - lo) * i / (points - 1));
  }
  grid.front() = a_most_negative;
  grid.back() = a_least_negative;
  return grid;
}

std::vector<FunctionalMaximum> maximize_over_grid(int order, std::span<const double> a_grid,
                                                  const DetectorConfig& config,
                                                  const OptimizerOptions& options) {
  OptimizerOptions inner = options;
  inner.execution = Execution::serial;
  std::vector<FunctionalMaximum> maxima(a_grid.size());
  for_each_index(options.execution, a_grid.size(), [&](std::size_t i) {
    maxima[i] = maximize_functional(a_grid[i], order, config, inner);
  });
  return maxima;
}

double ThresholdCurve::success_bound_at(double error) const {
  if (points.empty()) return 0.0;
  if (error <= points.front().error) return points.front().success_bound;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const ThresholdPoint& p = points[i];
    if (error <= p.error) {
      const ThresholdPoint& q = points[i - 1];
      const double w = (error - q.error) / (p.error - q.error);
      return q.success_bound + w * (p.success_bound - q.success_bound);
    }
  }
  return points.back().success_bound;
}

ThresholdCurve threshold_curve(int order, std::span<const double> a_grid,
                               const DetectorConfig& config, const OptimizerOptions& options) {
  require_order(order, config);
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    if (!(a_grid[i] < 0.0)) throw std::invalid_argument("a grid must be strictly negative");
    if (i > 0 && !(a_grid[i - 1] <= a_grid[i])) throw std::invalid_argument("a grid must be sorted");
  }

  const std::vector<FunctionalMaximum> maxima = maximize_over_grid(order, a_grid, config, options);

  ThresholdCurve curve;
  curve.order = order;
  curve.points.push_back({});
  for (std::size_t i = 0; i < maxima.size(); ++i) {
    const FunctionalMaximum& m = maxima[i];
    if (m.error < -kProbabilitySlack || m.success < -kProbabilitySlack) {
      throw std::domain_error("optimizer returned a negative click probability");
    }
    curve.points.push_back({std::clamp(m.error, 0.0, 1.0), std::clamp(m.success, 0.0, 1.0),
                            a_grid[i], m.argmax});
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const ThresholdPoint& x, const ThresholdPoint& y) {
                     return x.error < y.error ||
                            (x.error == y.error && x.success_bound > y.success_bound);
                   });
  auto last = std::unique(curve.points.begin(), curve.points.end(),
                          [](const ThresholdPoint& x, const ThresholdPoint& y) {
                            return x.error == y.error;
                          });
  curve.points.erase(last, curve.points.end());
  return curve;
}

ThresholdCurve threshold_curve(int order, std::span<const double> a_grid,
                               const OptimizerOptions& options) {
  return threshold_curve(order, a_grid, DetectorConfig::symmetric(order + 1), options);
}

GaussianBound::GaussianBound(int order, DetectorConfig config, WitnessOptions options)
    : order_(order), config_(std::move(config)), options_(options) {
  require_order(order_, config_);
  a_grid_ = log_a_grid(options_.a_most_negative, options_.a_least_negative, options_.grid_points);
  maxima_ = maximize_over_grid(order_, a_grid_, config_, options_.optimizer);
}

double GaussianBound::value(double a) const {
  return maximize_functional(a, order_, config_, options_.optimizer).value;
}

WitnessResult GaussianBound::witness(const ClickProbabilities& stats) const {
  if (stats.order != order_) throw std::invalid_argument("click statistics are for another order");
  if (!(stats.success >= 0.0 && stats.success <= 1.0 && stats.error >= 0.0 && stats.error <= 1.0)) {
    throw std::invalid_argument("click probabilities must lie in [0, 1]");
  }
  const double rn = stats.success;
  const double rn1 = stats.error;

  WitnessResult out;
  if (rn1 == 0.0) {
    // Only the vacuum has zero error among Gaussian states, and F_n(a) -> 0
    // as a -> -inf, so the margin supremum is R_n itself.
    out.best_a = -std::numeric_limits<double>::infinity();
    out.margin = rn;
    out.threshold_success = 0.0;
    out.witnessed = rn > 0.0 && out.margin > options_.decision_tol * rn;
    return out;
  }

  auto margin_at = [&](double a, double bound) { return rn + a * rn1 - bound; };

  std::size_t best = 0;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a_grid_.size(); ++i) {
    const double m = margin_at(a_grid_[i], maxima_[i].value);
    if (m > best_margin) {
      best_margin = m;
      best = i;
    }
  }
  double best_a = a_grid_[best];

  if (a_grid_.size() > 1) {
    // The margin is concave in a; refine in log|a| between the neighbours.
    double lo = std::log(-a_grid_[std::min(best + 1, a_grid_.size() - 1)]);
    double hi = std::log(-a_grid_[best == 0 ? 0 : best - 1]);
    auto g = [&](double x) {
      const double a = -std::exp(x);
      return margin_at(a, value(a));
    };
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double g1 = g(x1);
    double g2 = g(x2);
    auto consider = [&](double x, double m) {
      if (m > best_margin) {
        best_margin = m;
        best_a = -std::exp(x);
      }
    };
    consider(x1, g1);
    consider(x2, g2);
    while (hi - lo > options_.refine_tol) {
      if (g1 > g2) {
        hi = x2;
        x2 = x1;
        g2 = g1;
        x1 = hi - inv_phi * (hi - lo);
        g1 = g(x1);
        consider(x1, g1);
      } else {
        lo = x1;
        x1 = x2;
        g1 = g2;
        x2 = lo + inv_phi * (hi - lo);
        g2 = g(x2);
        consider(x2, g2);
      }
    }
  }

  out.best_a = best_a;
  out.margin = best_margin;
  out.threshold_success = std::clamp(rn - best_margin, 0.0, 1.0);
  out.witnessed = rn > 0.0 && best_margin > options_.decision_tol * rn;
  return out;
}

namespace {

std::string bound_key(int order, const DetectorConfig& config, const WitnessOptions& o) {
  std::ostringstream key;
  key << std::hexfloat << order;
  for (double s : config.splitting()) key << ',' << s;
  key << '|';
  for (double e : config.efficiencies()) key << ',' << e;
  const OptimizerOptions& p = o.optimizer;
  key << '|' << o.a_most_negative << ',' << o.a_least_negative << ',' << o.grid_points << ','
      << o.decision_tol << ',' << o.refine_tol << '|' << p.amp_max << ',' << p.min_var_floor << ','
      << p.amp_points << ',' << p.angle_points << ',' << p.var_points << ',' << p.max_expansions
      << ',' << p.opt_tol << ',' << p.seed << ',' << p.simplex.initial_step << ','
      << p.simplex.max_evaluations << ',' << p.simplex.f_rel_tol << ',' << p.simplex.x_tol << ','
      << p.simplex.max_restarts;
  return key.str();
}

}  // namespace

const GaussianBound& cached_gaussian_bound(int order, const DetectorConfig& config,
                                           const WitnessOptions& options) {
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<GaussianBound>> cache;
  const std::string key = bound_key(order, config, options);
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<GaussianBound>(order, config, options)).first;
  }
  return *it->second;
}

WitnessResult witness(const ClickProbabilities& stats, int order, const DetectorConfig& config,
                      const WitnessOptions& options) {
  return cached_gaussian_bound(order, config, options).witness(stats);
}

}  // namespace qng
