#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qng/detector.hpp"
#include "qng/gaussian_state.hpp"
#include "qng/parallel.hpp"
#include "qng/simplex.hpp"

namespace qng {

/// Search box and multistart grid for the maximization over squeezed
/// coherent states. The grid covers the unit cube of optimizer coordinates
/// (see criteria.cpp): amp^2 on a log-like scale, angle linear, log V on a
/// scale concentrated near V = 1.
struct OptimizerOptions {
  double amp_max = 10.0;
  double min_var_floor = 1e-3;
  int amp_points = 5;
  int angle_points = 5;
  int var_points = 7;
  int max_expansions = 4;
  double opt_tol = 1e-9;
  /// 0 keeps the plain grid; any other value jitters interior seeds
  /// deterministically by up to a quarter cell.
  std::uint64_t seed = 0;
  SimplexOptions simplex{};
  Execution execution = Execution::parallel;

  /// Same options with every grid axis refined 2x (midpoints inserted).
  OptimizerOptions refined() const;
};

struct FunctionalMaximum {
  double value = 0.0;
  SqueezedCoherentParams argmax{};
  double success = 0.0;  // R_n at the argmax
  double error = 0.0;    // R_{n+1} at the argmax
  /// argmax within 1% of amp_max or of the variance floor after the last expansion
  bool at_boundary = false;
  /// false if the last domain expansion still moved the value by more than opt_tol
  bool converged = true;
  int expansions = 0;
  double amp_max = 0.0;
  double min_var_floor = 0.0;
};

/// (R_n, R_{n+1}) of a squeezed coherent state on an (n+1)-channel detector.
ClickProbabilities gaussian_click_stats(const SqueezedCoherentParams& state,
                                        const DetectorConfig& config, int order);

/// F_{a,n}(state) = R_n + a R_{n+1}.
double functional_value(double a, int order, const SqueezedCoherentParams& state,
                        const DetectorConfig& config);

/// F_n(a): maximum of R_n + a R_{n+1} over pure squeezed coherent states.
/// Rejects a >= 0 with std::invalid_argument.
FunctionalMaximum maximize_functional(double a, int order, const DetectorConfig& config,
                                      const OptimizerOptions& options = {});
FunctionalMaximum maximize_functional(double a, int order, const OptimizerOptions& options = {});

/// maximize_functional for every a in the grid, in grid order. With parallel
/// execution the grid is distributed and each maximization runs serially.
std::vector<FunctionalMaximum> maximize_over_grid(int order, std::span<const double> a_grid,
                                                  const DetectorConfig& config,
                                                  const OptimizerOptions& options = {});

struct ThresholdPoint {
  double error = 0.0;
  double success_bound = 0.0;
  double a = -std::numeric_limits<double>::infinity();
  SqueezedCoherentParams optimal_state{};
};

/// Boundary of the Gaussian-attainable region in the (R_{n+1}, R_n) plane,
/// sorted by error and starting at the vacuum point (0, 0).
struct ThresholdCurve {
  int order = 0;
  std::vector<ThresholdPoint> points;

  /// Linear interpolation of the boundary; flat beyond the last point.
  double success_bound_at(double error) const;
};

/// `points` values of a, log-spaced from a_most_negative to a_least_negative.
std::vector<double> log_a_grid(double a_most_negative, double a_least_negative, int points);

ThresholdCurve threshold_curve(int order, std::span<const double> a_grid,
                               const DetectorConfig& config, const OptimizerOptions& options = {});
ThresholdCurve threshold_curve(int order, std::span<const double> a_grid,
                               const OptimizerOptions& options = {});

struct WitnessOptions {
  double a_most_negative = -1e7;
  double a_least_negative = -1e-3;
  int grid_points = 200;
  /// Relative to R_n: witnessed iff margin > decision_tol * R_n.
  double decision_tol = 1e-9;
  /// Golden-section tolerance in log|a| around the best grid node.
  double refine_tol = 1e-5;
  OptimizerOptions optimizer{};
};

struct WitnessResult {
  bool witnessed = false;
  double best_a = 0.0;
  double margin = 0.0;
  double threshold_success = 0.0;
};

/**
 * F_n(a) tabulated on the witness grid for one order and detector. Building
 * the table is the expensive step; witness() then costs one golden-section
 * refinement. Immutable after construction and safe to share across threads.
 */
class GaussianBound {
 public:
  GaussianBound(int order, DetectorConfig config, WitnessOptions options = {});

  int order() const { return order_; }
  const DetectorConfig& detector() const { return config_; }
  const WitnessOptions& options() const { return options_; }
  const std::vector<double>& a_grid() const { return a_grid_; }
  const std::vector<FunctionalMaximum>& grid_maxima() const { return maxima_; }

  /// F_n(a), recomputed from scratch.
  double value(double a) const;

  WitnessResult witness(const ClickProbabilities& stats) const;

 private:
  int order_;
  DetectorConfig config_;
  WitnessOptions options_;
  std::vector<double> a_grid_;
  std::vector<FunctionalMaximum> maxima_;
};

/// Decides whether click statistics certify quantum non-Gaussianity. Bounds
/// are memoized per (order, detector, options).
WitnessResult witness(const ClickProbabilities& stats, int order, const DetectorConfig& config,
                      const WitnessOptions& options = {});

/// Shared, memoized bound for (order, detector, options).
const GaussianBound& cached_gaussian_bound(int order, const DetectorConfig& config,
                                           const WitnessOptions& options = {});

}  // namespace qng
