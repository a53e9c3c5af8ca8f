#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qng/criteria.hpp"
#include "qng/detector.hpp"
#include "qng/emitter.hpp"
#include "qng/result_table.hpp"

namespace qng {

/// Invalid command-line input: malformed grids, missing or conflicting options.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that could not produce a trustworthy result, e.g. an
/// optimizer still gaining value after its last domain expansion.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter grid: "start:stop:count", "log:start:stop:count" or a comma list.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  bool logarithmic = false;
  std::vector<double> explicit_values;

  /// Throws UsageError for malformed text, start > stop or count < 1.
  static GridSpec parse(const std::string& text);
  std::vector<double> values() const;
  std::string describe() const;
};

struct ThresholdRun {
  int order = 1;
  DetectorConfig detector = DetectorConfig::symmetric(2);
  double a_min = -1e7;
  double a_max = -1e-3;
  int points = 200;
  std::uint64_t seed = 0;
};

/// Tables "threshold" (a, error, success_bound, amp, angle, min_var; rows in
/// a-grid order) and "asymptote" (error, success_asymptote).
std::vector<ResultTable> run_threshold(const ThresholdRun& run);

struct WitnessRun {
  int order = 1;
  std::optional<double> success;
  std::optional<double> error;
  std::optional<EnsembleParams> ensemble;
  SourceMode mode = SourceMode::noisy;
  DetectorConfig detector = DetectorConfig::symmetric(2);
  std::uint64_t seed = 0;
};

ResultTable run_witness(const WitnessRun& run);

enum class SweepKind { eta, noise, loss, duration };

SweepKind parse_sweep_kind(const std::string& text);
std::string to_string(SweepKind kind);

struct SweepRun {
  SweepKind kind = SweepKind::eta;
  EnsembleParams ensemble{};
  /// Noise grid; defaults to the ensemble's nbar.
  std::optional<GridSpec> grid;
  /// Emitter counts; defaults to the ensemble's m.
  std::vector<int> emitters;
  /// Criterion orders. The eta sweep takes the cross product with `emitters`;
  /// the others default to n = m.
  std::vector<int> orders;
  std::uint64_t seed = 0;
};

/// eta:      m, n, nbar, eta_star, status
/// noise:    m, n, nbar, eta_star, status, eta_analytic
/// loss:     m, n, eta, nbar, T_star, status, T_analytic
/// duration: m, n, eta, nbar, tau_s, tM_star_over_tau, status, tM_analytic_over_tau
/// status is 0 for a crossing, 1 when witnessed across the whole bracket and
/// -1 when never witnessed.
ResultTable run_sweep(const SweepRun& run);

}  // namespace qng
