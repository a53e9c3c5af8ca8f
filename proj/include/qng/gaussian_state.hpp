#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace qng {

/// Tail mass tolerated when the Fock expansion is truncated.
inline constexpr double kTailTolerance = 1e-12;
/// First cutoff tried by the adaptive Fock expansion; doubled until the tail fits.
inline constexpr int kInitialCutoff = 32;
inline constexpr int kMaxCutoff = 1 << 15;

/// Thrown when a truncated Fock expansion misses more than kTailTolerance of the norm.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Pure single-mode squeezed coherent state.
 *
 * Variances are in shot-noise units: min_var = 1 is a coherent state, the
 * anti-squeezed quadrature has variance 1/min_var. `angle` is measured
 * between the displacement and the minimal-variance axis and lives in
 * [0, pi/2]; use canonical() to fold arbitrary input into that range.
 */
struct SqueezedCoherentParams {
  double amp = 0.0;
  double angle = 0.0;
  double min_var = 1.0;

  /// Validates and folds (angle, min_var) into the canonical domain.
  /// min_var > 1 is read as squeezing of the orthogonal quadrature.
  static SqueezedCoherentParams canonical(double amp, double angle, double min_var);

  static SqueezedCoherentParams vacuum() { return {}; }
  static SqueezedCoherentParams coherent(double amp) { return {amp, 0.0, 1.0}; }

  bool is_vacuum() const { return amp == 0.0 && min_var == 1.0; }
  /// Throws std::invalid_argument unless the fields satisfy the canonical invariants.
  void validate() const;

  double squeezing_parameter() const;  // r with min_var = exp(-2r)
  double mean_photon_number() const;   // amp^2 + sinh^2 r

  friend bool operator==(const SqueezedCoherentParams&, const SqueezedCoherentParams&) = default;
};

struct FockVector {
  std::vector<std::complex<double>> coefficients;

  int cutoff() const { return static_cast<int>(coefficients.size()) - 1; }
  double norm_squared() const;
};

/// Number-basis amplitudes of D(alpha) S(r)|0>, computed by the ladder recurrence.
/// cutoff = 0 grows the expansion adaptively from kInitialCutoff.
FockVector fock_coefficients(const SqueezedCoherentParams& state, int cutoff = 0);

std::vector<double> photon_number_distribution(const SqueezedCoherentParams& state,
                                               int cutoff = 0);

/// log <:exp(-t n):>, i.e. the log of the vacuum probability after transmission t.
double log_no_click(const SqueezedCoherentParams& state, double attenuation);

/// Closed-form probability that an on/off detector seeing a fraction
/// `attenuation` of the mode does not click.
double no_click_expectation(const SqueezedCoherentParams& state, double attenuation);

/// 1 - no_click_expectation, evaluated without cancellation for weak states.
double no_click_deficit(const SqueezedCoherentParams& state, double attenuation);

/// Same quantity as no_click_expectation, summed over the truncated photon
/// number distribution. Test and cross-check path only.
double no_click_oracle(const SqueezedCoherentParams& state, double attenuation, int cutoff = 0);

namespace detail {

// Kernel shared by the optimizer: parameters are (amp^2, angle, log V).
double log_no_click(double amp_sq, double angle, double log_var, double attenuation);

}  // namespace detail

}  // namespace qng
