#pragma once

#include <limits>
#include <vector>

#include "qng/criteria.hpp"
#include "qng/detector.hpp"

namespace qng {

/**
 * Light from m independent two-level emitters, each delivering a photon to
 * the detector with probability `efficiency`, plus Poissonian background
 * with mean `noise_mean` photons per emitter (m * noise_mean in total).
 *
 * `loss` is an extra channel transmission applied as efficiency -> T eta,
 * noise_mean -> T nbar. Emitters leave the source at rate 1/storage_time;
 * click statistics are time-averaged over [window_start,
 * window_start + window_length].
 */
struct EnsembleParams {
  int emitters = 1;
  double efficiency = 0.0;
  double noise_mean = 0.0;
  double loss = 1.0;
  double storage_time = std::numeric_limits<double>::infinity();
  double window_start = 0.0;
  double window_length = 0.0;

  /// Throws std::invalid_argument on out-of-domain fields.
  void validate() const;

  double transmitted_efficiency() const { return loss * efficiency; }
  double transmitted_noise() const { return loss * noise_mean; }
  double total_noise() const { return emitters * noise_mean; }

  friend bool operator==(const EnsembleParams&, const EnsembleParams&) = default;
};

enum class SourceMode { ideal, noisy, escape };

/// (1 - T eta k/N)^m
double ideal_no_click(const EnsembleParams& params, int k, int channels);
/// ideal_no_click * exp(-m T nbar k/N)
double noisy_no_click(const EnsembleParams& params, int k, int channels);
/// Time average of the noisy no-click probability with emitter escape.
double escape_averaged_no_click(const EnsembleParams& params, int k, int channels);

/// Deficits 1 - R_{0,k} for k = 0..channels in the given mode.
std::vector<double> source_no_click_deficits(const EnsembleParams& params, int channels,
                                             SourceMode mode);

NoClickProfile source_no_click_profile(const EnsembleParams& params, int channels,
                                       SourceMode mode);

/// (R_n, R_{n+1}) on a symmetric (n+1)-channel detector.
ClickProbabilities source_click_stats(const EnsembleParams& params, int order, SourceMode mode);

struct ApproxClicks {
  double success = 0.0;
  double error = 0.0;
  /// m nbar / eta; the approximation needs this small.
  double validity_ratio = 0.0;
};

/// Weak-signal approximations R_m ~ m!/(m+1)^m eta^m and R_{m+1} ~ R_m m nbar.
ApproxClicks approx_success_error(int emitters, double efficiency, double noise_mean);

/// Smallest eta allowed by the weak-light asymptote at noise nbar (order m).
double min_efficiency_analytic(int emitters, double noise_mean);
/// Smallest channel transmission T allowed by the weak-light asymptote.
double loss_tolerance_analytic(int emitters, double efficiency, double noise_mean);

struct DurationBound {
  /// Upper bound on the window length; meaningful only when detectable.
  double max_window = 0.0;
  bool detectable = false;
  /// (1/12)(t_M/tau)^2 and (m^3/1440)(t_M/tau)^4 at max_window.
  double quadratic_ratio = 0.0;
  double quartic_ratio = 0.0;
};

DurationBound max_duration_analytic(int emitters, double efficiency, double noise_mean,
                                    double storage_time);

/// Result of a bisection for the point where the witness decision flips.
struct ThresholdSearch {
  enum class Outcome {
    crossing,          // decision flips inside the bracket; value is the crossing
    always_witnessed,  // witnessed over the whole bracket; value is the bracket end
    never_witnessed,   // not witnessed anywhere in the bracket; value is NaN
  };
  Outcome outcome = Outcome::never_witnessed;
  double value = std::numeric_limits<double>::quiet_NaN();

  bool found() const { return outcome != Outcome::never_witnessed; }
};

struct SearchOptions {
  double lower = 1e-4;
  double upper = 1.0;
  double tolerance = 1e-4;
  WitnessOptions witness{};
};

/// Smallest eta at which order `order` witnesses the noisy source.
ThresholdSearch min_detectable_efficiency(int emitters, int order, double noise_mean,
                                          const SearchOptions& options = {});

/// Smallest transmission T at which the noisy source stays witnessed.
ThresholdSearch max_tolerated_loss(int emitters, double efficiency, double noise_mean, int order,
                                   const SearchOptions& options = {});

/// Largest window t_M (bracket [0, 1000 tau_s]) at which the escape-averaged
/// source stays witnessed. The tolerance is relative to tau_s.
ThresholdSearch max_measurement_duration(int emitters, double efficiency, double noise_mean,
                                         double storage_time, int order,
                                         const SearchOptions& options = {});

/// Default bracket for max_measurement_duration: [0, 1000] in units of tau_s.
SearchOptions duration_search_defaults();

}  // namespace qng
