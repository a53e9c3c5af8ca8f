#include "qng/emitter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "qng/hermite.hpp"
#include "qng/quadrature.hpp"

namespace qng {

namespace {

void require_size(int k, int channels) {
  if (channels < 1) throw std::invalid_argument("detector needs at least one channel");
  if (k < 0 || k > channels) throw std::out_of_range("subset size outside the detector");
}

// Deficit 1 - (1 - x)^m exp(-m y) with x = T eta (k/N) q and y = T nbar (k/N) q,
// where q is the fraction of emitters still present.
double instantaneous_deficit(const EnsembleParams& p, double fraction, double present) {
  const double x = p.transmitted_efficiency() * fraction * present;
  const double y = p.transmitted_noise() * fraction * present;
  const double m = p.emitters;
  return -std::expm1(m * std::log1p(-x) - m * y);
}

// The hierarchy's weak-light coefficient m H_m(x)^{4/m} / ((m+1) (m!)^{2/m}),
// which all three analytic bounds share.
double asymptote_scale(int m) {
  if (m < 1) throw std::invalid_argument("need at least one emitter");
  const double h = std::abs(hermite(m, asymptote_hermite_root(m)));
  return m * std::pow(h, 4.0 / m) / ((m + 1.0) * std::exp(2.0 * std::lgamma(m + 1.0) / m));
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite and nonnegative");
  }
}

}  // namespace

void EnsembleParams::validate() const {
  if (emitters < 1) throw std::invalid_argument("need at least one emitter");
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw std::invalid_argument("eta outside [0, 1]");
  require_nonnegative(noise_mean, "noise mean");
  if (!(loss >= 0.0 && loss <= 1.0)) throw std::invalid_argument("transmission T outside [0, 1]");
  if (!(storage_time > 0.0)) throw std::invalid_argument("storage time must be positive");
  require_nonnegative(window_start, "window start");
  require_nonnegative(window_length, "window length");
}

double ideal_no_click(const EnsembleParams& params, int k, int channels) {
  params.validate();
  require_size(k, channels);
  const double x = params.transmitted_efficiency() * k / channels;
  return std::pow(1.0 - x, params.emitters);
}

double noisy_no_click(const EnsembleParams& params, int k, int channels) {
  params.validate();
  require_size(k, channels);
  const double fraction = static_cast<double>(k) / channels;
  return ideal_no_click(params, k, channels) *
         std::exp(-params.emitters * params.transmitted_noise() * fraction);
}

double escape_averaged_no_click(const EnsembleParams& params, int k, int channels) {
  require_size(k, channels);
  return 1.0 - source_no_click_deficits(params, channels, SourceMode::escape)[k];
}

std::vector<double> source_no_click_deficits(const EnsembleParams& params, int channels,
                                             SourceMode mode) {
  params.validate();
  require_size(0, channels);
  std::vector<double> d(channels + 1, 0.0);

  if (mode == SourceMode::ideal) {
    EnsembleParams quiet = params;
    quiet.noise_mean = 0.0;
    for (int k = 1; k <= channels; ++k) {
      d[k] = instantaneous_deficit(quiet, static_cast<double>(k) / channels, 1.0);
    }
    return d;
  }

  const bool escaping = mode == SourceMode::escape && std::isfinite(params.storage_time);
  if (!escaping) {
    for (int k = 1; k <= channels; ++k) {
      d[k] = instantaneous_deficit(params, static_cast<double>(k) / channels, 1.0);
    }
    return d;
  }

  // Time in units of the storage time.
  const double s0 = params.window_start / params.storage_time;
  const double span = params.window_length / params.storage_time;
  if (span == 0.0) {
    const double present = std::exp(-s0);
    for (int k = 1; k <= channels; ++k) {
      d[k] = instantaneous_deficit(params, static_cast<double>(k) / channels, present);
    }
    return d;
  }

  auto integrand = [&](double s, std::vector<double>& out) {
    const double present = std::exp(-s);
    out[0] = 0.0;
    for (int k = 1; k <= channels; ++k) {
      out[k] = instantaneous_deficit(params, static_cast<double>(k) / channels, present);
    }
  };
  std::vector<double> integral = integrate_vector(integrand, channels + 1, s0, s0 + span);
  for (int k = 1; k <= channels; ++k) d[k] = integral[k] / span;
  return d;
}

NoClickProfile source_no_click_profile(const EnsembleParams& params, int channels,
                                       SourceMode mode) {
  std::vector<double> d = source_no_click_deficits(params, channels, mode);
  return NoClickProfile::by_size(channels, [d = std::move(d)](int k) { return d.at(k); });
}

namespace {

// Probability that m emitters, each landing in any one given channel with
// probability x, together hit all of j given channels.
double cover_probability(int m, double x, int j) {
  std::vector<double> p(j + 1, 0.0);
  p[0] = 1.0;
  for (int e = 1; e <= m; ++e) {
    for (int c = std::min(e, j); c >= 0; --c) {
      const double stay = p[c] * (1.0 - (j - c) * x);
      p[c] = c > 0 ? stay + p[c - 1] * (j - c + 1) * x : stay;
    }
  }
  return p[j];
}

// All of g given channels click: each fires from noise (Poisson mean mu per
// channel) or is hit by an emitter. Every term is nonnegative, so tiny
// probabilities keep their relative precision.
double group_click_probability(int m, double x, double mu, int g) {
  const double noisy = -std::expm1(-mu);
  const double quiet = std::exp(-mu);
  double total = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= g; ++j) {
    if (j > 0) binom = binom * (g - j + 1) / j;
    total += binom * std::pow(noisy, g - j) * std::pow(quiet, j) * cover_probability(m, x, j);
  }
  return total;
}

}  // namespace

ClickProbabilities source_click_stats(const EnsembleParams& params, int order, SourceMode mode) {
  if (order < 1) throw std::invalid_argument("criterion order must be at least 1");
  params.validate();
  const int channels = order + 1;
  const int m = params.emitters;
  const double x = params.transmitted_efficiency() / channels;
  const double mu =
      mode == SourceMode::ideal ? 0.0 : m * params.transmitted_noise() / channels;
  auto at = [&](double present) {
    return ClickProbabilities{order, group_click_probability(m, x * present, mu * present, order),
                              group_click_probability(m, x * present, mu * present, channels)};
  };

  if (mode != SourceMode::escape || !std::isfinite(params.storage_time)) return at(1.0);
  const double s0 = params.window_start / params.storage_time;
  const double span = params.window_length / params.storage_time;
  if (span == 0.0) return at(std::exp(-s0));

  QuadratureOptions tight;
  tight.abs_tol = 0.0;
  tight.rel_tol = 1e-12;
  tight.max_depth = 24;
  const std::vector<double> integral = integrate_vector(
      [&](double s, std::vector<double>& out) {
        const ClickProbabilities c = at(std::exp(-s));
        out[0] = c.success;
        out[1] = c.error;
      },
      2, s0, s0 + span, tight);
  return {order, integral[0] / span, integral[1] / span};
}

ApproxClicks approx_success_error(int emitters, double efficiency, double noise_mean) {
  if (emitters < 1) throw std::invalid_argument("need at least one emitter");
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw std::invalid_argument("eta outside [0, 1]");
  require_nonnegative(noise_mean, "noise mean");
  const double m = emitters;
  const double c = std::exp(std::lgamma(m + 1.0) - m * std::log(m + 1.0));
  ApproxClicks out;
  out.success = c * std::pow(efficiency, m);
  out.error = out.success * m * noise_mean;
  out.validity_ratio = efficiency > 0.0 ? m * noise_mean / efficiency
                                        : (noise_mean > 0.0 ? std::numeric_limits<double>::infinity()
                                                            : 0.0);
  return out;
}

double min_efficiency_analytic(int emitters, double noise_mean) {
  require_nonnegative(noise_mean, "noise mean");
  return std::sqrt(0.5 * asymptote_scale(emitters) * noise_mean);
}

double loss_tolerance_analytic(int emitters, double efficiency, double noise_mean) {
  require_nonnegative(noise_mean, "noise mean");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw std::invalid_argument("eta outside (0, 1]");
  return asymptote_scale(emitters) * noise_mean / (2.0 * efficiency * efficiency);
}

DurationBound max_duration_analytic(int emitters, double efficiency, double noise_mean,
                                    double storage_time) {
  require_nonnegative(noise_mean, "noise mean");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw std::invalid_argument("eta outside (0, 1]");
  if (!(storage_time > 0.0)) throw std::invalid_argument("storage time must be positive");
  const double factor =
      1.0 - asymptote_scale(emitters) * noise_mean / (4.0 * efficiency * efficiency);
  DurationBound out;
  out.detectable = factor > 0.0;
  out.max_window = 0.5 * storage_time * factor;
  if (out.detectable && std::isfinite(storage_time)) {
    const double r = out.max_window / storage_time;
    const double m = emitters;
    out.quadratic_ratio = r * r / 12.0;
    out.quartic_ratio = m * m * m / 1440.0 * r * r * r * r;
  }
  return out;
}

namespace {

ThresholdSearch bisect_rising(const std::function<bool(double)>& witnessed,
                              const SearchOptions& opt) {
  ThresholdSearch out;
  if (!witnessed(opt.upper)) return out;
  if (witnessed(opt.lower)) {
    out.outcome = ThresholdSearch::Outcome::always_witnessed;
    out.value = opt.lower;
    return out;
  }
  double lo = opt.lower;
  double hi = opt.upper;
  while (hi - lo > opt.tolerance) {
    const double mid = 0.5 * (lo + hi);
    (witnessed(mid) ? hi : lo) = mid;
  }
  out.outcome = ThresholdSearch::Outcome::crossing;
  out.value = hi;
  return out;
}

void require_bracket(const SearchOptions& opt) {
  if (!(opt.lower >= 0.0 && opt.lower < opt.upper && opt.tolerance > 0.0)) {
    throw std::invalid_argument("invalid search bracket");
  }
}

}  // namespace

ThresholdSearch min_detectable_efficiency(int emitters, int order, double noise_mean,
                                          const SearchOptions& options) {
  require_bracket(options);
  const GaussianBound& bound =
      cached_gaussian_bound(order, DetectorConfig::symmetric(order + 1), options.witness);
  EnsembleParams p;
  p.emitters = emitters;
  p.noise_mean = noise_mean;
  return bisect_rising(
      [&](double eta) {
        EnsembleParams q = p;
        q.efficiency = eta;
        return bound.witness(source_click_stats(q, order, SourceMode::noisy)).witnessed;
      },
      options);
}

ThresholdSearch max_tolerated_loss(int emitters, double efficiency, double noise_mean, int order,
                                   const SearchOptions& options) {
  require_bracket(options);
  const GaussianBound& bound =
      cached_gaussian_bound(order, DetectorConfig::symmetric(order + 1), options.witness);
  EnsembleParams p;
  p.emitters = emitters;
  p.efficiency = efficiency;
  p.noise_mean = noise_mean;
  return bisect_rising(
      [&](double transmission) {
        EnsembleParams q = p;
        q.loss = transmission;
        return bound.witness(source_click_stats(q, order, SourceMode::noisy)).witnessed;
      },
      options);
}

SearchOptions duration_search_defaults() {
  SearchOptions o;
  o.lower = 0.0;
  o.upper = 1000.0;
  return o;
}

ThresholdSearch max_measurement_duration(int emitters, double efficiency, double noise_mean,
                                         double storage_time, int order,
                                         const SearchOptions& options) {
  require_bracket(options);
  if (!(storage_time > 0.0 && std::isfinite(storage_time))) {
    throw std::invalid_argument("storage time must be positive and finite");
  }
  const GaussianBound& bound =
      cached_gaussian_bound(order, DetectorConfig::symmetric(order + 1), options.witness);
  EnsembleParams p;
  p.emitters = emitters;
  p.efficiency = efficiency;
  p.noise_mean = noise_mean;
  p.storage_time = storage_time;
  auto witnessed = [&](double window_in_tau) {
    EnsembleParams q = p;
    q.window_length = window_in_tau * storage_time;
    return bound.witness(source_click_stats(q, order, SourceMode::escape)).witnessed;
  };

  ThresholdSearch out;
  if (!witnessed(options.lower)) return out;
  if (witnessed(options.upper)) {
    out.outcome = ThresholdSearch::Outcome::always_witnessed;
    out.value = options.upper * storage_time;
    return out;
  }
  double lo = options.lower;
  double hi = options.upper;
  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    (witnessed(mid) ? lo : hi) = mid;
  }
  out.outcome = ThresholdSearch::Outcome::crossing;
  out.value = lo * storage_time;
  return out;
}

}  // namespace qng
