#include "qng/gaussian_state.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qng/compensated_sum.hpp"

namespace qng {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite ") + name);
  }
}

void require_attenuation(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("attenuation must lie in [0, 1], got " + std::to_string(t));
  }
}

// Amplitudes for a fixed cutoff. The state is annihilated by
// mu (a - alpha) + nu (a^dag - alpha*), with mu = cosh r, nu = sinh r for a
// squeezed x quadrature, so
//   mu sqrt(n+1) c_{n+1} = beta c_n - nu sqrt(n) c_{n-1},  beta = mu alpha + nu alpha*.
std::vector<std::complex<double>> ladder_amplitudes(const SqueezedCoherentParams& s, int cutoff) {
  const double r = s.squeezing_parameter();
  const double mu = std::cosh(r);
  const double nu = std::sinh(r);
  const std::complex<double> alpha = std::polar(s.amp, s.angle);
  const std::complex<double> beta = mu * alpha + nu * std::conj(alpha);

  std::vector<std::complex<double>> c(static_cast<std::size_t>(cutoff) + 1);
  c[0] = std::exp(-0.5 * s.amp * s.amp - 0.5 * std::conj(alpha) * std::conj(alpha) * std::tanh(r)) /
         std::sqrt(mu);
  if (cutoff >= 1) {
    c[1] = beta * c[0] / mu;
  }
  for (int n = 1; n < cutoff; ++n) {
    const double dn = n;
    c[n + 1] = (beta * c[n] - nu * std::sqrt(dn) * c[n - 1]) / (mu * std::sqrt(dn + 1.0));
  }
  return c;
}

double squared_norm(const std::vector<std::complex<double>>& c) {
  CompensatedSum acc;
  for (const auto& z : c) acc += std::norm(z);
  return acc.value();
}

}  // namespace

SqueezedCoherentParams SqueezedCoherentParams::canonical(double amp, double angle, double min_var) {
  require_finite(amp, "amplitude");
  require_finite(angle, "angle");
  require_finite(min_var, "minimal variance");
  if (amp < 0.0) throw std::invalid_argument("amplitude must be nonnegative");
  if (min_var <= 0.0) throw std::invalid_argument("minimal variance must be positive");

  if (min_var > 1.0) {
    min_var = 1.0 / min_var;
    angle = 0.5 * kPi - angle;
  }
  // Only the axis matters: phi and phi + pi give the same state up to the
  // sign of alpha, and phi -> -phi is a reflection.
  angle = std::fmod(angle, kPi);
  if (angle < 0.0) angle += kPi;
  if (angle > 0.5 * kPi) angle = kPi - angle;
  return {amp, angle, min_var};
}

void SqueezedCoherentParams::validate() const {
  require_finite(amp, "amplitude");
  require_finite(angle, "angle");
  require_finite(min_var, "minimal variance");
  if (amp < 0.0) throw std::invalid_argument("amplitude must be nonnegative");
  if (min_var <= 0.0) throw std::invalid_argument("minimal variance must be positive");
  if (angle < 0.0 || angle > 0.5 * kPi) throw std::invalid_argument("angle outside [0, pi/2]");
}

double SqueezedCoherentParams::squeezing_parameter() const { return -0.5 * std::log(min_var); }

double SqueezedCoherentParams::mean_photon_number() const {
  const double sh = std::sinh(squeezing_parameter());
  return amp * amp + sh * sh;
}

double FockVector::norm_squared() const { return squared_norm(coefficients); }

FockVector fock_coefficients(const SqueezedCoherentParams& state, int cutoff) {
  state.validate();
  if (cutoff < 0) throw std::invalid_argument("cutoff must be nonnegative");

  if (cutoff > 0) {
    FockVector v{ladder_amplitudes(state, cutoff)};
    if (v.norm_squared() < 1.0 - kTailTolerance) {
      throw TruncationError("Fock cutoff " + std::to_string(cutoff) +
                            " leaves tail mass above tolerance");
    }
    return v;
  }

  for (int k = kInitialCutoff; k <= kMaxCutoff; k *= 2) {
    FockVector v{ladder_amplitudes(state, k)};
    if (v.norm_squared() >= 1.0 - kTailTolerance) return v;
  }
  throw TruncationError("Fock expansion did not converge below cutoff " +
                        std::to_string(kMaxCutoff));
}

std::vector<double> photon_number_distribution(const SqueezedCoherentParams& state, int cutoff) {
  const FockVector v = fock_coefficients(state, cutoff);
  std::vector<double> p;
  p.reserve(v.coefficients.size());
  for (const auto& z : v.coefficients) p.push_back(std::norm(z));
  return p;
}

namespace detail {

// Vacuum overlap of the attenuated Gaussian state. With covariance
// diag(V, 1/V), mean 2 alpha and transmission t, the attenuated covariance
// plus vacuum is 2 diag(A, B) with A = 1 + t(V-1)/2, B = 1 + t(1/V-1)/2, and
//   P0 = exp(-|alpha|^2 t (cos^2/A + sin^2/B)) / sqrt(A B).
// A B = 1 + t(1 - t/2)(V - 1)^2 / (2V) and (V-1)^2/V = 4 sinh^2(log V / 2),
// which keeps the prefactor accurate as V -> 1.
double log_no_click(double amp_sq, double angle, double log_var, double t) {
  const double sh = std::sinh(0.5 * log_var);
  const double spread = 4.0 * sh * sh;
  const double a = 1.0 + 0.5 * t * std::expm1(log_var);
  const double b = 1.0 + 0.5 * t * std::expm1(-log_var);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return -0.5 * std::log1p(0.5 * t * (1.0 - 0.5 * t) * spread) -
         t * amp_sq * (c * c / a + s * s / b);
}

}  // namespace detail

double log_no_click(const SqueezedCoherentParams& state, double attenuation) {
  state.validate();
  require_attenuation(attenuation);
  return detail::log_no_click(state.amp * state.amp, state.angle, std::log(state.min_var),
                              attenuation);
}

double no_click_expectation(const SqueezedCoherentParams& state, double attenuation) {
  return std::exp(log_no_click(state, attenuation));
}

double no_click_deficit(const SqueezedCoherentParams& state, double attenuation) {
  return -std::expm1(log_no_click(state, attenuation));
}

double no_click_oracle(const SqueezedCoherentParams& state, double attenuation, int cutoff) {
  require_attenuation(attenuation);
  const std::vector<double> p = photon_number_distribution(state, cutoff);
  const double keep = 1.0 - attenuation;
  CompensatedSum acc;
  double weight = 1.0;
  for (double pn : p) {
    acc += pn * weight;
    weight *= keep;
  }
  return acc.value();
}

}  // namespace qng
