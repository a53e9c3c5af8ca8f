#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace qng {

struct SimplexOptions {
  double initial_step = 0.05;
  int max_evaluations = 3000;
  double f_rel_tol = 1e-15;
  double x_tol = 1e-10;
  int max_restarts = 2;
};

template <std::size_t D>
struct SimplexResult {
  std::array<double, D> x{};
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/**
 * Nelder-Mead minimization inside a box. Trial points are projected onto the
 * box, so the simplex can slide along a face but never leave it. After
 * convergence the simplex is rebuilt around the best vertex and the search
 * restarted until a restart brings no improvement.
 */
template <std::size_t D, class Objective>
SimplexResult<D> minimize_in_box(Objective&& f, std::array<double, D> x0,
                                 const std::array<double, D>& lower,
                                 const std::array<double, D>& upper,
                                 const SimplexOptions& opt = {}) {
  using Point = std::array<double, D>;
  constexpr std::size_t N = D + 1;

  auto project = [&](Point p) {
    for (std::size_t i = 0; i < D; ++i) p[i] = std::clamp(p[i], lower[i], upper[i]);
    return p;
  };

  SimplexResult<D> result;
  result.x = project(x0);
  result.f = f(result.x);
  result.evaluations = 1;

  for (int round = 0; round <= opt.max_restarts; ++round) {
    std::array<Point, N> v;
    std::array<double, N> fv;
    v[0] = result.x;
    fv[0] = result.f;
    for (std::size_t i = 0; i < D; ++i) {
      Point p = result.x;
      const double span = upper[i] - lower[i];
      const double step = opt.initial_step * span;
      p[i] = (p[i] + step <= upper[i]) ? p[i] + step : p[i] - step;
      v[i + 1] = project(p);
      fv[i + 1] = f(v[i + 1]);
      ++result.evaluations;
    }

    bool converged = false;
    while (result.evaluations < opt.max_evaluations) {
      std::array<std::size_t, N> idx;
      for (std::size_t i = 0; i < N; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return fv[a] < fv[b] || (fv[a] == fv[b] && a < b);
      });
      const std::size_t best = idx[0];
      const std::size_t worst = idx[N - 1];
      const std::size_t second = idx[N - 2];

      double size = 0.0;
      for (std::size_t i = 1; i < N; ++i) {
        for (std::size_t d = 0; d < D; ++d) {
          size = std::max(size, std::abs(v[idx[i]][d] - v[best][d]));
        }
      }
      const double spread = fv[worst] - fv[best];
      if (size <= opt.x_tol || spread <= opt.f_rel_tol * std::abs(fv[best])) {
        converged = true;
        break;
      }

      Point centroid{};
      for (std::size_t i = 0; i < N; ++i) {
        if (i == worst) continue;
        for (std::size_t d = 0; d < D; ++d) centroid[d] += v[i][d] / D;
      }
      auto along = [&](double t) {
        Point p;
        for (std::size_t d = 0; d < D; ++d) p[d] = centroid[d] + t * (v[worst][d] - centroid[d]);
        return project(p);
      };

      const Point xr = along(-1.0);
      const double fr = f(xr);
      ++result.evaluations;
      if (fr < fv[best]) {
        const Point xe = along(-2.0);
        const double fe = f(xe);
        ++result.evaluations;
        if (fe < fr) {
          v[worst] = xe;
          fv[worst] = fe;
        } else {
          v[worst] = xr;
          fv[worst] = fr;
        }
        continue;
      }
      if (fr < fv[second]) {
        v[worst] = xr;
        fv[worst] = fr;
        continue;
      }
      const bool outside = fr < fv[worst];
      const Point xc = along(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      ++result.evaluations;
      if (fc < (outside ? fr : fv[worst])) {
        v[worst] = xc;
        fv[worst] = fc;
        continue;
      }
      for (std::size_t i = 0; i < N; ++i) {
        if (i == best) continue;
        for (std::size_t d = 0; d < D; ++d) v[i][d] = v[best][d] + 0.5 * (v[i][d] - v[best][d]);
        fv[i] = f(v[i]);
        ++result.evaluations;
      }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < N; ++i) {
      if (fv[i] < fv[best]) best = i;
    }
    const bool improved = fv[best] < result.f;
    const double gain = result.f - fv[best];
    if (improved) {
      result.x = v[best];
      result.f = fv[best];
    }
    result.converged = converged;
    if (!converged || result.evaluations >= opt.max_evaluations) break;
    if (round > 0 && gain <= opt.f_rel_tol * std::abs(result.f)) break;
  }
  return result;
}

}  // namespace qng
