#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qng/compensated_sum.hpp"
#include "qng/parallel.hpp"
#include "qng/quadrature.hpp"
#include "qng/simplex.hpp"

using namespace qng;
using doctest::Approx;

TEST_CASE("compensated sum recovers cancelled terms") {
  CompensatedSum s;
  s += 1.0;
  s += 1e-17;
  s += -1.0;
  CHECK(s.value() == 1e-17);
}

TEST_CASE("quadrature of polynomials and exponentials") {
  const auto poly = integrate_vector(
      [](double x, std::vector<double>& out) {
        out[0] = 1.0;
        out[1] = x * x * x * x * x;
        out[2] = std::exp(-x);
      },
      3, 0.0, 2.0);
  CHECK(poly[0] == Approx(2.0).epsilon(1e-15));
  CHECK(poly[1] == Approx(64.0 / 6.0).epsilon(1e-14));
  CHECK(poly[2] == Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
  const auto peaked = integrate_vector(
      [](double x, std::vector<double>& out) { out[0] = 1.0 / (1e-4 + x * x); }, 1, -1.0, 1.0);
  CHECK(peaked[0] == Approx(2.0 * std::atan(100.0) / 1e-2).epsilon(1e-11));
  const auto empty = integrate_vector([](double, std::vector<double>& out) { out[0] = 1.0; }, 1, 3.0, 3.0);
  CHECK(empty[0] == 0.0);
}

TEST_CASE("bounded simplex finds interior and boundary minima") {
  const auto interior = minimize_in_box<2>(
      [](const std::array<double, 2>& x) {
        return (x[0] - 0.3) * (x[0] - 0.3) + 10 * (x[1] - 0.7) * (x[1] - 0.7);
      },
      {0.9, 0.1}, {0.0, 0.0}, {1.0, 1.0});
  CHECK(interior.x[0] == Approx(0.3).epsilon(1e-6));
  CHECK(interior.x[1] == Approx(0.7).epsilon(1e-6));
  const auto edge = minimize_in_box<2>(
      [](const std::array<double, 2>& x) { return (x[0] + 1) * (x[0] + 1) + (x[1] - 0.5) * (x[1] - 0.5); },
      {0.5, 0.5}, {0.0, 0.0}, {1.0, 1.0});
  CHECK(edge.x[0] == 0.0);
  CHECK(edge.x[1] == Approx(0.5).epsilon(1e-6));
  const auto rosenbrock = minimize_in_box<2>(
      [](const std::array<double, 2>& x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
      },
      {-1.0, 1.0}, {-2.0, -2.0}, {2.0, 2.0});
  CHECK(rosenbrock.f < 1e-10);
}

TEST_CASE("parallel loop covers every index and rethrows") {
  std::vector<int> hits(1000, 0);
  for_each_index(Execution::parallel, hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(for_each_index(Execution::parallel, 10,
                                 [](std::size_t i) {
                                   if (i == 7) throw std::runtime_error("boom");
                                 }),
                  std::runtime_error);
  CHECK(worker_count() >= 1);
}
