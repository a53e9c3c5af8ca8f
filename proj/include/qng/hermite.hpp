#pragma once

#include <vector>

namespace qng {

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
double hermite(int n, double x);

/// Real roots of H_n in ascending order: Golub-Welsch eigenvalues followed
/// by one Newton step each.
std::vector<double> hermite_roots(int n);

/// Root of H_{n+1} used in the weak-light threshold asymptote: the one
/// maximizing H_n(x)^4 (the positive member of the symmetric pair).
double asymptote_hermite_root(int order);

/// C_n in R_n^{n+2} > C_n R_{n+1}^n, i.e. H_n(x)^4 / (2 (n+1)^3)^n at the
/// root returned by asymptote_hermite_root.
double approx_threshold_coefficient(int order);
/// Same coefficient evaluated at an explicit root of H_{n+1}.
double approx_threshold_coefficient(int order, double root);

/// Success bound of the weak-light asymptote at a given error probability.
double asymptotic_success_bound(int order, double error);

}  // namespace qng
