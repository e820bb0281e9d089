#pragma once

// The Â generating function A(y) = (y/2)/sinh(y/2), evaluated three
// independent ways: closed form, the harmonic-oscillator partition sum, and
// the two-mode oscillator matrix element
//   A(y) = 2π⟨0_q1 0_q2| exp(−½[(p2 − y q1/2)² + (p1 + y q2/2)²]) |0_q1 0_q2⟩.
// Also the exact rational series used as test oracles.

#include <map>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spinindex/algebra.hpp"

namespace spinindex {

using Rational = boost::multiprecision::cpp_rational;

/// Coefficients of t^{2k}, k = 0..k_max, of (t/2)/sinh(t/2), by exact series
/// division. k_max ≤ 12.
std::vector<Rational> a_series_coefficients(int k_max);

/// Coefficients of t^{2k} of log((t/2)/sinh(t/2)); entry 0 is zero.
std::vector<Rational> log_a_series_coefficients(int k_max);

double a_closed_form(double y);

/// y e^{−y/2} Σ_{m=0}^{M} e^{−my}. Throws std::domain_error for y ≤ 0 or M < 0.
double partition_sum(double y, int max_level);

/// Geometric tail y e^{−y/2} e^{−(M+1)y} / (1 − e^{−y}).
double partition_tail_bound(double y, int max_level);

struct QhoOptions {
  /// Single-mode oscillator matrices are cutoff × cutoff; the two-mode space is
  /// truncated to n1 + n2 < cutoff.
  int cutoff = 60;
  /// Oscillator frequency of the basis; defaults to y/2.
  std::optional<double> basis_frequency;
  /// Enumerate the two-mode basis with the mode roles exchanged (mode 2 as the
  /// major index). The operator is unchanged; only its matrix is permuted.
  bool swap_modes = false;
};

/// Dense numerical evaluation of the two-mode matrix element. Requires y > 0
/// and cutoff ≥ 20.
double qho_generating_function(double y, const QhoOptions& options);
double qho_generating_function(double y, int cutoff);

struct QhoConvergenceRow {
  int cutoff;
  double value;
  double closed_form;
  double abs_diff;
  /// |value − previous row value|; zero for the first row.
  double step;
};

struct QhoConvergence {
  std::vector<QhoConvergenceRow> rows;
  /// True when the last successive-cutoff step exceeds the tolerance.
  bool unresolved = false;
};

QhoConvergence qho_convergence(double y, const std::vector<int>& cutoffs, double tolerance);

/// ∏_{l=1}^{n} (y_l/2)/sinh(y_l/2) expanded in the elementary symmetric
/// polynomials p_j of {y_l²}.
struct SplittingTable {
  int n = 0;
  /// Maximum total polynomial degree in the y variables.
  int cap = 0;
  /// Exponent vector (e_1..e_n) of p_1^{e_1}⋯p_n^{e_n} ↦ coefficient.
  std::map<std::vector<int>, Rational> coefficients;

  Rational coefficient(const std::vector<int>& exponents) const;
  double evaluate(const std::vector<double>& p) const;
  /// Evaluates with form-valued p_j (wedge products, commuting even forms).
  MultiVector evaluate(const std::vector<MultiVector>& p) const;
};

/// Requires 1 ≤ n ≤ 4 and cap ≥ 0.
SplittingTable splitting_oracle(int n, int cap);

/// Elementary symmetric polynomials p_j = e_j(y_1², …, y_n²) of 2-form Chern
/// roots, j = 1..n.
std::vector<MultiVector> pontryagin_from_roots(const std::vector<MultiVector>& roots);

}  // namespace spinindex
