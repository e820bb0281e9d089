#pragma once

// Chern-Weil characteristic forms built from frame-constant curvature
// matrices whose entries are 2-forms.
//
// Normalisation: for an antisymmetric Riemann 2-form matrix R the Chern roots
// are y_l with ±i·y_l the eigen-2-forms of X = iR/2π. A 2×2 block
// [[0, θ], [−θ, 0]] therefore contributes y = θ/2π (the sign is irrelevant,
// every series here is even), p₁ = Σ y_l² = −tr(R∧R)/8π², and
// Â = ∏ (y_l/2)/sinh(y_l/2) = 1 − p₁/24 + (7p₁² − 4p₂)/5760 + ⋯.
// The Chern character uses tr exp(iΩ/2π); a U(1) field strength written as
// Ω = −i·B·e1∧e2 gives the real first Chern form B/2π·e1∧e2.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinindex/algebra.hpp"

namespace spinindex {

class FormMatrixError : public std::invalid_argument {
 public:
  FormMatrixError(const std::string& what, std::size_t row, std::size_t col)
      : std::invalid_argument(what + " at (" + std::to_string(row) + ", " +
                              std::to_string(col) + ")"),
        row_(row),
        col_(col) {}
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// Square matrix of exterior 2-forms: the Riemann curvature R or the twisting
/// bundle curvature Ω.
class FormMatrix {
 public:
  enum class Kind { riemann, twist };

  /// Validates size = dim, pure grade 2, real coefficients and
  /// R(i,j) = −R(j,i) within 1e−12.
  static FormMatrix riemann(const AlgebraContext& ctx, std::vector<MultiVector> row_major);

  /// Validates pure grade 2 and that, for every basis 2-form, the k×k matrix of
  /// its coefficients is Hermitian, or anti-Hermitian, uniformly over the
  /// whole matrix.
  static FormMatrix twist(const AlgebraContext& ctx, std::size_t k,
                          std::vector<MultiVector> row_major);

  /// Rank-k zero curvature (trivial bundle).
  static FormMatrix flat_twist(const AlgebraContext& ctx, std::size_t k);

  /// Block-diagonal direct sum of two twist matrices.
  static FormMatrix direct_sum(const FormMatrix& a, const FormMatrix& b);

  Kind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  const AlgebraContext& context() const { return ctx_; }
  const MultiVector& at(std::size_t i, std::size_t j) const { return entries_[i * size_ + j]; }

 private:
  FormMatrix(Kind kind, AlgebraContext ctx, std::size_t size, std::vector<MultiVector> e)
      : kind_(kind), ctx_(ctx), size_(size), entries_(std::move(e)) {}

  Kind kind_;
  AlgebraContext ctx_;
  std::size_t size_;
  std::vector<MultiVector> entries_;
};

class SeriesDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Even-degree commutative form polynomial truncated at a grade cap.
class FormSeries {
 public:
  /// Throws std::invalid_argument when `value` has odd-grade terms or is not
  /// exterior; drops every term above the cap.
  FormSeries(MultiVector value, Grade cap);

  static FormSeries one(const AlgebraContext& ctx, Grade cap);

  const MultiVector& value() const { return value_; }
  int cap() const { return cap_; }
  const AlgebraContext& context() const { return value_.context(); }
  Complex constant() const { return value_.scalar_part(); }
  Complex top_coefficient() const { return value_.coefficient(context().top_mask()); }

 private:
  MultiVector value_;
  int cap_;
};

FormSeries series_add(const FormSeries& a, const FormSeries& b);
FormSeries series_mul(const FormSeries& a, const FormSeries& b);
FormSeries series_exp(const FormSeries& a);
/// Requires a positive real grade-0 part.
FormSeries series_log(const FormSeries& a);
/// a^{−1/2}; requires a positive real grade-0 part.
FormSeries series_sqrt_inverse(const FormSeries& a);

/// Matrix product with wedge-multiplied entries, truncated at `cap`.
std::vector<MultiVector> form_matrix_product(const std::vector<MultiVector>& a,
                                             const std::vector<MultiVector>& b, std::size_t k,
                                             int cap);

/// ch(E) = Σ_k tr[((i/2π)Ω)^k]/k!.
FormSeries chern_character(const FormMatrix& omega, Grade cap);

/// Â(TM) = exp(½ Σ_k c_k tr X^{2k}) with X = iR/2π and log((t/2)/sinh(t/2)) =
/// Σ_k c_k t^{2k}.
FormSeries a_hat(const FormMatrix& riemann, Grade cap);

/// 𝒫^{2n}[Â(R) ∧ ch(Ω)]. A missing R means flat; a missing Ω means the
/// trivial line bundle.
MultiVector index_density(const AlgebraContext& ctx, const std::optional<FormMatrix>& riemann,
                          const std::optional<FormMatrix>& twist);

}  // namespace spinindex
