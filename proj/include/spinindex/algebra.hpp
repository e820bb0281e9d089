#pragma once

// Exterior algebra Λ(R^{2n}) and Clifford algebra Cl(2n) over complex
// coefficients, sharing one sparse bitmask storage.
//
// Clifford sign convention: {ẽ^μ, ẽ^ν} = −2δ^{μν}, so every generator squares
// to −1. This corresponds to ẽ = iγ for physics gamma matrices with
// {γ^μ, γ^ν} = +2δ^{μν}. The two conventions are never mixed in this library.

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace spinindex {

using Complex = std::complex<double>;
using Mask = std::uint32_t;

/// Bit μ−1 of a mask is set iff generator e^μ is present in the blade.
inline constexpr int max_dim = 16;

class AlgebraContext {
 public:
  /// Throws std::invalid_argument unless dim is even and in [2, 16].
  explicit AlgebraContext(int dim);

  static AlgebraContext from_half_dim(int n) { return AlgebraContext(2 * n); }

  int dim() const { return dim_; }
  int half_dim() const { return dim_ / 2; }
  Mask top_mask() const { return (Mask{1} << dim_) - 1; }

  bool operator==(const AlgebraContext&) const = default;

 private:
  int dim_;
};

/// Grade index r of the projector onto r-forms.
class Grade {
 public:
  Grade(int r, const AlgebraContext& ctx);
  int value() const { return r_; }

 private:
  int r_;
};

enum class Flavor { exterior, clifford };

std::string to_string(Flavor f);

class ContextMismatch : public std::invalid_argument {
 public:
  ContextMismatch() : std::invalid_argument("multivector contexts differ") {}
};

class MultiVector {
 public:
  using Terms = std::map<Mask, Complex>;

  MultiVector(AlgebraContext ctx, Flavor flavor) : ctx_(ctx), flavor_(flavor) {}

  static MultiVector scalar(AlgebraContext ctx, Complex c, Flavor flavor = Flavor::exterior);
  /// Generator e^μ (exterior) or ẽ^μ (clifford), μ is 1-based.
  static MultiVector generator(AlgebraContext ctx, int mu, Flavor flavor = Flavor::exterior);
  static MultiVector blade(AlgebraContext ctx, Mask mask, Complex c,
                           Flavor flavor = Flavor::exterior);

  const AlgebraContext& context() const { return ctx_; }
  Flavor flavor() const { return flavor_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Complex coefficient(Mask mask) const;
  Complex scalar_part() const { return coefficient(0); }
  double max_abs() const;
  /// Largest grade with a stored term, or −1 for zero.
  int max_grade() const;
  bool has_odd_terms() const;

  /// Adds c to the coefficient of `mask` without pruning.
  void accumulate(Mask mask, Complex c);
  /// Drops coefficients below 1e−14 × max |coefficient|.
  void prune();

  MultiVector with_flavor(Flavor f) const;

  MultiVector& operator+=(const MultiVector& other);
  MultiVector& operator-=(const MultiVector& other);
  MultiVector& operator*=(Complex c);

  friend MultiVector operator+(MultiVector a, const MultiVector& b) { return a += b; }
  friend MultiVector operator-(MultiVector a, const MultiVector& b) { return a -= b; }
  friend MultiVector operator*(MultiVector a, Complex c) { return a *= c; }
  friend MultiVector operator*(Complex c, MultiVector a) { return a *= c; }
  friend MultiVector operator-(MultiVector a) { return a *= Complex(-1.0); }

 private:
  AlgebraContext ctx_;
  Flavor flavor_;
  Terms terms_;
};

inline constexpr double prune_threshold = 1e-14;

/// Max over masks of |a − b| coefficient difference (ignores flavor).
double max_coefficient_distance(const MultiVector& a, const MultiVector& b);

/// Sign (+1/−1) of reordering blade(a)·blade(b) into ascending order.
int reorder_sign(Mask a, Mask b);

MultiVector wedge(const MultiVector& a, const MultiVector& b);
MultiVector clifford_mul(const MultiVector& a, const MultiVector& b);

MultiVector grade_project(const MultiVector& a, Grade r);

/// Orthonormal flat-frame Hodge star on exterior elements:
/// blade ∧ ★blade = +top form.
MultiVector hodge_star(const MultiVector& a);

/// φ_ε: grade-r exterior blade ↦ ε^r × Clifford blade. Throws on ε = 0 or
/// non-exterior input. φ is phi_eps with ε = 1.
MultiVector phi_eps(const MultiVector& a, Complex eps);
MultiVector phi_eps_inv(const MultiVector& a, Complex eps);

/// tr_Cl: 2^n × scalar coefficient.
Complex clifford_trace(const MultiVector& a);

/// Complex volume element (−1)^F = i^n ẽ^1⋯ẽ^{2n}.
MultiVector chirality(const AlgebraContext& ctx);

/// clifford_trace(chirality · a).
Complex supertrace(const MultiVector& a);

}  // namespace spinindex
