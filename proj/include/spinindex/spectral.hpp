#pragma once

// Finite spectral systems (λ, χ) and the analytic side of the index theorem:
// zero-mode asymmetry, heat supertrace and chirality pairing of nonzero levels.

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinindex {

/// Raised when a numerical decision (zero cluster, sign, rounding) cannot be
/// made reliably.
class AmbiguityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which operator the stored λ are eigenvalues of.
enum class EigenConvention { half_laplacian, laplacian };

enum class SpectrumSource { lattice, fixture, manual };

std::string to_string(EigenConvention c);
std::string to_string(SpectrumSource s);
EigenConvention eigen_convention_from_string(const std::string& s);
SpectrumSource spectrum_source_from_string(const std::string& s);

struct Mode {
  double lambda;
  int chirality;
};

class SpectralSystem {
 public:
  /// Rejects λ < −1e−8 and χ ∉ {±1}; clamps remaining negatives to zero.
  SpectralSystem(std::vector<Mode> modes, EigenConvention convention, SpectrumSource source,
                 std::size_t excluded_modes = 0);

  const std::vector<Mode>& modes() const { return modes_; }
  EigenConvention convention() const { return convention_; }
  SpectrumSource source() const { return source_; }
  /// Modes of the underlying operator deliberately left out of the system.
  std::size_t excluded_modes() const { return excluded_; }

  /// Eigenvalue of H = ½Δ for mode k.
  double energy(std::size_t k) const;

 private:
  std::vector<Mode> modes_;
  EigenConvention convention_;
  SpectrumSource source_;
  std::size_t excluded_;
};

inline constexpr double default_zero_tol = 1e-10;
inline constexpr double negative_lambda_limit = 1e-8;

/// Σ_k χ_k e^{−τ E_k}, E_k the H = ½Δ eigenvalue. Throws std::domain_error for τ ≤ 0.
double witten_index(const SpectralSystem& sys, double tau);

/// #{λ ≤ tol, χ = +1} − #{λ ≤ tol, χ = −1}. Throws AmbiguityError if some λ
/// lies in (tol, 10³·tol).
int zero_mode_asymmetry(const SpectralSystem& sys, double tol = default_zero_tol);

struct PairViolation {
  double lambda;
  int plus;
  int minus;
};

struct PairCheckReport {
  std::size_t clusters = 0;
  std::vector<PairViolation> violations;
};

/// Groups λ > tol into clusters split at relative gaps above 1e−6 and lists
/// clusters with unequal chirality counts.
PairCheckReport pair_check(const SpectralSystem& sys, double tol = default_zero_tol);

/// Index-q monopole on S²: |q| zero modes of chirality sign(q) and paired
/// levels λ_k = k(k+|q|) of Δ, multiplicity 2k+|q| per chirality, k = 1..k_max.
SpectralSystem sphere_monopole_fixture(int q, int k_max);

/// Upper bound on Σ_{k>k_max} of the |contributions| dropped by the fixture.
double sphere_tail_bound(int q, int k_max, double tau);

/// CSV rows with header `lambda,chirality,source`.
void write_spectrum_csv(std::ostream& out, const SpectralSystem& sys);

}  // namespace spinindex
