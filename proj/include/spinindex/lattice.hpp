#pragma once

// U(1) gauge fields on the N×N periodic lattice, the two-component
// Wilson-Dirac operator and its overlap index.
//
// Sites are (x, y) with x, y ∈ [0, N); link U_μ(x) joins x to x + μ̂. Spinor
// index 2·(x + N·y) + s. Gamma matrices γ1 = σ1, γ2 = σ2 and chirality
// Γ = iγ1γ2 = −σ3, for which positive flux produces positive-chirality zero modes.

#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinindex/spectral.hpp"

namespace spinindex {

class LatticeGaugeField {
 public:
  /// links: 2·N·N unit-modulus phases, index μ·N·N + x + N·y (μ ∈ {0, 1}).
  LatticeGaugeField(int N, int q, std::vector<std::complex<double>> links);

  int extent() const { return N_; }
  /// Flux quantum the field was built with.
  int nominal_flux() const { return q_; }
  std::complex<double> link(int mu, int x, int y) const;
  const std::vector<std::complex<double>>& links() const { return links_; }

 private:
  int N_;
  int q_;
  std::vector<std::complex<double>> links_;
};

/// Constant-flux field: every plaquette angle is 2πq/N². Requires N ≥ 4 and
/// 2|q| < N².
LatticeGaugeField build_torus_gauge(int N, int q);

/// U_μ(x) ↦ e^{iα(x)} U_μ(x) e^{−iα(x+μ̂)}, alpha indexed x + N·y.
LatticeGaugeField gauge_transform(const LatticeGaugeField& g, const std::vector<double>& alpha);

LatticeGaugeField random_gauge_transform(const LatticeGaugeField& g, std::mt19937_64& rng);

/// Principal-branch plaquette angles, index x + N·y.
std::vector<double> plaquette_angles(const LatticeGaugeField& g);

struct RoundedInteger {
  int value;
  double raw;
  double residual;
};

/// (1/2π)·Σ plaquette angles. Throws AmbiguityError if the rounding residual
/// is ≥ 0.01.
RoundedInteger topological_flux(const LatticeGaugeField& g);

struct WilsonDiracOperator {
  int extent;
  /// Massless Wilson-Dirac matrix D_W.
  Eigen::MatrixXcd matrix;
  /// Γ, diagonal ±1.
  Eigen::MatrixXcd chirality;
  /// Overlap mass m: the kernel is H_W = Γ(D_W − m).
  double mass;
  /// Set when m lies outside (0, 2), where doublers may be counted.
  std::optional<std::string> warning;
};

WilsonDiracOperator build_wilson_dirac(const LatticeGaugeField& g, double mass = 1.0);

/// max |ΓDΓ − D†|.
double gamma5_hermiticity_residual(const WilsonDiracOperator& d);

struct OverlapIndex {
  int value;
  double raw;
  double residual;
  /// Smallest |eigenvalue| of H_W.
  double kernel_gap;
};

/// −½ tr sign(H_W). Throws AmbiguityError when an eigenvalue of H_W is within
/// 1e−10 of zero or the rounding residual is ≥ 0.01.
OverlapIndex overlap_index(const WilsonDiracOperator& d);

/// D_ov = m(1 + Γ sign(H_W)).
Eigen::MatrixXcd overlap_operator(const WilsonDiracOperator& d);

struct HeatKernelOptions {
  double zero_tol = default_zero_tol;
  // Relative gap splitting clusters of D_ov†D_ov eigenvalues; paired levels
  // are degenerate to roundoff, distinct levels can sit within 1e−6.
  double cluster_gap = 1e-9;
  /// Modes with 1 − λ/4m² below this are dropped (see heat_kernel_system).
  double cutoff_margin = 1e-9;
};

/// Spectrum of the chirally rotated overlap operator D_c = D_ov(1 − D_ov/2m)⁻¹,
/// obtained from D_ov†D_ov by λ ↦ λ/(1 − λ/4m²), in the Δ = D_c†D_c
/// convention. The unpaired λ = 4m² modes of D_ov†D_ov are sent to infinity and
/// recorded as excluded. Chiralities come from diagonalising Γ inside each
/// eigenvalue cluster. Throws AmbiguityError if a zero mode has |⟨Γ⟩| < 0.99.
SpectralSystem heat_kernel_system(const WilsonDiracOperator& d,
                                  const HeatKernelOptions& options = {});

}  // namespace spinindex
