#include "spinindex/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace spinindex {

std::string to_string(EigenConvention c) {
  return c == EigenConvention::half_laplacian ? "half_laplacian" : "laplacian";
}

std::string to_string(SpectrumSource s) {
  switch (s) {
    case SpectrumSource::lattice: return "lattice";
    case SpectrumSource::fixture: return "fixture";
    default: return "manual";
  }
}

EigenConvention eigen_convention_from_string(const std::string& s) {
  if (s == "half_laplacian") return EigenConvention::half_laplacian;
  if (s == "laplacian") return EigenConvention::laplacian;
  throw std::invalid_argument("unknown eigenvalue convention '" + s + "'");
}

SpectrumSource spectrum_source_from_string(const std::string& s) {
  if (s == "lattice") return SpectrumSource::lattice;
  if (s == "fixture") return SpectrumSource::fixture;
  if (s == "manual") return SpectrumSource::manual;
  throw std::invalid_argument("unknown spectrum source '" + s + "'");
}

SpectralSystem::SpectralSystem(std::vector<Mode> modes, EigenConvention convention,
                               SpectrumSource source, std::size_t excluded_modes)
    : modes_(std::move(modes)), convention_(convention), source_(source),
      excluded_(excluded_modes) {
  for (auto& m : modes_) {
    if (!std::isfinite(m.lambda) || m.lambda < -negative_lambda_limit) {
      throw std::invalid_argument("eigenvalue " + std::to_string(m.lambda) +
                                  " violates positivity");
    }
    if (m.chirality != 1 && m.chirality != -1) {
      throw std::invalid_argument("chirality must be +1 or -1");
    }
    m.lambda = std::max(m.lambda, 0.0);
  }
}

double SpectralSystem::energy(std::size_t k) const {
  const double l = modes_.at(k).lambda;
  return convention_ == EigenConvention::half_laplacian ? l : 0.5 * l;
}

double witten_index(const SpectralSystem& sys, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("witten_index requires τ > 0");
  double sum = 0.0;
  for (std::size_t k = 0; k < sys.modes().size(); ++k) {
    sum += sys.modes()[k].chirality * std::exp(-tau * sys.energy(k));
  }
  return sum;
}

int zero_mode_asymmetry(const SpectralSystem& sys, double tol) {
  int asym = 0;
  for (const auto& m : sys.modes()) {
    if (m.lambda <= tol) {
      asym += m.chirality;
    } else if (m.lambda < 1e3 * tol) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "eigenvalue %.3e lies inside the gap window (%.1e, %.1e)", m.lambda, tol,
                    1e3 * tol);
      throw AmbiguityError(buf);
    }
  }
  return asym;
}

PairCheckReport pair_check(const SpectralSystem& sys, double tol) {
  std::vector<Mode> nonzero;
  for (const auto& m : sys.modes()) {
    if (m.lambda > tol) nonzero.push_back(m);
  }
  std::sort(nonzero.begin(), nonzero.end(),
            [](const Mode& a, const Mode& b) { return a.lambda < b.lambda; });

  PairCheckReport report;
  std::size_t begin = 0;
  while (begin < nonzero.size()) {
    std::size_t end = begin + 1;
    while (end < nonzero.size() &&
           nonzero[end].lambda - nonzero[end - 1].lambda <= 1e-6 * nonzero[end].lambda) {
      ++end;
    }
    int plus = 0, minus = 0;
    for (std::size_t k = begin; k < end; ++k) (nonzero[k].chirality > 0 ? plus : minus)++;
    ++report.clusters;
    if (plus != minus) report.violations.push_back({nonzero[begin].lambda, plus, minus});
    begin = end;
  }
  return report;
}

SpectralSystem sphere_monopole_fixture(int q, int k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  const int a = std::abs(q);
  std::vector<Mode> modes(a, Mode{0.0, q > 0 ? 1 : -1});
  for (int k = 1; k <= k_max; ++k) {
    const double lambda = double(k) * double(k + a);
    for (int d = 0; d < 2 * k + a; ++d) {
      modes.push_back({lambda, 1});
      modes.push_back({lambda, -1});
    }
  }
  return SpectralSystem(std::move(modes), EigenConvention::laplacian, SpectrumSource::fixture);
}

double sphere_tail_bound(int q, int k_max, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("tail bound requires τ > 0");
  const int a = std::abs(q);
  double sum = 0.0;
  for (int k = k_max + 1;; ++k) {
    const double term = 2.0 * (2 * k + a) * std::exp(-0.5 * tau * double(k) * double(k + a));
    sum += term;
    if (term <= 1e-18 * sum || term == 0.0) break;
  }
  return sum;
}

void write_spectrum_csv(std::ostream& out, const SpectralSystem& sys) {
  out << "lambda,chirality,source\n";
  const std::string source = to_string(sys.source());
  char buf[64];
  for (const auto& m : sys.modes()) {
    std::snprintf(buf, sizeof buf, "%.17g", m.lambda);
    out << buf << ',' << m.chirality << ',' << source << '\n';
  }
}

}  // namespace spinindex
