#include "spinindex/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace spinindex {

namespace {

using cd = std::complex<double>;

int wrap(int v, int N) { return ((v % N) + N) % N; }

void require_extent(int N) {
  if (N < 4) throw std::invalid_argument("lattice extent must be at least 4");
}

}  // namespace

LatticeGaugeField::LatticeGaugeField(int N, int q, std::vector<cd> links)
    : N_(N), q_(q), links_(std::move(links)) {
  require_extent(N);
  if (links_.size() != std::size_t(2 * N * N)) {
    throw std::invalid_argument("gauge field needs 2·N·N links");
  }
  for (const auto& u : links_) {
    if (std::abs(std::abs(u) - 1.0) > 1e-12) throw std::invalid_argument("link is not a phase");
  }
}

cd LatticeGaugeField::link(int mu, int x, int y) const {
  return links_[std::size_t(mu * N_ * N_ + wrap(x, N_) + N_ * wrap(y, N_))];
}

LatticeGaugeField build_torus_gauge(int N, int q) {
  require_extent(N);
  if (2 * std::abs(q) >= N * N) {
    throw std::invalid_argument("flux quantum too large for the lattice: need 2|q| < N²");
  }
  const double phi = 2.0 * std::numbers::pi * q / double(N * N);
  std::vector<cd> links(std::size_t(2 * N * N), cd(1.0));
  for (int y = 0; y < N; ++y) {
    for (int x = 0; x < N; ++x) {
      links[x + N * y] = std::polar(1.0, -phi * y);
    }
  }
  // The last row of y-links closes the flux across the periodic boundary.
  for (int x = 0; x < N; ++x) links[N * N + x + N * (N - 1)] = std::polar(1.0, phi * N * x);
  return LatticeGaugeField(N, q, std::move(links));
}

LatticeGaugeField gauge_transform(const LatticeGaugeField& g, const std::vector<double>& alpha) {
  const int N = g.extent();
  if (alpha.size() != std::size_t(N * N)) throw std::invalid_argument("need one angle per site");
  std::vector<cd> links(g.links().size());
  for (int y = 0; y < N; ++y) {
    for (int x = 0; x < N; ++x) {
      const double a = alpha[x + N * y];
      links[x + N * y] = std::polar(1.0, a - alpha[wrap(x + 1, N) + N * y]) * g.link(0, x, y);
      links[N * N + x + N * y] =
          std::polar(1.0, a - alpha[x + N * wrap(y + 1, N)]) * g.link(1, x, y);
    }
  }
  return LatticeGaugeField(N, g.nominal_flux(), std::move(links));
}

LatticeGaugeField random_gauge_transform(const LatticeGaugeField& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::vector<double> alpha(std::size_t(g.extent() * g.extent()));
  for (auto& a : alpha) a = angle(rng);
  return gauge_transform(g, alpha);
}

std::vector<double> plaquette_angles(const LatticeGaugeField& g) {
  const int N = g.extent();
  std::vector<double> angles(std::size_t(N * N));
  for (int y = 0; y < N; ++y) {
    for (int x = 0; x < N; ++x) {
      const cd p = g.link(0, x, y) * g.link(1, x + 1, y) * std::conj(g.link(0, x, y + 1)) *
                   std::conj(g.link(1, x, y));
      angles[x + N * y] = std::arg(p);
    }
  }
  return angles;
}

RoundedInteger topological_flux(const LatticeGaugeField& g) {
  double total = 0.0;
  for (double a : plaquette_angles(g)) total += a;
  const double raw = total / (2.0 * std::numbers::pi);
  const double value = std::round(raw);
  const double residual = std::abs(raw - value);
  if (residual >= 0.01) {
    throw AmbiguityError("plaquette flux " + std::to_string(raw) + " is not near an integer");
  }
  return {int(value), raw, residual};
}

WilsonDiracOperator build_wilson_dirac(const LatticeGaugeField& g, double mass) {
  const int N = g.extent();
  const int dim = 2 * N * N;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd gamma[2];
  gamma[0] << 0, 1, 1, 0;
  gamma[1] << 0, cd(0, -1), cd(0, 1), 0;

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
  auto site = [N](int x, int y) { return 2 * (wrap(x, N) + N * wrap(y, N)); };
  for (int y = 0; y < N; ++y) {
    for (int x = 0; x < N; ++x) {
      const int s = site(x, y);
      d.block<2, 2>(s, s) += 2.0 * id;
      for (int mu = 0; mu < 2; ++mu) {
        const int dx = mu == 0 ? 1 : 0, dy = mu == 1 ? 1 : 0;
        const cd forward = g.link(mu, x, y);
        const cd backward = std::conj(g.link(mu, x - dx, y - dy));
        d.block<2, 2>(s, site(x + dx, y + dy)) -= 0.5 * (id - gamma[mu]) * forward;
        d.block<2, 2>(s, site(x - dx, y - dy)) -= 0.5 * (id + gamma[mu]) * backward;
      }
    }
  }

  Eigen::VectorXcd gamma5(dim);
  for (int k = 0; k < dim; ++k) gamma5[k] = k % 2 == 0 ? -1.0 : 1.0;

  WilsonDiracOperator op{N, std::move(d), gamma5.asDiagonal().toDenseMatrix(), mass, std::nullopt};
  if (!(mass > 0.0 && mass < 2.0)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "Wilson mass %g outside (0, 2); the index may count doublers",
                  mass);
    op.warning = buf;
  }
  return op;
}

double gamma5_hermiticity_residual(const WilsonDiracOperator& d) {
  return (d.chirality * d.matrix * d.chirality - d.matrix.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> kernel_eigen(const WilsonDiracOperator& d,
                                                             bool vectors) {
  const Eigen::MatrixXcd shifted =
      d.matrix - d.mass * Eigen::MatrixXcd::Identity(d.matrix.rows(), d.matrix.cols());
  Eigen::MatrixXcd h = d.chirality * shifted;
  h = 0.5 * (h + h.adjoint()).eval();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(
      h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

double checked_gap(const Eigen::VectorXd& eig) {
  const double gap = eig.cwiseAbs().minCoeff();
  if (gap < 1e-10) {
    throw AmbiguityError("H_W has an eigenvalue within 1e-10 of zero; change the Wilson mass");
  }
  return gap;
}

}  // namespace

OverlapIndex overlap_index(const WilsonDiracOperator& d) {
  const auto es = kernel_eigen(d, false);
  const Eigen::VectorXd& eig = es.eigenvalues();
  const double gap = checked_gap(eig);
  double trace_sign = 0.0;
  for (Eigen::Index k = 0; k < eig.size(); ++k) trace_sign += eig[k] > 0 ? 1.0 : -1.0;
  const double raw = -0.5 * trace_sign;
  const double value = std::round(raw);
  const double residual = std::abs(raw - value);
  if (residual >= 0.01) throw AmbiguityError("overlap index is not near an integer");
  return {int(value), raw, residual, gap};
}

Eigen::MatrixXcd overlap_operator(const WilsonDiracOperator& d) {
  const auto es = kernel_eigen(d, true);
  checked_gap(es.eigenvalues());
  const Eigen::VectorXd signs =
      es.eigenvalues().unaryExpr([](double v) { return v > 0 ? 1.0 : -1.0; });
  const Eigen::MatrixXcd sign =
      es.eigenvectors() * signs.asDiagonal() * es.eigenvectors().adjoint();
  const auto n = d.matrix.rows();
  return d.mass * (Eigen::MatrixXcd::Identity(n, n) + d.chirality * sign);
}

SpectralSystem heat_kernel_system(const WilsonDiracOperator& d, const HeatKernelOptions& options) {
  const Eigen::MatrixXcd dov = overlap_operator(d);
  Eigen::MatrixXcd a = dov.adjoint() * dov;
  a = 0.5 * (a + a.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::VectorXd gamma = d.chirality.diagonal().real();
  const double cutoff = 4.0 * d.mass * d.mass;

  std::vector<Mode> modes;
  std::size_t excluded = 0;
  const Eigen::Index n = lam.size();
  Eigen::Index begin = 0;
  while (begin < n) {
    Eigen::Index end = begin + 1;
    if (lam[begin] <= options.zero_tol) {
      while (end < n && lam[end] <= options.zero_tol) ++end;
    } else {
      while (end < n && lam[end] - lam[end - 1] <= options.cluster_gap * lam[end]) ++end;
    }
    const bool zero_cluster = lam[begin] <= options.zero_tol;

    const Eigen::MatrixXcd v = es.eigenvectors().middleCols(begin, end - begin);
    Eigen::MatrixXcd g = v.adjoint() * gamma.asDiagonal() * v;
    g = 0.5 * (g + g.adjoint()).eval();
    Eigen::VectorXd chi = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(g).eigenvalues();

    const bool sharp = (chi.cwiseAbs().array() >= 0.99).all();
    if (!sharp && zero_cluster) {
      throw AmbiguityError("zero mode with chirality expectation below 0.99");
    }
    std::vector<int> signs(std::size_t(chi.size()));
    if (sharp) {
      for (Eigen::Index k = 0; k < chi.size(); ++k) signs[k] = chi[k] > 0 ? 1 : -1;
    } else {
      // Balanced assignment ordered by ⟨Γ⟩ (chi is ascending).
      const Eigen::Index m = chi.size();
      for (Eigen::Index k = 0; k < m; ++k) {
        if (2 * k + 1 == m) signs[k] = chi[k] >= 0 ? 1 : -1;
        else signs[k] = 2 * k < m ? -1 : 1;
      }
    }

    for (Eigen::Index k = begin; k < end; ++k) {
      const double l = std::max(lam[k], 0.0);
      const double denom = 1.0 - l / cutoff;
      if (denom < options.cutoff_margin) {
        ++excluded;
        continue;
      }
      modes.push_back({l / denom, signs[std::size_t(k - begin)]});
    }
    begin = end;
  }
  return SpectralSystem(std::move(modes), EigenConvention::laplacian, SpectrumSource::lattice,
                        excluded);
}

}  // namespace spinindex
