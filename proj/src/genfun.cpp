#include "spinindex/genfun.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace spinindex {

namespace {

Rational factorial(int n) {
  Rational r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// sinh(t/2)/(t/2) = Σ_j t^{2j} / (4^j (2j+1)!)
std::vector<Rational> sinhc_half_coefficients(int k_max) {
  std::vector<Rational> s(k_max + 1);
  for (int j = 0; j <= k_max; ++j) {
    Rational four_j = 1;
    for (int i = 0; i < j; ++i) four_j *= 4;
    s[j] = Rational(1) / (four_j * factorial(2 * j + 1));
  }
  return s;
}

void check_k_max(int k_max) {
  if (k_max < 0 || k_max > 12) throw std::invalid_argument("k_max must lie in [0, 12]");
}

}  // namespace

std::vector<Rational> a_series_coefficients(int k_max) {
  check_k_max(k_max);
  const auto s = sinhc_half_coefficients(k_max);
  std::vector<Rational> f(k_max + 1);
  f[0] = 1;
  for (int k = 1; k <= k_max; ++k) {
    Rational acc = 0;
    for (int j = 1; j <= k; ++j) acc += s[j] * f[k - j];
    f[k] = -acc;
  }
  return f;
}

std::vector<Rational> log_a_series_coefficients(int k_max) {
  check_k_max(k_max);
  // log f = −log s with s(0) = 1; k L_k = k s_k − Σ_{j<k} j L_j s_{k−j}.
  const auto s = sinhc_half_coefficients(k_max);
  std::vector<Rational> log_s(k_max + 1);
  for (int k = 1; k <= k_max; ++k) {
    Rational acc = Rational(k) * s[k];
    for (int j = 1; j < k; ++j) acc -= Rational(j) * log_s[j] * s[k - j];
    log_s[k] = acc / k;
  }
  for (auto& c : log_s) c = -c;
  return log_s;
}

double a_closed_form(double y) {
  if (std::abs(y) < 1e-6) {
    const double u = y * y;
    return 1.0 - u / 24.0 + 7.0 * u * u / 5760.0;
  }
  return (y / 2.0) / std::sinh(y / 2.0);
}

double partition_sum(double y, int max_level) {
  if (!(y > 0.0)) throw std::domain_error("partition_sum requires y > 0");
  if (max_level < 0) throw std::domain_error("partition_sum requires M ≥ 0");
  const double q = std::exp(-y);
  double sum = 0.0;
  double term = 1.0;
  for (int m = 0; m <= max_level; ++m) {
    sum += term;
    term *= q;
    if (term == 0.0) break;
  }
  return y * std::exp(-y / 2.0) * sum;
}

double partition_tail_bound(double y, int max_level) {
  if (!(y > 0.0)) throw std::domain_error("partition_tail_bound requires y > 0");
  return y * std::exp(-y / 2.0) * std::exp(-(max_level + 1) * y) / (-std::expm1(-y));
}

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

// Single-mode operators in the basis of an oscillator with frequency ω, with
// exact matrix elements for q² and p² inside the truncation.
struct ModeOperators {
  MatrixXcd q, p, q2, p2;
};

ModeOperators mode_operators(int c, double omega) {
  MatrixXd a = MatrixXd::Zero(c, c);
  for (int n = 1; n < c; ++n) a(n - 1, n) = std::sqrt(double(n));
  MatrixXd a2 = MatrixXd::Zero(c, c);
  for (int n = 2; n < c; ++n) a2(n - 2, n) = std::sqrt(double(n) * (n - 1));
  MatrixXd number_term = MatrixXd::Zero(c, c);
  for (int n = 0; n < c; ++n) number_term(n, n) = 2.0 * n + 1.0;

  const std::complex<double> i(0.0, 1.0);
  ModeOperators ops;
  ops.q = ((a + a.transpose()) / std::sqrt(2.0 * omega)).cast<std::complex<double>>();
  ops.p = i * std::sqrt(omega / 2.0) * (a.transpose() - a).cast<std::complex<double>>();
  ops.q2 = ((a2 + a2.transpose() + number_term) / (2.0 * omega)).cast<std::complex<double>>();
  ops.p2 = (omega / 2.0 * (number_term - a2 - a2.transpose())).cast<std::complex<double>>();
  return ops;
}

// Hermite functions at the origin for the frequency-ω oscillator; odd orders
// vanish.
std::vector<double> hermite_at_origin(int c, double omega) {
  std::vector<double> v(c, 0.0);
  v[0] = std::pow(omega / std::numbers::pi, 0.25);
  for (int m = 2; m < c; m += 2) v[m] = -std::sqrt(double(m - 1) / m) * v[m - 2];
  return v;
}

}  // namespace

double qho_generating_function(double y, const QhoOptions& options) {
  if (!(y > 0.0)) throw std::domain_error("qho_generating_function requires y > 0");
  const int c = options.cutoff;
  if (c < 20) throw std::invalid_argument("qho_generating_function requires cutoff ≥ 20");
  const double omega = options.basis_frequency.value_or(y / 2.0);
  if (!(omega > 0.0)) throw std::invalid_argument("basis frequency must be positive");

  // The exponent is quadratic, so it preserves the total parity of n1 + n2;
  // the position eigenvector lives in the even sector.
  struct State {
    int n1, n2;
  };
  std::vector<State> states;
  for (int major = 0; major < c; ++major) {
    for (int minor = 0; major + minor < c; ++minor) {
      if ((major + minor) % 2 != 0) continue;
      states.push_back(options.swap_modes ? State{minor, major} : State{major, minor});
    }
  }
  const auto d = static_cast<Eigen::Index>(states.size());
  const ModeOperators ops = mode_operators(c, omega);
  const MatrixXcd id = MatrixXcd::Identity(c, c);

  // K = (p2 − y q1/2)² + (p1 + y q2/2)²
  //   = p1² + p2² + y²/4 (q1² + q2²) − y q1⊗p2 + y p1⊗q2.
  // Each term is (coefficient, operator on mode 1, operator on mode 2).
  struct Term {
    double coef;
    const MatrixXcd* mode1;
    const MatrixXcd* mode2;
  };
  const Term terms[] = {{1.0, &ops.p2, &id},         {1.0, &id, &ops.p2},
                        {y * y / 4.0, &ops.q2, &id}, {y * y / 4.0, &id, &ops.q2},
                        {-y, &ops.q, &ops.p},        {y, &ops.p, &ops.q}};

  MatrixXcd kernel = MatrixXcd::Zero(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    const State s = states[col];
    for (Eigen::Index row = 0; row < d; ++row) {
      const State r = states[row];
      std::complex<double> acc = 0.0;
      for (const Term& t : terms) {
        acc += t.coef * (*t.mode1)(r.n1, s.n1) * (*t.mode2)(r.n2, s.n2);
      }
      kernel(row, col) = acc;
    }
  }

  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(kernel);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  const auto psi = hermite_at_origin(c, omega);
  Eigen::VectorXcd origin(d);
  for (Eigen::Index k = 0; k < d; ++k) origin(k) = psi[states[k].n1] * psi[states[k].n2];

  const Eigen::VectorXcd overlaps = eig.eigenvectors().adjoint() * origin;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    sum += std::norm(overlaps(k)) * std::exp(-0.5 * eig.eigenvalues()(k));
  }
  return 2.0 * std::numbers::pi * sum;
}

double qho_generating_function(double y, int cutoff) {
  QhoOptions options;
  options.cutoff = cutoff;
  return qho_generating_function(y, options);
}

QhoConvergence qho_convergence(double y, const std::vector<int>& cutoffs, double tolerance) {
  QhoConvergence out;
  const double exact = a_closed_form(y);
  for (int c : cutoffs) {
    const double v = qho_generating_function(y, c);
    const double step = out.rows.empty() ? 0.0 : std::abs(v - out.rows.back().value);
    out.rows.push_back({c, v, exact, std::abs(v - exact), step});
  }
  out.unresolved = out.rows.size() >= 2 && out.rows.back().step > tolerance;
  return out;
}

namespace {

using Poly = std::map<std::vector<int>, Rational>;

void add_to(Poly& p, const std::vector<int>& e, const Rational& c) {
  auto& slot = p[e];
  slot += c;
  if (slot == 0) p.erase(e);
}

Poly multiply(const Poly& a, const Poly& b, int max_degree) {
  Poly out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      int deg = 0;
      for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = ea[i] + eb[i];
        deg += e[i];
      }
      if (deg <= max_degree) add_to(out, e, ca * cb);
    }
  }
  return out;
}

Poly elementary(int n, int j) {
  Poly e;
  for (unsigned subset = 0; subset < (1u << n); ++subset) {
    if (std::popcount(subset) != j) continue;
    std::vector<int> exps(n, 0);
    for (int i = 0; i < n; ++i) exps[i] = (subset >> i) & 1u;
    e[exps] = 1;
  }
  return e;
}

}  // namespace

Rational SplittingTable::coefficient(const std::vector<int>& exponents) const {
  auto it = coefficients.find(exponents);
  return it == coefficients.end() ? Rational(0) : it->second;
}

double SplittingTable::evaluate(const std::vector<double>& p) const {
  double total = 0.0;
  for (const auto& [e, c] : coefficients) {
    double term = static_cast<double>(c);
    for (std::size_t j = 0; j < e.size(); ++j) term *= std::pow(p.at(j), e[j]);
    total += term;
  }
  return total;
}

MultiVector SplittingTable::evaluate(const std::vector<MultiVector>& p) const {
  if (p.empty()) throw std::invalid_argument("need at least one Pontryagin form");
  const AlgebraContext ctx = p.front().context();
  MultiVector total(ctx, Flavor::exterior);
  for (const auto& [e, c] : coefficients) {
    MultiVector term = MultiVector::scalar(ctx, static_cast<double>(c));
    for (std::size_t j = 0; j < e.size(); ++j) {
      for (int k = 0; k < e[j]; ++k) term = wedge(term, p.at(j));
    }
    total += term;
  }
  return total;
}

SplittingTable splitting_oracle(int n, int cap) {
  if (n < 1 || n > 4) throw std::invalid_argument("splitting_oracle supports 1 ≤ n ≤ 4");
  if (cap < 0) throw std::invalid_argument("splitting_oracle cap must be non-negative");
  // Work in u_l = y_l², so the degree cap halves.
  const int max_u = cap / 2;
  const auto a = a_series_coefficients(std::min(max_u, 12));

  Poly product;
  product[std::vector<int>(n, 0)] = 1;
  for (int l = 0; l < n; ++l) {
    Poly factor;
    for (int k = 0; k < static_cast<int>(a.size()); ++k) {
      std::vector<int> e(n, 0);
      e[l] = k;
      factor[e] = a[k];
    }
    product = multiply(product, factor, max_u);
  }

  // Symmetric → elementary symmetric: peel off the lex-leading monomial
  // u^α, α1 ≥ … ≥ αn, by subtracting c·∏ e_j^{α_j − α_{j+1}}.
  std::vector<Poly> e_polys;
  for (int j = 1; j <= n; ++j) e_polys.push_back(elementary(n, j));

  SplittingTable table;
  table.n = n;
  table.cap = cap;
  while (!product.empty()) {
    const auto [alpha, c] = *product.rbegin();
    std::vector<int> p_exps(n);
    for (int j = 0; j < n; ++j) p_exps[j] = alpha[j] - (j + 1 < n ? alpha[j + 1] : 0);
    if (std::any_of(p_exps.begin(), p_exps.end(), [](int x) { return x < 0; })) {
      throw std::logic_error("splitting_oracle: product lost its symmetry");
    }
    Poly monomial;
    monomial[std::vector<int>(n, 0)] = c;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < p_exps[j]; ++k) monomial = multiply(monomial, e_polys[j], max_u);
    }
    for (const auto& [e, v] : monomial) add_to(product, e, -v);
    table.coefficients[p_exps] = c;
  }
  return table;
}

std::vector<MultiVector> pontryagin_from_roots(const std::vector<MultiVector>& roots) {
  if (roots.empty()) throw std::invalid_argument("need at least one Chern root");
  const AlgebraContext ctx = roots.front().context();
  std::vector<MultiVector> e(roots.size() + 1, MultiVector(ctx, Flavor::exterior));
  e[0] = MultiVector::scalar(ctx, 1.0);
  for (const auto& y : roots) {
    const MultiVector u = wedge(y, y);
    for (std::size_t j = roots.size(); j >= 1; --j) e[j] += wedge(e[j - 1], u);
  }
  return {e.begin() + 1, e.end()};
}

}  // namespace spinindex
