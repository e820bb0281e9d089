#include "spinindex/char_classes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "spinindex/genfun.hpp"

namespace spinindex {

namespace {

constexpr double structure_tol = 1e-12;

bool is_pure_two_form(const MultiVector& m) {
  return std::all_of(m.terms().begin(), m.terms().end(),
                     [](const auto& t) { return std::popcount(t.first) == 2; });
}

void check_entries(const AlgebraContext& ctx, const std::vector<MultiVector>& e, std::size_t k) {
  if (k == 0) throw std::invalid_argument("curvature matrix must be non-empty");
  if (e.size() != k * k) {
    throw std::invalid_argument("curvature matrix needs " + std::to_string(k * k) +
                                " entries, got " + std::to_string(e.size()));
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const MultiVector& m = e[i * k + j];
      if (!(m.context() == ctx)) throw FormMatrixError("entry has a different algebra", i, j);
      if (m.flavor() != Flavor::exterior) throw FormMatrixError("entry is not exterior", i, j);
      if (!is_pure_two_form(m)) throw FormMatrixError("entry is not a pure 2-form", i, j);
    }
  }
}

MultiVector conjugate(const MultiVector& m) {
  MultiVector out(m.context(), m.flavor());
  for (const auto& [mask, c] : m.terms()) out.accumulate(mask, std::conj(c));
  return out;
}

MultiVector truncate(const MultiVector& m, int cap) {
  MultiVector out(m.context(), m.flavor());
  for (const auto& [mask, c] : m.terms()) {
    if (std::popcount(mask) <= cap) out.accumulate(mask, c);
  }
  return out;
}

}  // namespace

FormMatrix FormMatrix::riemann(const AlgebraContext& ctx, std::vector<MultiVector> e) {
  const auto k = static_cast<std::size_t>(ctx.dim());
  check_entries(ctx, e, k);
  double scale = 1.0;
  for (const auto& m : e) scale = std::max(scale, m.max_abs());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const MultiVector& m = e[i * k + j];
      for (const auto& [mask, c] : m.terms()) {
        if (std::abs(c.imag()) > structure_tol * scale) {
          throw FormMatrixError("Riemann entry has a complex coefficient", i, j);
        }
      }
      if (max_coefficient_distance(m, -e[j * k + i]) > structure_tol * scale) {
        throw FormMatrixError("Riemann matrix is not antisymmetric", i, j);
      }
    }
  }
  return FormMatrix(Kind::riemann, ctx, k, std::move(e));
}

FormMatrix FormMatrix::twist(const AlgebraContext& ctx, std::size_t k, std::vector<MultiVector> e) {
  check_entries(ctx, e, k);
  double scale = 1.0;
  for (const auto& m : e) scale = std::max(scale, m.max_abs());
  // Deviation from C = C† and from C = −C†, per entry.
  double worst_herm = 0.0, worst_anti = 0.0;
  std::size_t herm_i = 0, herm_j = 0, anti_i = 0, anti_j = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const MultiVector adj = conjugate(e[j * k + i]);
      const double dh = max_coefficient_distance(e[i * k + j], adj);
      const double da = max_coefficient_distance(e[i * k + j], -adj);
      if (dh > worst_herm) worst_herm = dh, herm_i = i, herm_j = j;
      if (da > worst_anti) worst_anti = da, anti_i = i, anti_j = j;
    }
  }
  const double tol = structure_tol * scale;
  if (worst_herm > tol && worst_anti > tol) {
    const bool report_herm = worst_herm <= worst_anti;
    throw FormMatrixError("twist curvature is neither Hermitian nor anti-Hermitian",
                          report_herm ? herm_i : anti_i, report_herm ? herm_j : anti_j);
  }
  return FormMatrix(Kind::twist, ctx, k, std::move(e));
}

FormMatrix FormMatrix::flat_twist(const AlgebraContext& ctx, std::size_t k) {
  return twist(ctx, k, std::vector<MultiVector>(k * k, MultiVector(ctx, Flavor::exterior)));
}

FormMatrix FormMatrix::direct_sum(const FormMatrix& a, const FormMatrix& b) {
  if (a.kind() != Kind::twist || b.kind() != Kind::twist) {
    throw std::invalid_argument("direct_sum is defined for twist curvature");
  }
  if (!(a.context() == b.context())) throw ContextMismatch();
  const std::size_t k = a.size() + b.size();
  std::vector<MultiVector> e(k * k, MultiVector(a.context(), Flavor::exterior));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) e[i * k + j] = a.at(i, j);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) e[(a.size() + i) * k + a.size() + j] = b.at(i, j);
  }
  return twist(a.context(), k, std::move(e));
}

FormSeries::FormSeries(MultiVector value, Grade cap) : value_(truncate(value, cap.value())),
                                                       cap_(cap.value()) {
  if (value_.flavor() != Flavor::exterior) {
    throw std::invalid_argument("form series must be exterior");
  }
  if (value_.has_odd_terms()) throw std::invalid_argument("form series has odd-degree terms");
}

FormSeries FormSeries::one(const AlgebraContext& ctx, Grade cap) {
  return FormSeries(MultiVector::scalar(ctx, 1.0), cap);
}

namespace {

Grade common_cap(const FormSeries& a, const FormSeries& b) {
  if (!(a.context() == b.context())) throw ContextMismatch();
  return Grade(std::min(a.cap(), b.cap()), a.context());
}

// Positive real grade-0 part, or throws.
double positive_constant(const FormSeries& a, const char* op) {
  const Complex c = a.constant();
  if (!(c.real() > 0.0) || std::abs(c.imag()) > structure_tol * std::abs(c)) {
    throw SeriesDomainError(std::string(op) + " requires a positive real degree-0 part");
  }
  return c.real();
}

// Σ_k coef[k] x^k for nilpotent x, truncated at the cap.
MultiVector nilpotent_series(const MultiVector& x, const std::vector<double>& coef, int cap) {
  const AlgebraContext ctx = x.context();
  MultiVector total = MultiVector::scalar(ctx, coef.at(0));
  MultiVector power = MultiVector::scalar(ctx, 1.0);
  for (std::size_t k = 1; k < coef.size(); ++k) {
    power = truncate(wedge(power, x), cap);
    if (power.is_zero()) break;
    total += coef[k] * power;
  }
  return total;
}

}  // namespace

FormSeries series_add(const FormSeries& a, const FormSeries& b) {
  return FormSeries(a.value() + b.value(), common_cap(a, b));
}

FormSeries series_mul(const FormSeries& a, const FormSeries& b) {
  return FormSeries(wedge(a.value(), b.value()), common_cap(a, b));
}

FormSeries series_exp(const FormSeries& a) {
  const Complex c0 = a.constant();
  const MultiVector x = a.value() - MultiVector::scalar(a.context(), c0);
  std::vector<double> coef(a.cap() / 2 + 1);
  double fact = 1.0;
  for (std::size_t k = 0; k < coef.size(); ++k) {
    if (k > 0) fact *= double(k);
    coef[k] = 1.0 / fact;
  }
  return FormSeries(std::exp(c0) * nilpotent_series(x, coef, a.cap()),
                    Grade(a.cap(), a.context()));
}

FormSeries series_log(const FormSeries& a) {
  const double c0 = positive_constant(a, "series_log");
  const MultiVector x = (a.value() - MultiVector::scalar(a.context(), c0)) * Complex(1.0 / c0);
  std::vector<double> coef(a.cap() / 2 + 1, 0.0);
  coef[0] = std::log(c0);
  for (std::size_t k = 1; k < coef.size(); ++k) coef[k] = (k % 2 == 1 ? 1.0 : -1.0) / double(k);
  return FormSeries(nilpotent_series(x, coef, a.cap()), Grade(a.cap(), a.context()));
}

FormSeries series_sqrt_inverse(const FormSeries& a) {
  const double c0 = positive_constant(a, "series_sqrt_inverse");
  const MultiVector x = (a.value() - MultiVector::scalar(a.context(), c0)) * Complex(1.0 / c0);
  std::vector<double> coef(a.cap() / 2 + 1);
  coef[0] = 1.0;
  for (std::size_t k = 1; k < coef.size(); ++k) {
    coef[k] = coef[k - 1] * (-0.5 - double(k - 1)) / double(k);
  }
  return FormSeries(nilpotent_series(x, coef, a.cap()) * Complex(1.0 / std::sqrt(c0)),
                    Grade(a.cap(), a.context()));
}

std::vector<MultiVector> form_matrix_product(const std::vector<MultiVector>& a,
                                             const std::vector<MultiVector>& b, std::size_t k,
                                             int cap) {
  const AlgebraContext ctx = a.at(0).context();
  std::vector<MultiVector> out(k * k, MultiVector(ctx, Flavor::exterior));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      MultiVector acc(ctx, Flavor::exterior);
      for (std::size_t l = 0; l < k; ++l) {
        const MultiVector& x = a[i * k + l];
        const MultiVector& y = b[l * k + j];
        if (x.is_zero() || y.is_zero()) continue;
        acc += wedge(x, y);
      }
      out[i * k + j] = truncate(acc, cap);
    }
  }
  return out;
}

namespace {

MultiVector trace(const std::vector<MultiVector>& m, std::size_t k) {
  MultiVector t(m.at(0).context(), Flavor::exterior);
  for (std::size_t i = 0; i < k; ++i) t += m[i * k + i];
  return t;
}

std::vector<MultiVector> scaled(const FormMatrix& m, Complex factor) {
  std::vector<MultiVector> out;
  out.reserve(m.size() * m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) out.push_back(m.at(i, j) * factor);
  }
  return out;
}

}  // namespace

FormSeries chern_character(const FormMatrix& omega, Grade cap) {
  if (omega.kind() != FormMatrix::Kind::twist) {
    throw std::invalid_argument("chern_character expects twist curvature");
  }
  const std::size_t k = omega.size();
  const AlgebraContext ctx = omega.context();
  const auto m = scaled(omega, Complex(0.0, 1.0 / (2.0 * std::numbers::pi)));

  MultiVector total = MultiVector::scalar(ctx, double(k));
  std::vector<MultiVector> power = m;
  double fact = 1.0;
  for (int order = 1; 2 * order <= cap.value(); ++order) {
    if (order > 1) power = form_matrix_product(power, m, k, cap.value());
    fact *= order;
    total += trace(power, k) * Complex(1.0 / fact);
  }
  return FormSeries(total, cap);
}

FormSeries a_hat(const FormMatrix& riemann, Grade cap) {
  if (riemann.kind() != FormMatrix::Kind::riemann) {
    throw std::invalid_argument("a_hat expects Riemann curvature");
  }
  const std::size_t k = riemann.size();
  const AlgebraContext ctx = riemann.context();
  const int max_order = cap.value() / 4;  // tr X^{2j} has degree 4j
  const auto log_coef = log_a_series_coefficients(std::min(max_order, 12));

  // X² = (iR/2π)² = −R²/4π²
  const auto r = scaled(riemann, 1.0);
  auto x2 = form_matrix_product(r, r, k, cap.value());
  for (auto& e : x2) e *= Complex(-1.0 / (4.0 * std::numbers::pi * std::numbers::pi));

  MultiVector log_ahat(ctx, Flavor::exterior);
  std::vector<MultiVector> power = x2;
  for (int j = 1; j <= max_order; ++j) {
    if (j > 1) power = form_matrix_product(power, x2, k, cap.value());
    log_ahat += trace(power, k) * Complex(0.5 * static_cast<double>(log_coef[j]));
  }
  return series_exp(FormSeries(log_ahat, cap));
}

MultiVector index_density(const AlgebraContext& ctx, const std::optional<FormMatrix>& riemann,
                          const std::optional<FormMatrix>& twist) {
  const Grade cap(ctx.dim(), ctx);
  FormSeries ahat = riemann ? a_hat(*riemann, cap) : FormSeries::one(ctx, cap);
  FormSeries ch = twist ? chern_character(*twist, cap) : FormSeries::one(ctx, cap);
  if (!(ahat.context() == ctx) || !(ch.context() == ctx)) throw ContextMismatch();
  return grade_project(series_mul(ahat, ch).value(), cap);
}

}  // namespace spinindex
