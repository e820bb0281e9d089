#include <doctest.h>

#include <numbers>
#include <random>

#include "spinindex/char_classes.hpp"
#include "spinindex/genfun.hpp"

using namespace spinindex;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

MultiVector blade(const AlgebraContext& ctx, Mask m, Complex c = 1.0) {
  return MultiVector::blade(ctx, m, c);
}

MultiVector random_two_form(const AlgebraContext& ctx, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MultiVector t(ctx, Flavor::exterior);
  for (int a = 0; a < ctx.dim(); ++a) {
    for (int b = a + 1; b < ctx.dim(); ++b) t.accumulate((1u << a) | (1u << b), scale * u(rng));
  }
  return t;
}

std::vector<MultiVector> zeros(const AlgebraContext& ctx, std::size_t k) {
  return std::vector<MultiVector>(k * k, MultiVector(ctx, Flavor::exterior));
}

// Block-diagonal R with blocks [[0, θ_l], [−θ_l, 0]].
FormMatrix block_riemann(const AlgebraContext& ctx, const std::vector<MultiVector>& theta) {
  const auto dim = std::size_t(ctx.dim());
  auto e = zeros(ctx, dim);
  for (std::size_t l = 0; l < theta.size(); ++l) {
    e[(2 * l) * dim + 2 * l + 1] = theta[l];
    e[(2 * l + 1) * dim + 2 * l] = -theta[l];
  }
  return FormMatrix::riemann(ctx, e);
}

}  // namespace

TEST_CASE("form matrix validation") {
  const AlgebraContext ctx(2);
  const auto e12 = blade(ctx, 0b11);
  const auto z = MultiVector(ctx, Flavor::exterior);
  CHECK_NOTHROW(FormMatrix::riemann(ctx, {z, e12, -e12, z}));
  CHECK_THROWS_AS(FormMatrix::riemann(ctx, {z, e12, e12, z}), FormMatrixError);
  CHECK_THROWS_AS(FormMatrix::riemann(ctx, {z, e12 * Complex(0, 1), -e12 * Complex(0, 1), z}),
                  FormMatrixError);
  try {
    FormMatrix::riemann(ctx, {z, MultiVector::generator(ctx, 1), z, z});
    FAIL("expected grade error");
  } catch (const FormMatrixError& err) {
    CHECK(err.row() == 0);
    CHECK(err.col() == 1);
  }
  CHECK_THROWS_AS(FormMatrix::riemann(ctx, {z, e12, -e12}), std::invalid_argument);
  // Hermitian and anti-Hermitian conventions are both accepted, mixing is not.
  CHECK_NOTHROW(FormMatrix::twist(ctx, 1, {e12}));
  CHECK_NOTHROW(FormMatrix::twist(ctx, 1, {e12 * Complex(0, 1)}));
  CHECK_THROWS_AS(FormMatrix::twist(ctx, 1, {e12 * Complex(1, 1)}), FormMatrixError);
  CHECK_NOTHROW(FormMatrix::twist(ctx, 2, {z, e12 * Complex(0, 1), e12 * Complex(0, 1), z}));
  CHECK_THROWS_AS(FormMatrix::twist(ctx, 2, {z, e12, e12 * Complex(0, 1), z}), FormMatrixError);
}

TEST_CASE("series arithmetic") {
  const AlgebraContext ctx(4);
  const Grade cap(4, ctx);
  const auto one = FormSeries::one(ctx, cap);
  CHECK(max_coefficient_distance(series_exp(FormSeries(MultiVector(ctx, Flavor::exterior), cap)).value(),
                                 one.value()) == 0.0);
  const auto w = blade(ctx, 0b0011) + blade(ctx, 0b1100);
  const auto ex = series_exp(FormSeries(w, cap));
  CHECK(ex.value().terms().size() == 4);
  CHECK(ex.value().scalar_part() == Complex(1.0));
  CHECK(ex.value().coefficient(0b1111) == Complex(1.0));
  CHECK_THROWS_AS(FormSeries(MultiVector::generator(ctx, 1), cap), std::invalid_argument);
  CHECK_THROWS_AS(series_log(FormSeries(MultiVector(ctx, Flavor::exterior), cap)), SeriesDomainError);
  CHECK_THROWS_AS(series_log(FormSeries(MultiVector::scalar(ctx, -1.0), cap)), SeriesDomainError);

  std::mt19937_64 rng(2);
  for (int n = 1; n <= 3; ++n) {
    const auto c = AlgebraContext::from_half_dim(n);
    const Grade g(c.dim(), c);
    const auto omega = FormSeries(random_two_form(c, rng, 1.0), g);
    CHECK(max_coefficient_distance(series_log(series_exp(omega)).value(), omega.value()) < 1e-12);
    const auto a = series_add(FormSeries(MultiVector::scalar(c, 2.5), g), omega);
    const auto s = series_sqrt_inverse(a);
    const auto back = series_mul(series_mul(s, s), a);
    CHECK(max_coefficient_distance(back.value(), FormSeries::one(c, g).value()) < 1e-12);
  }
}

TEST_CASE("chern character") {
  const AlgebraContext ctx(4);
  const Grade cap(4, ctx);
  const auto flat = chern_character(FormMatrix::flat_twist(ctx, 3), cap);
  CHECK(flat.value().terms().size() == 1);
  CHECK(flat.constant() == Complex(3.0));

  // Rank 1: 1 + (i/2π)F + ((i/2π)F)²/2.
  const auto f = blade(ctx, 0b0011, Complex(0.0, -1.0)) + blade(ctx, 0b1100, Complex(0.0, -2.0));
  const auto ch = chern_character(FormMatrix::twist(ctx, 1, {f}), cap);
  const Complex k(0.0, 1.0 / two_pi);
  const auto expect = MultiVector::scalar(ctx, 1.0) + f * k + wedge(f, f) * (0.5 * k * k);
  CHECK(max_coefficient_distance(ch.value(), expect) < 1e-15);
  CHECK_FALSE(ch.value().has_odd_terms());
}

TEST_CASE("a_hat trivial and single block") {
  const AlgebraContext ctx(4);
  const Grade cap(4, ctx);
  const auto z = a_hat(FormMatrix::riemann(ctx, zeros(ctx, 4)), cap);
  CHECK(z.value().terms().size() == 1);
  CHECK(z.constant() == Complex(1.0));

  // One block θ = c·(e1^e2 + e3^e4): Â = 1 − y²/24 with y = θ/2π.
  const double c = 1.7;
  const auto theta = (blade(ctx, 0b0011) + blade(ctx, 0b1100)) * Complex(c);
  const auto ahat = a_hat(block_riemann(ctx, {theta, MultiVector(ctx, Flavor::exterior)}), cap);
  const auto coef = a_series_coefficients(2);
  const auto y = theta * Complex(1.0 / two_pi);
  const auto expect = MultiVector::scalar(ctx, 1.0) + wedge(y, y) * static_cast<double>(coef[1]);
  CHECK(max_coefficient_distance(ahat.value(), expect) < 1e-15);
  // p₁ = −tr(R∧R)/8π²
  const auto p1 = wedge(y, y);
  CHECK(ahat.top_coefficient().real() == doctest::Approx(-p1.coefficient(0b1111).real() / 24.0));
}

TEST_CASE("a_hat matches the splitting oracle") {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 4; ++n) {
    const auto ctx = AlgebraContext::from_half_dim(n);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<MultiVector> theta, roots;
      for (int l = 0; l < n; ++l) {
        theta.push_back(random_two_form(ctx, rng, two_pi));
        roots.push_back(theta.back() * Complex(1.0 / two_pi));
      }
      const auto ahat = a_hat(block_riemann(ctx, theta), Grade(ctx.dim(), ctx));
      const auto oracle = splitting_oracle(n, n).evaluate(pontryagin_from_roots(roots));
      CHECK(max_coefficient_distance(ahat.value(), oracle) <= 1e-10 * std::max(1.0, oracle.max_abs()));
      CHECK_FALSE(ahat.value().has_odd_terms());
    }
  }
}

TEST_CASE("a_hat is invariant under orthogonal frame rotation") {
  std::mt19937_64 rng(23);
  const AlgebraContext ctx(6);
  std::vector<MultiVector> theta;
  for (int l = 0; l < 3; ++l) theta.push_back(random_two_form(ctx, rng, 3.0));
  const auto r = block_riemann(ctx, theta);
  // Givens rotation mixing frame indices 1 and 2.
  const double c = std::cos(0.4), s = std::sin(0.4);
  std::vector<std::vector<double>> o(6, std::vector<double>(6, 0.0));
  for (int i = 0; i < 6; ++i) o[i][i] = 1.0;
  o[1][1] = c, o[1][2] = -s, o[2][1] = s, o[2][2] = c;
  std::vector<MultiVector> rotated(36, MultiVector(ctx, Flavor::exterior));
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      MultiVector acc(ctx, Flavor::exterior);
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          if (o[i][a] * o[j][b] != 0.0) acc += r.at(a, b) * Complex(o[i][a] * o[j][b]);
        }
      }
      rotated[i * 6 + j] = acc;
    }
  }
  const Grade cap(6, ctx);
  CHECK(max_coefficient_distance(a_hat(r, cap).value(),
                                 a_hat(FormMatrix::riemann(ctx, rotated), cap).value()) < 1e-12);
}

TEST_CASE("chern character is additive on direct sums") {
  const AlgebraContext ctx(4);
  const Grade cap(4, ctx);
  const auto a = FormMatrix::twist(ctx, 1, {blade(ctx, 0b0011, Complex(0, 2))});
  const auto b = FormMatrix::twist(
      ctx, 2,
      {blade(ctx, 0b0101, Complex(0, 1)), blade(ctx, 0b1100, Complex(1, 0.5)),
       blade(ctx, 0b1100, Complex(-1, 0.5)), blade(ctx, 0b0011, Complex(0, -1))});
  const auto sum = chern_character(FormMatrix::direct_sum(a, b), cap);
  const auto parts = series_add(chern_character(a, cap), chern_character(b, cap));
  CHECK(max_coefficient_distance(sum.value(), parts.value()) < 1e-15);
  CHECK(sum.constant() == Complex(3.0));
}

TEST_CASE("index density examples") {
  const AlgebraContext ctx(2);
  CHECK(index_density(ctx, std::nullopt, std::nullopt).is_zero());
  CHECK(index_density(ctx, std::nullopt, FormMatrix::flat_twist(ctx, 1)).is_zero());
  const auto f = blade(ctx, 0b11, Complex(0.0, -3.0));
  const auto dens = index_density(ctx, std::nullopt, FormMatrix::twist(ctx, 1, {f}));
  CHECK(std::abs(dens.coefficient(0b11) - Complex(0.0, 1.0 / two_pi) * Complex(0.0, -3.0)) < 1e-15);
  // The sphere: Â has nothing in degree 2, so only ch contributes.
  const auto e12 = blade(ctx, 0b11);
  const auto z = MultiVector(ctx, Flavor::exterior);
  const auto r = FormMatrix::riemann(ctx, {z, e12, -e12, z});
  CHECK(a_hat(r, Grade(2, ctx)).value().terms().size() == 1);
  const auto d2 = index_density(ctx, r, FormMatrix::twist(ctx, 1, {e12 * Complex(0.0, -1.0)}));
  CHECK(4.0 * std::numbers::pi * d2.coefficient(0b11).real() == doctest::Approx(2.0).epsilon(1e-14));
}
