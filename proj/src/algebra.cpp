#include "spinindex/algebra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace spinindex {

AlgebraContext::AlgebraContext(int dim) : dim_(dim) {
  if (dim < 2 || dim > max_dim || dim % 2 != 0) {
    throw std::invalid_argument("algebra dimension must be even and in [2, 16], got " +
                                std::to_string(dim));
  }
}

Grade::Grade(int r, const AlgebraContext& ctx) : r_(r) {
  if (r < 0 || r > ctx.dim()) {
    throw std::invalid_argument("grade " + std::to_string(r) + " outside [0, " +
                                std::to_string(ctx.dim()) + "]");
  }
}

std::string to_string(Flavor f) { return f == Flavor::exterior ? "exterior" : "clifford"; }

MultiVector MultiVector::scalar(AlgebraContext ctx, Complex c, Flavor flavor) {
  return blade(ctx, 0, c, flavor);
}

MultiVector MultiVector::generator(AlgebraContext ctx, int mu, Flavor flavor) {
  if (mu < 1 || mu > ctx.dim()) {
    throw std::out_of_range("generator index " + std::to_string(mu) + " outside [1, " +
                            std::to_string(ctx.dim()) + "]");
  }
  return blade(ctx, Mask{1} << (mu - 1), 1.0, flavor);
}

MultiVector MultiVector::blade(AlgebraContext ctx, Mask mask, Complex c, Flavor flavor) {
  if (mask & ~ctx.top_mask()) throw std::out_of_range("blade mask exceeds algebra dimension");
  MultiVector v(ctx, flavor);
  if (c != Complex(0.0)) v.terms_[mask] = c;
  return v;
}

Complex MultiVector::coefficient(Mask mask) const {
  auto it = terms_.find(mask);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

double MultiVector::max_abs() const {
  double m = 0.0;
  for (const auto& [mask, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

int MultiVector::max_grade() const {
  int g = -1;
  for (const auto& [mask, c] : terms_) g = std::max(g, std::popcount(mask));
  return g;
}

bool MultiVector::has_odd_terms() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return std::popcount(t.first) % 2 == 1; });
}

void MultiVector::accumulate(Mask mask, Complex c) { terms_[mask] += c; }

void MultiVector::prune() {
  const double cut = prune_threshold * max_abs();
  std::erase_if(terms_, [cut](const auto& t) {
    return std::abs(t.second) < cut || t.second == Complex(0.0);
  });
}

MultiVector MultiVector::with_flavor(Flavor f) const {
  MultiVector v = *this;
  v.flavor_ = f;
  return v;
}

MultiVector& MultiVector::operator+=(const MultiVector& other) {
  if (!(ctx_ == other.ctx_)) throw ContextMismatch();
  for (const auto& [mask, c] : other.terms_) terms_[mask] += c;
  prune();
  return *this;
}

MultiVector& MultiVector::operator-=(const MultiVector& other) {
  if (!(ctx_ == other.ctx_)) throw ContextMismatch();
  for (const auto& [mask, c] : other.terms_) terms_[mask] -= c;
  prune();
  return *this;
}

MultiVector& MultiVector::operator*=(Complex c) {
  if (c == Complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [mask, v] : terms_) v *= c;
  return *this;
}

double max_coefficient_distance(const MultiVector& a, const MultiVector& b) {
  double d = 0.0;
  for (const auto& [mask, c] : a.terms()) d = std::max(d, std::abs(c - b.coefficient(mask)));
  for (const auto& [mask, c] : b.terms()) {
    if (!a.terms().contains(mask)) d = std::max(d, std::abs(c));
  }
  return d;
}

int reorder_sign(Mask a, Mask b) {
  // Each generator of b must move left past every generator of a with a
  // larger index.
  int swaps = 0;
  a >>= 1;
  while (a != 0) {
    swaps += std::popcount(a & b);
    a >>= 1;
  }
  return (swaps & 1) ? -1 : 1;
}

namespace {

template <typename TermProduct>
MultiVector product(const MultiVector& a, const MultiVector& b, Flavor flavor, TermProduct f) {
  if (!(a.context() == b.context())) throw ContextMismatch();
  MultiVector out(a.context(), flavor);
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) f(out, ma, ca, mb, cb);
  }
  out.prune();
  return out;
}

}  // namespace

MultiVector wedge(const MultiVector& a, const MultiVector& b) {
  return product(a, b, Flavor::exterior,
                 [](MultiVector& out, Mask ma, Complex ca, Mask mb, Complex cb) {
                   if (ma & mb) return;
                   out.accumulate(ma | mb, double(reorder_sign(ma, mb)) * ca * cb);
                 });
}

MultiVector clifford_mul(const MultiVector& a, const MultiVector& b) {
  return product(a, b, Flavor::clifford,
                 [](MultiVector& out, Mask ma, Complex ca, Mask mb, Complex cb) {
                   int sign = reorder_sign(ma, mb);
                   // each shared generator contracts as ẽ^μ ẽ^μ = −1
                   if (std::popcount(ma & mb) & 1) sign = -sign;
                   out.accumulate(ma ^ mb, double(sign) * ca * cb);
                 });
}

MultiVector grade_project(const MultiVector& a, Grade r) {
  MultiVector out(a.context(), a.flavor());
  for (const auto& [mask, c] : a.terms()) {
    if (std::popcount(mask) == r.value()) out.accumulate(mask, c);
  }
  return out;
}

MultiVector hodge_star(const MultiVector& a) {
  if (a.flavor() != Flavor::exterior) {
    throw std::invalid_argument("hodge_star requires an exterior element");
  }
  const Mask top = a.context().top_mask();
  MultiVector out(a.context(), Flavor::exterior);
  for (const auto& [mask, c] : a.terms()) {
    const Mask comp = top & ~mask;
    out.accumulate(comp, double(reorder_sign(mask, comp)) * c);
  }
  return out;
}

namespace {

Complex int_pow(Complex base, int k) {
  Complex r = 1.0;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

Complex i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

MultiVector rescale_by_grade(const MultiVector& a, Complex eps, Flavor to) {
  if (eps == Complex(0.0)) throw std::invalid_argument("phi_eps requires ε ≠ 0");
  MultiVector out(a.context(), to);
  for (const auto& [mask, c] : a.terms()) {
    out.accumulate(mask, c * int_pow(eps, std::popcount(mask)));
  }
  out.prune();
  return out;
}

}  // namespace

MultiVector phi_eps(const MultiVector& a, Complex eps) {
  if (a.flavor() != Flavor::exterior) {
    throw std::invalid_argument("phi_eps maps exterior elements to Clifford elements");
  }
  return rescale_by_grade(a, eps, Flavor::clifford);
}

MultiVector phi_eps_inv(const MultiVector& a, Complex eps) {
  if (a.flavor() != Flavor::clifford) {
    throw std::invalid_argument("phi_eps_inv maps Clifford elements to exterior elements");
  }
  if (eps == Complex(0.0)) throw std::invalid_argument("phi_eps_inv requires ε ≠ 0");
  return rescale_by_grade(a, 1.0 / eps, Flavor::exterior);
}

Complex clifford_trace(const MultiVector& a) {
  if (a.flavor() != Flavor::clifford) {
    throw std::invalid_argument("clifford_trace requires a Clifford element");
  }
  return std::ldexp(1.0, a.context().half_dim()) * a.scalar_part();
}

MultiVector chirality(const AlgebraContext& ctx) {
  return MultiVector::blade(ctx, ctx.top_mask(), i_pow(ctx.half_dim()), Flavor::clifford);
}

Complex supertrace(const MultiVector& a) {
  return clifford_trace(clifford_mul(chirality(a.context()), a));
}

}  // namespace spinindex
