// Acceptance suite: one PASS/FAIL line per criterion, with its runtime budget.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "spinindex/algebra.hpp"
#include "spinindex/char_classes.hpp"
#include "spinindex/genfun.hpp"
#include "spinindex/lattice.hpp"
#include "spinindex/spectral.hpp"

using namespace spinindex;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

MultiVector random_element(const AlgebraContext& ctx, std::mt19937_64& rng, int max_grade,
                           Flavor f) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<Mask> mask(0, ctx.top_mask());
  MultiVector v(ctx, f);
  for (int k = 0; k < 6; ++k) {
    Mask m = mask(rng);
    while (std::popcount(m) > max_grade) m &= m - 1;
    v.accumulate(m, Complex(u(rng), u(rng)));
  }
  v.prune();
  return v;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Outcome algebra_laws() {
  std::mt19937_64 rng(1);
  double anti = 0.0, assoc = 0.0, trace = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const auto ctx = AlgebraContext::from_half_dim(n);
    for (int mu = 1; mu <= ctx.dim(); ++mu) {
      for (int nu = 1; nu <= ctx.dim(); ++nu) {
        const auto a = MultiVector::generator(ctx, mu, Flavor::clifford);
        const auto b = MultiVector::generator(ctx, nu, Flavor::clifford);
        anti = std::max(anti, max_coefficient_distance(
                                  clifford_mul(a, b) + clifford_mul(b, a),
                                  MultiVector::scalar(ctx, mu == nu ? -2.0 : 0.0, Flavor::clifford)));
      }
    }
    for (int t = 0; t < 200; ++t) {
      const auto a = random_element(ctx, rng, ctx.dim(), Flavor::clifford);
      const auto b = random_element(ctx, rng, ctx.dim(), Flavor::clifford);
      const auto c = random_element(ctx, rng, ctx.dim(), Flavor::clifford);
      assoc = std::max(assoc, max_coefficient_distance(clifford_mul(clifford_mul(a, b), c),
                                                       clifford_mul(a, clifford_mul(b, c))));
      const auto x = a.with_flavor(Flavor::exterior), y = b.with_flavor(Flavor::exterior),
                 z = c.with_flavor(Flavor::exterior);
      assoc = std::max(assoc, max_coefficient_distance(wedge(wedge(x, y), z), wedge(x, wedge(y, z))));
    }
    trace = std::max(trace, std::abs(clifford_trace(MultiVector::scalar(ctx, 1.0, Flavor::clifford)) -
                                     std::ldexp(1.0, n)));
    for (Mask m = 1; m <= ctx.top_mask(); ++m) {
      trace = std::max(trace, std::abs(clifford_trace(MultiVector::blade(ctx, m, 1.0, Flavor::clifford))));
    }
  }
  const bool ok = anti <= 1e-12 && assoc <= 1e-12 && trace <= 1e-12;
  return {ok, "anticommutator " + sci(anti) + ", associativity " + sci(assoc) + ", trace " + sci(trace)};
}

Outcome phi_eps_convergence() {
  std::mt19937_64 rng(2);
  double lo = 1e300, hi = 0.0;
  int pairs = 0;
  for (int n = 1; n <= 4; ++n) {
    const auto ctx = AlgebraContext::from_half_dim(n);
    for (int t = 0; t < 25; ++t) {
      const auto xi = random_element(ctx, rng, 2, Flavor::exterior);
      const auto eta = random_element(ctx, rng, 2, Flavor::exterior);
      std::vector<double> d;
      for (double e : {1e-1, 1e-2, 1e-3}) {
        d.push_back(max_coefficient_distance(
            phi_eps_inv(clifford_mul(phi_eps(xi, e), phi_eps(eta, e)), e), wedge(xi, eta)));
      }
      if (d[0] < 1e-12) continue;  // ξ and η share no generator
      ++pairs;
      for (int k = 0; k < 2; ++k) {
        lo = std::min(lo, d[k] / d[k + 1]);
        hi = std::max(hi, d[k] / d[k + 1]);
      }
    }
  }
  const bool ok = pairs > 0 && lo >= 80.0 && hi <= 120.0;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d pairs, successive ratios in [%.3f, %.3f]", pairs, lo, hi);
  return {ok, buf};
}

Outcome generating_function() {
  double qho = 0.0, part = 0.0;
  for (double y : {0.5, 1.0, 2.0}) {
    qho = std::max(qho, std::abs(qho_generating_function(y, 60) - a_closed_form(y)));
    part = std::max(part, std::abs(partition_sum(y, 100) - a_closed_form(y)));
  }
  return {qho < 1e-6 && part < 1e-12,
          "matrix element max |diff| " + sci(qho) + ", partition sum max |diff| " + sci(part)};
}

Outcome ahat_oracle() {
  const auto t = splitting_oracle(2, 4);
  const bool exact = t.coefficients.size() == 4 && t.coefficient({0, 0}) == 1 &&
                     t.coefficient({1, 0}) == Rational(-1, 24) &&
                     t.coefficient({2, 0}) == Rational(7, 5760) &&
                     t.coefficient({0, 1}) == Rational(-4, 5760);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const auto ctx = AlgebraContext::from_half_dim(n);
    const auto dim = std::size_t(ctx.dim());
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<MultiVector> e(dim * dim, MultiVector(ctx, Flavor::exterior)), roots;
      for (int l = 0; l < n; ++l) {
        MultiVector th(ctx, Flavor::exterior);
        for (std::size_t a = 0; a < dim; ++a) {
          for (std::size_t b = a + 1; b < dim; ++b) th.accumulate((1u << a) | (1u << b), two_pi * u(rng));
        }
        e[(2 * l) * dim + 2 * l + 1] = th;
        e[(2 * l + 1) * dim + 2 * l] = -th;
        roots.push_back(th * Complex(1.0 / two_pi));
      }
      const auto ahat = a_hat(FormMatrix::riemann(ctx, e), Grade(ctx.dim(), ctx));
      const auto oracle = splitting_oracle(n, n).evaluate(pontryagin_from_roots(roots));
      worst = std::max(worst, max_coefficient_distance(ahat.value(), oracle) /
                                  std::max(1.0, oracle.max_abs()));
    }
  }
  return {exact && worst <= 1e-10, std::string("rational table ") + (exact ? "exact" : "WRONG") +
                                       ", float deviation " + sci(worst)};
}

std::vector<SpectralSystem> built_systems;

Outcome torus_index() {
  int bad = 0;
  double worst_residual = 0.0, worst_plateau = 0.0;
  for (int N : {8, 12}) {
    for (int q = -3; q <= 3; ++q) {
      const auto g = build_torus_gauge(N, q);
      const auto d = build_wilson_dirac(g);
      const auto ov = overlap_index(d);
      const auto flux = topological_flux(g);
      const auto sys = heat_kernel_system(d);
      const int zma = zero_mode_asymmetry(sys);
      worst_residual = std::max({worst_residual, ov.residual, flux.residual});
      const double ref = std::round(witten_index(sys, 1.0));
      for (double tau : {0.5, 1.0, 2.0, 5.0}) {
        worst_plateau = std::max(worst_plateau, std::abs(witten_index(sys, tau) - ref));
      }
      if (ov.value != q || zma != q || flux.value != q || ref != q) ++bad;
      built_systems.push_back(sys);
    }
  }
  const bool ok = bad == 0 && worst_residual < 0.01 && worst_plateau <= 1e-6;
  return {ok, std::to_string(14 - bad) + "/14 cases agree, max rounding residual " +
                  sci(worst_residual) + ", plateau deviation " + sci(worst_plateau)};
}

Outcome susy_pairing() {
  for (int q = -2; q <= 2; ++q) built_systems.push_back(sphere_monopole_fixture(q, 30));
  std::size_t violations = 0;
  for (const auto& s : built_systems) violations += pair_check(s).violations.size();
  return {violations == 0 && built_systems.size() == 19,
          std::to_string(built_systems.size()) + " systems, " + std::to_string(violations) +
              " violations"};
}

Outcome sphere_fixture() {
  double worst_excess = 0.0;
  bool ok = true;
  for (int q = -2; q <= 2; ++q) {
    const auto sys = sphere_monopole_fixture(q, 30);
    for (double tau : {0.5, 1.0, 2.0, 5.0}) {
      const double dev = std::abs(witten_index(sys, tau) - q);
      const double tail = sphere_tail_bound(q, 30, tau);
      // the tail vanishes in double precision at these τ; allow summation roundoff
      worst_excess = std::max(worst_excess, dev - tail);
      if (dev > tail + 1e-12) ok = false;
    }
    if (zero_mode_asymmetry(sys) != q) ok = false;
  }
  return {ok, "max deviation beyond tail bound " + sci(std::max(worst_excess, 0.0))};
}

Outcome gauge_invariance() {
  std::mt19937_64 rng(8);
  int checks = 0, changed = 0;
  auto check = [&](int N, int q, bool heat) {
    const auto g = build_torus_gauge(N, q);
    for (int t = 0; t < 20; ++t) {
      const auto gt = random_gauge_transform(g, rng);
      const auto d = build_wilson_dirac(gt);
      bool same = overlap_index(d).value == q && topological_flux(gt).value == q;
      if (heat) same = same && zero_mode_asymmetry(heat_kernel_system(d)) == q;
      ++checks;
      if (!same) ++changed;
    }
  };
  for (int q = -3; q <= 3; ++q) check(8, q, true);
  check(12, 3, false);
  check(12, -2, false);
  return {changed == 0, std::to_string(checks) + " transformed fields, " + std::to_string(changed) +
                            " changed an integer"};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome verify_all_stable() {
  const std::string cli = SPINDEX_CLI;
  int codes[2];
  std::string docs[2];
  for (int k = 0; k < 2; ++k) {
    const std::string out = "acceptance_verify_all_" + std::to_string(k) + ".json";
    const std::string cmd = cli + " --format json -o " + out + " verify-all > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    codes[k] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    docs[k] = slurp(out);
    std::remove(out.c_str());
  }
  const bool same = !docs[0].empty() && docs[0] == docs[1];
  return {codes[0] == 0 && codes[1] == 0 && same,
          "exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + ", " +
              std::to_string(docs[0].size()) + " bytes, " + (same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "algebra laws", 10, algebra_laws},
      {2, "phi_eps convergence", 10, phi_eps_convergence},
      {3, "A-hat generating function", 60, generating_function},
      {4, "A-hat series vs splitting oracle", 5, ahat_oracle},
      {5, "index theorem on the torus", 120, torus_index},
      {6, "SUSY pairing", 120, susy_pairing},
      {7, "sphere fixture", 5, sphere_fixture},
      {8, "gauge invariance", 30, gauge_invariance},
      {9, "verify-all exit 0, byte-stable JSON", 600, verify_all_stable},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %d %-38s %s  %7.2f s (budget %g s)  %s%s\n", c.id, c.name,
                pass ? "PASS" : "FAIL", s, c.budget_s, o.detail.c_str(),
                in_time ? "" : "  [over budget]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
