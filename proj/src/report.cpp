#include "spinindex/report.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

#include "spinindex/algebra.hpp"
#include "spinindex/char_classes.hpp"
#include "spinindex/form_dsl.hpp"
#include "spinindex/genfun.hpp"
#include "spinindex/lattice.hpp"

namespace spinindex {

double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

CommandResult guarded(const std::function<CommandResult()>& body) {
  auto fail = [](int code, const std::string& kind, const std::string& msg) {
    CommandResult r;
    r.exit_code = code;
    r.json["error"] = {{"kind", kind}, {"message", msg}};
    r.text = kind + " error: " + msg + "\n";
    return r;
  };
  try {
    return body();
  } catch (const UsageError& e) {
    return fail(exit_usage, "usage", e.what());
  } catch (const AmbiguityError& e) {
    return fail(exit_ambiguous, "ambiguity", e.what());
  } catch (const CurvatureFileError& e) {
    return fail(exit_input, "input", e.what());
  } catch (const ParseError& e) {
    return fail(exit_input, "input", e.what());
  } catch (const std::exception& e) {
    return fail(exit_failed, "internal", e.what());
  }
}

ordered_json spectrum_to_json(const SpectralSystem& sys) {
  ordered_json modes = ordered_json::array();
  for (const auto& m : sys.modes()) modes.push_back({m.lambda, m.chirality});
  return {{"convention", to_string(sys.convention())},
          {"source", to_string(sys.source())},
          {"excluded_modes", sys.excluded_modes()},
          {"modes", std::move(modes)}};
}

SpectralSystem spectrum_from_json(const ordered_json& j) {
  std::vector<Mode> modes;
  for (const auto& m : j.at("modes")) modes.push_back({m.at(0).get<double>(), m.at(1).get<int>()});
  return SpectralSystem(std::move(modes),
                        eigen_convention_from_string(j.at("convention").get<std::string>()),
                        spectrum_source_from_string(j.at("source").get<std::string>()),
                        j.value("excluded_modes", std::size_t{0}));
}

ordered_json VerificationReport::to_json(bool with_timings) const {
  ordered_json w = ordered_json::array();
  for (const auto& s : witten_values) {
    w.push_back({{"tau", round12(s.tau)},
                 {"value", round12(s.value)},
                 {"tail_bound", round12(s.tail_bound)}});
  }
  ordered_json j = {{"case_name", case_name},
                    {"analytic_index", analytic_index},
                    {"topological_index", topological_index},
                    {"witten_values", std::move(w)},
                    {"plateau_deviation", round12(plateau_deviation)},
                    {"plateau_ok", plateau_ok},
                    {"pair_check_violations", pair_check_violations}};
  for (const auto& [k, v] : details.items()) j[k] = v;
  if (with_timings) {
    ordered_json t = ordered_json::object();
    for (const auto& [k, v] : timings) t[k] = round12(v);
    j["timings_ms"] = std::move(t);
  }
  j["pass"] = pass;
  return j;
}

namespace {

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void check_taus(const std::vector<double>& taus) {
  if (taus.empty()) throw UsageError("τ grid must not be empty");
  for (double t : taus) {
    if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("τ values must be positive");
  }
}

std::string render_report(const VerificationReport& r, bool with_timings) {
  std::ostringstream out;
  out << r.case_name << "\n";
  out << "  analytic index     " << r.analytic_index << "\n";
  out << "  topological index  " << r.topological_index << "\n";
  out << "  tau        witten          tail bound\n";
  for (const auto& s : r.witten_values) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-9g  %-14.10f  %.3e\n", s.tau, s.value, s.tail_bound);
    out << buf;
  }
  out << "  plateau deviation  " << fmt("%.3e", r.plateau_deviation)
      << (r.plateau_ok ? "" : "  (too large)") << "\n";
  out << "  pair violations    " << r.pair_check_violations << "\n";
  if (with_timings) {
    for (const auto& [k, v] : r.timings) out << "  time " << k << "  " << fmt("%.1f ms", v) << "\n";
  }
  out << "  " << (r.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

// Fills witten values and plateau fields; allowance(τ) is the permitted
// deviation from round(W(1)).
void fill_plateau(VerificationReport& r, const SpectralSystem& sys,
                  const std::vector<double>& taus, const std::function<double(double)>& tail,
                  const std::function<double(double)>& allowance) {
  const double reference = std::round(witten_index(sys, 1.0));
  r.plateau_deviation = 0.0;
  r.plateau_ok = true;
  for (double t : taus) {
    const double w = witten_index(sys, t);
    const double dev = std::abs(w - reference);
    r.witten_values.push_back({t, w, tail(t)});
    r.plateau_deviation = std::max(r.plateau_deviation, dev);
    if (dev > allowance(t)) r.plateau_ok = false;
  }
}

MultiVector random_element(const AlgebraContext& ctx, std::mt19937_64& rng, int max_terms,
                           int max_grade, Flavor flavor) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<Mask> mask_dist(0, ctx.top_mask());
  std::uniform_int_distribution<int> count(1, max_terms);
  MultiVector v(ctx, flavor);
  const int terms = count(rng);
  for (int k = 0; k < terms; ++k) {
    Mask m = mask_dist(rng);
    while (std::popcount(m) > max_grade) m &= m - 1;
    v.accumulate(m, Complex(coef(rng), coef(rng)));
  }
  v.prune();
  return v;
}

struct Property {
  std::string name;
  double deviation;
  double tolerance;
  bool pass() const { return deviation <= tolerance; }
};

}  // namespace

CommandResult cmd_algebra_check(int n) {
  if (n < 1 || n > 4) throw UsageError("--n must be in [1, 4], got " + std::to_string(n));
  const auto ctx = AlgebraContext::from_half_dim(n);
  const int dim = ctx.dim();
  std::mt19937_64 rng(20240601u + unsigned(n));
  std::vector<Property> props;

  double dev = 0.0;
  for (int mu = 1; mu <= dim; ++mu) {
    for (int nu = 1; nu <= dim; ++nu) {
      const auto a = MultiVector::generator(ctx, mu, Flavor::clifford);
      const auto b = MultiVector::generator(ctx, nu, Flavor::clifford);
      const auto expect = MultiVector::scalar(ctx, mu == nu ? -2.0 : 0.0, Flavor::clifford);
      dev = std::max(dev, max_coefficient_distance(clifford_mul(a, b) + clifford_mul(b, a), expect));
    }
  }
  props.push_back({"anticommutator", dev, 1e-12});

  double dw = 0.0, dc = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto a = random_element(ctx, rng, 6, dim, Flavor::exterior);
    const auto b = random_element(ctx, rng, 6, dim, Flavor::exterior);
    const auto c = random_element(ctx, rng, 6, dim, Flavor::exterior);
    dw = std::max(dw, max_coefficient_distance(wedge(wedge(a, b), c), wedge(a, wedge(b, c))));
    dc = std::max(dc, max_coefficient_distance(clifford_mul(clifford_mul(a, b), c),
                                               clifford_mul(a, clifford_mul(b, c))));
  }
  props.push_back({"associativity_wedge", dw, 1e-12});
  props.push_back({"associativity_clifford", dc, 1e-12});

  double dt = std::abs(clifford_trace(MultiVector::scalar(ctx, 1.0, Flavor::clifford)) -
                       std::ldexp(1.0, n));
  for (Mask m = 1; m <= ctx.top_mask(); ++m) {
    dt = std::max(dt, std::abs(clifford_trace(MultiVector::blade(ctx, m, 1.0, Flavor::clifford))));
  }
  props.push_back({"trace_rules", dt, 1e-12});

  const auto chi = chirality(ctx);
  double dch = max_coefficient_distance(clifford_mul(chi, chi),
                                        MultiVector::scalar(ctx, 1.0, Flavor::clifford));
  for (int mu = 1; mu <= dim; ++mu) {
    const auto g = MultiVector::generator(ctx, mu, Flavor::clifford);
    dch = std::max(dch, (clifford_mul(chi, g) + clifford_mul(g, chi)).max_abs());
  }
  props.push_back({"chirality_involution", dch, 1e-12});

  // tr(Γ·X) = 2^n i^{−n} × top coefficient of X.
  Complex i_minus_n = 1.0;
  for (int k = 0; k < n; ++k) i_minus_n *= Complex(0.0, -1.0);
  double dst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto x = random_element(ctx, rng, 8, dim, Flavor::clifford);
    const Complex expect = std::ldexp(1.0, n) * i_minus_n * x.coefficient(ctx.top_mask());
    dst = std::max(dst, std::abs(supertrace(x) - expect));
  }
  props.push_back({"supertrace_top_form", dst, 1e-12});

  // ★★ = (−1)^r on r-forms.
  double dh = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto x = random_element(ctx, rng, 8, dim, Flavor::exterior);
    MultiVector expect(ctx, Flavor::exterior);
    for (const auto& [m, c] : x.terms()) expect.accumulate(m, std::popcount(m) % 2 ? -c : c);
    dh = std::max(dh, max_coefficient_distance(hodge_star(hodge_star(x)), expect));
  }
  props.push_back({"hodge_double_star", dh, 1e-12});

  const std::vector<double> eps = {1e-1, 1e-2, 1e-3};
  std::vector<double> defects(eps.size(), 0.0);
  double ratio_lo = 1e300, ratio_hi = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto xi = random_element(ctx, rng, 6, 2, Flavor::exterior);
    const auto eta = random_element(ctx, rng, 6, 2, Flavor::exterior);
    std::vector<double> d;
    for (double e : eps) {
      const auto prod = phi_eps_inv(clifford_mul(phi_eps(xi, e), phi_eps(eta, e)), e);
      d.push_back(max_coefficient_distance(prod, wedge(xi, eta)));
    }
    for (std::size_t k = 0; k < eps.size(); ++k) defects[k] = std::max(defects[k], d[k]);
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
      if (d[0] < 1e-12) break;  // no contractions for this pair, defects are roundoff
      ratio_lo = std::min(ratio_lo, d[k] / d[k + 1]);
      ratio_hi = std::max(ratio_hi, d[k] / d[k + 1]);
    }
  }
  const bool phi_ok = ratio_hi > 0.0 && ratio_lo >= 80.0 && ratio_hi <= 120.0;

  CommandResult r;
  ordered_json plist = ordered_json::array();
  std::ostringstream text;
  text << "algebra-check n=" << n << " (dim " << dim << ")\n";
  bool all = phi_ok;
  for (const auto& p : props) {
    plist.push_back({{"name", p.name},
                     {"max_deviation", round12(p.deviation)},
                     {"tolerance", p.tolerance},
                     {"pass", p.pass()}});
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-24s %-4s  max deviation %.2e\n", p.name.c_str(),
                  p.pass() ? "PASS" : "FAIL", p.deviation);
    text << buf;
    all = all && p.pass();
  }
  ordered_json d = ordered_json::array(), e = ordered_json::array();
  for (std::size_t k = 0; k < eps.size(); ++k) {
    e.push_back(eps[k]);
    d.push_back(round12(defects[k]));
  }
  r.json = {{"n", n},
            {"properties", std::move(plist)},
            {"phi_eps",
             {{"eps", std::move(e)},
              {"max_defects", std::move(d)},
              {"ratio_min", round12(ratio_lo)},
              {"ratio_max", round12(ratio_hi)},
              {"pass", phi_ok}}},
            {"pass", all}};
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "  %-24s %-4s  successive defect ratios in [%.2f, %.2f]\n", "phi_eps_convergence",
                phi_ok ? "PASS" : "FAIL", ratio_lo, ratio_hi);
  text << buf;
  r.text = text.str();
  r.exit_code = all ? exit_pass : exit_failed;
  return r;
}

CommandResult cmd_index_torus(const TorusOptions& o) {
  if (o.method != "overlap" && o.method != "heat") {
    throw UsageError("--method must be overlap or heat");
  }
  if (o.N < 4) throw UsageError("--N must be at least 4");
  if (2 * std::abs(o.q) >= o.N * o.N) throw UsageError("--q too large: need 2|q| < N²");
  check_taus(o.taus);

  VerificationReport rep;
  rep.case_name = "torus N=" + std::to_string(o.N) + " q=" + std::to_string(o.q);
  Stopwatch clock;
  const auto g = build_torus_gauge(o.N, o.q);
  const auto flux = topological_flux(g);
  rep.timings["gauge"] = clock.lap_ms();
  const auto d = build_wilson_dirac(g, o.mass);
  const auto ov = overlap_index(d);
  rep.timings["overlap"] = clock.lap_ms();
  const auto sys = heat_kernel_system(d);
  const int zma = zero_mode_asymmetry(sys);
  const auto pairs = pair_check(sys);
  rep.timings["heat_kernel"] = clock.lap_ms();

  rep.analytic_index = o.method == "overlap" ? ov.value : zma;
  rep.topological_index = flux.value;
  rep.pair_check_violations = pairs.violations.size();
  fill_plateau(rep, sys, o.taus, [](double) { return 0.0; }, [](double) { return 1e-6; });
  rep.details = {{"method", o.method},
                 {"overlap_index", ov.value},
                 {"overlap_residual", round12(ov.residual)},
                 {"zero_mode_asymmetry", zma},
                 {"flux_residual", round12(flux.residual)},
                 {"gamma5_residual", round12(gamma5_hermiticity_residual(d))},
                 {"excluded_modes", sys.excluded_modes()}};
  rep.pass = ov.value == flux.value && zma == flux.value && rep.pair_check_violations == 0 &&
             rep.plateau_ok;

  CommandResult r;
  r.json = rep.to_json(o.with_timings);
  r.text = render_report(rep, o.with_timings);
  if (d.warning) r.text = "warning: " + *d.warning + "\n" + r.text;
  r.exit_code = rep.pass ? exit_pass : exit_failed;
  r.spectrum = sys;
  return r;
}

namespace {

// ∫ Â∧ch over the unit sphere with the charge-q monopole bundle.
double sphere_chern_weil_integral(int q) {
  const AlgebraContext ctx(2);
  const auto e12 = MultiVector::blade(ctx, 0b11, 1.0);
  const auto zero = MultiVector(ctx, Flavor::exterior);
  const auto riemann = FormMatrix::riemann(ctx, {zero, e12, -e12, zero});
  const auto twist = FormMatrix::twist(ctx, 1, {e12 * Complex(0.0, -0.5 * q)});
  const auto density = index_density(ctx, riemann, twist);
  return 4.0 * std::numbers::pi * density.coefficient(ctx.top_mask()).real();
}

}  // namespace

CommandResult cmd_index_sphere(int q, int k_max, const std::vector<double>& taus,
                               bool with_timings) {
  if (k_max < 1) throw UsageError("--kmax must be at least 1");
  check_taus(taus);
  VerificationReport rep;
  rep.case_name = "sphere q=" + std::to_string(q) + " kmax=" + std::to_string(k_max);
  Stopwatch clock;
  const auto sys = sphere_monopole_fixture(q, k_max);
  rep.analytic_index = zero_mode_asymmetry(sys);
  rep.pair_check_violations = pair_check(sys).violations.size();
  rep.timings["fixture"] = clock.lap_ms();
  const double integral = sphere_chern_weil_integral(q);
  const double top = std::round(integral);
  if (std::abs(integral - top) >= 0.01) throw AmbiguityError("Chern-Weil integral not integral");
  rep.topological_index = int(top);
  rep.timings["chern_weil"] = clock.lap_ms();
  fill_plateau(
      rep, sys, taus, [&](double t) { return sphere_tail_bound(q, k_max, t); },
      [&](double t) { return sphere_tail_bound(q, k_max, t) + 1e-10; });
  rep.details = {{"chern_weil_integral", round12(integral)}};
  rep.pass = rep.analytic_index == q && rep.topological_index == q &&
             rep.pair_check_violations == 0 && rep.plateau_ok;

  CommandResult r;
  r.json = rep.to_json(with_timings);
  r.text = render_report(rep, with_timings);
  r.exit_code = rep.pass ? exit_pass : exit_failed;
  r.spectrum = sys;
  return r;
}

CommandResult cmd_characteristic(const std::string& path, const std::string& which,
                                 std::optional<int> order) {
  if (which != "ahat" && which != "chern" && which != "density") {
    throw UsageError("--which must be ahat, chern or density");
  }
  const CurvatureFile file = read_curvature_file(path);
  const Curvature curv = load_curvature(file);
  const AlgebraContext& ctx = curv.context;
  const int cap = order.value_or(ctx.dim());
  if (cap < 0 || cap > ctx.dim() || cap % 2 != 0) {
    throw UsageError("--order must be even and in [0, " + std::to_string(ctx.dim()) + "]");
  }
  const Grade g(cap, ctx);

  MultiVector value(ctx, Flavor::exterior);
  if (which == "ahat") {
    value = curv.riemann ? a_hat(*curv.riemann, g).value() : FormSeries::one(ctx, g).value();
  } else if (which == "chern") {
    value = curv.twist ? chern_character(*curv.twist, g).value() : FormSeries::one(ctx, g).value();
  } else {
    value = index_density(ctx, curv.riemann, curv.twist);
  }

  ordered_json terms = ordered_json::array();
  std::vector<std::pair<Mask, Complex>> sorted(value.terms().begin(), value.terms().end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::popcount(a.first) < std::popcount(b.first);
  });
  for (const auto& [m, c] : sorted) {
    std::string blade;
    for (int mu = 0; mu < ctx.dim(); ++mu) {
      if (m & (Mask{1} << mu)) blade += (blade.empty() ? "e" : "^e") + std::to_string(mu + 1);
    }
    terms.push_back({{"blade", blade.empty() ? "1" : blade},
                     {"grade", std::popcount(m)},
                     {"re", round12(c.real())},
                     {"im", round12(c.imag())}});
  }

  CommandResult r;
  r.json = {{"name", file.name},
            {"n", file.n},
            {"which", which},
            {"order", cap},
            {"expression", format_multivector(value)},
            {"terms", std::move(terms)}};
  std::ostringstream text;
  text << (file.name.empty() ? path : file.name) << ": " << which << " (cap " << cap << ")\n";
  text << "  " << format_multivector(value) << "\n";
  if (file.normalization) {
    const Complex integral = *file.normalization * value.coefficient(ctx.top_mask());
    r.json["integral"] = {{"re", round12(integral.real())}, {"im", round12(integral.imag())}};
    text << "  integral over M: " << fmt("%.12g", integral.real());
    if (integral.imag() != 0.0) text << " + " << fmt("%.12g", integral.imag()) << "i";
    text << "\n";
  }
  r.text = text.str();
  return r;
}

CommandResult cmd_genfun(const std::vector<double>& ys, const std::vector<int>& cutoffs) {
  if (ys.empty() || cutoffs.empty()) throw UsageError("need at least one y and one cutoff");
  for (double y : ys) {
    if (!(y > 0.0) || !std::isfinite(y)) throw UsageError("y values must be positive");
  }
  for (int c : cutoffs) {
    if (c < 20) throw UsageError("cutoffs must be at least 20");
  }
  CommandResult r;
  ordered_json rows = ordered_json::array();
  std::ostringstream text;
  text << "y        cutoff  matrix element      closed form         |diff|\n";
  bool all = true;
  for (double y : ys) {
    const auto conv = qho_convergence(y, cutoffs, 1e-6);
    const double closed = a_closed_form(y);
    const double part = partition_sum(y, 100);
    ordered_json yrows = ordered_json::array();
    for (const auto& row : conv.rows) {
      yrows.push_back({{"cutoff", row.cutoff},
                       {"value", round12(row.value)},
                       {"closed_form", round12(row.closed_form)},
                       {"abs_diff", round12(row.abs_diff)},
                       {"step", round12(row.step)}});
      char buf[128];
      std::snprintf(buf, sizeof buf, "%-8g %-7d %-19.15f %-19.15f %.3e\n", y, row.cutoff,
                    row.value, row.closed_form, row.abs_diff);
      text << buf;
    }
    const bool converged = conv.rows.back().abs_diff < 1e-6;
    const bool partition_ok = std::abs(part - closed) < 1e-12;
    all = all && converged && partition_ok;
    if (conv.unresolved) text << "  warning: last cutoff step exceeds 1e-6 at y=" << y << "\n";
    text << "  partition sum (M=100) " << fmt("%.15f", part) << "  |diff| "
         << fmt("%.3e", std::abs(part - closed)) << "\n";
    rows.push_back({{"y", round12(y)},
                    {"rows", std::move(yrows)},
                    {"partition_sum", round12(part)},
                    {"partition_diff", round12(std::abs(part - closed))},
                    {"unresolved", conv.unresolved},
                    {"pass", converged && partition_ok}});
  }
  r.json = {{"cases", std::move(rows)}, {"pass", all}};
  r.text = text.str();
  r.exit_code = all ? exit_pass : exit_failed;
  return r;
}

namespace {

// a_hat of block-diagonal R with random dense 2-form blocks θ_l against the
// splitting oracle evaluated on y_l = θ_l/2π.
double ahat_block_deviation(int n, std::mt19937_64& rng) {
  const auto ctx = AlgebraContext::from_half_dim(n);
  const int dim = ctx.dim();
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<MultiVector> theta;
  for (int l = 0; l < n; ++l) {
    MultiVector t(ctx, Flavor::exterior);
    for (int a = 0; a < dim; ++a) {
      for (int b = a + 1; b < dim; ++b) {
        t.accumulate((Mask{1} << a) | (Mask{1} << b), 2.0 * std::numbers::pi * coef(rng));
      }
    }
    theta.push_back(t);
  }
  std::vector<MultiVector> entries(std::size_t(dim * dim), MultiVector(ctx, Flavor::exterior));
  std::vector<MultiVector> roots;
  for (int l = 0; l < n; ++l) {
    entries[std::size_t((2 * l) * dim + 2 * l + 1)] = theta[l];
    entries[std::size_t((2 * l + 1) * dim + 2 * l)] = -theta[l];
    roots.push_back(theta[l] * Complex(1.0 / (2.0 * std::numbers::pi)));
  }
  const auto ahat = a_hat(FormMatrix::riemann(ctx, entries), Grade(dim, ctx));
  const auto oracle = splitting_oracle(n, n).evaluate(pontryagin_from_roots(roots));
  return max_coefficient_distance(ahat.value(), oracle) / std::max(1.0, oracle.max_abs());
}

ordered_json rational_json(const Rational& r) {
  std::ostringstream s;
  s << r;
  return s.str();
}

CommandResult characteristic_suite() {
  CommandResult r;
  std::mt19937_64 rng(7001);
  bool all = true;

  // Exact coefficients of the two-root table.
  const auto table = splitting_oracle(2, 4);
  const bool exact = table.coefficient({0, 0}) == 1 && table.coefficient({1, 0}) == Rational(-1, 24) &&
                     table.coefficient({2, 0}) == Rational(7, 5760) &&
                     table.coefficient({0, 1}) == Rational(-4, 5760) && table.coefficients.size() == 4;
  ordered_json coefs = ordered_json::object();
  for (const auto& [e, c] : table.coefficients) {
    coefs["p1^" + std::to_string(e[0]) + " p2^" + std::to_string(e[1])] = rational_json(c);
  }
  all = all && exact;

  ordered_json blocks = ordered_json::array();
  for (int n = 1; n <= 4; ++n) {
    const double dev = ahat_block_deviation(n, rng);
    const bool ok = dev <= 1e-10;
    blocks.push_back({{"n", n}, {"relative_deviation", round12(dev)}, {"pass", ok}});
    all = all && ok;
  }

  // Torus flux file: Ω = −i·q·e1∧e2 on a torus of area 2π integrates to q.
  const AlgebraContext c2(2);
  const auto e12 = MultiVector::blade(c2, 0b11, 1.0);
  ordered_json torus = ordered_json::array();
  for (int q = -3; q <= 3; ++q) {
    const auto ch = chern_character(FormMatrix::twist(c2, 1, {e12 * Complex(0.0, -q)}),
                                    Grade(2, c2));
    const double integral = 2.0 * std::numbers::pi * ch.top_coefficient().real();
    const bool ok = std::abs(integral - q) < 1e-12;
    torus.push_back({{"q", q}, {"integral", round12(integral)}, {"pass", ok}});
    all = all && ok;
  }

  // ch(Ω₁ ⊕ Ω₂) = ch(Ω₁) + ch(Ω₂).
  const AlgebraContext c4(4);
  auto random_twist = [&](std::size_t k) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<MultiVector> e(k * k, MultiVector(c4, Flavor::exterior));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        MultiVector f(c4, Flavor::exterior);
        for (Mask m : {Mask(0b0011), Mask(0b0101), Mask(0b1001), Mask(0b0110), Mask(0b1010),
                       Mask(0b1100)}) {
          f.accumulate(m, Complex(u(rng), i == j ? 0.0 : u(rng)));
        }
        // anti-Hermitian: Ω = i·(Hermitian)
        e[i * k + j] = f * Complex(0.0, 1.0);
        MultiVector conj(c4, Flavor::exterior);
        for (const auto& [m, c] : f.terms()) conj.accumulate(m, std::conj(c));
        e[j * k + i] = conj * Complex(0.0, 1.0);
      }
    }
    return FormMatrix::twist(c4, k, e);
  };
  const auto w1 = random_twist(2), w2 = random_twist(3);
  const Grade cap4(4, c4);
  const double additivity = max_coefficient_distance(
      chern_character(FormMatrix::direct_sum(w1, w2), cap4).value(),
      chern_character(w1, cap4).value() + chern_character(w2, cap4).value());
  all = all && additivity <= 1e-12;

  r.json = {{"splitting_oracle_n2", {{"coefficients", std::move(coefs)}, {"exact", exact}}},
            {"ahat_vs_oracle", std::move(blocks)},
            {"torus_chern_integral", std::move(torus)},
            {"chern_direct_sum_deviation", round12(additivity)},
            {"pass", all}};
  r.exit_code = all ? exit_pass : exit_failed;
  return r;
}

CommandResult torus_suite() {
  CommandResult r;
  bool all = true;
  ordered_json cases = ordered_json::array();
  for (int N : {8, 12}) {
    for (int q = -3; q <= 3; ++q) {
      TorusOptions o;
      o.N = N;
      o.q = q;
      o.method = "heat";
      const auto c = guarded([&] { return cmd_index_torus(o); });
      cases.push_back(c.json);
      if (c.exit_code != exit_pass) {
        all = false;
        if (r.exit_code == exit_pass) r.exit_code = c.exit_code;
      }
    }
  }
  std::mt19937_64 rng(424242);
  ordered_json gauge = ordered_json::array();
  for (auto [N, q] : {std::pair{8, 2}, std::pair{12, -3}}) {
    const auto g = build_torus_gauge(N, q);
    const int base = overlap_index(build_wilson_dirac(g)).value;
    int stable = 0;
    for (int t = 0; t < 20; ++t) {
      const auto gt = random_gauge_transform(g, rng);
      const auto d = build_wilson_dirac(gt);
      if (overlap_index(d).value == base && topological_flux(gt).value == base &&
          zero_mode_asymmetry(heat_kernel_system(d)) == base) {
        ++stable;
      }
    }
    const bool ok = stable == 20;
    gauge.push_back({{"N", N}, {"q", q}, {"transforms", 20}, {"unchanged", stable}, {"pass", ok}});
    all = all && ok;
  }
  if (!all && r.exit_code == exit_pass) r.exit_code = exit_failed;
  r.json = {{"cases", std::move(cases)}, {"gauge_invariance", std::move(gauge)}, {"pass", all}};
  return r;
}

CommandResult sphere_suite() {
  CommandResult r;
  bool all = true;
  ordered_json cases = ordered_json::array();
  for (int q = -2; q <= 2; ++q) {
    const auto c = guarded([&] { return cmd_index_sphere(q, 30, default_tau_grid); });
    cases.push_back(c.json);
    if (c.exit_code != exit_pass) {
      all = false;
      if (r.exit_code == exit_pass) r.exit_code = c.exit_code;
    }
  }
  r.json = {{"cases", std::move(cases)}, {"pass", all}};
  return r;
}

CommandResult algebra_suite() {
  CommandResult r;
  bool all = true;
  ordered_json cases = ordered_json::array();
  for (int n = 1; n <= 4; ++n) {
    const auto c = guarded([&] { return cmd_algebra_check(n); });
    cases.push_back(c.json);
    if (c.exit_code != exit_pass) {
      all = false;
      if (r.exit_code == exit_pass) r.exit_code = c.exit_code;
    }
  }
  r.json = {{"cases", std::move(cases)}, {"pass", all}};
  return r;
}

}  // namespace

CommandResult cmd_verify_all() {
  CommandResult out;
  std::ostringstream text;
  const std::vector<std::pair<std::string, std::function<CommandResult()>>> sections = {
      {"algebra", algebra_suite},
      {"characteristic", characteristic_suite},
      {"torus", torus_suite},
      {"sphere", sphere_suite},
      {"genfun", [] { return cmd_genfun({0.5, 1.0, 2.0}, {20, 40, 60}); }},
  };
  for (const auto& [name, run] : sections) {
    const auto c = guarded(run);
    out.json[name] = c.json;
    text << (c.exit_code == exit_pass ? "PASS  " : "FAIL  ") << name << "\n";
    if (c.exit_code != exit_pass && out.exit_code == exit_pass) out.exit_code = c.exit_code;
  }
  out.text = text.str();
  return out;
}

}  // namespace spinindex
