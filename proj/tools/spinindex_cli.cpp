// spinindex: command-line front end for the index verification suite.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinindex/report.hpp"

using namespace spinindex;

namespace {

int emit(const CommandResult& r, const std::string& format, const std::string& output,
         const std::string& csv) {
  if (!csv.empty() && r.spectrum) {
    std::ofstream f(csv);
    if (!f) {
      std::cerr << "cannot write " << csv << "\n";
      return exit_input;
    }
    write_spectrum_csv(f, *r.spectrum);
  }
  const std::string body = format == "json" ? r.json.dump(2) + "\n" : r.text;
  if (output.empty()) {
    (r.json.contains("error") && format != "json" ? std::cerr : std::cout) << body;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << output << "\n";
      return exit_input;
    }
    f << body;
    if (format != "json" || r.json.contains("error")) std::cerr << r.text;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of the index theorem for twisted Dirac operators"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "text";
  std::string output;
  std::string csv;
  bool timings = false;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("-o,--output", output, "Write the report to a file instead of stdout");

  int alg_n = 2;
  auto* alg = app.add_subcommand("algebra-check", "Clifford/exterior algebra property suite");
  alg->add_option("--n", alg_n, "Half dimension n (1..4)");

  TorusOptions torus;
  auto* tor = app.add_subcommand("index-torus", "Index of the Wilson/overlap operator on the torus");
  tor->add_option("--N", torus.N, "Lattice extent");
  tor->add_option("--q", torus.q, "Flux quantum");
  tor->add_option("--method", torus.method, "overlap or heat");
  tor->add_option("--tau", torus.taus, "Heat-kernel times, comma separated")->delimiter(',');
  tor->add_option("--mass", torus.mass, "Wilson mass m");
  tor->add_option("--csv", csv, "Export the spectrum as CSV");
  tor->add_flag("--timings", timings, "Include stage timings in JSON");

  int sq = 2, kmax = 30;
  std::vector<double> stau = default_tau_grid;
  auto* sph = app.add_subcommand("index-sphere", "Witten index of the monopole sphere fixture");
  sph->add_option("--q", sq, "Monopole charge");
  sph->add_option("--kmax", kmax, "Highest level kept");
  sph->add_option("--tau", stau, "Heat-kernel times, comma separated")->delimiter(',');
  sph->add_option("--csv", csv, "Export the spectrum as CSV");
  sph->add_flag("--timings", timings, "Include stage timings in JSON");

  std::string file, which = "density";
  std::optional<int> order;
  auto* chr = app.add_subcommand("characteristic", "Characteristic forms from a curvature file");
  chr->add_option("--file", file, "Curvature JSON file")->required();
  chr->add_option("--which", which, "ahat, chern or density");
  chr->add_option("--order", order, "Form-degree cap (default 2n)");

  std::vector<double> ys = {1.0};
  std::vector<int> cutoffs = {20, 40, 60};
  auto* gen = app.add_subcommand("genfun", "Oscillator matrix element against (y/2)/sinh(y/2)");
  gen->add_option("--y", ys, "Values of y, comma separated")->delimiter(',');
  gen->add_option("--cutoff", cutoffs, "Basis cutoffs, comma separated")->delimiter(',');

  auto* all = app.add_subcommand("verify-all", "Run every verification and emit one report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  CommandResult r;
  if (alg->parsed()) {
    r = guarded([&] { return cmd_algebra_check(alg_n); });
  } else if (tor->parsed()) {
    torus.with_timings = timings;
    r = guarded([&] { return cmd_index_torus(torus); });
  } else if (sph->parsed()) {
    r = guarded([&] { return cmd_index_sphere(sq, kmax, stau, timings); });
  } else if (chr->parsed()) {
    r = guarded([&] { return cmd_characteristic(file, which, order); });
  } else if (gen->parsed()) {
    r = guarded([&] { return cmd_genfun(ys, cutoffs); });
  } else if (all->parsed()) {
    r = guarded([] { return cmd_verify_all(); });
  }
  return emit(r, format, output, csv);
}
