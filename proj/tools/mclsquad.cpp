// mclsquad: convergence sweeps for the MC / MCLS family of integrators.

#include "mclsquad/bench/csv.hpp"
#include "mclsquad/bench/problems.hpp"
#include "mclsquad/bench/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace mclsquad;
using namespace mclsquad::bench;

struct RunArgs {
  std::string problem;
  std::size_t dim = 1;
  std::vector<std::string> methods;
  int degree = 2;
  std::string degree_kind = "total";
  int level = 0;
  std::string n_spec;
  std::size_t seeds = 1;
  std::uint64_t seed0 = 0;
  std::string split = "1:1";
  std::string sg_basis = "hat";
  double ratio = 10.0;
  std::size_t max_basis = 1000;
  std::size_t strata = 2;
  std::size_t strata_dims = 1;
  std::string out;
  std::string gnuplot;
  bool timing = false;
};

double parse_split(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("--split must look like Ns:N");
  const double a = std::stod(s.substr(0, colon));
  const double b = std::stod(s.substr(colon + 1));
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("--split parts must be positive");
  return a / (a + b);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void print_summary(std::ostream& os, const SweepResult& res, double truth) {
  std::map<std::pair<std::string, std::size_t>, std::vector<const SweepRow*>> cells;
  std::vector<std::string> order;
  for (const auto& r : res.rows) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
    cells[{r.method, r.n}].push_back(&r);
  }
  os << std::left << std::setw(8) << "method" << std::right << std::setw(10) << "N"
     << std::setw(8) << "seeds" << std::setw(14) << "median_ci" << std::setw(14)
     << "median_err" << std::setw(10) << "kappa" << '\n';
  for (const auto& m : order) {
    for (const auto& [key, rows] : cells) {
      if (key.first != m) continue;
      std::vector<double> ci, err, kap;
      for (const auto* r : rows) {
        ci.push_back(r->ci_half);
        err.push_back(std::abs(r->estimate - truth));
        kap.push_back(r->kappa);
      }
      os << std::left << std::setw(8) << m << std::right << std::setw(10) << key.second
         << std::setw(8) << rows.size() << std::setw(14) << std::setprecision(4)
         << median(ci) << std::setw(14) << median(err) << std::setw(10) << median(kap) << '\n';
    }
  }
}

int run(const RunArgs& a) {
  SweepConfig cfg;
  std::optional<TestProblem> problem;
  try {
    problem = standard_problems().get(a.problem, a.dim);
    cfg.methods = a.methods;
    cfg.n_grid = parse_n_grid(a.n_spec);
    cfg.seeds = a.seeds;
    cfg.seed0 = a.seed0;
    cfg.degree = a.degree;
    cfg.kind = parse_degree_kind(a.degree_kind);
    if (a.level > 0) cfg.level = a.level;
    cfg.sg_fraction = parse_split(a.split);
    cfg.sg_basis = parse_sg_basis(a.sg_basis);
    cfg.ratio = a.ratio;
    cfg.max_basis = a.max_basis;
    cfg.strata = a.strata;
    cfg.strata_dims = a.strata_dims;
    cfg.timing = a.timing;
    if (cfg.seeds == 0) throw std::invalid_argument("--seeds must be positive");
  } catch (const std::exception& e) {
    std::cerr << "mclsquad: " << e.what() << '\n';
    return 1;
  }

  const SweepResult res = convergence_sweep(*problem, cfg);

  if (a.out.empty()) {
    write_csv(std::cout, res);
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) {
      std::cerr << "mclsquad: cannot open " << a.out << '\n';
      return 1;
    }
    write_csv(f, res);
  }
  if (!a.gnuplot.empty()) {
    std::ofstream g(a.gnuplot);
    if (!g) {
      std::cerr << "mclsquad: cannot open " << a.gnuplot << '\n';
      return 1;
    }
    write_gnuplot(g, a.out.empty() ? "sweep.csv" : a.out, res);
  }
  std::ostream& summary = a.out.empty() ? std::cerr : std::cout;
  print_summary(summary, res, problem->true_value);

  for (const auto& f : res.failures) {
    std::cerr << "mclsquad: cell " << f.method << " N=" << f.n << " seed=" << f.seed
              << " failed: " << f.message << '\n';
  }
  return res.failures.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo least-squares integration sweeps"};
  app.require_subcommand(1);

  RunArgs a;
  auto* run_cmd = app.add_subcommand("run", "Run a convergence sweep and write CSV");
  run_cmd->add_option("--problem", a.problem, "runge1d | genz1 | genz5 | basket")->required();
  run_cmd->add_option("--dim", a.dim, "Dimension")->check(CLI::Range(1, 64));
  run_cmd->add_option("--method", a.methods, "mc|mcls|wmcls|mclsa|sgmcls|qmc|qmcls|strat|anti")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember(sweep_methods()));
  run_cmd->add_option("--degree", a.degree, "Fixed polynomial degree")->check(CLI::Range(0, 1000));
  run_cmd->add_option("--degree-kind", a.degree_kind, "total | euclidean | max")
      ->check(CLI::IsMember({"total", "euclidean", "max"}));
  run_cmd->add_option("--level", a.level, "Sparse-grid level (default: from --split)")
      ->check(CLI::Range(1, 30));
  run_cmd->add_option("--N", a.n_spec, "Sample sizes: a,b,c or log:a:b:count")->required();
  run_cmd->add_option("--seeds", a.seeds, "Replicates per N");
  run_cmd->add_option("--seed0", a.seed0, "First seed");
  run_cmd->add_option("--split", a.split, "Sparse-grid nodes : regression samples");
  run_cmd->add_option("--sg-basis", a.sg_basis, "Sparse-grid basis: hat | modified")
      ->check(CLI::IsMember({"hat", "modified"}));
  run_cmd->add_option("--ratio", a.ratio, "Samples per basis function for mclsa")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-basis", a.max_basis, "Cap on basis size for mclsa");
  run_cmd->add_option("--strata", a.strata, "Cells per split dimension")->check(CLI::Range(1, 1000));
  run_cmd->add_option("--strata-dims", a.strata_dims, "Number of leading dimensions to split");
  run_cmd->add_option("--out", a.out, "CSV output path (default stdout)");
  run_cmd->add_option("--gnuplot", a.gnuplot, "Write a gnuplot script");
  run_cmd->add_flag("--timing", a.timing, "Record wall_ms (output is then not reproducible)");

  auto* list_cmd = app.add_subcommand("problems", "List registered test problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& n : standard_problems().names()) std::cout << n << '\n';
      return 0;
    }
    return run(a);
  } catch (const std::exception& e) {
    std::cerr << "mclsquad: " << e.what() << '\n';
    return 1;
  }
}
