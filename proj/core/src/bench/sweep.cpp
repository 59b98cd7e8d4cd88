#include "mclsquad/bench/sweep.hpp"

#include "mclsquad/adaptive.hpp"
#include "mclsquad/estimators.hpp"
#include "mclsquad/sampling.hpp"
#include "mclsquad/sparsegrid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace mclsquad::bench {

namespace {

using Clock = std::chrono::steady_clock;

SampleBatch prefix(const SampleBatch& b, std::size_t n) {
  SampleBatch p;
  const auto nn = static_cast<Eigen::Index>(n);
  p.points = b.points.topRows(nn);
  p.fvals = b.fvals.head(nn);
  if (b.weights) p.weights = b.weights->head(nn);
  p.rng = b.rng;
  p.scheme = b.scheme;
  p.domain = b.domain;
  return p;
}

SweepRow make_row(const std::string& method, const TestProblem& problem, std::size_t n,
                  std::uint64_t seed, const EstimateReport& r) {
  SweepRow row;
  row.method = method;
  row.problem = problem.integrand.name;
  row.dim = problem.integrand.dim();
  row.n = n;
  row.seed = seed;
  row.estimate = r.estimate;
  row.ci_half = r.ci_half_width;
  row.sigma2 = r.sigma2;
  row.kappa = r.kappa;
  row.degree = r.degree;
  row.level = r.level;
  return row;
}

class Runner {
 public:
  Runner(const TestProblem& problem, const SweepConfig& cfg, SweepResult& out)
      : problem_(problem), f_(problem.integrand), cfg_(cfg), out_(out) {}

  void run(const std::string& method) {
    for (std::size_t s = 0; s < cfg_.seeds; ++s) {
      const std::uint64_t seed = cfg_.seed0 + s;
      const RngSpec rng{seed, 0};
      if (method == "mc" || method == "qmc" || method == "mcls" || method == "qmcls" ||
          method == "wmcls") {
        streaming(method, seed, rng);
      } else {
        for (std::size_t n : cfg_.n_grid) {
          cell(method, n, seed, [&] { return single(method, n, rng); });
        }
      }
    }
  }

 private:
  // Records one cell; fn returns the report.
  template <typename Fn>
  void cell(const std::string& method, std::size_t n, std::uint64_t seed, Fn&& fn) {
    const auto t0 = Clock::now();
    try {
      const EstimateReport r = fn();
      SweepRow row = make_row(method, problem_, n, seed, r);
      if (cfg_.timing) {
        row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      }
      out_.rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      out_.failures.push_back({method, n, seed, e.what()});
    }
  }

  IndexSet fixed_iset() const { return multi_index_set(f_.dim(), cfg_.degree, cfg_.kind); }

  void streaming(const std::string& method, std::uint64_t seed, RngSpec rng) {
    const std::size_t n_max = cfg_.n_grid.back();
    std::shared_ptr<SampleBatch> batch;
    std::unique_ptr<LsAccumulator> acc;
    std::optional<IndexSet> iset;
    const bool ls = method == "mcls" || method == "qmcls" || method == "wmcls";
    try {
      if (ls) iset = fixed_iset();
      if (method == "mc" || method == "mcls") {
        batch = std::make_shared<SampleBatch>(uniform_batch(f_, n_max, rng));
      } else if (method == "qmc" || method == "qmcls") {
        batch = std::make_shared<SampleBatch>(halton_batch(f_, n_max, rng));
      } else {
        batch = std::make_shared<SampleBatch>(christoffel_batch(f_, *iset, n_max, rng));
      }
      if (ls && iset->size() > 1) {
        acc = std::make_unique<LsAccumulator>(*batch, *iset, method == "wmcls");
      }
    } catch (const std::exception& e) {
      for (std::size_t n : cfg_.n_grid) out_.failures.push_back({method, n, seed, e.what()});
      return;
    }
    for (std::size_t n : cfg_.n_grid) {
      cell(method, n, seed, [&] {
        EstimateReport r;
        if (acc) {
          if (n <= iset->size()) {
            throw std::invalid_argument("need N > n+1 samples");
          }
          acc->extend_to(n);
          r = acc->fit().report;
        } else if (ls) {
          SampleBatch p = prefix(*batch, n);
          p.weights.reset();
          r = mcls_estimate(p, *iset).report;
        } else {
          r = mc_estimate(prefix(*batch, n));
        }
        r.method = method;
        return r;
      });
    }
  }

  const SparseGridInterpolant& grid(int level) {
    auto it = grids_.find(level);
    if (it == grids_.end()) it = grids_.emplace(level, sg_build(f_, level, cfg_.sg_basis)).first;
    return it->second;
  }

  EstimateReport single(const std::string& method, std::size_t n, RngSpec rng) {
    if (method == "mclsa") {
      MclsaOptions opts;
      opts.kind = cfg_.kind;
      opts.ratio = cfg_.ratio;
      opts.max_basis = cfg_.max_basis;
      return mclsa_run(f_, n, opts, rng);
    }
    if (method == "sgmcls") {
      if (cfg_.level) return sg_mclsa_run(f_, grid(*cfg_.level), n, rng);
      const BudgetSplit split = split_budget(f_.dim(), n, cfg_.sg_fraction);
      return sg_mclsa_run(f_, grid(split.level), split.n_reg, rng);
    }
    if (method == "strat") {
      std::vector<std::size_t> cells(f_.dim(), 1);
      for (std::size_t m = 0; m < std::min(cfg_.strata_dims, f_.dim()); ++m) cells[m] = cfg_.strata;
      std::size_t count = 1;
      for (auto c : cells) count *= c;
      const auto part = StratumPartition::grid(f_.domain, cells, n / count);
      return stratified_mcls(f_, part, fixed_iset(), rng);
    }
    if (method == "anti") {
      return antithetic_mcls(f_, fixed_iset(), n / 2, rng);
    }
    throw std::invalid_argument("unknown method '" + method + "'");
  }

  const TestProblem& problem_;
  const Integrand& f_;
  const SweepConfig& cfg_;
  SweepResult& out_;
  std::map<int, SparseGridInterpolant> grids_;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const std::vector<std::string>& sweep_methods() {
  static const std::vector<std::string> m = {"mc",     "mcls", "wmcls", "mclsa", "sgmcls",
                                             "qmc",    "qmcls", "strat", "anti"};
  return m;
}

SweepResult convergence_sweep(const TestProblem& problem, const SweepConfig& config) {
  SweepResult out;
  if (config.n_grid.empty()) return out;
  if (!std::is_sorted(config.n_grid.begin(), config.n_grid.end())) {
    throw std::invalid_argument("convergence_sweep: N grid must be ascending");
  }
  for (const auto& m : config.methods) {
    const auto& known = sweep_methods();
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw std::invalid_argument("convergence_sweep: unknown method '" + m + "'");
    }
  }
  Runner runner(problem, config, out);
  for (const auto& m : config.methods) runner.run(m);
  return out;
}

double fit_loglog_slope(const SweepResult& result, SweepField field, const std::string& method,
                        std::optional<double> true_value, std::vector<std::string>* warnings) {
  if (field == SweepField::abs_error && !true_value) {
    throw std::invalid_argument("fit_loglog_slope: abs_error needs the true value");
  }
  std::map<std::size_t, std::vector<double>> by_n;
  std::size_t skipped = 0;
  for (const auto& r : result.rows) {
    if (!method.empty() && r.method != method) continue;
    double v = 0.0;
    switch (field) {
      case SweepField::estimate: v = r.estimate; break;
      case SweepField::ci_half: v = r.ci_half; break;
      case SweepField::sigma2: v = r.sigma2; break;
      case SweepField::kappa: v = r.kappa; break;
      case SweepField::abs_error: v = std::abs(r.estimate - *true_value); break;
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      ++skipped;
      continue;
    }
    by_n[r.n].push_back(v);
  }
  if (skipped > 0 && warnings) {
    warnings->push_back("fit_loglog_slope: skipped " + std::to_string(skipped) +
                        " non-positive or non-finite values");
  }
  if (by_n.size() < 3) throw std::invalid_argument("fit_loglog_slope: need at least 3 distinct N");
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [n, vals] : by_n) {
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(median(vals)));
  }
  const double k = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::vector<std::size_t> parse_n_grid(const std::string& spec) {
  auto to_size = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad N value '" + s + "'");
    }
    if (pos != s.size() || !(v >= 1.0) || v != std::floor(v) || v > 1e15) {
      throw std::invalid_argument("bad N value '" + s + "'");
    }
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> out;
  if (spec.rfind("log:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(4));
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw std::invalid_argument("N grid must be log:a:b:count");
    const double a = static_cast<double>(to_size(parts[0]));
    const double b = static_cast<double>(to_size(parts[1]));
    const std::size_t count = to_size(parts[2]);
    if (b < a) throw std::invalid_argument("N grid log:a:b:count needs a <= b");
    for (std::size_t k = 0; k < count; ++k) {
      const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
      out.push_back(static_cast<std::size_t>(std::llround(a * std::pow(b / a, t))));
    }
  } else {
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(to_size(item));
    if (out.empty()) throw std::invalid_argument("empty N grid");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace mclsquad::bench
