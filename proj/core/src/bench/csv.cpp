#include "mclsquad/bench/csv.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace mclsquad::bench {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse(const std::string& s, std::size_t line) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad field '" + s + "'");
  }
  return v;
}

void check_name(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw std::invalid_argument("csv: name '" + s + "' contains a separator");
  }
}

}  // namespace

void write_csv(std::ostream& out, const SweepResult& result) {
  out << kCsvHeader << '\n';
  for (const auto& r : result.rows) {
    check_name(r.method);
    check_name(r.problem);
    out << r.method << ',' << r.problem << ',' << r.dim << ',' << r.n << ',' << r.seed << ','
        << fmt(r.estimate) << ',' << fmt(r.ci_half) << ',' << fmt(r.sigma2) << ','
        << fmt(r.kappa) << ',' << r.degree << ',' << r.level << ',' << fmt(r.wall_ms) << '\n';
  }
}

SweepResult read_csv(std::istream& in) {
  SweepResult result;
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("csv: missing or unexpected header");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
    if (f.size() != 12) {
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 12 fields");
    }
    SweepRow r;
    r.method = f[0];
    r.problem = f[1];
    r.dim = parse<std::size_t>(f[2], lineno);
    r.n = parse<std::size_t>(f[3], lineno);
    r.seed = parse<std::uint64_t>(f[4], lineno);
    r.estimate = parse<double>(f[5], lineno);
    r.ci_half = parse<double>(f[6], lineno);
    r.sigma2 = parse<double>(f[7], lineno);
    r.kappa = parse<double>(f[8], lineno);
    r.degree = parse<int>(f[9], lineno);
    r.level = parse<int>(f[10], lineno);
    r.wall_ms = parse<double>(f[11], lineno);
    result.rows.push_back(std::move(r));
  }
  return result;
}

void write_gnuplot(std::ostream& out, const std::string& csv_path, const SweepResult& result) {
  std::vector<std::string> methods;
  for (const auto& r : result.rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  out << "set datafile separator ','\n"
      << "set logscale xy\n"
      << "set xlabel 'N'\n"
      << "set ylabel 'CI half-width'\n"
      << "set key left bottom\n";
  if (methods.empty()) {
    out << "# no rows\n";
    return;
  }
  out << "plot ";
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i) out << ", \\\n     ";
    out << "'" << csv_path << "' using (strcol(1) eq '" << methods[i]
        << "' ? $4 : 1/0):7 with points title '" << methods[i] << "'";
  }
  out << '\n';
}

}  // namespace mclsquad::bench
