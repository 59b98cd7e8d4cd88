#pragma once

#include "mclsquad/bench/sweep.hpp"

#include <iosfwd>
#include <string>

namespace mclsquad::bench {

inline constexpr const char* kCsvHeader =
    "method,problem,dim,N,seed,estimate,ci_half,sigma2,kappa,degree,level,wall_ms";

/// Doubles use the shortest representation that round-trips.
void write_csv(std::ostream& out, const SweepResult& result);

/// Inverse of write_csv. Throws std::runtime_error on malformed input.
SweepResult read_csv(std::istream& in);

/// gnuplot script plotting ci_half against N on log axes, one series per
/// method, reading csv_path.
void write_gnuplot(std::ostream& out, const std::string& csv_path, const SweepResult& result);

}  // namespace mclsquad::bench
