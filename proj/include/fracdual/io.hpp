// Instance/result files and tabular dumps.
//
// Instance and result files are JSON with a canonical text form: keys sorted,
// two-space indentation, scalar arrays on one line, and every real written
// with 17 significant digits (always carrying a '.' or exponent), so that
// parse -> serialize reproduces the text byte for byte.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fracdual/problem.hpp"
#include "fracdual/solver.hpp"

namespace fracdual {

inline constexpr int kSchemaVersion = 1;

/// 17 significant digits, round-trip exact.
std::string format_double(double v);

std::string serialize_instance(const ProgramData& data);

/// Structural parse only. Throws kParse with the offending field named.
ProgramData parse_instance_data(std::string_view text);

/// Parse and validate; validation errors are forwarded unchanged.
FractionalProgram parse_instance(std::string_view text);

struct GeneratorOptions {
  int n = 2;
  int m = 2;
  std::uint64_t seed = 0;
  /// Weight of the random A'A term in -H = conditioning * A'A + I.
  double conditioning = 1.0;
};

/// Random instance that always passes validation. Deterministic in the seed.
ProgramData generate_instance(const GeneratorOptions& opts);

struct Timings {
  double solve_seconds = 0.0;
};

std::string serialize_result(const SolveResult& result, const SolverOptions& opts, const Timings& timings);

/// One row per grid value of mu: mu, dual optimum, certificate kind.
std::string sweep_csv(const SolveResult& result);

struct LandscapeSpec {
  double mu = 0.0;
  int varsigma_points = 20;
  int sigma_points = 20;
  /// Defaults to [-lambda, -lambda + 2 max(1, varsigma* + lambda)] around the dual maximizer.
  std::optional<std::pair<double, double>> varsigma_range;
  /// Defaults to [0, 2 max(1, sigma*)].
  std::optional<std::pair<double, double>> sigma_range;
};

/// varsigma, sigma, dual value (or "nonPD") on a rectangular grid at fixed mu.
std::string landscape_csv(const FractionalProgram& p, const LandscapeSpec& spec);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace fracdual
