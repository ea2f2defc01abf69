// Command implementations behind the `fracdual` executable. Each returns the
// process exit code; errors are reported on `err` and map to exit code 2.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "fracdual/io.hpp"
#include "fracdual/solver.hpp"

namespace fracdual {

inline constexpr int kExitCertified = 0;
inline constexpr int kExitUncertified = 1;
inline constexpr int kExitError = 2;

struct SolveCommand {
  std::string instance_path;
  /// "-" or empty writes the result file to `out`.
  std::string output_path;
  SolverOptions options;
};

/// 0 on a Perfect certificate, 1 on WeakOnly/None (result still written), 2 on errors.
int cmd_solve(const SolveCommand& cmd, std::ostream& out, std::ostream& err);

struct VerifyCommand {
  std::string instance_path;
  SolverOptions options;
  /// Grid resolution of the oracle; default_resolution(n) when unset.
  std::optional<double> resolution;
  std::uint64_t seed = 0;
};

/// |solver P0 - oracle min| <= max(1e-4, 1e-3 |oracle min|).
bool verify_agrees(double solver_value, double oracle_value);

/// 0 when solver and oracle agree, 1 when they do not, 2 on errors (including n > 3).
int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err);

struct GenCommand {
  GeneratorOptions generator;
  std::string output_path;
};

int cmd_gen(const GenCommand& cmd, std::ostream& out, std::ostream& err);

struct SweepCommand {
  std::string instance_path;
  std::string output_path;
  SolverOptions options;
  /// When set together with a landscape size, dumps the dual landscape at this mu.
  std::optional<double> at_mu;
  int landscape_varsigma = 0;
  int landscape_sigma = 0;
};

int cmd_sweep(const SweepCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace fracdual
