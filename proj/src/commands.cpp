#include "fracdual/commands.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fracdual/oracle.hpp"

namespace fracdual {

namespace {

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace

int cmd_solve(const SolveCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const FractionalProgram p = parse_instance(read_file(cmd.instance_path));
    const auto start = std::chrono::steady_clock::now();
    const SolveResult result = solve(p, cmd.options);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    emit(cmd.output_path, serialize_result(result, cmd.options, {elapsed.count()}), out);
    const bool to_stdout = cmd.output_path.empty() || cmd.output_path == "-";
    fmt::print(to_stdout ? err : out, "P0 = {} at mu = {} ({})\n", format_double(result.P0_value),
               format_double(result.mu_star), to_string(result.certificate.kind));
    return result.certificate.kind == CertificateKind::kPerfect ? kExitCertified : kExitUncertified;
  });
}

bool verify_agrees(double solver_value, double oracle_value) {
  return std::abs(solver_value - oracle_value) <= std::max(1e-4, 1e-3 * std::abs(oracle_value));
}

int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const FractionalProgram p = parse_instance(read_file(cmd.instance_path));
    if (p.n() > kOracleMaxDimension) {
      throw Error(ErrorCode::kDimensionTooLarge,
                  fmt::format("verify supports n <= {}, instance has n = {}", kOracleMaxDimension, p.n()));
    }
    const SolveResult result = solve(p, cmd.options);
    const double resolution = cmd.resolution.value_or(default_resolution(p.n()));
    const OracleReport oracle = grid_minimize_P0(p, resolution, cmd.seed);

    const double discrepancy = result.P0_value - oracle.min_value;
    const double distance = (result.x_star - oracle.argmin).norm();
    const bool agree = verify_agrees(result.P0_value, oracle.min_value);
    fmt::print(out, "solver P0      {}\n", format_double(result.P0_value));
    fmt::print(out, "oracle min     {}\n", format_double(oracle.min_value));
    fmt::print(out, "discrepancy    {}\n", format_double(discrepancy));
    fmt::print(out, "argmin dist    {}\n", format_double(distance));
    fmt::print(out, "certificate    {}\n", to_string(result.certificate.kind));
    fmt::print(out, "oracle evals   {} at resolution {}\n", oracle.n_evals, format_double(resolution));
    fmt::print(out, "{}\n", agree ? "AGREE" : "DISAGREE");
    return agree ? kExitCertified : kExitUncertified;
  });
}

int cmd_gen(const GenCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ProgramData data = generate_instance(cmd.generator);
    FractionalProgram::validate(data);
    emit(cmd.output_path, serialize_instance(data), out);
    return kExitCertified;
  });
}

int cmd_sweep(const SweepCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const FractionalProgram p = parse_instance(read_file(cmd.instance_path));
    if (cmd.at_mu && cmd.landscape_varsigma > 0 && cmd.landscape_sigma > 0) {
      if (!mu_in_range(p, *cmd.at_mu)) {
        throw Error(ErrorCode::kMuOutOfRange, fmt::format("--at-mu {} outside [{}, {}]", *cmd.at_mu,
                                                          p.mu0(), p.mu_max()));
      }
      LandscapeSpec spec;
      spec.mu = *cmd.at_mu;
      spec.varsigma_points = cmd.landscape_varsigma;
      spec.sigma_points = cmd.landscape_sigma;
      emit(cmd.output_path, landscape_csv(p, spec), out);
      return kExitCertified;
    }
    SolverOptions opts = cmd.options;
    opts.refine_rounds = 0;
    emit(cmd.output_path, sweep_csv(solve(p, opts)), out);
    return kExitCertified;
  });
}

}  // namespace fracdual
