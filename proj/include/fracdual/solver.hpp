#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "fracdual/canonical_dual.hpp"
#include "fracdual/problem.hpp"

namespace fracdual {

struct SolverOptions {
  /// Number of uniform mu samples on [mu0, 1/delta].
  int grid = 64;
  /// Iteration cap for each dual maximization.
  int max_iter = 500;
  /// Projected-gradient tolerance, relative to 1 + |value|.
  double tol_grad = 1e-8;
  /// Duality-gap tolerance, relative to 1 + |primal value|.
  double tol_gap = 1e-6;
  /// |xi - varsigma| tolerance, relative to 1 + |varsigma|.
  double tol_stationarity = 1e-6;
  /// Absolute tolerance on h(x) - 1/mu.
  double tol_feasibility = 1e-6;
  /// Golden-section refinement rounds around the best grid point.
  int refine_rounds = 3;
  /// Recorded for reproducibility; the solver itself is deterministic.
  std::uint64_t seed = 0;
  /// Worker threads for the mu grid.
  int threads = 1;
};

enum class DualStatus {
  kInteriorCritical,
  kBoundarySigmaZero,
  kBoxBoundaryVarsigma,
  kNearPDBoundary,
  kMaxIterations,
};

enum class CertificateKind { kPerfect, kWeakOnly, kNone };

std::string_view to_string(DualStatus s);
std::string_view to_string(CertificateKind k);

struct DualSolution {
  DualPoint d_star;
  double value = 0.0;
  /// Norm of the box-projected gradient at d_star.
  double grad_norm = 0.0;
  DualStatus status = DualStatus::kMaxIterations;
  int iterations = 0;
  double min_pivot = 0.0;
  /// Dual value at every accepted iterate, starting point first.
  std::vector<double> value_trace;
};

struct Certificate {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  /// |xi(x_mu) - varsigma|
  double stationarity_xi = 0.0;
  /// h(x_mu) - 1/mu
  double feasibility_residual = 0.0;
  CertificateKind kind = CertificateKind::kNone;
};

struct MuSample {
  double mu = 0.0;
  /// Dual optimum at mu; NaN when no starting point exists.
  double dual_optimum = 0.0;
  CertificateKind kind = CertificateKind::kNone;
  DualStatus status = DualStatus::kMaxIterations;
  /// P0 at the recovered primal point; +inf when that point is infeasible.
  double p0_value = 0.0;
  bool solved = false;
};

struct SolveResult {
  Vector x_star;
  double mu_star = 0.0;
  DualPoint d_star;
  DualStatus dual_status = DualStatus::kMaxIterations;
  double P0_value = 0.0;
  /// Dual optimum at mu_star.
  double best_dual_value = 0.0;
  Certificate certificate;
  /// One entry per grid point, increasing mu.
  std::vector<MuSample> mu_profile;
  /// Number of subproblems solved during refinement.
  int refinement_evaluations = 0;
  /// Grid and refinement subproblems, and how many of them were Perfect.
  /// certificate.kind is Perfect only when all of them were.
  int evaluated_subproblems = 0;
  int certified_subproblems = 0;

  double perfect_coverage() const {
    return evaluated_subproblems > 0 ? static_cast<double>(certified_subproblems) / evaluated_subproblems : 0.0;
  }
};

/// Maximizes the dual over S+ at fixed mu by projected Newton ascent.
/// Throws kNoStartingPoint when the starting-point scan finds no PD point.
DualSolution maximize_dual(const FractionalProgram& p, double mu, const SolverOptions& opts = {});

/// Recovers x_mu from the dual solution and checks the zero-gap conditions.
Certificate certify(const FractionalProgram& p, double mu, const DualSolution& sol,
                    const SolverOptions& opts = {});

/// Sweeps mu, certifies each subproblem and returns the best point found.
/// When every subproblem is Perfect the best Perfect point is returned with a
/// Perfect certificate; otherwise the lowest feasible P0 wins and the result
/// is at most WeakOnly.
/// Throws kAllSubproblemsFailed when no mu admits a dual starting point.
SolveResult solve(const FractionalProgram& p, const SolverOptions& opts = {});

/// First PD point of the starting-point scan, if any.
std::optional<DualPoint> find_starting_point(const FractionalProgram& p, double mu);

/// Scale used by the starting-point scan; sigma = start_scale makes G PD at varsigma = 0.
double start_scale(const FractionalProgram& p);

// Existence probes ---------------------------------------------------------

struct RayProbe {
  /// Ray parameters (distance along the ray, or distance to the boundary).
  std::vector<double> t;
  std::vector<double> value;
  /// Least-squares slope of the fitted model (see each probe).
  double slope = 0.0;
  /// Dual value decreases without bound along the ray.
  bool diverges_to_minus_infinity = false;
  bool evaluated = false;
};

struct ExistenceDiagnostics {
  double mu = 0.0;
  DualPoint base;
  /// varsigma -> inf at fixed sigma; slope of value vs varsigma^2.
  RayProbe varsigma_ray;
  /// sigma -> inf at fixed varsigma; slope of value vs sigma.
  RayProbe sigma_ray;
  /// Approach to the singular surface det G = 0 by decreasing sigma and
  /// varsigma; slope of value vs log(distance to the surface).
  RayProbe boundary_ray;
  /// Both the infinity probe and (when reachable) the boundary probe diverge.
  bool coercive = false;
};

/// Samples rays inside S+ and reports whether the dual value trends to
/// -inf toward the singular surface and at infinity. Advisory only.
ExistenceDiagnostics existence_probe(const FractionalProgram& p, double mu);

}  // namespace fracdual
