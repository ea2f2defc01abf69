#include "fracdual/solver.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

namespace fracdual {

std::string_view to_string(DualStatus s) {
  switch (s) {
    case DualStatus::kInteriorCritical: return "InteriorCritical";
    case DualStatus::kBoundarySigmaZero: return "BoundarySigmaZero";
    case DualStatus::kBoxBoundaryVarsigma: return "BoxBoundaryVarsigma";
    case DualStatus::kNearPDBoundary: return "NearPDBoundary";
    case DualStatus::kMaxIterations: return "MaxIterations";
  }
  return "Unknown";
}

std::string_view to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::kPerfect: return "Perfect";
    case CertificateKind::kWeakOnly: return "WeakOnly";
    case CertificateKind::kNone: return "None";
  }
  return "Unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_mu0(const FractionalProgram& p, double mu) { return mu <= p.mu0() * (1.0 + 1e-12); }

struct BoxProjection {
  Eigen::Vector2d lower;

  Eigen::Vector2d operator()(Eigen::Vector2d v) const { return v.cwiseMax(lower); }

  // Gradient with components that push against an active lower bound removed.
  Eigen::Vector2d projected_gradient(const Eigen::Vector2d& point, const Eigen::Vector2d& grad) const {
    Eigen::Vector2d pg = grad;
    for (int i = 0; i < 2; ++i) {
      if (point[i] <= lower[i] && grad[i] < 0.0) pg[i] = 0.0;
    }
    return pg;
  }
};

Eigen::Vector2d coords(const DualPoint& d) { return {d.varsigma, d.sigma}; }
Eigen::Vector2d gradient(const DualEvaluation& ev) { return {ev.grad_varsigma, ev.grad_sigma}; }

// Ascent direction from the damped Newton model on the free variables.
Eigen::Vector2d newton_direction(const Eigen::Matrix2d& hess, const Eigen::Vector2d& grad,
                                 const std::array<bool, 2>& free) {
  Eigen::Vector2d dir = Eigen::Vector2d::Zero();
  std::vector<int> idx;
  for (int i = 0; i < 2; ++i)
    if (free[i]) idx.push_back(i);
  if (idx.empty()) return dir;

  const int k = static_cast<int>(idx.size());
  Eigen::MatrixXd hf(k, k);
  Eigen::VectorXd gf(k);
  for (int r = 0; r < k; ++r) {
    gf[r] = grad[idx[r]];
    for (int c = 0; c < k; ++c) hf(r, c) = hess(idx[r], idx[c]);
  }
  // Levenberg shift keeps the model strictly concave.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hf, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  const double floor = 1e-10 * (1.0 + hf.cwiseAbs().maxCoeff());
  const double shift = std::max(0.0, top + floor);
  const Eigen::MatrixXd damped = hf - shift * Eigen::MatrixXd::Identity(k, k);
  const Eigen::VectorXd step = damped.ldlt().solve(-gf);
  for (int r = 0; r < k; ++r) dir[idx[r]] = step[r];
  if (!dir.allFinite()) dir.setZero();
  return dir;
}

struct Candidate {
  double mu = 0.0;
  bool solved = false;
  DualSolution sol;
  Certificate cert;
  Vector x;
  double p0 = kInf;
};

int kind_rank(CertificateKind k) {
  switch (k) {
    case CertificateKind::kPerfect: return 0;
    case CertificateKind::kWeakOnly: return 1;
    case CertificateKind::kNone: return 2;
  }
  return 3;
}

// With kind_first, certificate kind decides before P0. Otherwise any feasible
// point competes on P0 alone. Near-ties go to the stronger kind, then smaller mu.
bool better(const Candidate& a, const Candidate& b, bool kind_first) {
  if (a.solved != b.solved) return a.solved;
  const int ra = kind_rank(a.cert.kind), rb = kind_rank(b.cert.kind);
  if (kind_first && ra != rb) return ra < rb;
  const bool fa = std::isfinite(a.p0), fb = std::isfinite(b.p0);
  if (fa != fb) return fa;
  if (fa && std::abs(a.p0 - b.p0) > 1e-12 * (1.0 + std::abs(a.p0))) return a.p0 < b.p0;
  if (ra != rb) return ra < rb;
  return a.mu < b.mu;
}

Candidate evaluate_mu(const FractionalProgram& p, double mu, const SolverOptions& opts) {
  Candidate c;
  c.mu = mu;
  try {
    c.sol = maximize_dual(p, mu, opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoStartingPoint) throw;
    if (!is_mu0(p, mu)) return c;
    c.sol.d_star = {mu, canonical_measure(p, p.center()), 0.0};
    c.sol.status = DualStatus::kMaxIterations;
  }
  c.solved = true;
  c.cert = certify(p, mu, c.sol, opts);
  c.x = is_mu0(p, mu) ? Vector(p.center()) : recover_x(p, c.sol.d_star);
  const ObjectiveParts parts = eval_components(p, c.x);
  if (parts.h >= p.delta() - feasibility_slack(p.delta())) c.p0 = parts.f + parts.g / parts.h;
  return c;
}

std::vector<Candidate> evaluate_grid(const FractionalProgram& p, const std::vector<double>& mus,
                                     const SolverOptions& opts) {
  std::vector<Candidate> out(mus.size());
  const int workers = std::clamp(opts.threads, 1, static_cast<int>(mus.size()));
  if (workers == 1) {
    for (size_t i = 0; i < mus.size(); ++i) out[i] = evaluate_mu(p, mus[i], opts);
    return out;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < mus.size(); i = next++) {
        try {
          out[i] = evaluate_mu(p, mus[i], opts);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

double start_scale(const FractionalProgram& p) {
  return 1.0 + p.Q().norm() / p.neg_h_min_eigenvalue();
}

std::optional<DualPoint> find_starting_point(const FractionalProgram& p, double mu) {
  const double s = start_scale(p);
  for (double sigma : {0.0, 1.0, 10.0, 100.0}) {
    for (double varsigma : {0.0, 1.0, 10.0}) {
      const DualPoint d{mu, varsigma * s, sigma * s};
      if (is_in_S_plus(p, d)) return d;
    }
  }
  return std::nullopt;
}

DualSolution maximize_dual(const FractionalProgram& p, double mu, const SolverOptions& opts) {
  if (!mu_in_range(p, mu)) {
    throw Error(ErrorCode::kMuOutOfRange, "mu = " + std::to_string(mu) + " outside [mu0, 1/delta]");
  }
  const auto start = find_starting_point(p, mu);
  if (!start) {
    throw Error(ErrorCode::kNoStartingPoint, "no PD point found for mu = " + std::to_string(mu));
  }

  const BoxProjection box{Eigen::Vector2d(-p.lambda(), 0.0)};
  const auto at = [mu](const Eigen::Vector2d& v) { return DualPoint{mu, v[0], v[1]}; };

  Eigen::Vector2d point = coords(*start);
  DualEvaluation ev = *evaluate_dual(p, *start, true);

  DualSolution sol;
  sol.value_trace.push_back(ev.value);
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const Eigen::Vector2d grad = gradient(ev);
    const Eigen::Vector2d pg = box.projected_gradient(point, grad);
    const double pg_norm = pg.norm();
    if (pg_norm <= opts.tol_grad * (1.0 + std::abs(ev.value))) {
      converged = true;
      break;
    }

    std::array<bool, 2> free{};
    for (int i = 0; i < 2; ++i) free[i] = !(point[i] <= box.lower[i] && grad[i] <= 0.0);

    // Newton first; projected steepest ascent with a curvature-based step as fallback.
    std::array<Eigen::Vector2d, 2> directions;
    directions[0] = newton_direction(ev.hessian, grad, free);
    const double curvature = -pg.dot(ev.hessian * pg);
    directions[1] = curvature > 0.0 ? Eigen::Vector2d(pg * (pg.squaredNorm() / curvature)) : pg;

    bool accepted = false;
    for (const Eigen::Vector2d& dir : directions) {
      if (!(grad.dot(dir) > 0.0)) continue;
      double t = 1.0;
      for (int halving = 0; halving < 60 && !accepted; ++halving, t *= 0.5) {
        const Eigen::Vector2d trial = box(point + t * dir);
        if ((trial - point).norm() <= 1e-16 * (1.0 + point.norm())) break;
        auto trial_ev = evaluate_dual(p, at(trial), true);
        if (!trial_ev) continue;
        const double armijo = ev.value + 1e-4 * grad.dot(trial - point);
        const bool sufficient = trial_ev->value >= armijo;
        // Near the optimum the increase is below roundoff; accept if the
        // value holds within noise and stationarity improves.
        const bool noise_level =
            trial_ev->value >= ev.value - 1e-13 * (1.0 + std::abs(ev.value)) &&
            box.projected_gradient(trial, gradient(*trial_ev)).norm() < pg_norm;
        if (sufficient || noise_level) {
          point = trial;
          ev = *std::move(trial_ev);
          accepted = true;
        }
      }
      if (accepted) break;
    }
    if (!accepted) break;  // no ascent possible at this precision
    sol.value_trace.push_back(ev.value);
  }

  const Eigen::Vector2d grad = gradient(ev);
  sol.d_star = at(point);
  sol.value = ev.value;
  sol.grad_norm = box.projected_gradient(point, grad).norm();
  sol.iterations = it;
  sol.min_pivot = ev.min_pivot;

  if (ev.ill_conditioned) {
    sol.status = DualStatus::kNearPDBoundary;
  } else if (!converged) {
    sol.status = DualStatus::kMaxIterations;
  } else if (point[1] <= 0.0) {
    sol.status = DualStatus::kBoundarySigmaZero;
  } else if (point[0] <= -p.lambda() && grad[0] < 0.0) {
    sol.status = DualStatus::kBoxBoundaryVarsigma;
  } else {
    sol.status = DualStatus::kInteriorCritical;
  }
  return sol;
}

Certificate certify(const FractionalProgram& p, double mu, const DualSolution& sol,
                    const SolverOptions& opts) {
  Certificate cert;
  if (is_mu0(p, mu)) {
    // The feasible set at mu0 is the single point H^{-1}b, so it is the global
    // minimizer by direct evaluation; the dual supremum is approached only as
    // sigma -> inf and equals the primal value.
    const Vector& x = p.center();
    const ObjectiveParts parts = eval_components(p, x);
    cert.primal_value = parts.f + mu * parts.g;
    cert.dual_value = cert.primal_value;
    cert.gap = 0.0;
    cert.stationarity_xi = 0.0;
    cert.feasibility_residual = parts.h - 1.0 / mu;
    cert.kind = CertificateKind::kPerfect;
    return cert;
  }

  const auto ev = evaluate_dual(p, sol.d_star, false);
  if (!ev) return cert;
  const Vector& x = ev->x_candidate;
  const ObjectiveParts parts = eval_components(p, x);
  cert.primal_value = parts.f + mu * parts.g;
  cert.dual_value = ev->value;
  cert.gap = cert.primal_value - cert.dual_value;
  cert.stationarity_xi = std::abs(ev->xi - sol.d_star.varsigma);
  cert.feasibility_residual = parts.h - 1.0 / mu;

  if (sol.status == DualStatus::kNearPDBoundary) return cert;

  const bool feasible = is_feasible_mu(p, mu, x) || cert.feasibility_residual >= -opts.tol_feasibility;
  const bool zero_gap = std::abs(cert.gap) <= opts.tol_gap * (1.0 + std::abs(cert.primal_value));
  const bool stationary =
      cert.stationarity_xi <= opts.tol_stationarity * (1.0 + std::abs(sol.d_star.varsigma));
  const bool complementary = sol.d_star.sigma > 0.0
                                 ? std::abs(cert.feasibility_residual) <= opts.tol_feasibility
                                 : cert.feasibility_residual >= -opts.tol_feasibility;
  if (zero_gap && stationary && complementary) {
    cert.kind = CertificateKind::kPerfect;
  } else if (feasible) {
    cert.kind = CertificateKind::kWeakOnly;
  }
  return cert;
}

SolveResult solve(const FractionalProgram& p, const SolverOptions& opts) {
  const MuInterval& range = p.interval();
  const int grid = std::max(1, opts.grid);

  std::vector<double> mus;
  if (range.degenerate()) {
    mus.push_back(range.mu0);
  } else if (grid == 1) {
    mus.push_back(range.mu_max);
  } else {
    for (int i = 0; i < grid; ++i) {
      mus.push_back(i == grid - 1 ? range.mu_max : range.mu0 + range.width() * i / (grid - 1));
    }
  }

  std::vector<Candidate> grid_results = evaluate_grid(p, mus, opts);

  SolveResult result;
  for (const Candidate& c : grid_results) {
    MuSample s;
    s.mu = c.mu;
    s.solved = c.solved;
    s.kind = c.cert.kind;
    s.status = c.sol.status;
    s.dual_optimum = c.solved ? (is_mu0(p, c.mu) ? c.cert.dual_value : c.sol.value)
                              : std::numeric_limits<double>::quiet_NaN();
    s.p0_value = c.p0;
    result.mu_profile.push_back(s);
  }

  if (std::none_of(grid_results.begin(), grid_results.end(), [](const Candidate& c) { return c.solved; })) {
    throw Error(ErrorCode::kAllSubproblemsFailed, "no dual starting point at any grid value of mu");
  }

  auto is_perfect = [](const Candidate& c) { return c.solved && c.cert.kind == CertificateKind::kPerfect; };
  result.evaluated_subproblems = static_cast<int>(grid_results.size());
  result.certified_subproblems =
      static_cast<int>(std::count_if(grid_results.begin(), grid_results.end(), is_perfect));
  // A Perfect subproblem certifies only its own mu. Unless every mu is
  // certified, an uncertified mu may hide a lower value, so the certified
  // points get no priority over other feasible points.
  const bool kind_first = result.certified_subproblems == result.evaluated_subproblems;

  size_t best_index = 0;
  for (size_t i = 1; i < grid_results.size(); ++i) {
    if (better(grid_results[i], grid_results[best_index], kind_first)) best_index = i;
  }
  Candidate best = grid_results[best_index];

  // Golden-section refinement of mu -> P0(x_mu) around the best grid point.
  if (!range.degenerate() && opts.refine_rounds > 0) {
    const int target = kind_first ? kind_rank(best.cert.kind) : kind_rank(CertificateKind::kWeakOnly);
    const double spacing = mus.size() > 1 ? range.width() / (mus.size() - 1) : range.width();
    const double width_tol = std::max(1e-4 * range.width(), 1e-8);
    auto objective = [&](double mu) {
      Candidate c = evaluate_mu(p, mu, opts);
      ++result.refinement_evaluations;
      ++result.evaluated_subproblems;
      if (is_perfect(c)) ++result.certified_subproblems;
      const double value = c.solved && kind_rank(c.cert.kind) <= target ? c.p0 : kInf;
      if (better(c, best, kind_first)) best = c;
      return value;
    };

    double lo = std::max(range.mu0, best.mu - spacing);
    double hi = std::min(range.mu_max, best.mu + spacing);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int round = 0; round < opts.refine_rounds && hi - lo > width_tol; ++round) {
      const double before = best.p0;
      double a = hi - ratio * (hi - lo), b = lo + ratio * (hi - lo);
      double fa = objective(a), fb = objective(b);
      while (hi - lo > width_tol) {
        if (fa <= fb) {
          hi = b;
          b = a;
          fb = fa;
          a = hi - ratio * (hi - lo);
          fa = objective(a);
        } else {
          lo = a;
          a = b;
          fa = fb;
          b = lo + ratio * (hi - lo);
          fb = objective(b);
        }
      }
      if (!(best.p0 < before)) break;
      // Recenter on the incumbent in case the minimizer lies beyond the bracket.
      const double half = 0.5 * spacing / (round + 1);
      lo = std::max(range.mu0, best.mu - half);
      hi = std::min(range.mu_max, best.mu + half);
    }
  }

  if (!std::isfinite(best.p0)) {
    // No recovered point is feasible; fall back to the center of the ellipsoid.
    best.x = p.center();
    best.mu = range.mu0;
    best.p0 = eval_P0(p, best.x);
    best.cert.kind = CertificateKind::kNone;
  }

  result.x_star = best.x;
  result.mu_star = best.mu;
  result.d_star = best.sol.d_star;
  result.dual_status = best.sol.status;
  result.P0_value = best.p0;
  result.best_dual_value = is_mu0(p, best.mu) ? best.cert.dual_value : best.sol.value;
  result.certificate = best.cert;
  if (result.certified_subproblems < result.evaluated_subproblems &&
      result.certificate.kind == CertificateKind::kPerfect) {
    result.certificate.kind = CertificateKind::kWeakOnly;
  }

  // Weak duality at mu_star: Pd <= P_mu(x) for x in X_mu.
  if (best.solved && best.cert.kind != CertificateKind::kNone) {
    const double p_mu = eval_P_mu(p, best.mu, best.x);
    if (p_mu < result.best_dual_value - 1e-6 * (1.0 + std::abs(p_mu))) {
      throw std::logic_error("weak duality violated at mu_star");
    }
  }
  return result;
}

// Existence probes -----------------------------------------------------------

namespace {

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

ExistenceDiagnostics existence_probe(const FractionalProgram& p, double mu) {
  ExistenceDiagnostics diag;
  diag.mu = mu;
  const auto start = find_starting_point(p, mu);
  if (!start) return diag;
  diag.base = *start;
  const DualPoint base = *start;

  // varsigma -> inf: Pd ~ -mu/2 varsigma^2.
  {
    RayProbe& r = diag.varsigma_ray;
    std::vector<double> sq;
    for (int k = 3; k <= 6; ++k) {
      const double s = base.varsigma + std::pow(10.0, k);
      auto ev = evaluate_dual(p, {mu, s, base.sigma});
      if (!ev) continue;
      r.t.push_back(s);
      r.value.push_back(ev->value);
      sq.push_back(s * s);
    }
    r.evaluated = r.t.size() >= 2;
    if (r.evaluated) {
      r.slope = fit_slope(sq, r.value);
      r.diverges_to_minus_infinity = r.slope < 0.0 && strictly_decreasing(r.value);
    }
  }

  // sigma -> inf: Pd ~ sigma (1/mu - 1/mu0).
  {
    RayProbe& r = diag.sigma_ray;
    for (int k = 3; k <= 8; ++k) {
      const double s = base.sigma + std::pow(10.0, k);
      auto ev = evaluate_dual(p, {mu, base.varsigma, s});
      if (!ev) continue;
      r.t.push_back(s);
      r.value.push_back(ev->value);
    }
    r.evaluated = r.t.size() >= 2;
    if (r.evaluated) {
      r.slope = fit_slope(r.t, r.value);
      r.diverges_to_minus_infinity =
          r.slope < -1e-12 * (1.0 + std::abs(r.value.front())) && strictly_decreasing(r.value);
    }
  }

  // Approach det G = 0 along rays that decrease G in the Loewner order.
  {
    RayProbe& r = diag.boundary_ray;
    const std::array<Eigen::Vector2d, 3> dirs = {Eigen::Vector2d(-1.0, 0.0), Eigen::Vector2d(0.0, -1.0),
                                                 Eigen::Vector2d(-1.0, -1.0).normalized()};
    for (const Eigen::Vector2d& dir : dirs) {
      // Largest step that stays in the box.
      double t_box = kInf;
      if (dir[0] < 0) t_box = std::min(t_box, (base.varsigma + p.lambda()) / -dir[0]);
      if (dir[1] < 0) t_box = std::min(t_box, base.sigma / -dir[1]);
      if (!(t_box > 0)) continue;
      auto point = [&](double t) { return DualPoint{mu, base.varsigma + t * dir[0], base.sigma + t * dir[1]}; };
      if (is_in_S_plus(p, point(t_box))) continue;  // box bound reached before the surface
      double inside = 0.0, outside = t_box;
      for (int i = 0; i < 200 && outside - inside > 1e-15 * (1.0 + outside); ++i) {
        const double mid = 0.5 * (inside + outside);
        (is_in_S_plus(p, point(mid)) ? inside : outside) = mid;
      }
      const double t_star = outside;
      std::vector<double> logs;
      for (int k = 1; k <= 8; ++k) {
        const double dist = t_star * std::pow(10.0, -k);
        auto ev = evaluate_dual(p, point(t_star - dist));
        if (!ev) continue;
        r.t.push_back(dist);
        r.value.push_back(ev->value);
        logs.push_back(std::log(dist));
      }
      r.evaluated = r.t.size() >= 2;
      if (r.evaluated) {
        r.slope = fit_slope(logs, r.value);
        // Judge the samples nearest the surface; a finite limit shows up as
        // decrements shrinking geometrically.
        const size_t tail = std::min<size_t>(4, r.value.size());
        const std::vector<double> near(r.value.end() - tail, r.value.end());
        const double first_drop = near[0] - near[1];
        const double last_drop = near[tail - 2] - near[tail - 1];
        r.diverges_to_minus_infinity = r.slope > 0.0 && strictly_decreasing(near) && last_drop >= 0.5 * first_drop;
      }
      break;
    }
  }

  diag.coercive = diag.varsigma_ray.diverges_to_minus_infinity &&
                  (!diag.boundary_ray.evaluated || diag.boundary_ray.diverges_to_minus_infinity);
  return diag;
}

}  // namespace fracdual
