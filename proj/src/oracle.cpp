#include "fracdual/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fracdual {

namespace {

constexpr int kMultistarts = 20;
constexpr int kShrinks = 40;
constexpr int kMaxSweepsPerStep = 200;
constexpr double kMaxGridPoints = 5e8;

// { h(x) >= bound } is the ellipsoid (x - c)'(-H)(x - c) <= 2 (1/mu0 - bound).
Box enclosure(const FractionalProgram& p, double bound) {
  const double radius_sq = std::max(0.0, 2.0 * (1.0 / p.mu0() - bound));
  const Vector half = (radius_sq * p.neg_h_inverse_diagonal()).cwiseSqrt() * 1.01;
  return {p.center() - half, p.center() + half};
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

class Minimizer {
 public:
  using Objective = std::function<double(const ObjectiveParts&)>;

  Minimizer(const FractionalProgram& p, double bound, Objective objective)
      : p_(p), bound_(bound), slack_(feasibility_slack(bound)), objective_(std::move(objective)) {}

  OracleReport run(const Box& box, double resolution, std::uint64_t seed) {
    const int n = p_.n();
    if (n > kOracleMaxDimension) {
      throw Error(ErrorCode::kDimensionTooLarge,
                  "oracle supports n <= " + std::to_string(kOracleMaxDimension) + ", got " + std::to_string(n));
    }
    if (!(resolution > 0.0)) throw Error(ErrorCode::kShapeMismatch, "resolution must be positive");

    std::vector<long long> counts(n);
    double total = 1.0;
    for (int i = 0; i < n; ++i) {
      counts[i] = static_cast<long long>(std::floor((box.upper[i] - box.lower[i]) / resolution)) + 1;
      total *= static_cast<double>(counts[i]);
    }
    if (total > kMaxGridPoints) {
      throw Error(ErrorCode::kDimensionTooLarge,
                  "grid of " + std::to_string(total) + " points exceeds the oracle budget");
    }

    // Odometer enumeration with axis 0 most significant, so index order is
    // lexicographic order of the grid points.
    struct Cell {
      double value;
      long long index;
      Vector x;
    };
    std::vector<Cell> best;
    const auto cell_less = [](const Cell& a, const Cell& b) {
      return a.value < b.value || (a.value == b.value && a.index < b.index);
    };
    std::vector<long long> digit(n, 0);
    Vector x(n);
    const long long points = static_cast<long long>(total);
    for (long long idx = 0; idx < points; ++idx) {
      for (int i = 0; i < n; ++i) x[i] = box.lower[i] + resolution * static_cast<double>(digit[i]);
      const double v = eval(x);
      if (std::isfinite(v)) {
        Cell cell{v, idx, x};
        if (static_cast<int>(best.size()) < kMultistarts || cell_less(cell, best.back())) {
          auto pos = std::upper_bound(best.begin(), best.end(), cell, cell_less);
          best.insert(pos, std::move(cell));
          if (static_cast<int>(best.size()) > kMultistarts) best.pop_back();
        }
      }
      for (int i = n - 1; i >= 0; --i) {
        if (++digit[i] < counts[i]) break;
        digit[i] = 0;
      }
    }
    if (best.empty()) {
      // Grid missed a thin feasible set; the center is always feasible.
      const Vector c = p_.center();
      best.push_back({eval(c), -1, c});
    }

    OracleReport report;
    report.resolution = resolution;
    report.box = box;
    report.min_value = best.front().value;
    report.argmin = best.front().x;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.5 * resolution, 0.5 * resolution);
    for (size_t s = 0; s < best.size(); ++s) {
      Vector start = best[s].x;
      double start_value = best[s].value;
      if (s > 0) {
        Vector moved = start;
        for (int i = 0; i < n; ++i) moved[i] += jitter(rng);
        const double v = eval(moved);
        if (std::isfinite(v)) {
          start = moved;
          start_value = v;
        }
      }
      auto [xr, vr] = refine(start, start_value, resolution);
      if (vr < report.min_value || (vr == report.min_value && lex_less(xr, report.argmin))) {
        report.min_value = vr;
        report.argmin = xr;
      }
    }
    report.n_evals = evals_;
    return report;
  }

 private:
  // +inf outside the feasible set. Plain loops: this runs ~1e7 times per grid.
  double eval(const Vector& x) {
    ++evals_;
    const int n = p_.n();
    const double* xs = x.data();
    ObjectiveParts parts;
    double quad_q = 0.0, quad_h = 0.0;
    for (int i = 0; i < n; ++i) {
      double qi = 0.0, hi = 0.0;
      for (int j = 0; j < n; ++j) {
        qi += p_.Q()(i, j) * xs[j];
        hi += p_.H()(i, j) * xs[j];
      }
      quad_q += xs[i] * qi;
      quad_h += xs[i] * hi;
    }
    double bx_sq = 0.0;
    for (int r = 0; r < p_.m(); ++r) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += p_.B()(r, j) * xs[j];
      bx_sq += row * row;
    }
    parts.f = 0.5 * quad_q - p_.f().dot(x);
    parts.h = 0.5 * quad_h - p_.b().dot(x);
    const double xi = 0.5 * bx_sq - p_.lambda();
    parts.g = 0.5 * xi * xi;
    if (parts.h < bound_ - slack_) return std::numeric_limits<double>::infinity();
    return objective_(parts);
  }

  // Pulls an infeasible point radially back onto the boundary h = bound.
  std::optional<Vector> retract(const Vector& y) {
    const Vector d = y - p_.center();
    const double curvature = -d.dot(p_.H() * d);
    if (!(curvature > 0.0)) return std::nullopt;
    const double excess = 1.0 / p_.mu0() - bound_;
    if (excess < 0.0) return std::nullopt;
    return Vector(p_.center() + std::sqrt(2.0 * excess / curvature) * d);
  }

  std::pair<Vector, double> refine(Vector x, double fx, double step) {
    const int n = p_.n();
    for (int shrink = 0; shrink < kShrinks; ++shrink, step *= 0.5) {
      bool improved = true;
      for (int sweep = 0; improved && sweep < kMaxSweepsPerStep; ++sweep) {
        improved = false;
        for (int i = 0; i < n; ++i) {
          for (double sign : {1.0, -1.0}) {
            Vector y = x;
            y[i] += sign * step;
            double fy = eval(y);
            if (!std::isfinite(fy)) {
              auto pulled = retract(y);
              if (!pulled) continue;
              y = *std::move(pulled);
              fy = eval(y);
            }
            if (fy < fx) {
              x = std::move(y);
              fx = fy;
              improved = true;
            }
          }
        }
      }
    }
    return {x, fx};
  }

  const FractionalProgram& p_;
  double bound_;
  double slack_;
  Objective objective_;
  long long evals_ = 0;
};

}  // namespace

Box bounding_box(const FractionalProgram& p) { return enclosure(p, p.delta()); }

Box bounding_box_mu(const FractionalProgram& p, double mu) {
  if (!mu_in_range(p, mu)) {
    throw Error(ErrorCode::kMuOutOfRange, "mu = " + std::to_string(mu) + " outside [mu0, 1/delta]");
  }
  return enclosure(p, 1.0 / mu);
}

double default_resolution(int n) {
  if (n <= 1) return 1e-5;
  if (n == 2) return 1e-3;
  return 1e-2;
}

OracleReport grid_minimize_P0(const FractionalProgram& p, double resolution, std::uint64_t seed) {
  Minimizer m(p, p.delta(), [](const ObjectiveParts& o) { return o.f + o.g / o.h; });
  return m.run(bounding_box(p), resolution, seed);
}

OracleReport grid_minimize_P_mu(const FractionalProgram& p, double mu, double resolution,
                                std::uint64_t seed) {
  const Box box = bounding_box_mu(p, mu);
  Minimizer m(p, 1.0 / mu, [mu](const ObjectiveParts& o) { return o.f + mu * o.g; });
  return m.run(box, resolution, seed);
}

}  // namespace fracdual
