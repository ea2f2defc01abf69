// Shared fixtures for the unit tests.
#pragma once

#include <optional>
#include <random>

#include "fracdual/io.hpp"
#include "fracdual/problem.hpp"

namespace fracdual::testing {

// n = 1 double well over the interval h(x) = 1 - (x - 1)^2 >= delta.
inline ProgramData double_well_data(double delta = 0.5) {
  ProgramData d;
  d.Q = Matrix::Constant(1, 1, 2.0);
  d.f = Vector::Zero(1);
  d.B = Matrix::Constant(1, 1, 1.0);
  d.lambda = 1.0;
  d.H = Matrix::Constant(1, 1, -2.0);
  d.b = Vector::Constant(1, -2.0);
  d.delta = delta;
  return d;
}

inline FractionalProgram double_well(double delta = 0.5) {
  return FractionalProgram::validate(double_well_data(delta));
}

inline Vector scalar(double v) { return Vector::Constant(1, v); }

inline FractionalProgram random_program(int n, int m, std::uint64_t seed) {
  return FractionalProgram::validate(generate_instance({n, m, seed, 1.0}));
}

// Uniform sample from the ellipsoid h(x) >= bound.
inline Vector sample_feasible(const FractionalProgram& p, double bound, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const int n = p.n();
  Vector dir(n);
  for (int i = 0; i < n; ++i) dir(i) = normal(rng);
  const Matrix neg_h = -p.H();
  const double q = dir.dot(neg_h * dir);
  // h(c + t d) = h_max - t^2 q / 2
  const double t_max = std::sqrt(std::max(0.0, 2.0 * (1.0 / p.mu0() - bound) / q));
  const double t = t_max * std::pow(unit(rng), 1.0 / n);
  return p.center() + t * dir;
}

}  // namespace fracdual::testing

#include <Eigen/Eigenvalues>

#include "fracdual/canonical_dual.hpp"

namespace fracdual::testing {

// Rejection sample of a box point inside S+ at fixed mu; nullopt after 200 misses.
inline std::optional<DualPoint> sample_dual(const FractionalProgram& p, double mu, double spread,
                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit;
  for (int tries = 0; tries < 200; ++tries) {
    const DualPoint d{mu, -p.lambda() + spread * unit(rng), spread * unit(rng)};
    if (is_in_S_plus(p, d)) return d;
  }
  return std::nullopt;
}

// Finite-difference step for the dual: small against the distance to the
// singular surface, measured as lambda_min(G) over the rate at which G moves.
inline double dual_fd_step(const FractionalProgram& p, const DualPoint& d) {
  const Matrix G = assemble_G(p, d).G();
  const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(G, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double rate = std::max(d.mu * p.BtB().norm(), p.H().norm());
  return std::min(1e-5 * (1.0 + std::abs(d.varsigma) + d.sigma), 1e-3 * lmin / rate);
}

}  // namespace fracdual::testing
