// Canonical dual of the mu-subproblem.
//
// With the quadratic measure xi = 1/2 |Bx|^2 - lambda and its dual variable
// varsigma, plus the multiplier sigma of the elliptic constraint, the
// subproblem's dual is the two-dimensional function
//
//   Pd(varsigma, sigma) = -1/2 c' G^{-1} c - mu lambda varsigma
//                         - mu/2 varsigma^2 + sigma/mu,
//
//   G = Q + mu varsigma B'B - sigma H,   c = f - sigma b,
//
// defined on S+ = { varsigma >= -lambda, sigma >= 0, G positive definite }.
#pragma once

#include <optional>

#include <Eigen/Dense>

#include "fracdual/problem.hpp"

namespace fracdual {

struct DualPoint {
  double mu = 0.0;
  double varsigma = 0.0;
  double sigma = 0.0;
};

bool in_box(const FractionalProgram& p, const DualPoint& d);

/// Value of G at a dual point and its Cholesky factor.
class GFactorization {
 public:
  GFactorization(Matrix g);

  const Matrix& G() const { return g_; }
  /// Lower triangular factor; only meaningful when pd().
  Matrix factor() const { return llt_.matrixL(); }
  bool pd() const { return pd_; }
  /// Smallest Cholesky pivot (L_ii^2); -inf when the factorization broke down.
  double min_pivot() const { return min_pivot_; }
  /// PD but with min_pivot <= 1e-4 (1 + max |G_ii|).
  bool ill_conditioned() const;

  Vector solve(const Vector& rhs) const { return llt_.solve(rhs); }

 private:
  Matrix g_;
  Eigen::LLT<Matrix> llt_;
  bool pd_ = false;
  double min_pivot_ = 0.0;
};

struct DualGradient {
  double varsigma = 0.0;
  double sigma = 0.0;
};

struct DualEvaluation {
  double value = 0.0;
  double grad_varsigma = 0.0;
  double grad_sigma = 0.0;
  /// x(varsigma, sigma) = G^{-1}(f - sigma b)
  Vector x_candidate;
  /// canonical measure of x_candidate
  double xi = 0.0;
  double h_at_x = 0.0;
  double min_pivot = 0.0;
  bool ill_conditioned = false;
  /// d^2 Pd / d(varsigma, sigma)^2; filled when requested.
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

GFactorization assemble_G(const FractionalProgram& p, const DualPoint& d);

bool is_in_S_plus(const FractionalProgram& p, const DualPoint& d);

/// Value, gradient, primal candidate (and optionally the Hessian) from a
/// single factorization. nullopt when d is outside S+.
std::optional<DualEvaluation> evaluate_dual(const FractionalProgram& p, const DualPoint& d,
                                            bool with_hessian = false);

// Throwing single-quantity variants (kNotPD outside S+).
Vector recover_x(const FractionalProgram& p, const DualPoint& d);
double dual_value(const FractionalProgram& p, const DualPoint& d);
DualGradient dual_gradient(const FractionalProgram& p, const DualPoint& d);
Eigen::Matrix2d dual_hessian(const FractionalProgram& p, const DualPoint& d);

/// Xi(x, varsigma, sigma) = 1/2 x'Gx - c'x - mu lambda varsigma - mu/2 varsigma^2 + sigma/mu.
/// Defined for any box point, PD or not.
double xi_total_complementary(const FractionalProgram& p, const Vector& x, const DualPoint& d);

/// 1/2 |Bx|^2 - lambda
double canonical_measure(const FractionalProgram& p, const Vector& x);

/// U(xi) = 1/2 xi^2
inline double canonical_energy(double xi) { return 0.5 * xi * xi; }

/// U#(varsigma) = 1/2 varsigma^2 on varsigma >= -lambda.
inline double legendre_conjugate(double varsigma) { return 0.5 * varsigma * varsigma; }

}  // namespace fracdual
