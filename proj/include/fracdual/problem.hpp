// Problem instances of the form
//
//   min  f(x) + g(x) / h(x)   subject to  h(x) >= delta
//
//   f(x) = 1/2 x'Qx - f'x
//   g(x) = 1/2 (1/2 |Bx|^2 - lambda)^2
//   h(x) = 1/2 x'Hx - b'x,     H negative definite
//
// together with the parameterized subproblems
//
//   min  f(x) + mu g(x)   subject to  h(x) >= 1/mu,   mu in [mu0, 1/delta]
//
// where 1/mu0 = h(H^{-1} b) is the maximum of h.
#pragma once

#include <Eigen/Dense>

#include "fracdual/error.hpp"

namespace fracdual {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raw, unvalidated instance data. Matrices are dense; B may have zero rows.
struct ProgramData {
  Matrix Q;
  Vector f;
  Matrix B;
  double lambda = 0.0;
  Matrix H;
  Vector b;
  double delta = 0.0;
};

struct MuInterval {
  double mu0 = 0.0;
  double mu_max = 0.0;

  /// True when delta = 1/mu0, i.e. the feasible set is the single point H^{-1}b.
  bool degenerate() const { return mu_max - mu0 <= 1e-12 * mu0; }
  double width() const { return mu_max - mu0; }
};

struct ObjectiveParts {
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
};

/// Pivot threshold used for every positive-definiteness decision.
double pd_threshold(const Matrix& m);

/// Validated, immutable problem instance. Construct through validate().
class FractionalProgram {
 public:
  static FractionalProgram validate(ProgramData raw);

  int n() const { return static_cast<int>(data_.Q.rows()); }
  int m() const { return static_cast<int>(data_.B.rows()); }

  const ProgramData& data() const { return data_; }
  const Matrix& Q() const { return data_.Q; }
  const Vector& f() const { return data_.f; }
  const Matrix& B() const { return data_.B; }
  double lambda() const { return data_.lambda; }
  const Matrix& H() const { return data_.H; }
  const Vector& b() const { return data_.b; }
  double delta() const { return data_.delta; }

  /// B'B, cached.
  const Matrix& BtB() const { return btb_; }
  /// H^{-1} b, the maximizer of h and center of the feasible ellipsoid.
  const Vector& center() const { return center_; }
  const MuInterval& interval() const { return interval_; }
  double mu0() const { return interval_.mu0; }
  double mu_max() const { return interval_.mu_max; }
  /// Smallest eigenvalue of -H (> 0).
  double neg_h_min_eigenvalue() const { return neg_h_min_eig_; }
  /// Diagonal of (-H)^{-1}, used for axis-aligned enclosures of the ellipsoid.
  const Vector& neg_h_inverse_diagonal() const { return neg_h_inv_diag_; }

 private:
  FractionalProgram() = default;

  ProgramData data_;
  Matrix btb_;
  Vector center_;
  MuInterval interval_;
  double neg_h_min_eig_ = 0.0;
  Vector neg_h_inv_diag_;
};

ObjectiveParts eval_components(const FractionalProgram& p, const Vector& x);

/// f + g/h. Throws kInfeasible when h(x) < delta (beyond feasibility_slack).
double eval_P0(const FractionalProgram& p, const Vector& x);

/// f + mu g. Throws kMuOutOfRange outside [mu0, 1/delta].
double eval_P_mu(const FractionalProgram& p, double mu, const Vector& x);

/// h(x) >= 1/mu - feasibility_slack(1/mu).
bool is_feasible_mu(const FractionalProgram& p, double mu, const Vector& x);

/// Absolute slack for comparisons h(x) >= bound.
inline double feasibility_slack(double bound) { return 1e-9 * (1.0 + std::abs(bound)); }

bool mu_in_range(const FractionalProgram& p, double mu);

}  // namespace fracdual
