#include "fracdual/problem.hpp"

#include <cmath>
#include <string>

namespace fracdual {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kHNotNegativeDefinite: return "HNotNegativeDefinite";
    case ErrorCode::kMu0NotPositive: return "Mu0NotPositive";
    case ErrorCode::kDeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::kNegativeLambda: return "NegativeLambda";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kMuOutOfRange: return "MuOutOfRange";
    case ErrorCode::kNotPD: return "NotPD";
    case ErrorCode::kNoStartingPoint: return "NoStartingPoint";
    case ErrorCode::kAllSubproblemsFailed: return "AllSubproblemsFailed";
    case ErrorCode::kDimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kNotSymmetric:
    case ErrorCode::kHNotNegativeDefinite:
    case ErrorCode::kMu0NotPositive:
    case ErrorCode::kDeltaOutOfRange:
    case ErrorCode::kNegativeLambda:
      return true;
    default:
      return false;
  }
}

double pd_threshold(const Matrix& m) {
  const double max_diag = m.size() == 0 ? 0.0 : m.diagonal().cwiseAbs().maxCoeff();
  return 1e-10 * (1.0 + max_diag);
}

namespace {

void require_shape(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, what);
}

void require_symmetric(const Matrix& m, const char* name) {
  const double max_entry = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * max_entry) {
    throw Error(ErrorCode::kNotSymmetric,
                std::string(name) + " is not symmetric (max |A - A'| = " + std::to_string(asym) + ")");
  }
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

FractionalProgram FractionalProgram::validate(ProgramData raw) {
  const auto n = raw.Q.rows();
  require_shape(n >= 1, "n must be positive");
  require_shape(raw.Q.cols() == n, "Q must be n x n");
  require_shape(raw.f.size() == n, "f must have length n");
  require_shape(raw.B.cols() == n || (raw.B.rows() == 0), "B must have n columns");
  if (raw.B.rows() == 0) raw.B.resize(0, n);
  require_shape(raw.H.rows() == n && raw.H.cols() == n, "H must be n x n");
  require_shape(raw.b.size() == n, "b must have length n");
  require_shape(all_finite(raw.Q) && all_finite(raw.f) && all_finite(raw.B) && all_finite(raw.H) &&
                    all_finite(raw.b) && std::isfinite(raw.lambda) && std::isfinite(raw.delta),
                "all entries must be finite");

  require_symmetric(raw.Q, "Q");
  require_symmetric(raw.H, "H");

  if (raw.lambda < 0.0) throw Error(ErrorCode::kNegativeLambda, "lambda must be >= 0");

  const Matrix neg_h = -raw.H;
  Eigen::LLT<Matrix> llt(neg_h);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kHNotNegativeDefinite, "Cholesky factorization of -H failed");
  }
  const double eps_pd = pd_threshold(neg_h);
  const Matrix l = llt.matrixL();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (l(i, i) * l(i, i) <= eps_pd) {
      throw Error(ErrorCode::kHNotNegativeDefinite,
                  "pivot " + std::to_string(i) + " of -H is below threshold");
    }
  }

  FractionalProgram p;
  // H c = b  <=>  (-H) c = -b
  p.center_ = llt.solve(-raw.b);
  const double h_max = 0.5 * p.center_.dot(raw.H * p.center_) - raw.b.dot(p.center_);
  if (!(h_max > 0.0)) {
    throw Error(ErrorCode::kMu0NotPositive, "h(H^{-1} b) = " + std::to_string(h_max) + " is not positive");
  }
  if (!(raw.delta > 0.0) || raw.delta > h_max * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kDeltaOutOfRange,
                "delta must lie in (0, h(H^{-1} b)] = (0, " + std::to_string(h_max) + "]");
  }

  p.interval_.mu0 = 1.0 / h_max;
  p.interval_.mu_max = std::max(1.0 / raw.delta, p.interval_.mu0);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(neg_h, Eigen::EigenvaluesOnly);
  p.neg_h_min_eig_ = eig.eigenvalues().minCoeff();
  p.neg_h_inv_diag_ = llt.solve(Matrix::Identity(n, n)).diagonal();

  p.btb_ = raw.B.transpose() * raw.B;
  p.data_ = std::move(raw);
  return p;
}

ObjectiveParts eval_components(const FractionalProgram& p, const Vector& x) {
  if (x.size() != p.n()) throw Error(ErrorCode::kShapeMismatch, "x must have length n");
  ObjectiveParts out;
  out.f = 0.5 * x.dot(p.Q() * x) - p.f().dot(x);
  const double xi = 0.5 * (p.B() * x).squaredNorm() - p.lambda();
  out.g = 0.5 * xi * xi;
  out.h = 0.5 * x.dot(p.H() * x) - p.b().dot(x);
  return out;
}

double eval_P0(const FractionalProgram& p, const Vector& x) {
  const ObjectiveParts parts = eval_components(p, x);
  if (parts.h < p.delta() - feasibility_slack(p.delta())) {
    throw Error(ErrorCode::kInfeasible,
                "h(x) = " + std::to_string(parts.h) + " < delta = " + std::to_string(p.delta()));
  }
  return parts.f + parts.g / parts.h;
}

bool mu_in_range(const FractionalProgram& p, double mu) {
  const double slack = 1e-12 * p.mu_max();
  return std::isfinite(mu) && mu >= p.mu0() - slack && mu <= p.mu_max() + slack;
}

double eval_P_mu(const FractionalProgram& p, double mu, const Vector& x) {
  if (!mu_in_range(p, mu)) {
    throw Error(ErrorCode::kMuOutOfRange, "mu = " + std::to_string(mu) + " outside [mu0, 1/delta]");
  }
  const ObjectiveParts parts = eval_components(p, x);
  return parts.f + mu * parts.g;
}

bool is_feasible_mu(const FractionalProgram& p, double mu, const Vector& x) {
  const double bound = 1.0 / mu;
  return eval_components(p, x).h >= bound - feasibility_slack(bound);
}

}  // namespace fracdual
