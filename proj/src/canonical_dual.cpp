#include "fracdual/canonical_dual.hpp"

#include <cmath>
#include <limits>

namespace fracdual {

bool in_box(const FractionalProgram& p, const DualPoint& d) {
  return d.varsigma >= -p.lambda() && d.sigma >= 0.0;
}

GFactorization::GFactorization(Matrix g) : g_(std::move(g)), llt_(g_) {
  if (llt_.info() != Eigen::Success) {
    pd_ = false;
    min_pivot_ = -std::numeric_limits<double>::infinity();
    return;
  }
  const Matrix l = llt_.matrixL();
  min_pivot_ = (l.diagonal().array().square()).minCoeff();
  pd_ = min_pivot_ > pd_threshold(g_);
}

bool GFactorization::ill_conditioned() const {
  const double max_diag = g_.diagonal().cwiseAbs().maxCoeff();
  return pd_ && min_pivot_ <= 1e-4 * (1.0 + max_diag);
}

GFactorization assemble_G(const FractionalProgram& p, const DualPoint& d) {
  Matrix g = p.Q() + (d.mu * d.varsigma) * p.BtB() - d.sigma * p.H();
  return GFactorization(std::move(g));
}

bool is_in_S_plus(const FractionalProgram& p, const DualPoint& d) {
  return in_box(p, d) && assemble_G(p, d).pd();
}

std::optional<DualEvaluation> evaluate_dual(const FractionalProgram& p, const DualPoint& d,
                                            bool with_hessian) {
  if (!in_box(p, d)) return std::nullopt;
  const GFactorization fac = assemble_G(p, d);
  if (!fac.pd()) return std::nullopt;

  const double mu = d.mu;
  const Vector c = p.f() - d.sigma * p.b();
  DualEvaluation ev;
  ev.x_candidate = fac.solve(c);
  const Vector& x = ev.x_candidate;

  ev.value = -0.5 * c.dot(x) - mu * p.lambda() * d.varsigma - 0.5 * mu * d.varsigma * d.varsigma +
             d.sigma / mu;
  ev.xi = canonical_measure(p, x);
  ev.h_at_x = 0.5 * x.dot(p.H() * x) - p.b().dot(x);
  ev.grad_varsigma = mu * (ev.xi - d.varsigma);
  ev.grad_sigma = 1.0 / mu - ev.h_at_x;
  ev.min_pivot = fac.min_pivot();
  ev.ill_conditioned = fac.ill_conditioned();

  if (with_hessian) {
    // dx/dvarsigma = -mu G^{-1} u,  dx/dsigma = G^{-1} v
    const Vector u = p.BtB() * x;
    const Vector v = p.H() * x - p.b();
    const Vector gu = fac.solve(u);
    const Vector gv = fac.solve(v);
    ev.hessian(0, 0) = -mu * mu * u.dot(gu) - mu;
    ev.hessian(1, 1) = -v.dot(gv);
    ev.hessian(0, 1) = mu * u.dot(gv);
    ev.hessian(1, 0) = ev.hessian(0, 1);
  }
  return ev;
}

namespace {

DualEvaluation require_pd(const FractionalProgram& p, const DualPoint& d, bool with_hessian) {
  auto ev = evaluate_dual(p, d, with_hessian);
  if (!ev) {
    throw Error(ErrorCode::kNotPD, "dual point (mu=" + std::to_string(d.mu) +
                                       ", varsigma=" + std::to_string(d.varsigma) +
                                       ", sigma=" + std::to_string(d.sigma) + ") is outside S+");
  }
  return *std::move(ev);
}

}  // namespace

Vector recover_x(const FractionalProgram& p, const DualPoint& d) {
  return require_pd(p, d, false).x_candidate;
}

double dual_value(const FractionalProgram& p, const DualPoint& d) {
  return require_pd(p, d, false).value;
}

DualGradient dual_gradient(const FractionalProgram& p, const DualPoint& d) {
  const DualEvaluation ev = require_pd(p, d, false);
  return {ev.grad_varsigma, ev.grad_sigma};
}

Eigen::Matrix2d dual_hessian(const FractionalProgram& p, const DualPoint& d) {
  return require_pd(p, d, true).hessian;
}

double xi_total_complementary(const FractionalProgram& p, const Vector& x, const DualPoint& d) {
  if (x.size() != p.n()) throw Error(ErrorCode::kShapeMismatch, "x must have length n");
  const Matrix g = p.Q() + (d.mu * d.varsigma) * p.BtB() - d.sigma * p.H();
  const Vector c = p.f() - d.sigma * p.b();
  return 0.5 * x.dot(g * x) - c.dot(x) - d.mu * p.lambda() * d.varsigma -
         0.5 * d.mu * d.varsigma * d.varsigma + d.sigma / d.mu;
}

double canonical_measure(const FractionalProgram& p, const Vector& x) {
  return 0.5 * (p.B() * x).squaredNorm() - p.lambda();
}

}  // namespace fracdual
