#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fracdual/oracle.hpp"
#include "support.hpp"

using namespace fracdual;
using fracdual::testing::double_well;
using fracdual::testing::random_program;
using fracdual::testing::sample_feasible;

TEST(BoundingBox, DoubleWellInterval) {
  const Box box = bounding_box(double_well());
  const double r = std::sqrt(0.5);
  ASSERT_EQ(box.lower.size(), 1);
  EXPECT_NEAR(box.lower(0), 1.0 - 1.01 * r, 1e-12);
  EXPECT_NEAR(box.upper(0), 1.0 + 1.01 * r, 1e-12);
  EXPECT_LT(box.lower(0), 1.0 - r);
  EXPECT_GT(box.upper(0), 1.0 + r);
}

TEST(BoundingBox, SingletonCollapses) {
  const Box box = bounding_box(double_well(1.0));
  EXPECT_NEAR(box.lower(0), 1.0, 1e-7);
  EXPECT_NEAR(box.upper(0), 1.0, 1e-7);
}

TEST(BoundingBox, DiagonalHIsPerAxis) {
  ProgramData d;
  d.Q = Matrix::Identity(2, 2);
  d.f = Vector::Zero(2);
  d.B = Matrix::Zero(0, 2);
  d.H = Matrix::Zero(2, 2);
  d.H(0, 0) = -1.0;
  d.H(1, 1) = -4.0;
  d.b = Vector::Zero(2);
  d.b << -1.0, -4.0;  // center (1, 1), h_max = 2.5
  d.delta = 0.5;
  const FractionalProgram p = FractionalProgram::validate(d);
  const Box box = bounding_box(p);
  // 1/2 (x-c)'(-H)(x-c) <= 2: half-widths sqrt(4/1) and sqrt(4/4)
  EXPECT_NEAR(box.upper(0) - 1.0, 2.0 * 1.01, 1e-12);
  EXPECT_NEAR(box.upper(1) - 1.0, 1.0 * 1.01, 1e-12);
  EXPECT_NEAR(box.lower(1), 1.0 - 1.01, 1e-12);
}

TEST(BoundingBox, SubproblemBoxShrinksWithMu) {
  const FractionalProgram p = random_program(3, 2, 4);
  const Box outer = bounding_box_mu(p, p.mu_max());
  const Box inner = bounding_box_mu(p, 0.5 * (p.mu0() + p.mu_max()));
  EXPECT_TRUE((inner.lower.array() >= outer.lower.array()).all());
  EXPECT_TRUE((inner.upper.array() <= outer.upper.array()).all());
  EXPECT_THROW(bounding_box_mu(p, 2.0 * p.mu_max()), Error);
}

TEST(BoundingBox, ContainsSampledFeasiblePoints) {
  std::mt19937_64 rng(1);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const FractionalProgram p = random_program(1 + s % 4, 2, s);
    const Box box = bounding_box(p);
    for (int k = 0; k < 100; ++k) {
      const Vector x = sample_feasible(p, p.delta(), rng);
      EXPECT_TRUE((x.array() >= box.lower.array()).all() && (x.array() <= box.upper.array()).all());
    }
  }
}

TEST(Resolution, Defaults) {
  EXPECT_DOUBLE_EQ(default_resolution(1), 1e-5);
  EXPECT_DOUBLE_EQ(default_resolution(2), 1e-3);
  EXPECT_DOUBLE_EQ(default_resolution(3), 1e-2);
}

TEST(GridP0, DoubleWellMinimum) {
  const FractionalProgram p = double_well();
  const OracleReport r = grid_minimize_P0(p, 1e-5);
  // stationary point of x^2 + (x^2/2 - 1)^2 / (2 (1 - (x-1)^2)) inside the interval
  EXPECT_NEAR(r.min_value, 0.7541442500, 1e-9);
  EXPECT_NEAR(r.argmin(0), 0.548993, 1e-5);
  EXPECT_DOUBLE_EQ(r.min_value, eval_P0(p, r.argmin));
  EXPECT_GT(r.n_evals, 100000);
  EXPECT_DOUBLE_EQ(r.resolution, 1e-5);
  // the value is a genuine local minimum: nearby points are no better
  for (double dx : {-1e-4, 1e-4}) {
    EXPECT_GE(eval_P0(p, r.argmin + Vector::Constant(1, dx)), r.min_value);
  }
}

// With delta = h_max the set is {1}, but the feasibility slack 1e-9 (1 + 1)
// admits 1 - (x - 1)^2 >= 1 - 2e-9, a ball of radius sqrt(2e-9) around it.
constexpr double kSingletonRadius = 4.4721359549995796e-05;

TEST(GridP0, SingletonSet) {
  const FractionalProgram p = double_well(1.0);
  const OracleReport r = grid_minimize_P0(p, 1e-5);
  EXPECT_LE(std::abs(r.argmin(0) - 1.0), kSingletonRadius * (1.0 + 1e-6));
  // |dP0/dx| at x = 1 is 1.5, so the value moves by at most 1.5 * radius
  EXPECT_LE(r.min_value, 1.125);
  EXPECT_GE(r.min_value, 1.125 - 1.5 * kSingletonRadius * (1.0 + 1e-3));
}

TEST(GridPmu, DoubleWellEnds) {
  const FractionalProgram p = double_well();
  const OracleReport at1 = grid_minimize_P_mu(p, 1.0, 1e-5);
  EXPECT_LE(std::abs(at1.argmin(0) - 1.0), kSingletonRadius * (1.0 + 1e-6));
  EXPECT_NEAR(at1.min_value, 1.125, 1.5 * kSingletonRadius * (1.0 + 1e-3));
  const OracleReport at2 = grid_minimize_P_mu(p, 2.0, 1e-5);
  const double x = 1.0 - std::sqrt(0.5);
  EXPECT_NEAR(at2.argmin(0), x, 1e-6);
  EXPECT_NEAR(at2.min_value, 1.00186, 1e-4);
  EXPECT_TRUE(is_feasible_mu(p, 2.0, at2.argmin));
}

TEST(GridPmu, MuOutOfRange) {
  try {
    grid_minimize_P_mu(double_well(), 3.0, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMuOutOfRange);
  }
}

TEST(Grid, DimensionGuard) {
  const FractionalProgram p = random_program(4, 1, 0);
  try {
    grid_minimize_P0(p, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionTooLarge);
  }
}

TEST(Grid, PointBudgetGuard) {
  const FractionalProgram p = random_program(3, 1, 0);
  EXPECT_THROW(grid_minimize_P0(p, 1e-6), Error);
}

TEST(Grid, ArgminFeasibleAndValueConsistent) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const FractionalProgram p = random_program(1 + s % 2, s % 3, s);
    const OracleReport r = grid_minimize_P0(p, default_resolution(p.n()), s);
    EXPECT_GE(eval_components(p, r.argmin).h, p.delta() - feasibility_slack(p.delta()));
    EXPECT_DOUBLE_EQ(r.min_value, eval_P0(p, r.argmin));
  }
}

TEST(Grid, RefinementNeverWorseThanItsLattice) {
  // Enumerate the same lattice the oracle scans; refinement only accepts
  // improvements, so the report is at most the best lattice value.
  const double res = 0.05;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const FractionalProgram p = random_program(2, 2, s);
    const OracleReport coarse = grid_minimize_P0(p, res, s);
    const Box& box = coarse.box;
    const long long nx = static_cast<long long>(std::floor((box.upper(0) - box.lower(0)) / res)) + 1;
    const long long ny = static_cast<long long>(std::floor((box.upper(1) - box.lower(1)) / res)) + 1;
    double best_cell = std::numeric_limits<double>::infinity();
    for (long long i = 0; i < nx; ++i) {
      for (long long j = 0; j < ny; ++j) {
        Vector v(2);
        v << box.lower(0) + res * static_cast<double>(i), box.lower(1) + res * static_cast<double>(j);
        if (eval_components(p, v).h >= p.delta() - feasibility_slack(p.delta())) {
          best_cell = std::min(best_cell, eval_P0(p, v));
        }
      }
    }
    ASSERT_TRUE(std::isfinite(best_cell));
    EXPECT_LE(coarse.min_value, best_cell) << "seed " << s;
  }
}

TEST(Grid, MatchesDenseSampling) {
  // Random feasible samples never beat the oracle by more than its tolerance.
  std::mt19937_64 rng(3);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const FractionalProgram p = random_program(2, 2, s);
    const OracleReport r = grid_minimize_P0(p, 1e-3, s);
    for (int k = 0; k < 20000; ++k) {
      const Vector x = sample_feasible(p, p.delta(), rng);
      if (eval_components(p, x).h < p.delta()) continue;
      EXPECT_GE(eval_P0(p, x), r.min_value - 1e-6) << "seed " << s;
    }
  }
}

TEST(Grid, DeterministicInSeed) {
  const FractionalProgram p = random_program(2, 2, 8);
  const OracleReport a = grid_minimize_P0(p, 2e-3, 5), b = grid_minimize_P0(p, 2e-3, 5);
  EXPECT_EQ(a.min_value, b.min_value);
  EXPECT_EQ(a.argmin, b.argmin);
}

TEST(Grid, SubproblemMinimaRecoverRatioMinimum) {
  // min over mu of min P_mu equals min P0, up to the mu spacing
  for (std::uint64_t s = 0; s < 6; ++s) {
    const FractionalProgram p = random_program(1, 1 + s % 2, s);
    const double res = 1e-4;
    const OracleReport whole = grid_minimize_P0(p, res);
    double best = std::numeric_limits<double>::infinity();
    const int grid = 64;
    const double spacing = p.interval().width() / (grid - 1);
    for (int k = 0; k < grid; ++k) {
      const double mu = p.mu0() + spacing * k;
      const OracleReport sub = grid_minimize_P_mu(p, std::min(mu, p.mu_max()), res);
      best = std::min(best, sub.min_value);
    }
    const double g_at_min = eval_components(p, whole.argmin).g;
    EXPECT_GE(best, whole.min_value - 1e-6) << "seed " << s;
    EXPECT_LE(best, whole.min_value + spacing * g_at_min + 1e-6) << "seed " << s;
  }
}
