// Brute-force ground truth for small instances (n <= 3): exhaustive grid over
// an enclosing box, then derivative-free multistart refinement. Shares no
// code with the dual solver beyond the objective evaluations.
#pragma once

#include <cstdint>

#include "fracdual/problem.hpp"

namespace fracdual {

struct Box {
  Vector lower;
  Vector upper;
};

struct OracleReport {
  double min_value = 0.0;
  Vector argmin;
  double resolution = 0.0;
  Box box;
  long long n_evals = 0;
};

inline constexpr int kOracleMaxDimension = 3;

/// Axis-aligned enclosure of { h(x) >= delta }, inflated by 1%.
Box bounding_box(const FractionalProgram& p);

/// Axis-aligned enclosure of { h(x) >= 1/mu }, inflated by 1%. Throws kMuOutOfRange.
Box bounding_box_mu(const FractionalProgram& p, double mu);

/// 1e-5 for n = 1, 1e-3 for n = 2, 1e-2 otherwise.
double default_resolution(int n);

OracleReport grid_minimize_P0(const FractionalProgram& p, double resolution, std::uint64_t seed = 0);

OracleReport grid_minimize_P_mu(const FractionalProgram& p, double mu, double resolution,
                                std::uint64_t seed = 0);

}  // namespace fracdual
