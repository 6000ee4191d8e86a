#pragma once

#include <cstddef>
#include <vector>

namespace bellaudit {

/// Dense row-major matrix, just enough for small LPs.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct PhaseOneResult {
  /// Minimum total artificial mass; zero (within tolerance) iff feasible.
  double infeasibility = 0.0;
  /// A point with x >= 0 minimizing |Ax - b|_1 in the phase-one sense.
  std::vector<double> x;
  /// Farkas multipliers: y^T A <= 0 componentwise and y^T b = infeasibility.
  std::vector<double> y;
  std::size_t pivots = 0;
};

/// Phase-one simplex for {x >= 0 : A x = b}. Dantzig pricing with a switch
/// to Bland's rule after a run of degenerate pivots.
PhaseOneResult solve_phase_one(const DenseMatrix& a, const std::vector<double>& b);

}  // namespace bellaudit
