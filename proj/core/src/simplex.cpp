#include "bellaudit/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bellaudit {

namespace {
constexpr double kPivotTol = 1e-11;
constexpr double kPriceTol = 1e-12;
constexpr std::size_t kDegenerateRunBeforeBland = 50;
}  // namespace

PhaseOneResult solve_phase_one(const DenseMatrix& a, const std::vector<double>& b) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  if (b.size() != m) throw std::invalid_argument("solve_phase_one: size mismatch");

  // Tableau columns: n structural, m artificial, then the right-hand side.
  // Row m holds reduced costs of the phase-one objective (sum of artificials).
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  DenseMatrix t(m + 1, width);
  std::vector<double> flip(m, 1.0);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) flip[i] = -1.0;
    for (std::size_t j = 0; j < n; ++j) t(i, j) = flip[i] * a(i, j);
    t(i, n + i) = 1.0;
    t(i, rhs) = flip[i] * b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < width; ++j) {
    if (j >= n && j < rhs) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += t(i, j);
    t(m, j) = -s;
  }

  PhaseOneResult res;
  std::size_t degenerate_run = 0;
  const std::size_t max_pivots = 50 * (n + m) + 1000;
  while (res.pivots < max_pivots) {
    const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
    std::size_t enter = width;
    double best = -kPriceTol;
    for (std::size_t j = 0; j < rhs; ++j) {
      const double rc = t(m, j);
      if (rc < best) {
        enter = j;
        if (bland) break;
        best = rc;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double coef = t(i, enter);
      if (coef <= kPivotTol) continue;
      const double r = t(i, rhs) / coef;
      if (r < ratio - 1e-15 || (r <= ratio + 1e-15 && leave < m && basis[i] < basis[leave])) {
        ratio = r;
        leave = i;
      }
    }
    // Phase one is bounded below by zero, so a ray cannot occur.
    if (leave == m) break;

    degenerate_run = ratio <= 1e-15 ? degenerate_run + 1 : 0;
    const double piv = t(leave, enter);
    for (std::size_t j = 0; j < width; ++j) t(leave, j) /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t(i, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) t(i, j) -= f * t(leave, j);
    }
    basis[leave] = enter;
    ++res.pivots;
  }

  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) res.x[basis[i]] = std::max(0.0, t(i, rhs));
  }
  res.infeasibility = std::max(0.0, -t(m, rhs));
  // Reduced cost of artificial i is 1 - y_i (y in the flipped rows).
  res.y.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) res.y[i] = flip[i] * (1.0 - t(m, n + i));
  return res;
}

}  // namespace bellaudit
