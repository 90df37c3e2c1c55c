#pragma once

#include <vector>

#include "czlab/measure.hpp"

namespace czlab {

// Half-open dyadic cube [corner, corner + side)^d carrying the atoms inside.
struct DyadicCube {
  std::vector<double> corner;
  double side = 1.0;
  int level = 0;
  double mass = 0.0;
  std::vector<std::size_t> atoms;
  std::vector<double> center() const {
    std::vector<double> c(corner);
    for (double& x : c) x += 0.5 * side;
    return c;
  }
};

// All dyadic descendants of the root cube down to max_level that carry mass.
// Ordering: by level, then lexicographic by corner (deterministic).
std::vector<DyadicCube> dyadic_cubes(const PointMeasure& mu, const std::vector<double>& root_corner,
                                     double root_side, int max_level);

struct CarlesonResult {
  double total = 0.0;               // sum of side^s over qualifying cubes
  std::vector<double> per_level;    // contribution per level, 0..max_level
  std::size_t cubes_counted = 0;
  std::size_t cubes_visited = 0;
};

// Packing sum over cubes with mu(Q) >= density_floor * side(Q)^s.  A cube
// below the floor can still have qualifying descendants, so the tree is
// walked to max_level wherever mass remains.
CarlesonResult carleson_sum(const PointMeasure& mu, const std::vector<double>& root_corner,
                            double root_side, int max_level, double s, double density_floor);

}  // namespace czlab
