#include "czlab/dyadic.hpp"

#include <algorithm>
#include <cmath>

#include "czlab/common.hpp"

namespace czlab {

namespace {

bool cube_contains(const std::vector<double>& corner, double side, const double* p, int d) {
  for (int k = 0; k < d; ++k)
    if (p[k] < corner[k] || p[k] >= corner[k] + side) return false;
  return true;
}

void split_cube(const PointMeasure& mu, const DyadicCube& parent, int max_level,
                std::vector<DyadicCube>& out) {
  if (parent.level >= max_level) return;
  int d = mu.dim();
  std::size_t children = std::size_t{1} << d;
  double half = 0.5 * parent.side;
  for (std::size_t m = 0; m < children; ++m) {
    DyadicCube child;
    child.corner = parent.corner;
    for (int k = 0; k < d; ++k)
      if (m & (std::size_t{1} << k)) child.corner[k] += half;
    child.side = half;
    child.level = parent.level + 1;
    for (std::size_t j : parent.atoms)
      if (cube_contains(child.corner, half, mu.atom(j), d)) {
        child.atoms.push_back(j);
        child.mass += mu.weight(j);
      }
    if (!child.atoms.empty()) out.push_back(std::move(child));
  }
}

}  // namespace

std::vector<DyadicCube> dyadic_cubes(const PointMeasure& mu, const std::vector<double>& root_corner,
                                     double root_side, int max_level) {
  require(static_cast<int>(root_corner.size()) == mu.dim(), "dyadic_cubes: corner dim");
  require(root_side > 0.0, "dyadic_cubes: root side > 0");
  require(max_level >= 0 && max_level <= 24, "dyadic_cubes: 0 <= max_level <= 24");
  DyadicCube root;
  root.corner = root_corner;
  root.side = root_side;
  root.level = 0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (cube_contains(root_corner, root_side, mu.atom(j), mu.dim())) {
      root.atoms.push_back(j);
      root.mass += mu.weight(j);
    }
  std::vector<DyadicCube> all;
  if (root.atoms.empty()) return all;
  all.push_back(std::move(root));
  std::size_t head = 0;
  while (head < all.size()) {
    // Index-based: split_cube may reallocate the vector.
    DyadicCube parent = all[head];
    split_cube(mu, parent, max_level, all);
    ++head;
  }
  std::stable_sort(all.begin(), all.end(), [](const DyadicCube& a, const DyadicCube& b) {
    if (a.level != b.level) return a.level < b.level;
    return a.corner < b.corner;
  });
  return all;
}

CarlesonResult carleson_sum(const PointMeasure& mu, const std::vector<double>& root_corner,
                            double root_side, int max_level, double s, double density_floor) {
  require(s > 0.0, "carleson_sum: s > 0");
  require(density_floor >= 0.0, "carleson_sum: density_floor >= 0");
  CarlesonResult out;
  out.per_level.assign(max_level + 1, 0.0);
  for (const DyadicCube& q : dyadic_cubes(mu, root_corner, root_side, max_level)) {
    ++out.cubes_visited;
    double ls = std::pow(q.side, s);
    if (q.mass >= density_floor * ls) {
      out.total += ls;
      out.per_level[q.level] += ls;
      ++out.cubes_counted;
    }
  }
  return out;
}

}  // namespace czlab
