#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace czlab {

// Regular node lattice with vector values.  Axis 0 varies fastest in memory;
// node n sits at origin + index * spacing componentwise.
struct GridField {
  std::vector<double> origin;
  double spacing = 1.0;
  std::vector<int> dims;
  int ncomp = 1;
  std::vector<double> values;

  int dim() const { return static_cast<int>(dims.size()); }
  std::size_t size() const;
  std::size_t node_index(const int* idx) const;
  void node_coords(std::size_t node, int* idx) const;
  void node_point(std::size_t node, double* out) const;
  double* at(std::size_t node) { return &values[node * ncomp]; }
  const double* at(std::size_t node) const { return &values[node * ncomp]; }
};

GridField make_grid(const std::vector<double>& origin, double spacing,
                    const std::vector<int>& dims, int ncomp);

// n nodes per axis centered on `center`, spanning [-half_width, half_width].
GridField make_centered_grid(const std::vector<double>& center, double half_width, int n,
                             int ncomp);

// Radial C1 bump profile 1 - t^2 (3 - 2t) on [0, 1], zero beyond.
double bump_profile(double t);

// Radial mollifier in the plane with unit mass.
struct Mollifier {
  double radius = 0.5;
  double norm = 1.0;  // peak value: integral of norm * profile(|u|/radius) is 1
  double eval(double r) const;
  double eval_point(const double* u, const double* center, int d) const;
  // Mass of the centered ball of radius r, exact closed form.
  double cumulative(double r) const;
  // Second moment (1/d) * int |u|^2 psi(u) du.
  double second_moment() const;
};
Mollifier make_mollifier_2d(double radius);

// spacing^d-weighted sum of the pointwise Euclidean norm over selected nodes.
double grid_l1(const GridField& g, const std::function<bool(const double*)>& keep);

// In-place complex FFT on an nx-fastest plane, sign -1 forward, +1 backward
// (backward transform is unnormalized).
void fft2(std::complex<double>* data, int nx, int ny, int sign);

}  // namespace czlab
