#include "czlab/grid.hpp"

#include <fftw3.h>

#include <cmath>

#include "czlab/common.hpp"

namespace czlab {

std::size_t GridField::size() const {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

std::size_t GridField::node_index(const int* idx) const {
  std::size_t n = 0, stride = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    n += stride * static_cast<std::size_t>(idx[k]);
    stride *= static_cast<std::size_t>(dims[k]);
  }
  return n;
}

void GridField::node_coords(std::size_t node, int* idx) const {
  for (std::size_t k = 0; k < dims.size(); ++k) {
    idx[k] = static_cast<int>(node % static_cast<std::size_t>(dims[k]));
    node /= static_cast<std::size_t>(dims[k]);
  }
}

void GridField::node_point(std::size_t node, double* out) const {
  for (std::size_t k = 0; k < dims.size(); ++k) {
    int i = static_cast<int>(node % static_cast<std::size_t>(dims[k]));
    node /= static_cast<std::size_t>(dims[k]);
    out[k] = origin[k] + i * spacing;
  }
}

GridField make_grid(const std::vector<double>& origin, double spacing,
                    const std::vector<int>& dims, int ncomp) {
  require(spacing > 0.0, "make_grid: spacing > 0");
  require(!dims.empty() && origin.size() == dims.size(), "make_grid: dims/origin mismatch");
  for (int d : dims) require(d >= 2, "make_grid: >= 2 nodes per axis");
  require(ncomp >= 1, "make_grid: ncomp >= 1");
  GridField g;
  g.origin = origin;
  g.spacing = spacing;
  g.dims = dims;
  g.ncomp = ncomp;
  g.values.assign(g.size() * static_cast<std::size_t>(ncomp), 0.0);
  return g;
}

GridField make_centered_grid(const std::vector<double>& center, double half_width, int n,
                             int ncomp) {
  require(half_width > 0.0 && n >= 2, "make_centered_grid: bad parameters");
  std::vector<double> origin(center);
  for (double& c : origin) c -= half_width;
  std::vector<int> dims(center.size(), n);
  return make_grid(origin, 2.0 * half_width / (n - 1), dims, ncomp);
}

double bump_profile(double t) {
  if (t >= 1.0) return 0.0;
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

// int_0^1 profile(t) t dt = 1/2 - 3/4 + 2/5 = 3/20, so the planar mass of the
// unit-radius profile is 2 pi (3/20) = 0.3 pi.
static constexpr double kProfilePlaneMass = 0.3 * M_PI;

double Mollifier::eval(double r) const { return norm * bump_profile(r / radius); }

double Mollifier::eval_point(const double* u, const double* center, int d) const {
  return eval(dist(u, center, d));
}

double Mollifier::cumulative(double r) const {
  double t = r / radius;
  if (t >= 1.0) return 1.0;
  double raw = t * t * (0.5 - 0.75 * t * t + 0.4 * t * t * t);
  return raw / 0.15;
}

double Mollifier::second_moment() const {
  // (1/2) int |u|^2 psi = (1/2) (2 pi / (0.3 pi)) int_0^1 t^3 profile(t) dt R^2
  // with int t^3 profile = 1/4 - 1/2 + 2/7 = 1/28.
  return 0.5 * (2.0 / 0.3) * (1.0 / 28.0) * radius * radius;
}

Mollifier make_mollifier_2d(double radius) {
  require(radius > 0.0, "make_mollifier_2d: radius > 0");
  Mollifier m;
  m.radius = radius;
  m.norm = 1.0 / (kProfilePlaneMass * radius * radius);
  return m;
}

double grid_l1(const GridField& g, const std::function<bool(const double*)>& keep) {
  double cell = std::pow(g.spacing, g.dim());
  double acc = 0.0;
  std::vector<double> p(g.dim());
  for (std::size_t n = 0; n < g.size(); ++n) {
    g.node_point(n, p.data());
    if (keep && !keep(p.data())) continue;
    acc += norm2(g.at(n), g.ncomp) * cell;
  }
  return acc;
}

void fft2(std::complex<double>* data, int nx, int ny, int sign) {
  require(nx >= 2 && ny >= 2, "fft2: bad extents");
  require(sign == -1 || sign == 1, "fft2: sign must be -1 or +1");
  // FFTW's first plan dimension is the slowest-varying index, which is y in
  // the nx-fastest layout used here.
  fftw_complex* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan = fftw_plan_dft_2d(ny, nx, buf, buf,
                                    sign == -1 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  require(plan != nullptr, "fft2: planner failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

}  // namespace czlab
