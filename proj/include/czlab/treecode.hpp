#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "czlab/kernel.hpp"
#include "czlab/spatial.hpp"

namespace czlab {

// Kernel interface for the cluster accelerator.  eval owns the x = 0
// convention: singular odd kernels write zeros (principal value), smooth
// kernels write their actual value.  magnitude(m) bounds sup |K(u)| over
// |u| >= m and must be non-increasing.  A non-negative seam marks a radius
// where K is only continuous, not smooth (the truncation radius): clusters
// straddling it are opened.
struct TreeKernel {
  int d = 2;
  int ncomp = 2;
  std::function<void(const double* diff, double* out)> eval;
  std::function<double(double m)> magnitude;
  double seam = -1.0;
};

TreeKernel tree_kernel(const CZKernel& K, double delta);

struct TreecodeParams {
  double theta = 0.45;    // geometric opening cap: accept only if rho/D <= theta
  int cheb = 6;           // proxy points per box axis
  double rel_tol = 1e-5;  // error budget relative to the absolute-field estimate
  double model_constant = 4.0;  // calibrated headroom in the proxy error model
};

// Clustered evaluation of sum_j K(x - y_j) f_j w_j at each target.
// f is indexed like the measure's atoms (original order); values are written
// target-major: out[t * ncomp + c].  The per-cluster proxy error model is
// budgeted so the total error at a target stays below rel_tol times an upper
// estimate of sum_j |K||f_j| w_j there.
std::vector<double> treecode_apply(const TreeKernel& K, const SpatialIndex& index,
                                   const std::vector<double>& f,
                                   const std::vector<double>& targets,
                                   const TreecodeParams& params = {});

// Same sum evaluated densely; the oracle for the accelerator and the fast
// path for small instances.
std::vector<double> dense_apply(const TreeKernel& K, const SpatialIndex& index,
                                const std::vector<double>& f,
                                const std::vector<double>& targets);

}  // namespace czlab
