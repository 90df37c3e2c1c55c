#pragma once

#include <vector>

#include "czlab/dyadic.hpp"
#include "czlab/kernel.hpp"
#include "czlab/test_function.hpp"

namespace czlab {

// One mean-zero bump per cube: tent supported on B(center(Q), A side(Q) / 2),
// corrected co-centrically and rescaled so the declared Lipschitz bound is
// 0.9 * side(Q)^{-1-s/2}.  Cubes whose windows see no mass contribute the
// zero function and are recorded in `dropped`.
struct RieszFamily {
  std::vector<TestFunction> psi;
  std::vector<std::size_t> cube_index;  // into the source cube list
  std::vector<std::size_t> dropped;
  double A = 8.0;
  double s = 1.0;
};

RieszFamily make_riesz_family(const PointMeasure& mu, const std::vector<DyadicCube>& cubes,
                              double A, double s);

// Gram matrix G[p][q] = <psi_p, psi_q>_{L^2(mu)} (dense, row-major) and its
// extreme eigenvalues.  lambda_max bounds the Riesz synthesis constant:
// ||sum a_Q psi_Q||^2 <= lambda_max |a|^2.
struct GramSpectrum {
  std::size_t size = 0;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  std::vector<double> gram;
};

GramSpectrum riesz_gram(const PointMeasure& mu, const RieszFamily& family);

struct RieszScaling {
  std::vector<double> A;
  std::vector<double> lambda_max;
  double slope = 0.0;  // log lambda_max against log A
};

// Growth of the synthesis constant with the window factor A.
RieszScaling riesz_scaling(const PointMeasure& mu, const std::vector<DyadicCube>& cubes,
                           const std::vector<double>& A_grid, double s);

struct ThetaResult {
  double value = 0.0;          // min over window radii of the localized pairing sup
  double argmin_radius = 0.0;  // radius attaining it
  std::vector<double> radii;
  std::vector<double> per_radius;
};

// Localization quotient of a cube: for window balls E = B(center, t side(Q)),
// theta(t) = side^{-s/2} max over the cube's family of |<T_0(chi_E), psi>_mu|;
// the reported value is the minimum over the window grid.
ThetaResult theta_localization(const CZKernel& K, const PointMeasure& mu, const DyadicCube& cube,
                               double A, double s, const std::vector<double>& window_scales);

}  // namespace czlab
