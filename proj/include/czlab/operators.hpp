#pragma once

#include <cstdint>
#include <vector>

#include "czlab/kernel.hpp"
#include "czlab/measure.hpp"
#include "czlab/treecode.hpp"

namespace czlab {

enum class ApplyMethod { Dense, Clustered, Auto };

struct ApplyParams {
  ApplyMethod method = ApplyMethod::Auto;
  TreecodeParams tree;
  // Reject evaluations that see individual atoms instead of the measure:
  // requires delta >= 10 * mesh_scale or every target at that distance from
  // the support, unless the target coincides with an atom (principal value).
  bool strict_separation = false;
};

// T_{mu,delta}(f)(x) = sum_j K_delta(x - y_j) f_j w_j, written target-major
// (ncomp values per target).  delta = 0 sums in the principal value sense:
// exact coincidences x = y_j are skipped (the inline kernel returns 0 there).
std::vector<double> apply_truncated(const CZKernel& K, const PointMeasure& mu, double delta,
                                    const std::vector<double>& f,
                                    const std::vector<double>& targets,
                                    const ApplyParams& params = {});

// T applied to the constant function 1.
std::vector<double> apply_one(const CZKernel& K, const PointMeasure& mu, double delta,
                              const std::vector<double>& targets, const ApplyParams& params = {});

struct OperatorNormResult {
  double value = 0.0;  // largest singular value of the weighted kernel matrix
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
};

// L^2(mu) -> L^2(mu; R^ncomp) norm of T_{mu,delta} via power iteration on the
// normal matrix of B[(i,c),j] = K_delta^c(y_i - y_j) sqrt(w_i w_j).  Throws
// ConvergenceError (carrying the last iterate) if no restart converges.
OperatorNormResult operator_norm(const CZKernel& K, const PointMeasure& mu, double delta,
                                 double tol = 1e-9, int max_iter = 10000,
                                 std::uint64_t seed = 7777);

struct TailBoundResult {
  double value = 0.0;  // sum over |y-x| > r of w |y-x|^{-s-eps}
  double bound = 0.0;  // Lambda (s+eps)/eps r^{-eps}
  bool violated = false;
};

// Growth-controlled tail sum against its closed-form bound.  Lambda must
// dominate mu(B(z, t)) / t^s for the relevant centers and scales.
TailBoundResult tail_integral(const PointMeasure& mu, const double* x, double r, double s,
                              double eps, double lambda_growth);

struct LocalL1Result {
  double value = 0.0;  // integral over B(x,r) of sum_{|z-y|<=R} w_z |z-y|^{-s} dy
  double ratio = 0.0;  // value / (r^{d-s} mu(B(x, r+R)))
};

// Lattice quadrature of the locally integrable majorant.  Lattice nodes whose
// cell contains an atom closer than the cell's equivalent radius use the
// cell-averaged value of |.|^{-s}, which keeps the quadrature stable.
LocalL1Result local_l1_integral(const PointMeasure& mu, const double* x, double r, double R,
                                double s, int lattice_per_axis = 64);

struct AntisymResult {
  double residual = 0.0;  // max over components of |sum_{i != j} K(y_i - y_j) w_i w_j|
  double abs_sum = 0.0;   // same sum with every term replaced by its magnitude
};

// Row-major double sum over atoms in the closed ball; the pure-antisymmetry
// cancellation makes residual / abs_sum a floating-point noise measurement.
AntisymResult antisym_residual(const CZKernel& K, const PointMeasure& mu,
                               const std::vector<double>& center, double radius, double delta);

struct BilinearResult {
  std::vector<double> direct;   // sum_{i,j} K_delta(y_i - y_j) f_j g_i w_i w_j (per component)
  std::vector<double> antisym;  // pair form: sum_{i<j} K(y_i-y_j) (f_j g_i - f_i g_j) w_i w_j
};

// Both forms agree identically when delta = 0 terms are excluded pairwise;
// the antisym form is the one defined for the raw kernel.
BilinearResult bilinear_form(const CZKernel& K, const PointMeasure& mu,
                             const std::vector<double>& f, const std::vector<double>& g,
                             double delta);

// Closed-form sup over unit-norm f of delta^{s/2} |T_{mu,delta}(f mu)(x)| at
// the worst sampled target (Cauchy-Schwarz is attained), a scale-free profile
// of the truncated operator's size.
double c2_profile(const CZKernel& K, const PointMeasure& mu, double delta,
                  std::size_t max_targets = 2000);

}  // namespace czlab
