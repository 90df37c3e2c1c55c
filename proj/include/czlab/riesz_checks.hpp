#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "czlab/grid.hpp"
#include "czlab/kernel.hpp"
#include "czlab/measure.hpp"
#include "czlab/operators.hpp"

namespace czlab {

// Batched field evaluator: target-major component values for a flat target list.
using BatchFieldEval = std::function<std::vector<double>(const std::vector<double>&)>;

BatchFieldEval field_from_measure(const CZKernel& K, const PointMeasure& mu, double delta,
                                  const ApplyParams& params = {});

// Radial amplitude of a mollified convolution kernel in the plane, tabulated
// in units of the mollifier radius with a Taylor far branch past rho_max.
// vector_kernel: amplitude G with field G(|x|) x/|x|; otherwise a scalar even
// kernel value.
struct RadialTable {
  double radius = 0.5;
  double s = 1.0;
  double rho_max = 8.0;
  bool vector_kernel = true;
  double second_moment = 0.0;
  std::vector<double> values;    // amplitude at i * rho_max / (n-1), mollifier units
  std::vector<double> envelope;  // suffix max of |values|

  double eval(double r) const;      // physical radius, Catmull-Rom between knots
  double bound(double m) const;     // non-increasing sup of |amplitude| over r >= m
};

// Quadrature construction, valid for s in (0, 1]; the pole at the evaluation
// point is removed by a power substitution in the radial variable.
RadialTable radial_profile_quadrature_2d(double s, double mollifier_radius, bool vector_kernel,
                                         int table_n = 512, double rho_max = 8.0,
                                         int nodes_r = 385, int nodes_theta = 512);
// Closed form for the gradient case s = 1: amplitude = ballmass(r) / r.
RadialTable mollified_riesz_profile_closed_2d(double mollifier_radius, int table_n = 512);
// Dispatcher: closed form at s = 1, quadrature below.
RadialTable mollified_riesz_profile_2d(double s, double mollifier_radius);
// Scalar kernel |x|^{-(s+1)} mollified, s < 1 only (log divergence at s = 1).
RadialTable mollified_power_profile_2d(double s, double mollifier_radius);

// Central-difference divergence of a plane vector field; boundary nodes zero.
GridField grid_divergence(const GridField& field);
// Interior box sum of the divergence against the telescoped boundary flux,
// relative; validates the stencil independently of any operator identity.
double divergence_theorem_residual(const GridField& field);

struct DivergenceResult {
  GridField field;  // mollified transform of the measure on the grid
  GridField lhs;    // its lattice divergence
  GridField rhs;    // b times the mollified measure (s = 1) or the fitted
                    // scalar convolution (s < 1)
  double b = 0.0;
  bool b_fitted = false;
  double rel_l1 = 0.0;
  std::size_t interior_nodes = 0;
};

// Divergence identity for the plane s-Riesz transform, s <= 1.  The field and
// both sides are assembled per atom from analytically mollified profiles, so
// the residual isolates the stencil and the identity itself.
DivergenceResult divergence_identity(const PointMeasure& mu, double s,
                                     const std::vector<double>& center, double half_width,
                                     int grid_n, double mollifier_radius = 0.5,
                                     const std::vector<double>* f = nullptr);

struct Rl1LowerBound {
  double integral = 0.0;  // lattice L1 of the field over B(x, 3r)
  double eps = 0.0;       // mu(B(x, r)) / r^s
  double c_fitted = 0.0;  // integral / (eps * area of B(x, 3r))
};

// Lower-bound companion of the divergence identity: mass in a ball forces
// field L1 mass nearby.  c_fitted should be scale-stable on uniform measures.
Rl1LowerBound rl1_lower_bound(const CZKernel& K, const PointMeasure& mu,
                              const std::vector<double>& x, double r, int grid_per_axis = 96);

struct PvResult {
  std::vector<double> value;   // Richardson-extrapolated limit, per component
  double value_norm = 0.0;     // Euclidean size of the extrapolated value
  double normalization = 0.0;  // quadrature of |u(x0) - u(x)| with the same weights
  std::vector<double> fine, coarse;  // estimates at r_excl and 2 r_excl
  std::size_t evals = 0;
};

// Symmetric-shell principal value of int (u(x0) - u(x)) / |x - x0|^{2d+1-s}.
// Shells are log-equal with antipodal angular nodes; the exclusion radius is
// extrapolated at ratio 2 with exponent 1 + s - d.
PvResult frac_laplacian_pv(const BatchFieldEval& u, int d, int ncomp, double s,
                           const std::vector<double>& x0, double r_excl, double r_outer,
                           int shells_per_decade = 24, int angular = 64);

struct PhilemResult {
  double lhs = 0.0;    // mu(B(x, r))
  double rhs = 0.0;    // integral of |u(z) - gamma| (r + |z - x|)^{s - 2d} at best gamma
  double ratio = 0.0;  // rhs r^d / lhs
  double c20 = 0.0;    // lhs / (r^d rhs)
  std::vector<double> gamma;
  double tail_fraction = 0.0;  // closed-form bound on the mass outside the grid
};

// Ball-mass upper bound through the weighted field integral, with the free
// constant optimized over the supplied candidates (zero is always tried).
PhilemResult philem_check(const BatchFieldEval& u, int ncomp, const PointMeasure& mu,
                          const std::vector<double>& x, double r, double s, double half_width,
                          int grid_n,
                          const std::vector<std::vector<double>>& gamma_candidates = {});

struct FourierGResult {
  GridField g;
  double b = 0.0;        // calibration matching the reconstruction to f at the center
  double mean_abs = 0.0; // largest component mean of g over the grid
  double g_max = 0.0;
  double rel_l2 = 0.0;   // reconstruction error against f on the inner half-grid
  double decay_max = 0.0, decay_median = 0.0;  // |g| (1 + |x|)^{2d - s} outside W/2
  std::size_t oracle_targets = 0;
};

// Spectral construction of a vector density g with R*(g m_d) = f: multiply
// f-hat by i xi |xi|^{d-1-s} and calibrate the scalar b against a direct
// summation of the adjoint transform on a subsampled inner grid.
FourierGResult fourier_g(int n, double half_width, double f_radius, double s,
                         int oracle_stride = 0);

struct TruncationTable {
  std::vector<double> n_values;
  std::vector<double> sup_diff;  // sup over B(0, A) of the removed-tail field
  double slope = 0.0;
};

// Window truncation error sup_{B(0,A)} |T(mu) - T(mu restricted to B(0,N))|,
// evaluated exactly as the field of the removed atoms.
TruncationTable truncation_convergence(const CZKernel& K, const PointMeasure& mu, double A,
                                       const std::vector<double>& n_values,
                                       int targets_per_axis = 21);

struct FieldGrowth {
  std::vector<double> a_values;
  std::vector<double> integrals;  // lattice L1 of the field over B(0, A)
  std::vector<double> ratios;     // integrals / (A^d log(e + A))
};

// Growth diagnostic: the field's local L1 mass should scale no faster than
// A^d log(e + A).
FieldGrowth field_l1_growth(const CZKernel& K, const PointMeasure& mu,
                            const std::vector<double>& a_values, int grid_per_axis,
                            double delta);

struct SecondDerResult {
  double max_entry = 0.0;  // largest finite-difference Hessian entry at step h
  double coarse = 0.0;     // same at step 2h
  double stability = 0.0;  // relative gap between the two
};

// Finite-difference Hessian bound of the field at points away from the
// support; smoothness there is what the principal-value quadrature relies on.
SecondDerResult secondder_check(const CZKernel& K, const PointMeasure& mu,
                                const std::vector<double>& targets, double h);

}  // namespace czlab
