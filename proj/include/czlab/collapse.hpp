#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "czlab/reflectionless.hpp"

namespace czlab {

// Axis-aligned probe lattice: points origin + (i + 1/2) spacing per axis.
struct ProbeLattice {
  std::vector<double> origin;
  double spacing = 0.1;
  std::vector<int> counts;
  std::size_t size() const;
  std::vector<double> point(std::size_t i) const;
  std::vector<double> all_points() const;  // flat
};

ProbeLattice lattice_over_ball(const std::vector<double>& center, double radius,
                               int per_axis);

// Sampled directional level set E(e, eps) = {x : e . Ttilde_delta(1)(x) > eps
// for every delta on the grid}.  Each probe stores its minimum of the dot
// product over the grid, so membership at any threshold is a comparison and
// is monotone in eps by construction.
struct LevelSetSample {
  ProbeLattice lattice;
  std::vector<double> direction;   // e, unit vector in component space
  std::vector<double> min_dot;     // per probe
  std::vector<double> delta_grid;
  double eps = 0.0;                // construction threshold (reporting only)
  bool member(std::size_t i, double threshold) const { return min_dot[i] > threshold; }
};

LevelSetSample level_set(const CZKernel& K, const PointMeasure& mu,
                         const std::vector<double>& direction, double eps,
                         const ProbeLattice& lattice, const std::vector<double>& delta_grid,
                         const ReferenceBall& ref, const TtildeOptions& opts = {});

struct BallQuery {
  std::vector<double> center;
  double radius = 1.0;
};

struct DensityResult {
  bool dense = false;
  double worst_gap = 0.0;       // largest distance from a probe in q to the set
  std::size_t probes_tested = 0;
  std::size_t members = 0;
};

// Relative form: every lattice probe inside q must lie within kappa * q.radius
// of a member (members taken anywhere in the sample).
DensityResult density_test(const LevelSetSample& E, const BallQuery& q, double kappa);

// Absolute form used by the schedule checks: members restricted to
// member_ball, probes restricted to probe_ball, gap capped by an absolute
// radius.  threshold overrides the construction eps.
DensityResult density_test_abs(const LevelSetSample& E, double threshold,
                               const BallQuery& probe_ball, const BallQuery& member_ball,
                               double radius_abs);

struct RearrangeCheck {
  bool hypothesis = false;  // (eps/2) a <= 2 lambda sqrt(a (b - a))
  double bound = 0.0;       // [4 lambda^2 / (4 lambda^2 + eps^2/4)] b
  bool ok = true;           // hypothesis implies a <= bound
};

// Scalar rearrangement: whenever the paired-mass term dominates the linear
// one, the smaller mass is a definite fraction of the larger.  Pure algebra
// on (a, b); exact up to one rounding slack.
RearrangeCheck rearrange_bound(double a, double b, double lambda, double eps);

enum class StepStatus { Verified, Violated, Inconclusive };

struct DecayStepResult {
  StepStatus status = StepStatus::Inconclusive;
  bool hypotheses_ok = false;
  double mass_inner = 0.0;   // mu(B(0, t - sqrt(kappa)))
  double mass_outer = 0.0;   // mu(B(0, t))
  double bound = 0.0;        // (1 - c8 eps^2) mu(B(0, t))
  std::string note;
};

// Mass decay step: if E(e, eps) cap B(0,t) is kappa-dense in B(0, t - sqrt(kappa))
// and eps controls kappa, the inner mass drops by the factor 1 - c8 eps^2 with
// c8 = 1 / (16 Lambda^2 + 1).  Checks the hypotheses on the sample, then
// compares both sides.
DecayStepResult decay_step(const PointMeasure& mu, const LevelSetSample& E, double t,
                           double kappa, double eps, double lambda_growth, double c6,
                           double alpha);

struct IncrementStepResult {
  StepStatus status = StepStatus::Inconclusive;
  double eps_next = 0.0;
  double kappa_next = 0.0;
  double t_next = 0.0;
  double gap_found = 0.0;  // worst gap at the tightened threshold
  std::string note;
};

// Density increment: when mu(B(0,t)) <= m, the level set at the tightened
// threshold eps' = eps - c6 (kappa^{alpha/2} + sqrt(m)) is kappa'-dense in
// B(0, t'), kappa' = c9 m^{1/(2d)}, t' = t - sqrt(kappa).  Verifies the
// conclusion against the sample; a kappa' below the probe spacing is reported
// Inconclusive rather than Verified.
IncrementStepResult increment_step(const PointMeasure& mu, const LevelSetSample& E, double t,
                                   double kappa, double eps, double m, double c6, double c9,
                                   double alpha);

struct ScheduleParams {
  double eps0 = 0.2;
  double kappa0 = 1e-4;
  double m0 = 1e-50;     // starting mass bound
  double t0 = 1.5;
  double lambda = 0.0;   // per-step mass factor 1 - lambda/4; from c8 eps0^2 when 0
  double c6 = 1.0;
  double c9 = 1.0;
  double alpha = 1.0;
  double lambda_growth = 1.0;
  int d = 2;
};

struct ScheduleResult {
  bool feasible = false;
  long steps = 0;             // steps until the mass bound underflows doubles
  double eps_final = 0.0;     // infinite-tail threshold, closed form
  double kappa_sum = 0.0;     // sum of sqrt(kappa_j), the total radius spent
  double eps_spent = 0.0;     // total threshold decrement
  double t_final = 0.0;
  std::string note;
  // Iterated subtraction of eps and t agrees with the additive spends.
  bool conservation_ok = false;
};

// Iterates the formal schedule eps_{j+1} = eps_j - c6 (kappa_j^{alpha/2} +
// sqrt(m_j)), m_{j+1} = (1 - lambda/4) m_j, kappa_{j+1} = c9 m_{j+1}^{1/(2d)},
// t_{j+1} = t_j - sqrt(kappa_j), and verifies the invariants eps_j >= eps0/2,
// t_j > 1 via the closed-form geometric tails (the step count is huge, the
// tails are exact).
ScheduleResult run_schedule(const ScheduleParams& p);

// Largest (m0, kappa0) budgets for which the schedule stays feasible at the
// given eps0, found by bisection; the eps0/8 decrement budget is split evenly
// between the kappa tail and the mass tail.
ScheduleParams derive_schedule_params(double eps0, double c6, double c9, double alpha, int d,
                                      double lambda_growth);

struct KappaExponentFit {
  std::vector<double> eps;
  std::vector<double> kappa0;
  double exponent = 0.0;  // d log kappa0 / d log eps
};

// How the feasible starting resolution shrinks with eps; the fitted exponent
// is finite and positive for admissible parameters.
KappaExponentFit kappa_of_eps(const std::vector<double>& eps_grid, double c6, double c9,
                              double alpha, int d, double lambda_growth);

struct AlternativeResult {
  std::string outcome;  // "dense-mass", "empty-ball", "inconclusive"
  bool hypothesis_ok = false;  // field average over the ball clears eps
  double field_avg = 0.0;
  double mass_fraction = 0.0;   // mu(B(x, Mr)) / (M r)^s relative to lambda_growth
  double empty_radius = 0.0;    // largest tau r ball found empty
  std::vector<double> empty_center;
};

// Dichotomy scan for a ball B(x, r): either mu carries mass at scale M r
// comparable to the growth bound, or some ball of radius tau r inside B(x, r)
// misses the support entirely.
AlternativeResult alternative_check(const CZKernel& K, const PointMeasure& mu,
                                    const std::vector<double>& x, double r, double eps, double M,
                                    double tau, double delta_eff, const ReferenceBall& ref,
                                    int probe_per_axis = 24);

struct PorosityResult {
  std::string status;  // "found" or "skipped"
  double field_avg = 0.0;
  double threshold = 0.0;
  double lambda_found = 0.0;  // hole radius / q.radius
  std::vector<double> hole_center;
  double hole_radius = 0.0;
};

// Searches B(q) for the largest ball disjoint from the support, after
// checking that the mollified field |Ttilde_{delta_eff}(1)| averages above
// eps over the ball (otherwise the scan reports "skipped").
PorosityResult porosity_scan(const CZKernel& K, const PointMeasure& mu, const BallQuery& q,
                             double eps, double delta_eff, const ReferenceBall& ref,
                             int grid_per_axis = 64, int refine_rounds = 3);

}  // namespace czlab
