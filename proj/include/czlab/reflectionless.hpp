#pragma once

#include <cstdint>
#include <vector>

#include "czlab/operators.hpp"
#include "czlab/test_function.hpp"

namespace czlab {

// Radial cutoff: 1 on B(center, radius), linear taper to 0 at 2 * radius.
// Lipschitz constant 1 / radius.
struct CutoffBall {
  std::vector<double> center;
  double radius = 1.0;
  double eval(const double* y, int d) const;
};

struct PairingResult {
  std::vector<double> value;  // per kernel component
  double raw = 0.0;           // Euclidean norm of value
  double psi_l1 = 0.0;        // ||psi||_{L^1(mu)}
  double rel = 0.0;           // raw / psi_l1
};

// <T_mu(1), psi>_mu for a mean-zero Lipschitz psi: the pairing splits into
// <T(phi), psi> plus the absolutely convergent far correction
// sum_{phi(y) < 1} (1 - phi(y)) w_y <K(. - y) - K(z - y), psi>_mu, z the
// support center.  phi is 1 on cutoff_scale times the support ball (scale at
// least 2) and tapers off over one more doubling, so the value is independent
// of the cutoff up to roundoff.
PairingResult pairing_T1(const CZKernel& K, const PointMeasure& mu, const TestFunction& psi,
                         double cutoff_scale = 2.0, const ApplyParams& ap = {});

struct DefectResult {
  double max_rel = 0.0;
  double max_raw = 0.0;
  std::size_t argmax = 0;
  std::size_t members = 0;
  std::vector<double> member_rel;
  std::vector<double> member_raw;
};

// Reflectionless defect over the standard family in B(center, R): the largest
// |<T_mu(1), psi>| / ||psi||_{L^1(mu)}.  All members share one cutoff that is
// 1 on B(center, 2R), which is admissible for each of them.
DefectResult defect(const CZKernel& K, const PointMeasure& mu, const std::vector<double>& center,
                    double R, const FamilyParams& fp = {}, const ApplyParams& ap = {});

// Mass-normalized reference ball for the additive normalization of T(1):
// centered at the barycenter, shrunk while it retains half the total mass.
struct ReferenceBall {
  std::vector<double> center;
  double radius = 1.0;
};
ReferenceBall default_reference(const PointMeasure& mu);

struct TtildeOptions {
  double cutoff_scale = 2.0;  // phi is 1 on cutoff_scale * bounding ball
  ApplyParams apply;
};

// Diagnostics shared across the delta grid.
struct TtildeDetail {
  std::vector<double> phi;        // cutoff at every atom
  std::vector<double> eta;        // normalized reference density at every atom
  std::vector<double> mean_term;  // <eta, T_0(phi)>_mu per component
  CutoffBall bounding;
};

// Normalized potential evaluated on a truncation grid:
//   Ttilde_delta(1)(x) = T_delta(phi)(x) - <eta, T_0(phi)>_mu
//                        + sum_{phi(y)<1} (1 - phi(y)) w_y [K_delta(x - y) - kappa(y)],
// kappa(y) = <eta, K(. - y)>_mu.  eta is the mu-normalized tent on the
// reference ball, so the subtraction is the mean over the reference mass and
// the far sum converges for growth-bounded measures.  Values are returned
// flattened [delta][target][component]; the delta-independent pieces are
// computed once.  Empty measures give zeros.
std::vector<double> ttilde_one(const CZKernel& K, const PointMeasure& mu,
                               const std::vector<double>& deltas,
                               const std::vector<double>& targets, const ReferenceBall& ref,
                               const TtildeOptions& opts = {}, TtildeDetail* detail = nullptr);

struct CotlarResult {
  double sup = 0.0;
  double argmax_delta = 0.0;
  std::vector<double> per_delta;  // |Ttilde_delta(1)(x)|_2 on the grid
};

// sup over the delta grid of |Ttilde_delta(1)(x)|.
CotlarResult cotlar_sup(const CZKernel& K, const PointMeasure& mu, const double* x,
                        const std::vector<double>& deltas, const ReferenceBall& ref,
                        const TtildeOptions& opts = {});

struct HolderPair {
  std::vector<double> x;
  std::vector<double> xprime;
};

// Deterministic pair sampler over an explicit box (independent of the atom
// layout, so refinement studies see identical pairs).  Separations are
// log-uniform in [delta/8, 8 delta]; bases must carry nearby mass.
std::vector<HolderPair> make_holder_pairs(const PointMeasure& mu, const std::vector<double>& lo,
                                          const std::vector<double>& hi, double delta,
                                          std::size_t n, std::uint64_t seed);

struct HolderResult {
  double c6 = 0.0;  // max ratio |Ttilde(x) - Ttilde(x')| / modulus(|x - x'|)
  std::vector<double> ratios;
};

// Continuity modulus of the truncated potential: the reference shape is
// (t/delta)^alpha max(1, t/delta)^{1-alpha}, so c6 is scale-free.
HolderResult holder_check(const CZKernel& K, const PointMeasure& mu, double delta,
                          const std::vector<HolderPair>& pairs, const ReferenceBall& ref,
                          const TtildeOptions& opts = {});

struct TruncationDecay {
  std::vector<double> rprimes;
  std::vector<double> gaps;      // |<T(phi_{R'}), psi> - <T(1), psi>| per R'
  double reference_raw = 0.0;    // |<T(1), psi>|
  double slope = 0.0;            // log-log fit of gaps against R'
  double abs_scale = 0.0;        // sum_a |psi w|_a |u(x_a)|, the roundoff carrier
  bool resolvable = false;       // largest gap clears the roundoff floor
};

// Sensitivity of the pairing to the truncation radius: phi_{R'} is 1 on
// B(z, R') and tapers over one doubling.  Gaps decay like (R/R')^alpha for
// admissible kernels; symmetric cancellations can push them to roundoff, in
// which case resolvable is false and the fitted slope is noise, not a rate.
TruncationDecay truncation_decay(const CZKernel& K, const PointMeasure& mu,
                                 const TestFunction& psi, const std::vector<double>& rprimes,
                                 const ApplyParams& ap = {});

}  // namespace czlab
