#include "czlab/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "czlab/common.hpp"

namespace czlab {

std::size_t ProbeLattice::size() const {
  std::size_t n = 1;
  for (int c : counts) n *= static_cast<std::size_t>(c);
  return n;
}

std::vector<double> ProbeLattice::point(std::size_t i) const {
  int d = static_cast<int>(counts.size());
  std::vector<double> p(d);
  std::size_t rem = i;
  for (int k = 0; k < d; ++k) {
    int idx = static_cast<int>(rem % static_cast<std::size_t>(counts[k]));
    rem /= static_cast<std::size_t>(counts[k]);
    p[k] = origin[k] + (idx + 0.5) * spacing;
  }
  return p;
}

std::vector<double> ProbeLattice::all_points() const {
  int d = static_cast<int>(counts.size());
  std::vector<double> out;
  out.reserve(size() * d);
  for (std::size_t i = 0; i < size(); ++i) {
    std::vector<double> p = point(i);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

ProbeLattice lattice_over_ball(const std::vector<double>& center, double radius, int per_axis) {
  require(radius > 0.0 && per_axis >= 2, "lattice_over_ball: bad parameters");
  ProbeLattice lat;
  lat.spacing = 2.0 * radius / per_axis;
  lat.counts.assign(center.size(), per_axis);
  lat.origin = center;
  for (double& c : lat.origin) c -= radius;
  return lat;
}

LevelSetSample level_set(const CZKernel& K, const PointMeasure& mu,
                         const std::vector<double>& direction, double eps,
                         const ProbeLattice& lattice, const std::vector<double>& delta_grid,
                         const ReferenceBall& ref, const TtildeOptions& opts) {
  require(static_cast<int>(direction.size()) == K.ncomp, "level_set: direction dim");
  require(!delta_grid.empty(), "level_set: empty delta grid");
  double dn = norm2(direction.data(), K.ncomp);
  require(dn > 0.0, "level_set: zero direction");

  LevelSetSample E;
  E.lattice = lattice;
  E.direction = direction;
  for (double& c : E.direction) c /= dn;
  E.delta_grid = delta_grid;
  E.eps = eps;
  std::size_t np = lattice.size();
  E.min_dot.assign(np, std::numeric_limits<double>::infinity());
  if (mu.size() == 0) {
    // Empty measure: the potential vanishes, no probe clears a positive eps.
    std::fill(E.min_dot.begin(), E.min_dot.end(), 0.0);
    return E;
  }
  std::vector<double> targets = lattice.all_points();
  std::vector<double> vals = ttilde_one(K, mu, delta_grid, targets, ref, opts);
  for (std::size_t di = 0; di < delta_grid.size(); ++di)
    for (std::size_t i = 0; i < np; ++i) {
      double dot = 0.0;
      for (int c = 0; c < K.ncomp; ++c) dot += E.direction[c] * vals[(di * np + i) * K.ncomp + c];
      E.min_dot[i] = std::min(E.min_dot[i], dot);
    }
  return E;
}

namespace {

// Gap statistics for probes against a member cloud.
DensityResult gap_scan(const LevelSetSample& E, double threshold,
                       const std::vector<std::size_t>& probe_ids,
                       const std::vector<std::size_t>& member_ids, double cap) {
  DensityResult out;
  out.probes_tested = probe_ids.size();
  out.members = member_ids.size();
  if (probe_ids.empty()) {
    out.dense = out.members > 0;
    return out;
  }
  if (member_ids.empty()) {
    out.dense = false;
    out.worst_gap = std::numeric_limits<double>::infinity();
    return out;
  }
  int d = static_cast<int>(E.lattice.counts.size());
  std::vector<double> pts;
  pts.reserve(member_ids.size() * d);
  for (std::size_t m : member_ids) {
    std::vector<double> p = E.lattice.point(m);
    pts.insert(pts.end(), p.begin(), p.end());
  }
  SpatialIndex idx(d, pts, std::vector<double>(member_ids.size(), 1.0));
  for (std::size_t i : probe_ids) {
    std::vector<double> p = E.lattice.point(i);
    out.worst_gap = std::max(out.worst_gap, idx.nearest_distance(p.data()));
  }
  (void)threshold;
  out.dense = out.worst_gap <= cap;
  return out;
}

}  // namespace

DensityResult density_test(const LevelSetSample& E, const BallQuery& q, double kappa) {
  require(kappa > 0.0, "density_test: kappa > 0");
  int d = static_cast<int>(E.lattice.counts.size());
  std::vector<std::size_t> probes, members;
  for (std::size_t i = 0; i < E.min_dot.size(); ++i) {
    std::vector<double> p = E.lattice.point(i);
    if (dist(p.data(), q.center.data(), d) <= q.radius) probes.push_back(i);
    if (E.member(i, E.eps)) members.push_back(i);
  }
  return gap_scan(E, E.eps, probes, members, kappa * q.radius);
}

DensityResult density_test_abs(const LevelSetSample& E, double threshold,
                               const BallQuery& probe_ball, const BallQuery& member_ball,
                               double radius_abs) {
  require(radius_abs > 0.0, "density_test_abs: radius > 0");
  int d = static_cast<int>(E.lattice.counts.size());
  std::vector<std::size_t> probes, members;
  for (std::size_t i = 0; i < E.min_dot.size(); ++i) {
    std::vector<double> p = E.lattice.point(i);
    if (dist(p.data(), probe_ball.center.data(), d) <= probe_ball.radius) probes.push_back(i);
    if (E.member(i, threshold) &&
        dist(p.data(), member_ball.center.data(), d) <= member_ball.radius)
      members.push_back(i);
  }
  return gap_scan(E, threshold, probes, members, radius_abs);
}

RearrangeCheck rearrange_bound(double a, double b, double lambda, double eps) {
  require(a >= 0.0 && b >= a, "rearrange_bound: 0 <= a <= b");
  require(lambda > 0.0, "rearrange_bound: lambda > 0");
  require(eps > 0.0 && eps <= 1.0, "rearrange_bound: eps in (0, 1]");
  RearrangeCheck out;
  out.hypothesis = 0.5 * eps * a <= 2.0 * lambda * std::sqrt(a * (b - a));
  double l2 = 4.0 * lambda * lambda;
  out.bound = l2 / (l2 + 0.25 * eps * eps) * b;
  out.ok = !out.hypothesis || a <= out.bound * (1.0 + 1e-13);
  return out;
}

DecayStepResult decay_step(const PointMeasure& mu, const LevelSetSample& E, double t,
                           double kappa, double eps, double lambda_growth, double c6,
                           double alpha) {
  DecayStepResult out;
  require(t > 0.0 && kappa > 0.0, "decay_step: t, kappa > 0");
  if (eps <= 0.0 || eps > 1.0) {
    out.note = "eps outside (0, 1]";
    return out;
  }
  double sk = std::sqrt(kappa);
  if (sk >= 0.5 * t) {
    out.note = "kappa too large for the ball";
    return out;
  }
  if (eps < 2.0 * c6 * std::pow(kappa, 0.5 * alpha)) {
    out.note = "eps does not control kappa (eps < 2 c6 kappa^{alpha/2})";
    return out;
  }
  // Probe spacing must resolve kappa-density.
  if (E.lattice.spacing > 0.5 * kappa) {
    out.note = "probe spacing too coarse for kappa";
    return out;
  }
  std::vector<double> origin(E.lattice.counts.size(), 0.0);
  DensityResult dens =
      density_test_abs(E, eps, BallQuery{origin, t - sk}, BallQuery{origin, t}, kappa);
  if (!dens.dense) {
    out.note = "level set is not kappa-dense in the inner ball";
    return out;
  }
  out.hypotheses_ok = true;
  out.mass_inner = ball_mass(mu, origin.data(), t - sk);
  out.mass_outer = ball_mass(mu, origin.data(), t);
  double c8 = 1.0 / (16.0 * lambda_growth * lambda_growth + 1.0);
  out.bound = (1.0 - c8 * eps * eps) * out.mass_outer;
  out.status = out.mass_inner <= out.bound * (1.0 + 1e-12) ? StepStatus::Verified
                                                           : StepStatus::Violated;
  if (out.status == StepStatus::Violated) out.note = "inner mass exceeds the decay bound";
  return out;
}

IncrementStepResult increment_step(const PointMeasure& mu, const LevelSetSample& E, double t,
                                   double kappa, double eps, double m, double c6, double c9,
                                   double alpha) {
  IncrementStepResult out;
  require(t > 0.0 && kappa > 0.0 && m > 0.0, "increment_step: t, kappa, m > 0");
  int d = static_cast<int>(E.lattice.counts.size());
  out.eps_next = eps - c6 * (std::pow(kappa, 0.5 * alpha) + std::sqrt(m));
  out.kappa_next = c9 * std::pow(m, 1.0 / (2.0 * d));
  out.t_next = t - std::sqrt(kappa);
  if (out.eps_next <= 0.0) {
    out.note = "threshold budget exhausted";
    return out;
  }
  if (out.t_next <= 0.0) {
    out.note = "radius budget exhausted";
    return out;
  }
  std::vector<double> origin(E.lattice.counts.size(), 0.0);
  double mass = ball_mass(mu, origin.data(), t);
  if (mass > m) {
    out.note = "mass hypothesis mu(B(0,t)) <= m fails";
    return out;
  }
  if (out.kappa_next < 2.0 * E.lattice.spacing) {
    out.note = "kappa' below probe resolution";
    return out;
  }
  DensityResult dens = density_test_abs(E, out.eps_next, BallQuery{origin, out.t_next},
                                        BallQuery{origin, out.t_next}, out.kappa_next);
  out.gap_found = dens.worst_gap;
  out.status = dens.dense ? StepStatus::Verified : StepStatus::Violated;
  if (out.status == StepStatus::Violated)
    out.note = "tightened level set misses a probe by more than kappa'";
  return out;
}

ScheduleResult run_schedule(const ScheduleParams& p) {
  ScheduleResult out;
  require(p.eps0 > 0.0 && p.eps0 <= 1.0, "run_schedule: eps0 in (0, 1]");
  require(p.m0 > 0.0 && p.kappa0 > 0.0, "run_schedule: m0, kappa0 > 0");
  require(p.c6 > 0.0 && p.c9 > 0.0, "run_schedule: c6, c9 > 0");
  require(p.alpha > 0.0 && p.alpha <= 1.0, "run_schedule: alpha in (0,1]");
  require(p.d >= 1, "run_schedule: d >= 1");

  double lambda = p.lambda;
  if (lambda <= 0.0) {
    double c8 = 1.0 / (16.0 * p.lambda_growth * p.lambda_growth + 1.0);
    lambda = c8 * p.eps0 * p.eps0;
  }
  if (lambda <= 0.0 || lambda >= 4.0) {
    out.note = "mass decay factor outside (0, 4)";
    return out;
  }
  double rho = 1.0 - 0.25 * lambda;  // per-step mass factor

  // Closed-form tails: the schedule runs for ~1e6 steps before m underflows,
  // so invariants are checked on the exact geometric sums, not by iteration.
  double sqrt_rho = std::sqrt(rho);
  double q_kappa = std::pow(rho, 0.25 * p.alpha / p.d);  // ratio of kappa_l^{alpha/2}
  double q_sqrt_kappa = std::pow(rho, 0.25 / p.d);       // ratio of sqrt(kappa_l)
  double sum_sqrt_m = std::sqrt(p.m0) / (1.0 - sqrt_rho);
  double sum_kappa_alpha = std::pow(p.kappa0, 0.5 * p.alpha) +
                           std::pow(p.c9, 0.5 * p.alpha) * std::pow(p.m0, 0.25 * p.alpha / p.d) *
                               q_kappa / (1.0 - q_kappa);
  double sum_sqrt_kappa =
      std::sqrt(p.kappa0) +
      std::sqrt(p.c9) * std::pow(p.m0, 0.25 / p.d) * q_sqrt_kappa / (1.0 - q_sqrt_kappa);

  out.eps_spent = p.c6 * (sum_kappa_alpha + sum_sqrt_m);
  out.eps_final = p.eps0 - out.eps_spent;
  out.kappa_sum = sum_sqrt_kappa;
  out.t_final = p.t0 - sum_sqrt_kappa;

  bool eps_ok = out.eps_final >= 0.5 * p.eps0;
  // The per-step control 2 c6 kappa_j^{alpha/2} <= eps0/2 peaks at j = 0 or 1.
  double kappa1_alpha = std::pow(p.c9, 0.5 * p.alpha) * std::pow(rho * p.m0, 0.25 * p.alpha / p.d);
  double worst_kappa_alpha = std::max(std::pow(p.kappa0, 0.5 * p.alpha), kappa1_alpha);
  bool control_ok = 2.0 * p.c6 * worst_kappa_alpha <= 0.5 * p.eps0;
  bool radius_ok = out.t_final > 1.0;
  out.feasible = eps_ok && control_ok && radius_ok;
  if (!eps_ok) out.note = "threshold budget violated (eps falls below eps0/2)";
  else if (!control_ok) out.note = "eps-kappa control violated";
  else if (!radius_ok) out.note = "radius budget violated (t falls to 1)";

  // Steps until the mass bound underflows double precision.
  out.steps = static_cast<long>(std::ceil((-744.0 - std::log(p.m0)) / std::log(rho)));
  if (out.steps < 0) out.steps = 0;

  // Conservation: iterate explicit steps and compare the subtractive eps and
  // t trajectories against the additive spends.
  long J = std::min<long>(out.steps, 20000);
  double eps_it = p.eps0, spent = 0.0, mj = p.m0, kj = p.kappa0;
  double t_it = p.t0, radius_spent = 0.0;
  for (long j = 0; j < J; ++j) {
    double dec = p.c6 * (std::pow(kj, 0.5 * p.alpha) + std::sqrt(mj));
    double sk = std::sqrt(kj);
    eps_it -= dec;
    spent += dec;
    t_it -= sk;
    radius_spent += sk;
    mj *= rho;
    kj = p.c9 * std::pow(mj, 1.0 / (2.0 * p.d));
  }
  out.conservation_ok = std::abs((p.eps0 - eps_it) - spent) <= 1e-12 * p.eps0 &&
                        std::abs((p.t0 - t_it) - radius_spent) <= 1e-12 * p.t0;
  return out;
}

ScheduleParams derive_schedule_params(double eps0, double c6, double c9, double alpha, int d,
                                      double lambda_growth) {
  require(eps0 > 0.0 && eps0 <= 1.0, "derive_schedule_params: eps0 in (0, 1]");
  ScheduleParams p;
  p.eps0 = eps0;
  p.c6 = c6;
  p.c9 = c9;
  p.alpha = alpha;
  p.d = d;
  p.lambda_growth = lambda_growth;
  p.t0 = 1.5;

  auto feasible = [&](double m0, double kappa0) {
    ScheduleParams q = p;
    q.m0 = m0;
    q.kappa0 = kappa0;
    return run_schedule(q).feasible;
  };

  // Feasibility is monotone: shrinking either budget only shrinks every sum.
  double tiny = 1e-280;
  if (!feasible(tiny, tiny)) {
    p.m0 = tiny;
    p.kappa0 = tiny;
    return p;  // caller sees feasible = false on run_schedule
  }
  double lo = std::log(tiny), hi = std::log(1.0);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (feasible(std::exp(mid), tiny)) lo = mid;
    else hi = mid;
  }
  p.m0 = std::exp(lo);
  lo = std::log(tiny);
  hi = std::log(1.0);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (feasible(p.m0, std::exp(mid))) lo = mid;
    else hi = mid;
  }
  p.kappa0 = std::exp(lo);
  return p;
}

KappaExponentFit kappa_of_eps(const std::vector<double>& eps_grid, double c6, double c9,
                              double alpha, int d, double lambda_growth) {
  require(eps_grid.size() >= 2, "kappa_of_eps: need >= 2 eps values");
  KappaExponentFit out;
  std::vector<double> lx, ly;
  for (double e : eps_grid) {
    ScheduleParams p = derive_schedule_params(e, c6, c9, alpha, d, lambda_growth);
    out.eps.push_back(e);
    out.kappa0.push_back(p.kappa0);
    if (p.kappa0 > 0.0) {
      lx.push_back(std::log(e));
      ly.push_back(std::log(p.kappa0));
    }
  }
  out.exponent = fit_slope(lx, ly);
  return out;
}

AlternativeResult alternative_check(const CZKernel& K, const PointMeasure& mu,
                                    const std::vector<double>& x, double r, double eps, double M,
                                    double tau, double delta_eff, const ReferenceBall& ref,
                                    int probe_per_axis) {
  require(r > 0.0 && M >= 1.0 && tau > 0.0 && tau < 1.0, "alternative_check: bad parameters");
  AlternativeResult out;
  int d = mu.dim();

  // Field average over the ball.
  ProbeLattice lat = lattice_over_ball(x, r, probe_per_axis);
  std::vector<double> inside;
  std::size_t count = 0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    std::vector<double> p = lat.point(i);
    if (dist(p.data(), x.data(), d) <= r) {
      inside.insert(inside.end(), p.begin(), p.end());
      ++count;
    }
  }
  if (count == 0 || mu.size() == 0) {
    out.outcome = "inconclusive";
    return out;
  }
  std::vector<double> vals = ttilde_one(K, mu, {delta_eff}, inside, ref);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) acc += norm2(&vals[i * K.ncomp], K.ncomp);
  out.field_avg = acc / static_cast<double>(count);
  out.hypothesis_ok = out.field_avg > eps;

  double ms = std::pow(M * r, mu.nominal_s());
  out.mass_fraction = ball_mass(mu, x.data(), M * r) / ms;

  // Hunt for a tau r hole inside B(x, r).
  double best = 0.0;
  std::vector<double> best_c;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    std::vector<double> p = lat.point(i);
    double room = r - dist(p.data(), x.data(), d);
    if (room <= 0.0) continue;
    double hole = std::min(mu.index().nearest_distance(p.data()), room);
    if (hole > best) {
      best = hole;
      best_c = p;
    }
  }
  out.empty_radius = best;
  out.empty_center = best_c;

  if (!out.hypothesis_ok) {
    out.outcome = "inconclusive";
  } else if (best >= tau * r) {
    out.outcome = "empty-ball";
  } else {
    out.outcome = "dense-mass";
  }
  return out;
}

PorosityResult porosity_scan(const CZKernel& K, const PointMeasure& mu, const BallQuery& q,
                             double eps, double delta_eff, const ReferenceBall& ref,
                             int grid_per_axis, int refine_rounds) {
  require(q.radius > 0.0 && eps >= 0.0, "porosity_scan: bad parameters");
  PorosityResult out;
  out.threshold = eps;
  int d = mu.dim();

  // Precondition: the mollified field must be active on the ball.
  ProbeLattice lat = lattice_over_ball(q.center, q.radius, std::min(grid_per_axis, 24));
  std::vector<double> inside;
  std::size_t count = 0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    std::vector<double> p = lat.point(i);
    if (dist(p.data(), q.center.data(), d) <= q.radius) {
      inside.insert(inside.end(), p.begin(), p.end());
      ++count;
    }
  }
  require(count > 0, "porosity_scan: ball sees no probes");
  std::vector<double> vals = ttilde_one(K, mu, {delta_eff}, inside, ref);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) acc += norm2(&vals[i * K.ncomp], K.ncomp);
  out.field_avg = acc / static_cast<double>(count);
  if (out.field_avg <= eps) {
    out.status = "skipped";
    return out;
  }

  // Coarse-to-fine search for the largest support-free ball inside q.
  auto hole_at = [&](const double* p) {
    double room = q.radius - dist(p, q.center.data(), d);
    if (room <= 0.0) return 0.0;
    return std::min(mu.index().nearest_distance(p), room);
  };
  std::vector<double> best_c(q.center);
  double best = 0.0;
  double spacing = 2.0 * q.radius / grid_per_axis;
  ProbeLattice search = lattice_over_ball(q.center, q.radius, grid_per_axis);
  for (std::size_t i = 0; i < search.size(); ++i) {
    std::vector<double> p = search.point(i);
    double h = hole_at(p.data());
    if (h > best) {
      best = h;
      best_c = p;
    }
  }
  for (int round = 0; round < refine_rounds; ++round) {
    double window = spacing;
    spacing = window / 4.0;
    ProbeLattice fine = lattice_over_ball(best_c, window, 8);
    fine.spacing = 2.0 * window / 8.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
      std::vector<double> p = fine.point(i);
      double h = hole_at(p.data());
      if (h > best) {
        best = h;
        best_c = p;
      }
    }
  }
  out.status = "found";
  out.hole_center = best_c;
  out.hole_radius = best;
  out.lambda_found = best / q.radius;
  return out;
}

}  // namespace czlab
