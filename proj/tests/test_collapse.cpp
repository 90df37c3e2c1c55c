#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "czlab/collapse.hpp"
#include "czlab/common.hpp"
#include "czlab/kernel.hpp"
#include "czlab/measure.hpp"
#include "doctest.h"

using namespace czlab;

namespace {

PointMeasure random_cloud(int d, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> pts(n * d), w(n);
  for (std::size_t i = 0; i < n * d; ++i) pts[i] = rng.uniform(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) w[i] = rng.uniform(0.2, 1.0) / static_cast<double>(n);
  return PointMeasure(d, std::move(pts), std::move(w), 0.01, 1.0, "test-cloud");
}

// Left-column members on the 8x8 lattice over B(0, 1): every probe with
// x = -0.875 clears the threshold, nothing else does.
LevelSetSample left_column_sample() {
  LevelSetSample E;
  E.lattice = lattice_over_ball({0.0, 0.0}, 1.0, 8);
  E.direction = {1.0, 0.0};
  E.delta_grid = {0.1};
  E.eps = 0.0;
  E.min_dot.assign(64, -1.0);
  for (std::size_t i = 0; i < 64; ++i)
    if (i % 8 == 0) E.min_dot[i] = 1.0;
  return E;
}

LevelSetSample uniform_sample(double level, int per_axis, double radius) {
  LevelSetSample E;
  E.lattice = lattice_over_ball({0.0, 0.0}, radius, per_axis);
  E.direction = {1.0, 0.0};
  E.delta_grid = {0.1};
  E.eps = 0.0;
  E.min_dot.assign(E.lattice.size(), level);
  return E;
}

}  // namespace

TEST_CASE("probe lattice covers the ball with half-cell insets") {
  ProbeLattice lat = lattice_over_ball({1.0, 2.0}, 0.5, 4);
  CHECK(lat.spacing == 0.25);
  REQUIRE(lat.counts == std::vector<int>{4, 4});
  CHECK(lat.origin == std::vector<double>{0.5, 1.5});
  REQUIRE(lat.size() == 16);
  CHECK(lat.point(0) == std::vector<double>{0.625, 1.625});
  CHECK(lat.point(1) == std::vector<double>{0.875, 1.625});  // first axis fastest
  CHECK(lat.point(4) == std::vector<double>{0.625, 1.875});
  CHECK(lat.point(15) == std::vector<double>{1.375, 2.375});
  std::vector<double> flat = lat.all_points();
  REQUIRE(flat.size() == 32);
  for (std::size_t i = 0; i < 16; ++i) {
    std::vector<double> p = lat.point(i);
    CHECK(flat[2 * i] == p[0]);
    CHECK(flat[2 * i + 1] == p[1]);
  }
}

TEST_CASE("density test measures the worst gap to the member cloud") {
  LevelSetSample E = left_column_sample();
  BallQuery q{{0.625, 0.125}, 0.3};
  DensityResult r = density_test(E, q, 6.0);
  CHECK(r.probes_tested == 5);
  CHECK(r.members == 8);
  CHECK(r.worst_gap == 1.75);
  CHECK(r.dense);  // 1.75 <= 6.0 * 0.3
  DensityResult tight = density_test(E, q, 5.0);
  CHECK_FALSE(tight.dense);  // 1.75 > 5.0 * 0.3
}

TEST_CASE("absolute density test restricts members and probes to their balls") {
  LevelSetSample E = left_column_sample();
  BallQuery probe_ball{{0.625, 0.125}, 0.3};
  BallQuery member_ball{{-0.875, 0.875}, 0.3};
  DensityResult r = density_test_abs(E, 0.5, probe_ball, member_ball, 2.0);
  CHECK(r.probes_tested == 5);
  CHECK(r.members == 2);
  CHECK(r.worst_gap == doctest::Approx(std::sqrt(3.3125)).epsilon(1e-14));
  CHECK(r.dense);
  DensityResult tight = density_test_abs(E, 0.5, probe_ball, member_ball, 1.8);
  CHECK_FALSE(tight.dense);

  // No probes in a far ball: vacuously dense while members exist.
  DensityResult vac = density_test_abs(E, 0.5, BallQuery{{50.0, 50.0}, 0.1}, member_ball, 1.0);
  CHECK(vac.probes_tested == 0);
  CHECK(vac.dense);
  // No members above an unreachable threshold.
  DensityResult none = density_test_abs(E, 2.0, probe_ball, member_ball, 1.0);
  CHECK(none.members == 0);
  CHECK_FALSE(none.dense);
  CHECK(std::isinf(none.worst_gap));
}

TEST_CASE("level set sampling matches a direct potential evaluation") {
  PointMeasure mu = random_cloud(2, 80, 2100);
  CZKernel K = make_cauchy_kernel();
  ProbeLattice lat = lattice_over_ball({0.0, 0.0}, 1.2, 5);
  std::vector<double> deltas = {0.2, 0.5};
  ReferenceBall ref = default_reference(mu);
  LevelSetSample E = level_set(K, mu, {2.0, 0.0}, 0.05, lat, deltas, ref);
  CHECK(E.direction == std::vector<double>{1.0, 0.0});
  CHECK(E.eps == 0.05);
  REQUIRE(E.min_dot.size() == 25);

  std::vector<double> vals = ttilde_one(K, mu, deltas, lat.all_points(), ref);
  for (std::size_t i = 0; i < 25; ++i) {
    double want = std::min(vals[i * 2], vals[(25 + i) * 2]);
    CHECK(E.min_dot[i] == want);
  }

  PointMeasure empty(2, {}, {}, 0.1, 1.0, "empty");
  LevelSetSample E0 = level_set(K, empty, {1.0, 0.0}, 0.05, lat, deltas, ref);
  for (double v : E0.min_dot) CHECK(v == 0.0);
}

TEST_CASE("rearrangement bound is exact algebra with equality on the boundary") {
  Rng rng(2200);
  for (int i = 0; i < 10000; ++i) {
    double b = rng.uniform(1e-6, 10.0);
    double a = b * rng.uniform(0.0, 1.0);
    double lambda = rng.uniform(0.05, 5.0);
    double eps = rng.uniform(1e-3, 1.0);
    RearrangeCheck rc = rearrange_bound(a, b, lambda, eps);
    CHECK(rc.ok);
    CHECK(rc.bound <= b);
  }
  // Just inside the boundary: exact equality is one ulp from flipping the
  // sharp hypothesis comparison, so probe a hair below it.
  double lambda = 0.3, eps = 0.5, b = 1.0;
  double bound = 4.0 * lambda * lambda / (4.0 * lambda * lambda + 0.25 * eps * eps) * b;
  RearrangeCheck edge = rearrange_bound(bound * (1.0 - 1e-9), b, lambda, eps);
  CHECK(edge.hypothesis);
  CHECK(edge.ok);
  CHECK(edge.bound == doctest::Approx(bound).epsilon(1e-15));
  // Just above the bound the hypothesis must fail (the implication is vacuous).
  RearrangeCheck above = rearrange_bound(bound * 1.01, b, lambda, eps);
  CHECK_FALSE(above.hypothesis);
  CHECK(above.ok);

  CHECK_THROWS_AS(rearrange_bound(2.0, 1.0, 0.3, 0.5), std::exception);
  CHECK_THROWS_AS(rearrange_bound(0.5, 1.0, -1.0, 0.5), std::exception);
  CHECK_THROWS_AS(rearrange_bound(0.5, 1.0, 0.3, 1.5), std::exception);
}

TEST_CASE("decay step checks its hypotheses before comparing masses") {
  PointMeasure spread = make_ball_lebesgue(2, {0.0, 0.0}, 1.2, 40);
  LevelSetSample E = uniform_sample(1.0, 40, 1.0);  // spacing 0.05
  double t = 1.0, kappa = 0.16, eps = 0.9, lambda_growth = 1.0, c6 = 1.0, alpha = 1.0;

  DecayStepResult ok = decay_step(spread, E, t, kappa, eps, lambda_growth, c6, alpha);
  CHECK(ok.hypotheses_ok);
  CHECK(ok.status == StepStatus::Verified);
  double c8 = 1.0 / 17.0;
  CHECK(ok.mass_inner == ball_mass(spread, std::vector<double>{0.0, 0.0}.data(), t - 0.4));
  CHECK(ok.mass_outer == ball_mass(spread, std::vector<double>{0.0, 0.0}.data(), t));
  CHECK(ok.bound == doctest::Approx((1.0 - c8 * eps * eps) * ok.mass_outer).epsilon(1e-14));
  CHECK(ok.mass_inner <= ok.bound);

  // All mass inside the inner ball: the decay inequality fails honestly.
  PointMeasure tight = make_ball_lebesgue(2, {0.0, 0.0}, 0.3, 30);
  DecayStepResult bad = decay_step(tight, E, t, kappa, eps, lambda_growth, c6, alpha);
  CHECK(bad.hypotheses_ok);
  CHECK(bad.status == StepStatus::Violated);
  CHECK(!bad.note.empty());

  // Hypothesis failures come back Inconclusive with a reason.
  DecayStepResult eps_bad = decay_step(spread, E, t, kappa, 1.5, lambda_growth, c6, alpha);
  CHECK(eps_bad.status == StepStatus::Inconclusive);
  CHECK(!eps_bad.note.empty());
  DecayStepResult kappa_big = decay_step(spread, E, t, 0.36, eps, lambda_growth, c6, alpha);
  CHECK(kappa_big.status == StepStatus::Inconclusive);
  DecayStepResult no_control = decay_step(spread, E, t, kappa, 0.5, lambda_growth, c6, alpha);
  CHECK(no_control.status == StepStatus::Inconclusive);
  LevelSetSample coarse = uniform_sample(1.0, 8, 1.0);  // spacing 0.25 > kappa/2
  DecayStepResult too_coarse = decay_step(spread, coarse, t, kappa, eps, lambda_growth, c6, alpha);
  CHECK(too_coarse.status == StepStatus::Inconclusive);
  LevelSetSample hollow = uniform_sample(-1.0, 40, 1.0);
  DecayStepResult not_dense = decay_step(spread, hollow, t, kappa, eps, lambda_growth, c6, alpha);
  CHECK(not_dense.status == StepStatus::Inconclusive);
  CHECK_FALSE(not_dense.hypotheses_ok);
}

TEST_CASE("increment step tightens the threshold and verifies density") {
  Rng rng(2300);
  std::vector<double> pts, w;
  for (int i = 0; i < 100; ++i) {
    pts.push_back(rng.uniform(-0.9, 0.9));
    pts.push_back(rng.uniform(-0.9, 0.9));
    w.push_back(0.004);
  }
  PointMeasure mu(2, std::move(pts), std::move(w), 0.01, 1.0, "cloudlet");  // mass 0.4
  LevelSetSample E = uniform_sample(1.0, 40, 1.0);
  double t = 1.0, kappa = 0.09, eps = 0.8, m = 0.5, c6 = 0.3, c9 = 1.0, alpha = 1.0;

  IncrementStepResult r = increment_step(mu, E, t, kappa, eps, m, c6, c9, alpha);
  CHECK(r.eps_next == doctest::Approx(eps - c6 * (0.3 + std::sqrt(0.5))).epsilon(1e-14));
  CHECK(r.kappa_next == doctest::Approx(std::pow(0.5, 0.25)).epsilon(1e-14));
  CHECK(r.t_next == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(r.status == StepStatus::Verified);
  CHECK(r.gap_found == 0.0);

  // Nothing clears the tightened threshold.
  LevelSetSample hollow = uniform_sample(-1.0, 40, 1.0);
  IncrementStepResult miss = increment_step(mu, hollow, t, kappa, eps, m, c6, c9, alpha);
  CHECK(miss.status == StepStatus::Violated);
  CHECK(std::isinf(miss.gap_found));

  // Mass hypothesis failure: the ball holds 0.4 > 0.05.
  IncrementStepResult heavy = increment_step(mu, E, t, kappa, eps, 0.05, c6, c9, alpha);
  CHECK(heavy.status == StepStatus::Inconclusive);
  CHECK(!heavy.note.empty());

  // Budget exhaustion paths.
  IncrementStepResult spent = increment_step(mu, E, t, kappa, 0.3, m, c6, c9, alpha);
  CHECK(spent.status == StepStatus::Inconclusive);
  IncrementStepResult shrunk = increment_step(mu, E, 0.25, kappa, eps, m, c6, c9, alpha);
  CHECK(shrunk.status == StepStatus::Inconclusive);
}

TEST_CASE("schedule tails are conserved and flag infeasible budgets") {
  ScheduleParams p;
  p.eps0 = 0.3;
  p.m0 = 1e-50;
  p.kappa0 = 1e-6;
  p.c6 = 1.0;
  p.c9 = 1.0;
  p.alpha = 1.0;
  p.lambda_growth = 1.0;
  p.d = 2;
  p.t0 = 1.5;
  ScheduleResult r = run_schedule(p);
  CHECK(r.feasible);
  CHECK(r.conservation_ok);
  CHECK(r.eps_final == doctest::Approx(p.eps0 - r.eps_spent).epsilon(1e-12));
  CHECK(r.t_final == doctest::Approx(p.t0 - r.kappa_sum).epsilon(1e-12));
  CHECK(r.eps_final >= 0.5 * p.eps0);
  CHECK(r.t_final > 1.0);
  CHECK(r.steps > 1000);

  // Geometric tails recomputed independently.
  double c8 = 1.0 / 17.0;
  double lambda = c8 * p.eps0 * p.eps0;
  double rho = 1.0 - 0.25 * lambda;
  double sum_sqrt_m = std::sqrt(p.m0) / (1.0 - std::sqrt(rho));
  double qk = std::pow(rho, 0.25 / p.d);
  double sum_sqrt_kappa =
      std::sqrt(p.kappa0) + std::sqrt(p.c9) * std::pow(p.m0, 0.25 / p.d) * qk / (1.0 - qk);
  double qa = std::pow(rho, 0.25 * p.alpha / p.d);
  double sum_kappa_alpha = std::pow(p.kappa0, 0.5) +
                           std::pow(p.c9, 0.5) * std::pow(p.m0, 0.25 / p.d) * qa / (1.0 - qa);
  CHECK(r.kappa_sum == doctest::Approx(sum_sqrt_kappa).epsilon(1e-12));
  CHECK(r.eps_spent == doctest::Approx(p.c6 * (sum_kappa_alpha + sum_sqrt_m)).epsilon(1e-12));

  ScheduleParams big = p;
  big.m0 = 0.9;
  CHECK_FALSE(run_schedule(big).feasible);
}

TEST_CASE("derived schedule budgets sit at the feasibility boundary") {
  double eps0 = 0.2, c6 = 2.0, c9 = 1.0, alpha = 1.0, lambda_growth = 1.0;
  ScheduleParams p = derive_schedule_params(eps0, c6, c9, alpha, 2, lambda_growth);
  CHECK(p.m0 > 0.0);
  CHECK(p.kappa0 > 0.0);
  ScheduleResult r = run_schedule(p);
  CHECK(r.feasible);
  CHECK(r.conservation_ok);

  ScheduleParams over = p;
  over.m0 *= 4.0;
  CHECK_FALSE(run_schedule(over).feasible);
  ScheduleParams overk = p;
  overk.kappa0 *= 4.0;
  CHECK_FALSE(run_schedule(overk).feasible);
}

TEST_CASE("feasible starting resolution grows with the threshold") {
  KappaExponentFit fit = kappa_of_eps({0.4, 0.2, 0.1}, 1.0, 1.0, 1.0, 2, 1.0);
  REQUIRE(fit.kappa0.size() == 3);
  CHECK(fit.kappa0[0] > fit.kappa0[1]);
  CHECK(fit.kappa0[1] > fit.kappa0[2]);
  CHECK(std::isfinite(fit.exponent));
  CHECK(fit.exponent > 0.0);
}

TEST_CASE("alternative check reproduces its lattice hole search") {
  PointMeasure mu = make_corner_cantor(2, 0.25, 4);
  CZKernel K = make_riesz_kernel(2, 1.0);
  ReferenceBall ref = default_reference(mu);
  std::vector<double> x = {0.5, 0.5};
  double r = 0.3, eps = 0.0, M = 2.0, tau = 0.4, delta_eff = 0.1;
  AlternativeResult ar = alternative_check(K, mu, x, r, eps, M, tau, delta_eff, ref, 16);
  CHECK(ar.field_avg > 0.0);
  CHECK(ar.hypothesis_ok);
  double ms = std::pow(M * r, mu.nominal_s());
  CHECK(ar.mass_fraction == doctest::Approx(ball_mass(mu, x.data(), M * r) / ms).epsilon(1e-13));

  // Replay the hole hunt over the identical lattice.
  ProbeLattice lat = lattice_over_ball(x, r, 16);
  double best = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    std::vector<double> p = lat.point(i);
    double room = r - std::hypot(p[0] - x[0], p[1] - x[1]);
    if (room <= 0.0) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < mu.size(); ++a)
      nearest = std::min(nearest, std::hypot(p[0] - mu.atom(a)[0], p[1] - mu.atom(a)[1]));
    best = std::max(best, std::min(nearest, room));
  }
  CHECK(ar.empty_radius == doctest::Approx(best).epsilon(1e-12));
  // The cantor center is one big hole, so the dichotomy lands on empty-ball.
  CHECK(ar.empty_radius >= tau * r);
  CHECK(ar.outcome == "empty-ball");
}

TEST_CASE("porosity scan finds the largest support-free ball") {
  PointMeasure mu = make_corner_cantor(2, 0.25, 4);
  CZKernel K = make_riesz_kernel(2, 1.0);
  ReferenceBall ref = default_reference(mu);
  BallQuery q{{0.5, 0.5}, 1.05};
  PorosityResult pr = porosity_scan(K, mu, q, 0.0, 0.1, ref, 64, 3);
  REQUIRE(pr.status == "found");
  REQUIRE(pr.hole_center.size() == 2);
  CHECK(pr.lambda_found == doctest::Approx(pr.hole_radius / q.radius).epsilon(1e-14));

  // The reported hole is genuinely support-free and fits inside q.
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < mu.size(); ++a)
    nearest = std::min(nearest, std::hypot(pr.hole_center[0] - mu.atom(a)[0],
                                           pr.hole_center[1] - mu.atom(a)[1]));
  CHECK(pr.hole_radius <= nearest * (1.0 + 1e-12));
  double to_center = std::hypot(pr.hole_center[0] - q.center[0], pr.hole_center[1] - q.center[1]);
  CHECK(pr.hole_radius <= q.radius - to_center + 1e-12);

  // Brute optimum over a fine grid: the refined scan must come within a
  // coarse-cell diameter of it.
  double best = 0.0;
  int fine = 301;
  for (int iy = 0; iy < fine; ++iy)
    for (int ix = 0; ix < fine; ++ix) {
      double px = q.center[0] - q.radius + 2.0 * q.radius * (ix + 0.5) / fine;
      double py = q.center[1] - q.radius + 2.0 * q.radius * (iy + 0.5) / fine;
      double room = q.radius - std::hypot(px - q.center[0], py - q.center[1]);
      if (room <= 0.0) continue;
      double nd = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < mu.size(); ++a)
        nd = std::min(nd, std::hypot(px - mu.atom(a)[0], py - mu.atom(a)[1]));
      best = std::max(best, std::min(nd, room));
    }
  CHECK(pr.hole_radius >= best - 0.02 * q.radius);
  CHECK(pr.hole_radius <= best + 0.02 * q.radius);

  // A threshold above the field average skips the search.
  PointMeasure empty(2, {}, {}, 0.1, 1.0, "empty");
  ReferenceBall eref;
  eref.center = {0.0, 0.0};
  eref.radius = 1.0;
  PorosityResult skip = porosity_scan(K, empty, q, 0.0, 0.1, eref, 32, 2);
  CHECK(skip.status == "skipped");
}
