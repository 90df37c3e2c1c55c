#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "czlab/common.hpp"
#include "czlab/grid.hpp"
#include "czlab/kernel.hpp"
#include "czlab/measure.hpp"
#include "czlab/riesz_checks.hpp"
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

// Simpson integral of f over [0, b].
template <typename F>
double simpson(F f, double b, int n) {
  double h = b / n, acc = f(0.0) + f(b);
  for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("grid node layout walks axis 0 fastest") {
  GridField g = make_centered_grid({1.0, -2.0}, 1.0, 5, 2);
  REQUIRE(g.dims == std::vector<int>{5, 5});
  CHECK(g.spacing == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.origin == std::vector<double>{0.0, -3.0});
  REQUIRE(g.size() == 25);
  double p[2];
  g.node_point(0, p);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == -3.0);
  g.node_point(1, p);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == -3.0);
  g.node_point(5, p);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == -2.5);
  int idx[2] = {3, 4};
  std::size_t node = g.node_index(idx);
  int back[2];
  g.node_coords(node, back);
  CHECK(back[0] == 3);
  CHECK(back[1] == 4);
  g.node_point(24, p);
  CHECK(p[0] == 2.0);
  CHECK(p[1] == -1.0);
}

TEST_CASE("mollifier has unit mass and a closed-form cumulative") {
  Mollifier psi = make_mollifier_2d(0.5);
  CHECK(psi.eval(0.0) == doctest::Approx(psi.norm).epsilon(1e-15));
  CHECK(psi.eval(0.5) == 0.0);
  CHECK(psi.eval(0.7) == 0.0);
  double c[2] = {1.0, 1.0};
  double q[2] = {1.0, 1.3};
  CHECK(psi.eval_point(q, c, 2) == doctest::Approx(psi.eval(0.3)).epsilon(1e-14));

  double mass = simpson([&](double r) { return 2.0 * M_PI * psi.eval(r) * r; }, 0.5, 4000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(psi.cumulative(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi.cumulative(5.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi.cumulative(0.0) == 0.0);
  double part = simpson([&](double r) { return 2.0 * M_PI * psi.eval(r) * r; }, 0.3, 4000);
  CHECK(psi.cumulative(0.3) == doctest::Approx(part).epsilon(1e-9));
  double sm = simpson([&](double r) { return M_PI * r * r * psi.eval(r) * r; }, 0.5, 4000);
  CHECK(psi.second_moment() == doctest::Approx(sm).epsilon(1e-9));
}

TEST_CASE("closed-form mollified gradient profile is the shell theorem") {
  Mollifier psi = make_mollifier_2d(0.5);
  RadialTable tab = mollified_riesz_profile_closed_2d(0.5);
  CHECK(tab.vector_kernel);
  CHECK(tab.s == 1.0);
  for (double r : {0.1, 0.2, 0.35, 0.5, 0.8, 1.7, 3.0}) {
    double want = psi.cumulative(r) / r;
    CHECK(tab.eval(r) == doctest::Approx(want).epsilon(1e-6));
  }
  // Exact at the knots.
  int n = static_cast<int>(tab.values.size());
  for (int i : {10, 64, 200, n - 2}) {
    double r = (i * tab.rho_max / (n - 1)) * tab.radius;
    CHECK(tab.eval(r) == doctest::Approx(tab.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("quadrature profile matches the closed form at s = 1") {
  RadialTable quad = radial_profile_quadrature_2d(1.0, 0.5, true);
  RadialTable closed = mollified_riesz_profile_closed_2d(0.5);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    double r = 0.04 + k * (3.9 - 0.04) / 49.0;
    double a = quad.eval(r), b = closed.eval(r);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-12));
  }
  CHECK(worst <= 2e-4);
  // Far branch continuity at the table edge.  The bracket is tight so the
  // genuine radial variation of the profile stays below the jump budget.
  double edge = quad.rho_max * quad.radius;
  double below = quad.eval(edge * (1.0 - 1e-9));
  double above = quad.eval(edge * (1.0 + 1e-9));
  CHECK(std::abs(below - above) <= 1e-3 * std::abs(below));
  // The envelope bound dominates the interpolated amplitude.
  for (double m : {0.2, 0.7, 1.9, 3.5, 4.5}) {
    double cap = quad.bound(m);
    for (int k = 0; k < 30; ++k) {
      double r = m + k * 0.17;
      CHECK(std::abs(quad.eval(r)) <= cap * (1.0 + 1e-10) + 1e-14);
    }
    CHECK(quad.bound(m + 0.5) <= cap * (1.0 + 1e-12));
  }
}

TEST_CASE("grid divergence is exact on quadratic fields") {
  GridField f = make_centered_grid({0.0, 0.0}, 1.5, 31, 2);
  double p[2];
  for (std::size_t n = 0; n < f.size(); ++n) {
    f.node_point(n, p);
    f.at(n)[0] = p[0] * p[0];
    f.at(n)[1] = p[0] * p[1];
  }
  GridField div = grid_divergence(f);
  REQUIRE(div.ncomp == 1);
  REQUIRE(div.dims == f.dims);
  int idx[2];
  for (std::size_t n = 0; n < div.size(); ++n) {
    div.node_coords(n, idx);
    div.node_point(n, p);
    bool boundary = idx[0] == 0 || idx[0] == 30 || idx[1] == 0 || idx[1] == 30;
    if (boundary) {
      CHECK(div.at(n)[0] == 0.0);
    } else {
      CHECK(div.at(n)[0] == doctest::Approx(3.0 * p[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("interior divergence sum telescopes to the boundary flux") {
  GridField f = make_centered_grid({0.0, 0.0}, 2.0, 48, 2);
  double p[2];
  for (std::size_t n = 0; n < f.size(); ++n) {
    f.node_point(n, p);
    f.at(n)[0] = std::sin(p[0]) * std::cos(p[1]) + 0.3 * p[0] * p[0];
    f.at(n)[1] = std::exp(-p[0] * p[0]) + p[1] * p[1] * p[1];
  }
  CHECK(divergence_theorem_residual(f) <= 1e-12);
}

TEST_CASE("fft roundtrip and Parseval hold") {
  int nx = 16, ny = 16;
  Rng rng(3100);
  std::vector<std::complex<double>> data(nx * ny), orig;
  for (auto& z : data) z = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  orig = data;
  double phys = 0.0;
  for (auto& z : orig) phys += std::norm(z);
  fft2(data.data(), nx, ny, -1);
  double spec = 0.0;
  for (auto& z : data) spec += std::norm(z);
  CHECK(spec / (nx * ny) == doctest::Approx(phys).epsilon(1e-12));
  fft2(data.data(), nx, ny, 1);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(data[i].real() / (nx * ny) == doctest::Approx(orig[i].real()).epsilon(1e-11));
    CHECK(data[i].imag() / (nx * ny) == doctest::Approx(orig[i].imag()).epsilon(1e-11));
  }
}

TEST_CASE("batched field evaluator reproduces the dense apply") {
  PointMeasure mu = random_cloud(2, 120, 3200);
  CZKernel K = make_cauchy_kernel();
  ApplyParams ap;
  ap.method = ApplyMethod::Dense;
  BatchFieldEval u = field_from_measure(K, mu, 0.07, ap);
  std::vector<double> targets = {0.3, 0.1, -0.8, 0.4, 1.5, -1.2};
  std::vector<double> got = u(targets);
  std::vector<double> ones(mu.size(), 1.0);
  std::vector<double> want = apply_truncated(K, mu, 0.07, ones, targets, ap);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);
}

TEST_CASE("divergence identity holds for the mollified gradient field") {
  PointMeasure mu = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 40);
  DivergenceResult dr = divergence_identity(mu, 1.0, {0.0, 0.0}, 1.6, 96);
  CHECK_FALSE(dr.b_fitted);
  CHECK(dr.b == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
  CHECK(dr.rel_l1 <= 0.03);
  CHECK(dr.interior_nodes > 1000);
  CHECK(dr.lhs.dims == dr.field.dims);
  CHECK(dr.rhs.dims == dr.field.dims);
  CHECK(dr.lhs.ncomp == 1);
}

TEST_CASE("divergence identity fits the scalar convolution below s = 1") {
  PointMeasure mu = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 32);
  DivergenceResult dr = divergence_identity(mu, 0.7, {0.0, 0.0}, 1.6, 64);
  CHECK(dr.b_fitted);
  CHECK(std::isfinite(dr.b));
  CHECK(dr.b != 0.0);
  CHECK(dr.rel_l1 <= 0.05);
}

TEST_CASE("field L1 lower-bound constant is invariant under rescaling") {
  PointMeasure mu = random_cloud(2, 300, 3300);
  CZKernel K = make_riesz_kernel(2, 1.0);
  std::vector<double> x = {0.0, 0.0};
  Rl1LowerBound a = rl1_lower_bound(K, mu, x, 0.3, 64);
  CHECK(a.integral > 0.0);
  CHECK(a.eps == doctest::Approx(ball_mass(mu, x.data(), 0.3) / 0.3).epsilon(1e-13));
  CHECK(a.c_fitted > 0.0);

  PointMeasure big = rescale(mu, 2.0, 1.0);
  Rl1LowerBound b = rl1_lower_bound(K, big, x, 0.6, 64);
  CHECK(b.c_fitted == doctest::Approx(a.c_fitted).epsilon(1e-10));
}

TEST_CASE("principal value of the quadratic radial field has a closed form") {
  BatchFieldEval u = [](const std::vector<double>& t) {
    std::vector<double> out(t.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = t[2 * i] * t[2 * i] + t[2 * i + 1] * t[2 * i + 1];
    return out;
  };
  double R = 2.0;
  PvResult pv = frac_laplacian_pv(u, 2, 1, 1.5, {0.0, 0.0}, 0.05, R);
  REQUIRE(pv.value.size() == 1);
  double want = -4.0 * M_PI * std::sqrt(R);
  CHECK(pv.value[0] == doctest::Approx(want).epsilon(5e-3));
  CHECK(pv.value_norm == doctest::Approx(std::abs(pv.value[0])).epsilon(1e-14));
  CHECK(pv.normalization > 0.0);
  CHECK(pv.evals > 0);
}

TEST_CASE("principal value kills constants exactly and linears by antipodal symmetry") {
  BatchFieldEval c7 = [](const std::vector<double>& t) {
    return std::vector<double>(t.size() / 2, 7.0);
  };
  PvResult flat = frac_laplacian_pv(c7, 2, 1, 1.5, {0.4, -0.2}, 0.05, 3.0);
  CHECK(flat.value[0] == 0.0);
  CHECK(flat.value_norm == 0.0);
  CHECK(flat.normalization == 0.0);

  BatchFieldEval lin = [](const std::vector<double>& t) {
    std::vector<double> out(t.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t[2 * i];
    return out;
  };
  PvResult odd = frac_laplacian_pv(lin, 2, 1, 1.5, {0.0, 0.0}, 0.05, 3.0);
  CHECK(odd.normalization > 0.0);
  CHECK(odd.value_norm <= 1e-12 * odd.normalization);
}

TEST_CASE("ball mass bound through the weighted field integral") {
  PointMeasure mu = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 40);
  CZKernel K = make_riesz_kernel(2, 1.0);
  ApplyParams ap;
  BatchFieldEval u = field_from_measure(K, mu, 3.0 * mu.mesh_scale(), ap);
  std::vector<double> x = {0.0, 0.0};
  PhilemResult pr = philem_check(u, 2, mu, x, 0.4, 1.0, 3.0, 96);
  CHECK(pr.lhs == doctest::Approx(ball_mass(mu, x.data(), 0.4)).epsilon(1e-13));
  CHECK(pr.rhs > 0.0);
  CHECK(pr.ratio * pr.c20 == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(pr.gamma.size() == 2);
  CHECK(pr.tail_fraction >= 0.0);
  CHECK(pr.tail_fraction < 0.5);

  PhilemResult tuned = philem_check(u, 2, mu, x, 0.4, 1.0, 3.0, 96, {{0.05, -0.03}});
  CHECK(tuned.rhs <= pr.rhs * (1.0 + 1e-15));
}

TEST_CASE("spectral density reconstructs the bump through the adjoint transform") {
  FourierGResult fg = fourier_g(128, 4.0, 1.0, 1.0);
  CHECK(fg.rel_l2 <= 0.08);
  CHECK(fg.mean_abs <= 1e-9 * fg.g_max);
  CHECK(fg.g_max > 0.0);
  CHECK(std::isfinite(fg.b));
  CHECK(fg.b != 0.0);
  CHECK(fg.oracle_targets > 100);
  CHECK(fg.decay_max >= fg.decay_median);

  FourierGResult fine = fourier_g(256, 4.0, 1.0, 1.0);
  CHECK(std::abs(fine.b - fg.b) <= 0.02 * std::abs(fine.b));

  CHECK_THROWS_AS(fourier_g(100, 4.0, 1.0, 1.0), std::exception);
  CHECK_THROWS_AS(fourier_g(128, 4.0, 2.0, 1.0), std::exception);
  CHECK_THROWS_AS(fourier_g(128, 4.0, 1.0, 2.5), std::exception);
}

TEST_CASE("window truncation error equals the removed-tail field") {
  PointMeasure mu = make_segment({-64.0, 0.0}, {64.0, 0.0}, 1600);
  CZKernel K = make_riesz_kernel(2, 1.0);
  double A = 2.0;
  std::vector<double> n_values = {8.0, 16.0, 32.0};
  TruncationTable tt = truncation_convergence(K, mu, A, n_values);
  REQUIRE(tt.sup_diff.size() == 3);
  CHECK(tt.n_values == n_values);
  CHECK(tt.sup_diff[0] > tt.sup_diff[1]);
  CHECK(tt.sup_diff[1] > tt.sup_diff[2]);

  // Replay: same target lattice, same tail atoms, dense summation.
  int per_axis = 21;
  std::vector<double> targets;
  double step = 2.0 * A / (per_axis - 1);
  for (int j = 0; j < per_axis; ++j)
    for (int i = 0; i < per_axis; ++i) {
      double px = -A + i * step, py = -A + j * step;
      if (px * px + py * py <= A * A) {
        targets.push_back(px);
        targets.push_back(py);
      }
    }
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    std::vector<double> coords, wts;
    for (std::size_t j = 0; j < mu.size(); ++j)
      if (std::hypot(mu.atom(j)[0], mu.atom(j)[1]) > n_values[k]) {
        coords.push_back(mu.atom(j)[0]);
        coords.push_back(mu.atom(j)[1]);
        wts.push_back(mu.weight(j));
      }
    REQUIRE(!wts.empty());
    PointMeasure tail(2, std::move(coords), std::move(wts), mu.mesh_scale(), 1.0, "tail");
    std::vector<double> uv = apply_one(K, tail, 0.0, targets);
    double sup = 0.0;
    for (std::size_t t = 0; t < targets.size() / 2; ++t)
      sup = std::max(sup, std::hypot(uv[t * 2], uv[t * 2 + 1]));
    CHECK(tt.sup_diff[k] == doctest::Approx(sup).epsilon(1e-13));
  }

  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < 3; ++k) {
    lx.push_back(std::log(n_values[k]));
    ly.push_back(std::log(tt.sup_diff[k]));
  }
  CHECK(tt.slope == doctest::Approx(fit_slope(lx, ly)).epsilon(1e-12));
  CHECK_THROWS_AS(truncation_convergence(K, mu, 2.0, {4.0}), std::exception);
}

TEST_CASE("field L1 growth table reports its own normalization") {
  PointMeasure mu = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 32);
  CZKernel K = make_riesz_kernel(2, 1.0);
  FieldGrowth fg = field_l1_growth(K, mu, {1.0, 2.0}, 48, 0.1);
  REQUIRE(fg.integrals.size() == 2);
  CHECK(fg.integrals[0] > 0.0);
  CHECK(fg.integrals[1] > fg.integrals[0]);
  for (std::size_t i = 0; i < 2; ++i) {
    double A = fg.a_values[i];
    CHECK(fg.ratios[i] ==
          doctest::Approx(fg.integrals[i] / (A * A * std::log(std::exp(1.0) + A))).epsilon(1e-13));
  }
}

TEST_CASE("finite-difference Hessian matches the analytic one-atom field") {
  PointMeasure atom(2, {0.0, 0.0}, {1.0}, 0.1, 1.0, "atom");
  CZKernel K = make_cauchy_kernel();
  std::vector<double> target = {2.0, 1.0};
  SecondDerResult sd = secondder_check(K, atom, target, 0.01);
  // Largest Hessian entry of (x, -y) / |x|^2 at (2, 1) is 22 / 125.
  double want = 22.0 / 125.0;
  CHECK(sd.max_entry == doctest::Approx(want).epsilon(5e-3));
  CHECK(sd.coarse == doctest::Approx(want).epsilon(5e-3));
  CHECK(sd.stability <= 0.01);

  std::vector<double> near = {0.02, 0.0};
  CHECK_THROWS_AS(secondder_check(K, atom, near, 0.01), std::exception);
}
