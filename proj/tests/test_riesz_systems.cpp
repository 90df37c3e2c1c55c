#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "czlab/common.hpp"
#include "czlab/dyadic.hpp"
#include "czlab/kernel.hpp"
#include "czlab/measure.hpp"
#include "czlab/riesz_system.hpp"
#include "doctest.h"

using namespace czlab;

namespace {

PointMeasure random_cloud(int d, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> pts(n * d), w(n);
  for (std::size_t i = 0; i < n * d; ++i) pts[i] = rng.uniform(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) w[i] = rng.uniform(0.2, 1.0) / static_cast<double>(n);
  return PointMeasure(d, std::move(pts), std::move(w), 0.005, 1.0, "test-cloud");
}

// Exhaustive enumeration: assign every atom to its level-k cube by floor
// division, keep nonempty cubes, order by level then corner.
struct CubeKey {
  int level;
  std::vector<long long> idx;
  bool operator<(const CubeKey& o) const {
    if (level != o.level) return level < o.level;
    return idx < o.idx;
  }
};

std::map<CubeKey, std::pair<double, std::vector<std::size_t>>> brute_cubes(
    const PointMeasure& mu, const std::vector<double>& corner, double side, int max_level) {
  std::map<CubeKey, std::pair<double, std::vector<std::size_t>>> out;
  int d = mu.dim();
  for (int lvl = 0; lvl <= max_level; ++lvl) {
    double h = side / std::pow(2.0, lvl);
    long long cells = 1LL << lvl;
    for (std::size_t a = 0; a < mu.size(); ++a) {
      CubeKey key;
      key.level = lvl;
      key.idx.resize(d);
      bool inside = true;
      for (int k = 0; k < d; ++k) {
        double t = (mu.atom(a)[k] - corner[k]) / h;
        long long i = static_cast<long long>(std::floor(t));
        if (i < 0 || i >= cells) {
          inside = false;
          break;
        }
        key.idx[k] = i;
      }
      if (!inside) continue;
      auto& slot = out[key];
      slot.first += mu.weight(a);
      slot.second.push_back(a);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("dyadic cubes match exhaustive floor-division binning") {
  PointMeasure mu = random_cloud(2, 230, 1100);
  std::vector<double> corner = {0.0, 0.0};
  double side = 1.0;
  int max_level = 3;
  std::vector<DyadicCube> cubes = dyadic_cubes(mu, corner, side, max_level);
  auto want = brute_cubes(mu, corner, side, max_level);
  REQUIRE(cubes.size() == want.size());

  std::size_t pos = 0;
  for (const auto& [key, payload] : want) {
    const DyadicCube& q = cubes[pos++];
    CHECK(q.level == key.level);
    double h = side / std::pow(2.0, key.level);
    CHECK(q.side == doctest::Approx(h).epsilon(1e-14));
    for (int k = 0; k < 2; ++k)
      CHECK(q.corner[k] == doctest::Approx(corner[k] + key.idx[k] * h).epsilon(1e-13));
    CHECK(q.mass == doctest::Approx(payload.first).epsilon(1e-13));
    std::vector<std::size_t> got_atoms = q.atoms;
    std::vector<std::size_t> want_atoms = payload.second;
    std::sort(got_atoms.begin(), got_atoms.end());
    std::sort(want_atoms.begin(), want_atoms.end());
    CHECK(got_atoms == want_atoms);
  }
}

TEST_CASE("dyadic ordering is level-major and lexicographic within a level") {
  PointMeasure mu = random_cloud(2, 150, 1110);
  std::vector<DyadicCube> cubes = dyadic_cubes(mu, {0.0, 0.0}, 1.0, 4);
  for (std::size_t i = 1; i < cubes.size(); ++i) {
    const DyadicCube& a = cubes[i - 1];
    const DyadicCube& b = cubes[i];
    bool ordered = a.level < b.level ||
                   (a.level == b.level && a.corner < b.corner);
    CHECK(ordered);
  }
  // The root carries everything inside the unit square.
  REQUIRE(!cubes.empty());
  CHECK(cubes[0].level == 0);
  CHECK(cubes[0].mass == doctest::Approx(mu.total_mass()).epsilon(1e-13));
}

TEST_CASE("carleson sum agrees with a manual pass over the cube list") {
  PointMeasure mu = make_corner_cantor(2, 0.25, 4);
  double s = 1.0, floor_c = 0.5;
  int max_level = 4;
  CarlesonResult cr = carleson_sum(mu, {0.0, 0.0}, 1.0, max_level, s, floor_c);
  std::vector<DyadicCube> cubes = dyadic_cubes(mu, {0.0, 0.0}, 1.0, max_level);
  double total = 0.0;
  std::vector<double> per_level(max_level + 1, 0.0);
  std::size_t counted = 0;
  for (const DyadicCube& q : cubes) {
    if (q.mass >= floor_c * std::pow(q.side, s)) {
      total += std::pow(q.side, s);
      per_level[q.level] += std::pow(q.side, s);
      ++counted;
    }
  }
  CHECK(cr.total == doctest::Approx(total).epsilon(1e-12));
  CHECK(cr.cubes_counted == counted);
  CHECK(cr.cubes_visited >= cubes.size());
  REQUIRE(cr.per_level.size() == per_level.size());
  for (std::size_t l = 0; l < per_level.size(); ++l)
    CHECK(cr.per_level[l] == doctest::Approx(per_level[l]).epsilon(1e-12));
}

TEST_CASE("riesz family bumps are mean-zero with the declared Lipschitz cap") {
  PointMeasure mu = make_corner_cantor(2, 0.25, 3);
  std::vector<DyadicCube> cubes = dyadic_cubes(mu, {0.0, 0.0}, 1.0, 2);
  double A = 8.0, s = 1.0;
  RieszFamily fam = make_riesz_family(mu, cubes, A, s);
  REQUIRE(fam.psi.size() == fam.cube_index.size());
  REQUIRE(!fam.psi.empty());
  CHECK(fam.A == A);
  CHECK(fam.s == s);
  for (std::size_t p = 0; p < fam.psi.size(); ++p) {
    const TestFunction& psi = fam.psi[p];
    const DyadicCube& q = cubes[fam.cube_index[p]];
    std::vector<double> v = psi.sample(mu);
    double mean = 0.0, absmean = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      mean += v[i] * mu.weight(i);
      absmean += std::abs(v[i]) * mu.weight(i);
    }
    CHECK(absmean > 0.0);
    CHECK(std::abs(mean) <= 1e-12 * absmean);
    double cap = 0.9 * std::pow(q.side, -1.0 - 0.5 * s);
    CHECK(psi.declared_lip == doctest::Approx(cap).epsilon(1e-12));
    CHECK(psi.support_radius() == doctest::Approx(0.5 * A * q.side).epsilon(1e-12));
    std::vector<double> want_center = q.center();
    CHECK(psi.support_center()[0] == doctest::Approx(want_center[0]).epsilon(1e-13));
    CHECK(psi.support_center()[1] == doctest::Approx(want_center[1]).epsilon(1e-13));
  }
  for (std::size_t idx : fam.dropped) CHECK(idx < cubes.size());
}

TEST_CASE("gram matrix is symmetric with brute-force diagonal") {
  PointMeasure mu = random_cloud(2, 260, 1120);
  std::vector<DyadicCube> cubes = dyadic_cubes(mu, {0.0, 0.0}, 1.0, 2);
  RieszFamily fam = make_riesz_family(mu, cubes, 4.0, 1.0);
  REQUIRE(fam.psi.size() >= 3);
  GramSpectrum g = riesz_gram(mu, fam);
  std::size_t m = g.size;
  REQUIRE(m == fam.psi.size());
  REQUIRE(g.gram.size() == m * m);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < m; ++q)
      CHECK(g.gram[p * m + q] == doctest::Approx(g.gram[q * m + p]).epsilon(1e-12));
  for (std::size_t p = 0; p < m; ++p) {
    std::vector<double> v = fam.psi[p].sample(mu);
    double dot = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) dot += v[i] * v[i] * mu.weight(i);
    CHECK(g.gram[p * m + p] == doctest::Approx(dot).epsilon(1e-11));
  }
}

TEST_CASE("gram extreme eigenvalues match an independent power iteration") {
  PointMeasure mu = random_cloud(2, 200, 1130);
  std::vector<DyadicCube> cubes = dyadic_cubes(mu, {0.0, 0.0}, 1.0, 2);
  RieszFamily fam = make_riesz_family(mu, cubes, 4.0, 1.0);
  GramSpectrum g = riesz_gram(mu, fam);
  std::size_t m = g.size;
  REQUIRE(m >= 3);

  auto matvec = [&](const std::vector<double>& v, double shift) {
    std::vector<double> out(m, 0.0);
    for (std::size_t p = 0; p < m; ++p) {
      double acc = 0.0;
      for (std::size_t q = 0; q < m; ++q) acc += g.gram[p * m + q] * v[q];
      out[p] = acc - shift * v[p];
    }
    return out;
  };
  auto top_eig = [&](double shift) {
    Rng rng(4242);
    std::vector<double> v(m);
    for (double& x : v) x = rng.normal();
    double lam = 0.0;
    for (int it = 0; it < 3000; ++it) {
      std::vector<double> w = matvec(v, shift);
      double nw = norm2(w.data(), static_cast<int>(m));
      REQUIRE(nw > 0.0);
      for (std::size_t p = 0; p < m; ++p) v[p] = w[p] / nw;
      lam = nw;
    }
    std::vector<double> w = matvec(v, shift);
    double r = 0.0;
    for (std::size_t p = 0; p < m; ++p) r += v[p] * w[p];
    return r;
  };
  double lam_max = top_eig(0.0);
  CHECK(g.lambda_max == doctest::Approx(lam_max).epsilon(1e-8));
  // Smallest eigenvalue from the top of the flipped spectrum lam_max I - G.
  double lam_min = 0.0;
  {
    std::vector<double> flipped(g.gram.size());
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = 0; q < m; ++q)
        flipped[p * m + q] = (p == q ? lam_max : 0.0) - g.gram[p * m + q];
    Rng rng(5252);
    std::vector<double> v(m);
    for (double& x : v) x = rng.normal();
    double lam = 0.0;
    for (int it = 0; it < 3000; ++it) {
      std::vector<double> w(m, 0.0);
      for (std::size_t p = 0; p < m; ++p) {
        double acc = 0.0;
        for (std::size_t q = 0; q < m; ++q) acc += flipped[p * m + q] * v[q];
        w[p] = acc;
      }
      double nw = norm2(w.data(), static_cast<int>(m));
      REQUIRE(nw > 0.0);
      for (std::size_t p = 0; p < m; ++p) v[p] = w[p] / nw;
      lam = nw;
    }
    lam_min = lam_max - lam;
  }
  CHECK(g.lambda_min == doctest::Approx(lam_min).epsilon(1e-6));
  CHECK(g.lambda_min >= -1e-10);
  CHECK(g.lambda_max >= g.lambda_min);
}

TEST_CASE("riesz scaling reports a slope consistent with its own table") {
  PointMeasure mu = make_corner_cantor(2, 0.25, 3);
  std::vector<DyadicCube> cubes = dyadic_cubes(mu, {0.0, 0.0}, 1.0, 2);
  std::vector<double> A_grid = {4.0, 8.0, 16.0};
  RieszScaling rs = riesz_scaling(mu, cubes, A_grid, 1.0);
  REQUIRE(rs.A == A_grid);
  REQUIRE(rs.lambda_max.size() == 3);
  for (double lm : rs.lambda_max) CHECK(lm > 0.0);
  std::vector<double> lx(3), ly(3);
  for (int i = 0; i < 3; ++i) {
    lx[i] = std::log(A_grid[i]);
    ly[i] = std::log(rs.lambda_max[i]);
  }
  CHECK(rs.slope == doctest::Approx(fit_slope(lx, ly)).epsilon(1e-12));
  // Wider windows overlap more, so the synthesis constant grows.
  CHECK(rs.lambda_max[2] > rs.lambda_max[0]);
}

TEST_CASE("theta localization minimizes over the window grid") {
  PointMeasure mu = make_corner_cantor(2, 0.25, 3);
  std::vector<DyadicCube> cubes = dyadic_cubes(mu, {0.0, 0.0}, 1.0, 1);
  REQUIRE(!cubes.empty());
  CZKernel K = make_riesz_kernel(2, 1.0);
  std::vector<double> windows = {2.0, 4.0, 8.0};
  ThetaResult th = theta_localization(K, mu, cubes[0], 4.0, 1.0, windows);
  REQUIRE(th.per_radius.size() == windows.size());
  CHECK(th.radii == windows);
  double mn = *std::min_element(th.per_radius.begin(), th.per_radius.end());
  CHECK(th.value == mn);
  std::size_t arg = static_cast<std::size_t>(
      std::min_element(th.per_radius.begin(), th.per_radius.end()) - th.per_radius.begin());
  CHECK(th.argmin_radius == windows[arg]);
  for (double v : th.per_radius) {
    CHECK(v >= 0.0);
    CHECK(std::isfinite(v));
  }
}
