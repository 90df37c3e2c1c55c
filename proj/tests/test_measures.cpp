#include <cmath>
#include <cstdio>
#include <vector>

#include "czlab/common.hpp"
#include "czlab/measure.hpp"
#include "doctest.h"

using namespace czlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

double brute_ball_mass(const PointMeasure& mu, const double* x, double r) {
  double m = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    double d2 = 0.0;
    for (int k = 0; k < mu.dim(); ++k) {
      double t = mu.atom(j)[k] - x[k];
      d2 += t * t;
    }
    if (d2 <= r * r) m += mu.weight(j);
  }
  return m;
}
}  // namespace

TEST_CASE("segment atoms and weights") {
  PointMeasure mu = make_segment({-3.0, 0.0}, {5.0, 0.0}, 400);
  CHECK(mu.size() == 400);
  CHECK(mu.dim() == 2);
  CHECK(mu.total_mass() == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(mu.mesh_scale() == doctest::Approx(8.0 / 400).epsilon(1e-14));
  // midpoint rule: first atom half a step in
  CHECK(mu.atom(0)[0] == doctest::Approx(-3.0 + 0.01).epsilon(1e-12));
  std::vector<double> bc = mu.barycenter();
  CHECK(bc[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bc[1] == 0.0);
}

TEST_CASE("ball lebesgue mass and symmetry") {
  PointMeasure mu = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 64);
  CHECK(mu.total_mass() == doctest::Approx(kPi).epsilon(5e-3));
  double left = 0.0, right = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (mu.atom(j)[0] < 0.0) left += mu.weight(j);
    if (mu.atom(j)[0] > 0.0) right += mu.weight(j);
  }
  CHECK(left == doctest::Approx(right).epsilon(1e-12));
}

TEST_CASE("annulus mass") {
  PointMeasure mu = make_annulus_lebesgue(2, {0.0, 0.0}, 1.0, 1.5, 128);
  CHECK(mu.total_mass() == doctest::Approx(kPi * (2.25 - 1.0)).epsilon(5e-3));
  for (std::size_t j = 0; j < mu.size(); j += 97) {
    double r = std::hypot(mu.atom(j)[0], mu.atom(j)[1]);
    CHECK(r >= 1.0 - 0.02);
    CHECK(r <= 1.5 + 0.02);
  }
}

TEST_CASE("corner cantor structure") {
  PointMeasure mu = make_corner_cantor(2, 0.25, 3);
  CHECK(mu.size() == 64);
  for (std::size_t j = 0; j < mu.size(); ++j)
    CHECK(mu.weight(j) == doctest::Approx(1.0 / 64).epsilon(1e-14));
  CHECK(mu.nominal_s() == doctest::Approx(1.0).epsilon(1e-12));
  // first cell hugs the origin corner; atom at its center
  double half_cell = 0.5 * 0.25 * 0.25 * 0.25;
  CHECK(mu.atom(0)[0] == doctest::Approx(half_cell).epsilon(1e-12));
  CHECK(mu.box_min()[0] >= 0.0);
  CHECK(mu.box_max()[0] <= 1.0);
}

TEST_CASE("generic cantor matches corner variant") {
  std::vector<std::vector<double>> offsets = {
      {0.0, 0.0}, {0.75, 0.0}, {0.0, 0.75}, {0.75, 0.75}};
  PointMeasure a = make_cantor(2, 0.25, 2, offsets);
  PointMeasure b = make_corner_cantor(2, 0.25, 2);
  REQUIRE(a.size() == b.size());
  CHECK(a.atoms_flat() == b.atoms_flat());
  CHECK(a.weights() == b.weights());
}

TEST_CASE("restriction operators") {
  PointMeasure mu = make_segment({-1.0, 0.0}, {1.0, 0.0}, 100);
  PointMeasure half = restrict_halfspace(mu, {1.0, 0.0}, 0.0);
  CHECK(half.size() == 50);
  CHECK(half.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  PointMeasure ball = restrict_ball(mu, {0.0, 0.0}, 0.5);
  CHECK(ball.total_mass() == doctest::Approx(1.0).epsilon(0.05));
  for (std::size_t j = 0; j < ball.size(); ++j) CHECK(std::abs(ball.atom(j)[0]) <= 0.5);
}

TEST_CASE("rescale pushforward") {
  PointMeasure mu = make_corner_cantor(2, 0.25, 2);
  PointMeasure two = rescale(mu, 2.0, 1.0);
  CHECK(two.total_mass() == doctest::Approx(2.0 * mu.total_mass()).epsilon(1e-14));
  CHECK(two.atom(5)[0] == doctest::Approx(2.0 * mu.atom(5)[0]).epsilon(1e-14));
  CHECK(two.mesh_scale() == doctest::Approx(2.0 * mu.mesh_scale()).epsilon(1e-14));
}

TEST_CASE("ball_mass agrees with direct enumeration") {
  PointMeasure mu = make_ball_lebesgue(2, {0.3, -0.2}, 1.1, 40);
  Rng rng(404);
  for (int i = 0; i < 40; ++i) {
    double x[2] = {rng.uniform(-1.5, 2.0), rng.uniform(-2.0, 1.5)};
    double r = rng.log_uniform(0.05, 2.5);
    CHECK(ball_mass(mu, x, r) == doctest::Approx(brute_ball_mass(mu, x, r)).epsilon(1e-13));
  }
}

TEST_CASE("growth constant of the line") {
  PointMeasure mu = make_segment({-10.0, 0.0}, {10.0, 0.0}, 2000);
  std::vector<double> radii;
  for (int i = 0; i < 24; ++i)
    radii.push_back(2.0001 * mu.mesh_scale() *
                    std::pow(20.0 / (2.0001 * mu.mesh_scale()), i / 23.0));
  double lam = growth_constant(mu, 1.0, radii);
  CHECK(lam >= 1.8);
  CHECK(lam <= 2.6);
  CHECK_THROWS(growth_constant(mu, 1.0, {0.5 * mu.mesh_scale()}));
}

TEST_CASE("doubling radius terminates") {
  PointMeasure mu = make_segment({-10.0, 0.0}, {10.0, 0.0}, 2000);
  double x[2] = {0.0, 0.0};
  double r = doubling_radius(mu, x, 0.1, 1.0);
  CHECK(r >= 0.1);
  CHECK(r <= 64.0);
}

TEST_CASE("text round trip is bit exact") {
  PointMeasure mu = make_corner_cantor(2, 0.25, 3);
  const char* path = "czlab_test_measure.txt";
  save_measure_text(mu, path);
  PointMeasure back = load_measure_text(path);
  std::remove(path);
  REQUIRE(back.size() == mu.size());
  CHECK(back.atoms_flat() == mu.atoms_flat());
  CHECK(back.weights() == mu.weights());
  CHECK(back.mesh_scale() == mu.mesh_scale());
  CHECK(back.nominal_s() == mu.nominal_s());
  CHECK(back.generator_tag() == mu.generator_tag());
}

TEST_CASE("json round trip is bit exact") {
  PointMeasure mu = make_segment({-1.0, 0.5}, {2.0, -0.5}, 37);
  PointMeasure back = measure_from_json(measure_to_json(mu));
  REQUIRE(back.size() == mu.size());
  CHECK(back.atoms_flat() == mu.atoms_flat());
  CHECK(back.weights() == mu.weights());
}

TEST_CASE("measure_from_spec kinds") {
  PointMeasure seg = measure_from_spec(
      R"({"kind": "segment", "a": [-1, 0], "b": [1, 0], "n": 50})");
  CHECK(seg.size() == 50);
  PointMeasure ball = measure_from_spec(
      R"({"kind": "ball", "d": 2, "center": [0, 0], "radius": 1.0, "cells_per_axis": 16})");
  CHECK(ball.total_mass() == doctest::Approx(kPi).epsilon(0.05));
  PointMeasure ann = measure_from_spec(
      R"({"kind": "annulus", "d": 2, "center": [0, 0], "r_inner": 1.0, "r_outer": 2.0,
          "cells_per_axis": 16})");
  CHECK(ann.size() > 0);
  PointMeasure cc = measure_from_spec(
      R"({"kind": "corner-cantor", "d": 2, "ratio": 0.25, "depth": 2})");
  CHECK(cc.size() == 16);
  CHECK_THROWS(measure_from_spec(R"({"kind": "moebius"})"));
  CHECK_THROWS(measure_from_spec("not json"));
}

TEST_CASE("measure_from_spec file kind round trips") {
  PointMeasure mu = make_segment({0.0, 0.0}, {1.0, 1.0}, 12);
  const char* path = "czlab_test_spec_measure.txt";
  save_measure_text(mu, path);
  PointMeasure back =
      measure_from_spec(std::string(R"({"kind": "file", "path": ")") + path + "\"}");
  std::remove(path);
  CHECK(back.atoms_flat() == mu.atoms_flat());
}

TEST_CASE("empty and degenerate inputs rejected") {
  CHECK_THROWS(make_segment({0.0, 0.0}, {1.0, 0.0}, 0));
  CHECK_THROWS(make_ball_lebesgue(2, {0.0, 0.0}, -1.0, 8));
  CHECK_THROWS(make_corner_cantor(2, 0.6, 2));  // children overlap
  CHECK_THROWS(PointMeasure(2, {0.0, 0.0}, {-1.0}, 0.1, 1.0, "bad"));
}
