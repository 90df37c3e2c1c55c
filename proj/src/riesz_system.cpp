#include "czlab/riesz_system.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "czlab/common.hpp"
#include "czlab/operators.hpp"

namespace czlab {

RieszFamily make_riesz_family(const PointMeasure& mu, const std::vector<DyadicCube>& cubes,
                              double A, double s) {
  require(A > 0.0, "make_riesz_family: A > 0");
  require(s > 0.0, "make_riesz_family: s > 0");
  RieszFamily fam;
  fam.A = A;
  fam.s = s;
  for (std::size_t q = 0; q < cubes.size(); ++q) {
    const DyadicCube& Q = cubes[q];
    double rho = 0.5 * A * Q.side;
    std::vector<double> c = Q.center();
    Bump raw{c, rho, 1.0, BumpProfile::Tent};
    Bump ref{c, 0.5 * rho, 1.0, BumpProfile::Tent};
    if (bump_mass(ref, mu) == 0.0) ref.radius = rho;
    if (bump_mass(ref, mu) == 0.0 || bump_mass(raw, mu) == 0.0) {
      fam.dropped.push_back(q);
      continue;
    }
    TestFunction psi = mean_zero_correct(raw, ref, mu);
    double lip_target = std::pow(Q.side, -1.0 - 0.5 * s);
    psi.scale = 0.9 * lip_target / psi.declared_lip;
    psi.declared_lip = 0.9 * lip_target;
    // A member can still vanish on every atom after correction.
    double l1 = 0.0;
    for (std::size_t j : mu.index().ball_points(c.data(), rho))
      l1 += std::abs(psi.eval(mu.atom(j), mu.dim())) * mu.weight(j);
    if (l1 == 0.0) {
      fam.dropped.push_back(q);
      continue;
    }
    fam.psi.push_back(std::move(psi));
    fam.cube_index.push_back(q);
  }
  return fam;
}

GramSpectrum riesz_gram(const PointMeasure& mu, const RieszFamily& family) {
  std::size_t n = family.psi.size();
  GramSpectrum out;
  out.size = n;
  if (n == 0) return out;
  // Sample every member once; supports overlap heavily across levels.
  std::vector<std::vector<double>> vals(n);
  for (std::size_t p = 0; p < n; ++p) vals[p] = family.psi[p].sample(mu);
  out.gram.assign(n * n, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p; q < n; ++q) {
      double acc = 0.0;
      for (std::size_t j = 0; j < mu.size(); ++j)
        acc += vals[p][j] * vals[q][j] * mu.weight(j);
      out.gram[p * n + q] = acc;
      out.gram[q * n + p] = acc;
    }
  Eigen::Map<const Eigen::MatrixXd> G(out.gram.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  require(es.info() == Eigen::Success, "riesz_gram: eigensolver failed");
  out.lambda_min = es.eigenvalues()(0);
  out.lambda_max = es.eigenvalues()(n - 1);
  return out;
}

RieszScaling riesz_scaling(const PointMeasure& mu, const std::vector<DyadicCube>& cubes,
                           const std::vector<double>& A_grid, double s) {
  require(A_grid.size() >= 2, "riesz_scaling: need >= 2 window factors");
  RieszScaling out;
  std::vector<double> lx, ly;
  for (double A : A_grid) {
    RieszFamily fam = make_riesz_family(mu, cubes, A, s);
    GramSpectrum spec = riesz_gram(mu, fam);
    out.A.push_back(A);
    out.lambda_max.push_back(spec.lambda_max);
    if (spec.lambda_max > 0.0) {
      lx.push_back(std::log(A));
      ly.push_back(std::log(spec.lambda_max));
    }
  }
  out.slope = lx.size() >= 2 ? fit_slope(lx, ly) : 0.0;
  return out;
}

ThetaResult theta_localization(const CZKernel& K, const PointMeasure& mu, const DyadicCube& cube,
                               double A, double s, const std::vector<double>& window_scales) {
  require(!window_scales.empty(), "theta_localization: empty window grid");
  ThetaResult out;
  std::vector<DyadicCube> one{cube};
  RieszFamily fam = make_riesz_family(mu, one, A, s);
  if (fam.psi.empty()) return out;
  std::vector<double> c = cube.center();

  // Atoms and psi values on the supports (shared across windows).
  double rho = 0.5 * A * cube.side;
  std::vector<std::size_t> supp = mu.index().ball_points(c.data(), rho);
  std::vector<double> supp_pts(supp.size() * static_cast<std::size_t>(mu.dim()));
  for (std::size_t a = 0; a < supp.size(); ++a)
    for (int k = 0; k < mu.dim(); ++k) supp_pts[a * mu.dim() + k] = mu.atom(supp[a])[k];

  out.value = std::numeric_limits<double>::infinity();
  double norm_scale = std::pow(cube.side, -0.5 * s);
  for (double t : window_scales) {
    require(t > 0.0, "theta_localization: window scale > 0");
    double R = t * cube.side;
    std::vector<double> chi(mu.size(), 0.0);
    for (std::size_t j : mu.index().ball_points(c.data(), R)) chi[j] = 1.0;
    std::vector<double> u = apply_truncated(K, mu, 0.0, chi, supp_pts);
    double worst = 0.0;
    for (const TestFunction& psi : fam.psi) {
      std::vector<double> val(K.ncomp, 0.0);
      for (std::size_t a = 0; a < supp.size(); ++a) {
        double pw = psi.eval(mu.atom(supp[a]), mu.dim()) * mu.weight(supp[a]);
        if (pw == 0.0) continue;
        for (int cmp = 0; cmp < K.ncomp; ++cmp) val[cmp] += pw * u[a * K.ncomp + cmp];
      }
      worst = std::max(worst, norm2(val.data(), K.ncomp));
    }
    double theta = norm_scale * worst;
    out.radii.push_back(R);
    out.per_radius.push_back(theta);
    if (theta < out.value) {
      out.value = theta;
      out.argmin_radius = R;
    }
  }
  return out;
}

}  // namespace czlab
