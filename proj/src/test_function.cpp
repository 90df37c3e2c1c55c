#include "czlab/test_function.hpp"

#include <cmath>

#include "czlab/common.hpp"

namespace czlab {

double Bump::eval(const double* x, int d) const {
  double t = dist(x, center.data(), d) / radius;
  if (t >= 1.0) return 0.0;
  switch (profile) {
    case BumpProfile::Tent:
      return height * (1.0 - t);
    case BumpProfile::Smoothstep:
      return height * (1.0 - t * t * (3.0 - 2.0 * t));
  }
  return 0.0;
}

double Bump::lipschitz() const {
  double base = profile == BumpProfile::Tent ? 1.0 : 1.5;
  return std::abs(height) * base / radius;
}

double TestFunction::eval(const double* x, int d) const {
  return scale * (bump.eval(x, d) - lambda * ref.eval(x, d));
}

std::vector<double> TestFunction::sample(const PointMeasure& mu) const {
  std::vector<double> out(mu.size(), 0.0);
  // Only atoms inside the support can contribute.
  for (std::size_t j : mu.index().ball_points(bump.center.data(), bump.radius))
    out[j] = eval(mu.atom(j), mu.dim());
  return out;
}

double bump_mass(const Bump& b, const PointMeasure& mu) {
  double acc = 0.0;
  for (std::size_t j : mu.index().ball_points(b.center.data(), b.radius))
    acc += b.eval(mu.atom(j), mu.dim()) * mu.weight(j);
  return acc;
}

TestFunction mean_zero_correct(const Bump& bump, const Bump& ref, const PointMeasure& mu) {
  require(bump.center.size() == ref.center.size(), "mean_zero_correct: center dims");
  double mref = bump_mass(ref, mu);
  require(mref != 0.0, "mean_zero_correct: reference bump carries no mass");
  TestFunction psi;
  psi.bump = bump;
  psi.ref = ref;
  psi.lambda = bump_mass(bump, mu) / mref;
  psi.scale = 1.0;
  psi.declared_lip = bump.lipschitz() + std::abs(psi.lambda) * ref.lipschitz();
  return psi;
}

std::vector<TestFunction> standard_family(const PointMeasure& mu,
                                          const std::vector<double>& center, double R,
                                          const FamilyParams& params) {
  require(static_cast<int>(center.size()) == mu.dim(), "standard_family: center dim");
  require(R > 0.0, "standard_family: R > 0");
  require(params.scales >= 1 && params.offsets_per_axis >= 1, "standard_family: params");
  require(params.lip_target > 0.0, "standard_family: lip_target > 0");
  int d = mu.dim();
  std::vector<TestFunction> family;

  std::vector<BumpProfile> profiles{BumpProfile::Tent};
  if (params.smoothstep_variants) profiles.push_back(BumpProfile::Smoothstep);

  for (int k = 0; k < params.scales; ++k) {
    double rho = R * 0.9 * std::pow(2.0, -k);
    double slack = R - rho;  // translation room keeping the support inside B(center, R)
    int n_off = slack > 0.0 ? params.offsets_per_axis : 1;
    double step = n_off > 1 ? 2.0 * slack / (n_off - 1) : 0.0;
    std::size_t cells = 1;
    for (int a = 0; a < d; ++a) cells *= n_off;
    for (std::size_t t = 0; t < cells; ++t) {
      std::vector<double> c(center);
      std::size_t rem = t;
      double off2 = 0.0;
      for (int a = 0; a < d; ++a) {
        int i = static_cast<int>(rem % n_off);
        rem /= n_off;
        double off = -slack + i * step;
        c[a] += off;
        off2 += off * off;
      }
      if (std::sqrt(off2) > slack + 1e-12) continue;  // support would leave B(center, R)
      for (BumpProfile prof : profiles) {
        Bump raw{c, rho, 1.0, prof};
        Bump ref{c, 0.5 * rho, 1.0, BumpProfile::Tent};
        if (bump_mass(ref, mu) == 0.0) {
          ref.radius = rho;  // widen once before giving up on this member
          if (bump_mass(ref, mu) == 0.0) continue;
        }
        TestFunction psi = mean_zero_correct(raw, ref, mu);
        // Drop members that vanish on every atom.
        double l1 = 0.0;
        for (std::size_t j : mu.index().ball_points(c.data(), rho))
          l1 += std::abs(psi.eval(mu.atom(j), d)) * mu.weight(j);
        if (l1 == 0.0) continue;
        psi.scale = 0.9 * params.lip_target / psi.declared_lip;
        psi.declared_lip = 0.9 * params.lip_target;
        family.push_back(std::move(psi));
      }
    }
  }
  return family;
}

}  // namespace czlab
