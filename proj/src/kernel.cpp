#include "czlab/kernel.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace czlab {

using nlohmann::json;

CZKernel make_riesz_kernel(int d, double s) {
  require(d >= 1, "riesz kernel: d >= 1");
  require(s > 0.0 && s < static_cast<double>(d), "riesz kernel: 0 < s < d");
  CZKernel K;
  K.kind = KernelKind::RieszS;
  K.d = d;
  K.ncomp = d;
  K.s = s;
  K.alpha = 1.0;
  K.omega_sup = 1.0;
  K.holder_scale = 1.0;
  std::ostringstream name;
  name << "riesz-" << d << "d-s" << s;
  K.name = name.str();
  return K;
}

CZKernel make_cauchy_kernel() {
  CZKernel K;
  K.kind = KernelKind::Cauchy;
  K.d = 2;
  K.ncomp = 2;
  K.s = 1.0;
  K.alpha = 1.0;
  K.omega_sup = 1.0;
  K.holder_scale = 1.0;
  K.name = "cauchy";
  return K;
}

CZKernel make_conj_cauchy_kernel() {
  CZKernel K;
  K.kind = KernelKind::ConjCauchy;
  K.d = 2;
  K.ncomp = 2;
  K.s = 1.0;
  K.alpha = 1.0;
  K.omega_sup = 1.0;
  // |Omega(e^{i a}) - Omega(e^{i b})| = 2 |sin(3(a-b)/2)| approaches 3 |a-b|.
  K.holder_scale = 3.0;
  K.name = "conj-cauchy";
  return K;
}

void kernel_omega(const CZKernel& K, const double* x, double* out) {
  switch (K.kind) {
    case KernelKind::RieszS:
      for (int k = 0; k < K.d; ++k) out[k] = x[k];
      return;
    case KernelKind::Cauchy:
      out[0] = x[0];
      out[1] = -x[1];
      return;
    case KernelKind::ConjCauchy: {
      double a = x[0], b = x[1], r2 = a * a + b * b;
      if (r2 == 0.0) {
        out[0] = out[1] = 0.0;
        return;
      }
      out[0] = (a * a * a - 3.0 * a * b * b) / r2;
      out[1] = (b * b * b - 3.0 * a * a * b) / r2;
      return;
    }
    case KernelKind::Custom:
      K.custom_omega(x, out);
      return;
  }
}

void kernel_eval(const CZKernel& K, const double* x, double delta, double* out) {
  require(delta >= 0.0, "kernel_eval: delta >= 0");
  if (delta == 0.0) {
    double r2 = 0.0;
    for (int k = 0; k < K.d; ++k) r2 += x[k] * x[k];
    require(r2 > 0.0, "kernel_eval: raw kernel undefined at 0");
  }
  kernel_eval_inline(K, x, delta, out);
}

double kernel_magnitude_bound(const CZKernel& K, double m, double delta) {
  double t = std::max(delta, m);
  require(t > 0.0, "kernel_magnitude_bound: max(delta, m) > 0");
  return K.omega_sup / std::pow(t, K.s);
}

KernelValidation validate_kernel(const CZKernel& K, int n, std::uint64_t seed, double tol) {
  KernelValidation v;
  Rng rng(seed);
  std::vector<double> x(K.d), y(K.d), ox(K.ncomp), oy(K.ncomp), tmp(K.ncomp);
  for (int i = 0; i < n; ++i) {
    rng.unit_vector(K.d, x.data());
    kernel_omega(K, x.data(), ox.data());
    double nx = norm2(ox.data(), K.ncomp);
    v.measured_sup = std::max(v.measured_sup, nx);

    // Oddness at x.
    for (int k = 0; k < K.d; ++k) y[k] = -x[k];
    kernel_omega(K, y.data(), oy.data());
    double odd = 0.0;
    for (int c = 0; c < K.ncomp; ++c) odd += sqr(oy[c] + ox[c]);
    v.oddness_residual = std::max(v.oddness_residual, std::sqrt(odd));

    // Homogeneity: Omega(t x) = t Omega(x), t in (0, 4].
    double t = rng.uniform(0.05, 4.0);
    for (int k = 0; k < K.d; ++k) y[k] = t * x[k];
    kernel_omega(K, y.data(), tmp.data());
    double hom = 0.0;
    for (int c = 0; c < K.ncomp; ++c) hom += sqr(tmp[c] - t * ox[c]);
    v.homogeneity_residual =
        std::max(v.homogeneity_residual, std::sqrt(hom) / std::max(1e-300, t * nx));

    // Hoelder pair on the sphere.
    rng.unit_vector(K.d, y.data());
    kernel_omega(K, y.data(), oy.data());
    double diff = 0.0;
    for (int c = 0; c < K.ncomp; ++c) diff += sqr(oy[c] - ox[c]);
    double gap = dist(x.data(), y.data(), K.d);
    if (gap > 1e-12)
      v.measured_holder = std::max(v.measured_holder, std::sqrt(diff) / std::pow(gap, K.alpha));
  }
  v.homogeneous = v.homogeneity_residual <= 1e-7;
  v.odd = v.oddness_residual <= 1e-9 * std::max(1.0, v.measured_sup);
  v.sup_ok = v.measured_sup <= K.omega_sup * (1.0 + tol);
  v.holder_ok = v.measured_holder <= K.holder_scale * (1.0 + tol);
  return v;
}

CZKernel make_custom_kernel(int d, int ncomp, double s, double alpha,
                            std::function<void(const double*, double*)> omega,
                            NormalizationPolicy policy, std::uint64_t seed) {
  require(d >= 1, "custom kernel: d >= 1");
  require(ncomp >= 1, "custom kernel: ncomp >= 1");
  require(s > 0.0 && s < static_cast<double>(d), "custom kernel: 0 < s < d");
  require(alpha > 0.0 && alpha <= 1.0, "custom kernel: alpha in (0, 1]");
  CZKernel K;
  K.kind = KernelKind::Custom;
  K.d = d;
  K.ncomp = ncomp;
  K.s = s;
  K.alpha = alpha;
  K.omega_sup = 1.0;
  K.holder_scale = 1.0;
  K.custom_omega = std::move(omega);
  K.name = "custom";

  KernelValidation v = validate_kernel(K, 4000, seed);
  if (!v.homogeneous || !v.odd) {
    throw std::invalid_argument(
        "custom kernel: Omega must be odd and homogeneous of degree 1 "
        "(homogeneity residual " +
        std::to_string(v.homogeneity_residual) + ", oddness residual " +
        std::to_string(v.oddness_residual) + ")");
  }
  if (policy == NormalizationPolicy::Reject) {
    if (!v.sup_ok || !v.holder_ok) {
      throw std::invalid_argument("custom kernel: measured sup " + std::to_string(v.measured_sup) +
                                  " or Hoelder scale " + std::to_string(v.measured_holder) +
                                  " exceeds the declared unit bounds");
    }
    return K;
  }
  // Renormalize: divide Omega by its measured sup, pad slightly so later
  // validation sampling cannot land above the declared bounds.
  require(v.measured_sup > 0.0, "custom kernel: Omega vanishes on the sphere");
  double scale = 1.0 / v.measured_sup;
  auto inner = K.custom_omega;
  K.custom_omega = [inner, scale, ncomp](const double* x, double* out) {
    inner(x, out);
    for (int c = 0; c < ncomp; ++c) out[c] *= scale;
  };
  // Small pad so a fresh validation sample cannot land above the bound.
  K.omega_sup = 1.0 + 1e-6;
  K.holder_scale = v.measured_holder * scale * (1.0 + 1e-6);
  K.name = "custom-renormalized";
  return K;
}

CZKernel kernel_from_spec(const std::string& json_text) {
  json j = json::parse(json_text);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "riesz") return make_riesz_kernel(j.at("d").get<int>(), j.at("s").get<double>());
  if (kind == "cauchy") return make_cauchy_kernel();
  if (kind == "conj-cauchy") return make_conj_cauchy_kernel();
  throw std::invalid_argument("kernel spec: unknown kind '" + kind + "'");
}

}  // namespace czlab
