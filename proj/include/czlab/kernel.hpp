#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "czlab/common.hpp"

namespace czlab {

// Kernel K(x) = Omega(x) / |x|^{s+1} with Omega homogeneous of degree 1, odd,
// and Hoelder on the sphere.  Values are d'-tuples of real components; complex
// kernels expose their real and imaginary parts as two components.  The
// truncated form replaces |x| by max(delta, |x|) in the denominator.
//
// omega_sup and holder_scale are declared bounds for |Omega| and its Hoelder
// seminorm on the sphere.  validate() measures both; eval never rescales.
enum class KernelKind { RieszS, Cauchy, ConjCauchy, Custom };

enum class NormalizationPolicy { Reject, Renormalize };

struct CZKernel {
  KernelKind kind = KernelKind::RieszS;
  int d = 2;       // ambient dimension
  int ncomp = 2;   // real components of the value
  double s = 1.0;  // kernel dimension, 0 < s < d
  double alpha = 1.0;
  double omega_sup = 1.0;
  double holder_scale = 1.0;
  std::string name;
  // Custom only: Omega evaluated at arbitrary x (degree-1 homogeneous).
  std::function<void(const double* x, double* out)> custom_omega;
};

// Vector Riesz kernel x / |x|^{s+1} (d components).
CZKernel make_riesz_kernel(int d, double s);
// 1/z on R^2 = C, components (Re, Im); s = 1.
CZKernel make_cauchy_kernel();
// conj(z)/z^2 on R^2, components (Re, Im); s = 1, Hoelder scale 3.
CZKernel make_conj_cauchy_kernel();
// User-supplied Omega.  Under Reject the declared bounds must hold (validated
// by sampling, throws otherwise); under Renormalize, Omega is divided by its
// measured sup and the bounds are re-derived from measurements.
CZKernel make_custom_kernel(int d, int ncomp, double s, double alpha,
                            std::function<void(const double*, double*)> omega,
                            NormalizationPolicy policy, std::uint64_t seed = 12345);

// Omega(x) into out[ncomp].
void kernel_omega(const CZKernel& K, const double* x, double* out);

// K_delta(x) = Omega(x) / max(delta, |x|)^{s+1} into out[ncomp].  delta = 0
// gives the raw kernel; x = 0 yields 0 (odd kernels vanish at the origin in
// the principal value convention) for delta > 0 and throws for delta = 0.
void kernel_eval(const CZKernel& K, const double* x, double delta, double* out);

// sup over |u| >= m of |K_delta(u)|: omega_sup / max(delta, m)^s.
double kernel_magnitude_bound(const CZKernel& K, double m, double delta);

struct KernelValidation {
  double homogeneity_residual = 0.0;  // max rel deviation of Omega(t x) from t Omega(x)
  double oddness_residual = 0.0;      // max |Omega(-x) + Omega(x)| on the sphere
  double measured_sup = 0.0;          // max |Omega| over sphere samples
  double measured_holder = 0.0;       // max |Omega(x)-Omega(y)| / |x-y|^alpha
  bool homogeneous = false;
  bool odd = false;
  bool sup_ok = false;     // measured_sup <= omega_sup * (1 + tol)
  bool holder_ok = false;  // measured_holder <= holder_scale * (1 + tol)
  bool all_ok() const { return homogeneous && odd && sup_ok && holder_ok; }
};

// Samples n sphere points / pairs with the given seed.  Reports failures
// rather than throwing.
KernelValidation validate_kernel(const CZKernel& K, int n, std::uint64_t seed = 2024,
                                 double tol = 1e-9);

// Inline hot path shared by the dense sweeps.
inline void kernel_eval_inline(const CZKernel& K, const double* u, double delta, double* out) {
  double r2 = 0.0;
  for (int k = 0; k < K.d; ++k) r2 += u[k] * u[k];
  if (r2 == 0.0) {
    for (int c = 0; c < K.ncomp; ++c) out[c] = 0.0;
    return;
  }
  double r = std::sqrt(r2);
  double m = r > delta ? r : delta;
  double denom = (K.s == 1.0) ? m * m : std::pow(m, K.s + 1.0);
  switch (K.kind) {
    case KernelKind::RieszS: {
      double inv = 1.0 / denom;
      for (int k = 0; k < K.d; ++k) out[k] = u[k] * inv;
      return;
    }
    case KernelKind::Cauchy: {
      double inv = 1.0 / denom;
      out[0] = u[0] * inv;
      out[1] = -u[1] * inv;
      return;
    }
    case KernelKind::ConjCauchy: {
      double a = u[0], b = u[1];
      double inv = 1.0 / (r2 * denom);
      out[0] = (a * a * a - 3.0 * a * b * b) * inv;
      out[1] = (b * b * b - 3.0 * a * a * b) * inv;
      return;
    }
    case KernelKind::Custom: {
      K.custom_omega(u, out);
      double inv = 1.0 / denom;
      for (int c = 0; c < K.ncomp; ++c) out[c] *= inv;
      return;
    }
  }
}

CZKernel kernel_from_spec(const std::string& json_text);

}  // namespace czlab
