#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace czlab {

// Thrown when an iterative solver fails to reach its tolerance.  Carries the
// last iterate so callers can inspect how close the run got.
struct ConvergenceError : std::runtime_error {
  double last_value;
  long iterations;
  ConvergenceError(const std::string& msg, double last, long iters)
      : std::runtime_error(msg), last_value(last), iterations(iters) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Smallest truncation radius considered meaningful relative to the atom
// spacing.  Evaluations below this scale see individual atoms, not the
// measure they discretize.
inline constexpr double kQuadDeltaFactor = 10.0;

inline double sqr(double x) { return x * x; }

inline double dist2(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += sqr(a[k] - b[k]);
  return s;
}

inline double dist(const double* a, const double* b, int d) {
  return std::sqrt(dist2(a, b, d));
}

inline double norm2sq(const double* a, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += a[k] * a[k];
  return s;
}

inline double norm2(const double* a, int d) { return std::sqrt(norm2sq(a, d)); }

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

// Surface measure of the unit sphere S^{d-1}.
inline double unit_sphere_area(int d) { return d * unit_ball_volume(d); }

// Deterministic RNG.  The standard distributions are implementation-defined,
// so reports would not be reproducible across toolchains with them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  // log-uniform over [a,b], a,b > 0.
  double log_uniform(double a, double b) {
    return a * std::exp(next_double() * std::log(b / a));
  }

  // Marsaglia polar method, one fresh pair per call.
  double normal() {
    for (;;) {
      double u = 2.0 * next_double() - 1.0;
      double v = 2.0 * next_double() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  // Uniform integer in [0, n).
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(next_double() * static_cast<double>(n)) % n;
  }

  // Uniform point on S^{d-1}.
  void unit_vector(int d, double* out) {
    for (;;) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        out[k] = normal();
        s += out[k] * out[k];
      }
      if (s > 1e-24) {
        double inv = 1.0 / std::sqrt(s);
        for (int k = 0; k < d; ++k) out[k] *= inv;
        return;
      }
    }
  }

 private:
  std::uint64_t state_;
};

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "fit_slope: need >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += sqr(x[i] - mx);
  }
  require(den > 0.0, "fit_slope: degenerate abscissae");
  return num / den;
}

inline double median_of(std::vector<double> v) {
  require(!v.empty(), "median_of: empty");
  std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace czlab
