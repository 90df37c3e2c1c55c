#include "czlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "czlab/common.hpp"
#include "czlab/parallel.hpp"

namespace czlab {

namespace {

void check_separation(const PointMeasure& mu, double delta, const std::vector<double>& targets) {
  double floor = kQuadDeltaFactor * mu.mesh_scale();
  if (delta >= floor) return;
  std::size_t nt = targets.size() / mu.dim();
  for (std::size_t t = 0; t < nt; ++t) {
    double dmin = mu.index().nearest_distance(&targets[t * mu.dim()]);
    if (dmin == 0.0) continue;  // principal value at an atom
    require(dmin >= floor,
            "apply_truncated: target within 10 * mesh_scale of the support at delta below "
            "that scale; the evaluation would resolve single atoms");
  }
}

std::vector<double> dense_apply_inline(const CZKernel& K, const PointMeasure& mu, double delta,
                                       const std::vector<double>& f,
                                       const std::vector<double>& targets) {
  int d = K.d, nc = K.ncomp;
  std::size_t n = mu.size();
  std::size_t nt = targets.size() / d;
  std::vector<double> out(nt * nc, 0.0);
  const double* atoms = mu.atoms_flat().data();
  const double* w = mu.weights().data();
  parallel_for(nt, [&](std::size_t b, std::size_t e) {
    double kv[8];
    double diff[3];
    for (std::size_t t = b; t < e; ++t) {
      const double* x = &targets[t * d];
      double* o = &out[t * nc];
      for (std::size_t j = 0; j < n; ++j) {
        double fw = f[j] * w[j];
        if (fw == 0.0) continue;
        const double* y = atoms + j * d;
        for (int a = 0; a < d; ++a) diff[a] = x[a] - y[a];
        kernel_eval_inline(K, diff, delta, kv);
        for (int c = 0; c < nc; ++c) o[c] += kv[c] * fw;
      }
    }
  });
  return out;
}

}  // namespace

std::vector<double> apply_truncated(const CZKernel& K, const PointMeasure& mu, double delta,
                                    const std::vector<double>& f,
                                    const std::vector<double>& targets,
                                    const ApplyParams& params) {
  require(K.d == mu.dim(), "apply_truncated: kernel/measure dimension mismatch");
  require(f.size() == mu.size(), "apply_truncated: f size mismatch");
  require(delta >= 0.0, "apply_truncated: delta >= 0");
  require(targets.size() % static_cast<std::size_t>(K.d) == 0, "apply_truncated: targets size");
  require(K.ncomp <= 8, "apply_truncated: ncomp <= 8");
  if (params.strict_separation) check_separation(mu, delta, targets);

  std::size_t nt = targets.size() / K.d;
  bool clustered;
  switch (params.method) {
    case ApplyMethod::Dense:
      clustered = false;
      break;
    case ApplyMethod::Clustered:
      clustered = true;
      break;
    case ApplyMethod::Auto:
    default:
      clustered = mu.size() * nt > std::size_t{4000000} && mu.size() > 2000;
      break;
  }
  if (!clustered) return dense_apply_inline(K, mu, delta, f, targets);
  return treecode_apply(tree_kernel(K, delta), mu.index(), f, targets, params.tree);
}

std::vector<double> apply_one(const CZKernel& K, const PointMeasure& mu, double delta,
                              const std::vector<double>& targets, const ApplyParams& params) {
  return apply_truncated(K, mu, delta, std::vector<double>(mu.size(), 1.0), targets, params);
}

OperatorNormResult operator_norm(const CZKernel& K, const PointMeasure& mu, double delta,
                                 double tol, int max_iter, std::uint64_t seed) {
  require(K.d == mu.dim(), "operator_norm: dimension mismatch");
  require(delta > 0.0, "operator_norm: delta > 0 (the raw matrix is unbounded)");
  std::size_t n = mu.size();
  if (n == 0) return {0.0, 0, 0, true};
  int d = K.d, nc = K.ncomp;
  std::size_t rows = n * static_cast<std::size_t>(nc);

  std::vector<double> sw(n);
  for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(mu.weight(i));

  // Materialize B when it fits; the matvec cost dominates the iteration count.
  bool materialize = rows * n <= std::size_t{30000000};
  std::vector<double> B;
  if (materialize) {
    B.assign(rows * n, 0.0);
    const double* atoms = mu.atoms_flat().data();
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      double kv[8];
      double diff[3];
      for (std::size_t i = b; i < e; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          for (int a = 0; a < d; ++a) diff[a] = atoms[i * d + a] - atoms[j * d + a];
          kernel_eval_inline(K, diff, delta, kv);
          double sws = sw[i] * sw[j];
          for (int c = 0; c < nc; ++c) B[(i * nc + c) * n + j] = kv[c] * sws;
        }
      }
    });
  }

  auto matvec = [&](const std::vector<double>& v, std::vector<double>& Bv) {
    Bv.assign(rows, 0.0);
    if (materialize) {
      parallel_for(rows, [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
          const double* row = &B[r * n];
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
          Bv[r] = acc;
        }
      });
    } else {
      const double* atoms = mu.atoms_flat().data();
      parallel_for(n, [&](std::size_t b, std::size_t e) {
        double kv[8];
        double diff[3];
        for (std::size_t i = b; i < e; ++i) {
          double* o = &Bv[i * nc];
          for (std::size_t j = 0; j < n; ++j) {
            if (v[j] == 0.0) continue;
            for (int a = 0; a < d; ++a) diff[a] = atoms[i * d + a] - atoms[j * d + a];
            kernel_eval_inline(K, diff, delta, kv);
            double t = v[j] * sw[i] * sw[j];
            for (int c = 0; c < nc; ++c) o[c] += kv[c] * t;
          }
        }
      });
    }
  };

  auto matvec_t = [&](const std::vector<double>& u, std::vector<double>& Btu) {
    Btu.assign(n, 0.0);
    if (materialize) {
      parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
          double acc = 0.0;
          for (std::size_t r = 0; r < rows; ++r) acc += B[r * n + j] * u[r];
          Btu[j] = acc;
        }
      });
    } else {
      const double* atoms = mu.atoms_flat().data();
      parallel_for(n, [&](std::size_t b, std::size_t e) {
        double kv[8];
        double diff[3];
        for (std::size_t j = b; j < e; ++j) {
          double acc = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            for (int a = 0; a < d; ++a) diff[a] = atoms[i * d + a] - atoms[j * d + a];
            kernel_eval_inline(K, diff, delta, kv);
            double t = sw[i] * sw[j];
            for (int c = 0; c < nc; ++c) acc += kv[c] * t * u[i * nc + c];
          }
          Btu[j] = acc;
        }
      });
    }
  };

  OperatorNormResult best;
  double last_sigma = 0.0;
  long total_iters = 0;
  const int n_restarts = 3;
  for (int r = 0; r < n_restarts; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r) * 1000003ULL);
    std::vector<double> v(n), Bv, BtBv;
    for (auto& x : v) x = rng.normal();
    double nv = norm2(v.data(), static_cast<int>(n));
    for (auto& x : v) x /= nv;
    double sigma = 0.0, prev = -1.0;
    bool conv = false;
    int it = 0;
    for (; it < max_iter; ++it) {
      matvec(v, Bv);
      matvec_t(Bv, BtBv);
      double lambda = 0.0;
      for (std::size_t j = 0; j < n; ++j) lambda += v[j] * BtBv[j];
      sigma = std::sqrt(std::max(lambda, 0.0));
      double nb = norm2(BtBv.data(), static_cast<int>(n));
      if (nb == 0.0) {
        sigma = 0.0;
        conv = true;
        break;
      }
      for (std::size_t j = 0; j < n; ++j) v[j] = BtBv[j] / nb;
      if (prev >= 0.0 && std::abs(sigma - prev) <= tol * std::max(sigma, 1e-300)) {
        conv = true;
        ++it;
        break;
      }
      prev = sigma;
    }
    total_iters += it;
    last_sigma = std::max(last_sigma, sigma);
    if (conv && sigma >= best.value) {
      best.value = sigma;
      best.iterations = it;
      best.restarts = r + 1;
      best.converged = true;
    }
  }
  if (!best.converged)
    throw ConvergenceError("operator_norm: power iteration did not converge", last_sigma,
                           total_iters);
  return best;
}

TailBoundResult tail_integral(const PointMeasure& mu, const double* x, double r, double s,
                              double eps, double lambda_growth) {
  require(r > 0.0, "tail_integral: r > 0");
  require(eps > 0.0, "tail_integral: eps > 0");
  require(s > 0.0, "tail_integral: s > 0");
  require(lambda_growth > 0.0, "tail_integral: growth constant > 0");
  TailBoundResult out;
  int d = mu.dim();
  for (std::size_t j = 0; j < mu.size(); ++j) {
    double t = dist(x, mu.atom(j), d);
    if (t > r) out.value += mu.weight(j) * std::pow(t, -s - eps);
  }
  out.bound = lambda_growth * (s + eps) / eps * std::pow(r, -eps);
  out.violated = out.value > out.bound * (1.0 + 1e-12);
  return out;
}

LocalL1Result local_l1_integral(const PointMeasure& mu, const double* x, double r, double R,
                                double s, int lattice_per_axis) {
  int d = mu.dim();
  require(r > 0.0 && R > 0.0, "local_l1_integral: r, R > 0");
  require(s > 0.0 && s < static_cast<double>(d), "local_l1_integral: 0 < s < d");
  require(lattice_per_axis >= 8, "local_l1_integral: lattice too coarse");
  double side = 2.0 * r / lattice_per_axis;
  double cell_vol = std::pow(side, d);
  // Equivalent-ball radius of a cell; the average of |.|^{-s} over that ball
  // is d / (d - s) * rho^{-s}.
  double rho_eq = side * std::pow(unit_ball_volume(d), -1.0 / d);
  double near_value = static_cast<double>(d) / (d - s) * std::pow(rho_eq, -s);

  std::size_t nl = 1;
  for (int k = 0; k < d; ++k) nl *= lattice_per_axis;
  double total = 0.0;
  std::vector<double> p(d);
  for (std::size_t t = 0; t < nl; ++t) {
    std::size_t rem = t;
    for (int k = 0; k < d; ++k) {
      int i = static_cast<int>(rem % lattice_per_axis);
      rem /= lattice_per_axis;
      p[k] = x[k] - r + (i + 0.5) * side;
    }
    if (dist(p.data(), x, d) > r) continue;
    double inner = 0.0;
    for (std::size_t j : mu.index().ball_points(p.data(), R)) {
      double t2 = dist(p.data(), mu.atom(j), d);
      inner += mu.weight(j) * (t2 < rho_eq ? near_value : std::pow(t2, -s));
    }
    total += inner * cell_vol;
  }
  LocalL1Result out;
  out.value = total;
  double mass = ball_mass(mu, x, r + R);
  out.ratio = mass > 0.0 ? total / (std::pow(r, d - s) * mass) : 0.0;
  return out;
}

AntisymResult antisym_residual(const CZKernel& K, const PointMeasure& mu,
                               const std::vector<double>& center, double radius, double delta) {
  require(K.d == mu.dim(), "antisym_residual: dimension mismatch");
  std::vector<std::size_t> sel = mu.index().ball_points(center.data(), radius);
  int d = K.d, nc = K.ncomp;
  std::vector<double> acc(nc, 0.0), aacc(nc, 0.0);
  double kv[8];
  double diff[3];
  for (std::size_t a = 0; a < sel.size(); ++a) {
    const double* yi = mu.atom(sel[a]);
    double wi = mu.weight(sel[a]);
    for (std::size_t b = 0; b < sel.size(); ++b) {
      if (a == b) continue;
      const double* yj = mu.atom(sel[b]);
      if (delta == 0.0 && dist2(yi, yj, d) == 0.0) continue;
      for (int k = 0; k < d; ++k) diff[k] = yi[k] - yj[k];
      kernel_eval_inline(K, diff, delta, kv);
      double ww = wi * mu.weight(sel[b]);
      for (int c = 0; c < nc; ++c) {
        acc[c] += kv[c] * ww;
        aacc[c] += std::abs(kv[c] * ww);
      }
    }
  }
  AntisymResult out;
  for (int c = 0; c < nc; ++c) {
    out.residual = std::max(out.residual, std::abs(acc[c]));
    out.abs_sum = std::max(out.abs_sum, aacc[c]);
  }
  return out;
}

BilinearResult bilinear_form(const CZKernel& K, const PointMeasure& mu,
                             const std::vector<double>& f, const std::vector<double>& g,
                             double delta) {
  require(K.d == mu.dim(), "bilinear_form: dimension mismatch");
  require(f.size() == mu.size() && g.size() == mu.size(), "bilinear_form: f/g size");
  std::size_t n = mu.size();
  int d = K.d, nc = K.ncomp;
  BilinearResult out;
  out.direct.assign(nc, 0.0);
  out.antisym.assign(nc, 0.0);
  double kv[8];
  double diff[3];
  // Direct form: literal ordered double sum (row-major).
  for (std::size_t i = 0; i < n; ++i) {
    const double* yi = mu.atom(i);
    double gw = g[i] * mu.weight(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (delta == 0.0 && dist2(yi, mu.atom(j), d) == 0.0) continue;
      for (int k = 0; k < d; ++k) diff[k] = yi[k] - mu.atom(j)[k];
      kernel_eval_inline(K, diff, delta, kv);
      double t = gw * f[j] * mu.weight(j);
      for (int c = 0; c < nc; ++c) out.direct[c] += kv[c] * t;
    }
  }
  // Pair form over unordered pairs.
  for (std::size_t i = 0; i < n; ++i) {
    const double* yi = mu.atom(i);
    double wi = mu.weight(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (delta == 0.0 && dist2(yi, mu.atom(j), d) == 0.0) continue;
      for (int k = 0; k < d; ++k) diff[k] = yi[k] - mu.atom(j)[k];
      kernel_eval_inline(K, diff, delta, kv);
      double hw = (f[j] * g[i] - f[i] * g[j]) * wi * mu.weight(j);
      for (int c = 0; c < nc; ++c) out.antisym[c] += kv[c] * hw;
    }
  }
  return out;
}

double c2_profile(const CZKernel& K, const PointMeasure& mu, double delta,
                  std::size_t max_targets) {
  require(delta > 0.0, "c2_profile: delta > 0");
  require(K.ncomp <= 8, "c2_profile: ncomp <= 8");
  std::size_t n = mu.size();
  if (n == 0) return 0.0;
  std::size_t stride = std::max<std::size_t>(1, n / max_targets);
  int d = mu.dim(), nc = K.ncomp;
  double worst = 0.0;
  double kv[8];
  double diff[3];
  std::vector<double> G(static_cast<std::size_t>(nc) * nc);
  std::vector<double> v(nc), Gv(nc);
  for (std::size_t i = 0; i < n; i += stride) {
    // Gram of the ncomp x n matrix M[c,j] = sqrt(w_j) K_delta^c(y_i - y_j);
    // the sup over unit f of |T(f mu)| is its top singular value.
    std::fill(G.begin(), G.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (int k = 0; k < d; ++k) diff[k] = mu.atom(i)[k] - mu.atom(j)[k];
      kernel_eval_inline(K, diff, delta, kv);
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) G[a * nc + b] += mu.weight(j) * kv[a] * kv[b];
    }
    double lam = 0.0;
    std::fill(v.begin(), v.end(), 1.0 / std::sqrt(static_cast<double>(nc)));
    for (int it = 0; it < 50; ++it) {
      for (int a = 0; a < nc; ++a) {
        Gv[a] = 0.0;
        for (int b = 0; b < nc; ++b) Gv[a] += G[a * nc + b] * v[b];
      }
      lam = norm2(Gv.data(), nc);
      if (lam == 0.0) break;
      for (int a = 0; a < nc; ++a) v[a] = Gv[a] / lam;
    }
    worst = std::max(worst, lam);
  }
  return std::pow(delta, 0.5 * K.s) * std::sqrt(worst);
}

}  // namespace czlab
