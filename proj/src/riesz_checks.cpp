#include "czlab/riesz_checks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "czlab/common.hpp"
#include "czlab/parallel.hpp"
#include "czlab/treecode.hpp"

namespace czlab {

BatchFieldEval field_from_measure(const CZKernel& K, const PointMeasure& mu, double delta,
                                  const ApplyParams& params) {
  return [&K, &mu, delta, params](const std::vector<double>& targets) {
    return apply_one(K, mu, delta, targets, params);
  };
}

double RadialTable::eval(double r) const {
  if (r <= 0.0) return values.front();
  // Multipole model past the table: leading power with the second-moment
  // correction of the mollified profile.
  auto far = [&](double rr) {
    double c = 0.5 * second_moment * (vector_kernel ? (s * s - 1.0) : (s + 1.0) * (s + 1.0));
    double base = vector_kernel ? std::pow(rr, -s) : std::pow(rr, -(s + 1.0));
    return base * (1.0 + c / (rr * rr));
  };
  double rho = r / radius;
  if (rho >= rho_max) return far(r);
  int n = static_cast<int>(values.size());
  double u = rho * (n - 1) / rho_max;
  int i = std::min(static_cast<int>(u), n - 2);
  double t = u - i;
  // Ghost knots from the far model keep the end tangent consistent across
  // the table edge.
  auto v = [&](int k) {
    if (k < 0) return values.front();
    if (k >= n) return far(radius * k * rho_max / (n - 1));
    return values[k];
  };
  double p0 = v(i - 1), p1 = v(i), p2 = v(i + 1), p3 = v(i + 2);
  return 0.5 * (2.0 * p1 + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
}

double RadialTable::bound(double m) const {
  if (m <= 0.0) return envelope.front();
  double rho = m / radius;
  int n = static_cast<int>(envelope.size());
  if (rho >= rho_max) return std::abs(eval(m));
  int i = std::min(static_cast<int>(rho * (n - 1) / rho_max), n - 1);
  return envelope[i];
}

namespace {

void finish_table(RadialTable& tab) {
  int n = static_cast<int>(tab.values.size());
  tab.envelope.resize(n);
  double far_edge = std::abs(tab.eval(tab.rho_max * tab.radius * (1.0 + 1e-12)));
  double run = far_edge;
  for (int i = n - 1; i >= 0; --i) {
    run = std::max(run, std::abs(tab.values[i]));
    tab.envelope[i] = run;
  }
}

// Composite Simpson weights over an odd node count.
double simpson_weight(int i, int n) {
  if (i == 0 || i == n - 1) return 1.0 / 3.0;
  return (i % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
}

}  // namespace

RadialTable radial_profile_quadrature_2d(double s, double mollifier_radius, bool vector_kernel,
                                         int table_n, double rho_max, int nodes_r,
                                         int nodes_theta) {
  require(s > 0.0 && s <= 1.0, "radial profile: s in (0, 1]");
  require(!(s == 1.0 && !vector_kernel), "radial profile: scalar kernel diverges at s = 1");
  require(table_n >= 16 && nodes_r >= 33 && nodes_theta >= 16, "radial profile: nodes");
  if (nodes_r % 2 == 0) ++nodes_r;
  Mollifier psi = make_mollifier_2d(mollifier_radius);

  RadialTable tab;
  tab.radius = mollifier_radius;
  tab.s = s;
  tab.rho_max = rho_max;
  tab.vector_kernel = vector_kernel;
  tab.second_moment = psi.second_moment();
  tab.values.resize(table_n);

  double R = mollifier_radius;
  for (int e = 0; e < table_n; ++e) {
    double P = (e * rho_max / (table_n - 1)) * R;
    double acc = 0.0;
    if (P >= 1.5 * R) {
      // Singularity outside the support: tensor polar around the origin.
      double hr = R / (nodes_r - 1);
      for (int it = 0; it < nodes_theta; ++it) {
        double phi = 2.0 * M_PI * it / nodes_theta;
        double cphi = std::cos(phi), sphi = std::sin(phi);
        double inner = 0.0;
        for (int ir = 0; ir < nodes_r; ++ir) {
          double rp = ir * hr;
          double vx = P - rp * cphi, vy = -rp * sphi;
          double vr2 = vx * vx + vy * vy;
          double pw = std::pow(vr2, -0.5 * (s + 1.0));
          double kcomp = vector_kernel ? vx * pw : pw;
          inner += simpson_weight(ir, nodes_r) * kcomp * psi.eval(rp) * rp;
        }
        acc += inner * hr;
      }
      acc *= 2.0 * M_PI / nodes_theta;
    } else {
      // Singularity inside: polar around the evaluation point, radial power
      // substitution r = t^p flattening the pole.
      double p = vector_kernel ? 2.0 / (2.0 - s) : 2.0 / (1.0 - s);
      double r_top = P + R;
      double t_top = std::pow(r_top, 1.0 / p);
      double ht = t_top / (nodes_r - 1);
      for (int it = 0; it < nodes_theta; ++it) {
        double th = 2.0 * M_PI * it / nodes_theta;
        double cth = std::cos(th), sth = std::sin(th);
        double inner = 0.0;
        for (int ir = 1; ir < nodes_r; ++ir) {
          double t = ir * ht;
          double r = std::pow(t, p);
          double ux = P + r * cth, uy = r * sth;
          double pv = psi.eval(std::sqrt(ux * ux + uy * uy));
          if (pv == 0.0) continue;
          // vector: -cos(th) r^{1-s} dr = -cos(th) p t^{p(2-s)-1} dt, exponent 1
          // scalar: r^{-s} dr = p t^{q(1-s)-1} dt, exponent 1 as well
          double core = vector_kernel ? -cth : 1.0;
          inner += simpson_weight(ir, nodes_r) * core * p * t * pv;
        }
        acc += inner * ht;
      }
      acc *= 2.0 * M_PI / nodes_theta;
    }
    tab.values[e] = acc;
  }
  if (vector_kernel) tab.values[0] = 0.0;
  finish_table(tab);
  return tab;
}

RadialTable mollified_riesz_profile_closed_2d(double mollifier_radius, int table_n) {
  require(table_n >= 16, "closed profile: table size");
  Mollifier psi = make_mollifier_2d(mollifier_radius);
  RadialTable tab;
  tab.radius = mollifier_radius;
  tab.s = 1.0;
  tab.rho_max = 8.0;
  tab.vector_kernel = true;
  tab.second_moment = psi.second_moment();
  tab.values.resize(table_n);
  tab.values[0] = 0.0;
  for (int e = 1; e < table_n; ++e) {
    double r = (e * tab.rho_max / (table_n - 1)) * mollifier_radius;
    tab.values[e] = psi.cumulative(r) / r;
  }
  finish_table(tab);
  return tab;
}

RadialTable mollified_riesz_profile_2d(double s, double mollifier_radius) {
  if (s == 1.0) return mollified_riesz_profile_closed_2d(mollifier_radius);
  return radial_profile_quadrature_2d(s, mollifier_radius, true);
}

RadialTable mollified_power_profile_2d(double s, double mollifier_radius) {
  return radial_profile_quadrature_2d(s, mollifier_radius, false);
}

GridField grid_divergence(const GridField& field) {
  require(field.dim() == 2 && field.ncomp == 2, "grid_divergence: plane vector field");
  int nx = field.dims[0], ny = field.dims[1];
  GridField out = make_grid(field.origin, field.spacing, field.dims, 1);
  double inv2h = 1.0 / (2.0 * field.spacing);
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 1; i < nx - 1; ++i) {
      std::size_t n = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j;
      std::size_t xp = n + 1, xm = n - 1;
      std::size_t yp = n + nx, ym = n - nx;
      out.values[n] = (field.values[xp * 2 + 0] - field.values[xm * 2 + 0] +
                       field.values[yp * 2 + 1] - field.values[ym * 2 + 1]) *
                      inv2h;
    }
  return out;
}

double divergence_theorem_residual(const GridField& field) {
  require(field.dim() == 2 && field.ncomp == 2, "divergence_theorem_residual: plane field");
  int nx = field.dims[0], ny = field.dims[1];
  require(nx >= 4 && ny >= 4, "divergence_theorem_residual: grid too small");
  GridField div = grid_divergence(field);
  double h = field.spacing;
  double box = 0.0;
  for (int j = 1; j < ny - 1; ++j)
    for (int i = 1; i < nx - 1; ++i)
      box += div.values[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j] * h * h;
  auto Fx = [&](int i, int j) {
    return field.values[(static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j) * 2];
  };
  auto Fy = [&](int i, int j) {
    return field
        .values[(static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j) * 2 + 1];
  };
  // Central differences telescope to a two-layer boundary flux.
  double flux = 0.0;
  for (int j = 1; j < ny - 1; ++j)
    flux += (Fx(nx - 1, j) + Fx(nx - 2, j) - Fx(0, j) - Fx(1, j)) * 0.5 * h;
  for (int i = 1; i < nx - 1; ++i)
    flux += (Fy(i, ny - 1) + Fy(i, ny - 2) - Fy(i, 0) - Fy(i, 1)) * 0.5 * h;
  double scale = std::abs(box) + std::abs(flux);
  if (scale == 0.0) return 0.0;
  return std::abs(box - flux) / scale;
}

namespace {

TreeKernel radial_tree_kernel(const RadialTable& tab) {
  TreeKernel tk;
  tk.d = 2;
  tk.ncomp = tab.vector_kernel ? 2 : 1;
  tk.seam = -1.0;
  tk.eval = [&tab](const double* diff, double* out) {
    double r = std::sqrt(diff[0] * diff[0] + diff[1] * diff[1]);
    if (tab.vector_kernel) {
      if (r == 0.0) {
        out[0] = out[1] = 0.0;
        return;
      }
      double amp = tab.eval(r) / r;
      out[0] = amp * diff[0];
      out[1] = amp * diff[1];
    } else {
      out[0] = tab.eval(r);
    }
  };
  tk.magnitude = [&tab](double m) { return tab.bound(m); };
  return tk;
}

TreeKernel mollifier_tree_kernel(const Mollifier& psi) {
  TreeKernel tk;
  tk.d = 2;
  tk.ncomp = 1;
  tk.seam = -1.0;
  tk.eval = [psi](const double* diff, double* out) {
    out[0] = psi.eval(std::sqrt(diff[0] * diff[0] + diff[1] * diff[1]));
  };
  tk.magnitude = [psi](double m) { return m >= psi.radius ? 0.0 : psi.eval(m); };
  return tk;
}

}  // namespace

DivergenceResult divergence_identity(const PointMeasure& mu, double s,
                                     const std::vector<double>& center, double half_width,
                                     int grid_n, double mollifier_radius,
                                     const std::vector<double>* f) {
  require(mu.dim() == 2, "divergence_identity: plane measures only");
  require(s > 0.0 && s <= 1.0, "divergence_identity: s <= d - 1 = 1");
  require(grid_n >= 8, "divergence_identity: grid too small");
  GridField proto = make_centered_grid(center, half_width, grid_n, 2);
  require(mollifier_radius >= 4.0 * proto.spacing,
          "divergence_identity: grid must resolve the mollifier (>= 8 cells)");
  std::vector<double> ones;
  if (!f) {
    ones.assign(mu.size(), 1.0);
    f = &ones;
  }
  require(f->size() == mu.size(), "divergence_identity: f size");

  std::vector<double> targets(proto.size() * 2);
  for (std::size_t n = 0; n < proto.size(); ++n) proto.node_point(n, &targets[n * 2]);

  DivergenceResult out;
  out.field = proto;
  RadialTable gtab = mollified_riesz_profile_2d(s, mollifier_radius);
  TreeKernel tkv = radial_tree_kernel(gtab);
  out.field.values = treecode_apply(tkv, mu.index(), *f, targets);

  out.lhs = grid_divergence(out.field);
  out.rhs = make_grid(proto.origin, proto.spacing, proto.dims, 1);
  RadialTable htab;  // scalar profile, s < 1 branch only
  Mollifier psi = make_mollifier_2d(mollifier_radius);
  if (s == 1.0) {
    TreeKernel tkm = mollifier_tree_kernel(psi);
    out.rhs.values = treecode_apply(tkm, mu.index(), *f, targets);
    out.b = 2.0 * M_PI;
    for (double& v : out.rhs.values) v *= out.b;
  } else {
    htab = mollified_power_profile_2d(s, mollifier_radius);
    TreeKernel tkh = radial_tree_kernel(htab);
    out.rhs.values = treecode_apply(tkh, mu.index(), *f, targets);
    double num = 0.0, den = 0.0;
    int nx = grid_n;
    for (int j = 1; j < grid_n - 1; ++j)
      for (int i = 1; i < grid_n - 1; ++i) {
        std::size_t n = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j;
        num += out.lhs.values[n] * out.rhs.values[n];
        den += out.rhs.values[n] * out.rhs.values[n];
      }
    require(den > 0.0, "divergence_identity: vanishing right-hand side");
    out.b = num / den;
    out.b_fitted = true;
    for (double& v : out.rhs.values) v *= out.b;
  }

  double err = 0.0, mass = 0.0;
  for (int j = 1; j < grid_n - 1; ++j)
    for (int i = 1; i < grid_n - 1; ++i) {
      std::size_t n = static_cast<std::size_t>(i) + static_cast<std::size_t>(grid_n) * j;
      err += std::abs(out.lhs.values[n] - out.rhs.values[n]);
      mass += std::abs(out.rhs.values[n]);
      ++out.interior_nodes;
    }
  out.rel_l1 = mass > 0.0 ? err / mass : (err > 0.0 ? std::numeric_limits<double>::infinity()
                                                    : 0.0);
  return out;
}

Rl1LowerBound rl1_lower_bound(const CZKernel& K, const PointMeasure& mu,
                              const std::vector<double>& x, double r, int grid_per_axis) {
  require(mu.dim() == 2 && K.d == 2, "rl1_lower_bound: plane only");
  require(r > 0.0, "rl1_lower_bound: r > 0");
  GridField g = make_centered_grid(x, 3.0 * r, grid_per_axis, K.ncomp);
  std::vector<double> targets;
  std::vector<std::size_t> keep;
  std::vector<double> p(2);
  for (std::size_t n = 0; n < g.size(); ++n) {
    g.node_point(n, p.data());
    if (dist(p.data(), x.data(), 2) <= 3.0 * r) {
      keep.push_back(n);
      targets.insert(targets.end(), p.begin(), p.end());
    }
  }
  std::vector<double> u = apply_one(K, mu, 0.0, targets);
  Rl1LowerBound out;
  double cell = g.spacing * g.spacing;
  for (std::size_t t = 0; t < keep.size(); ++t)
    out.integral += norm2(&u[t * K.ncomp], K.ncomp) * cell;
  out.eps = ball_mass(mu, x.data(), r) / std::pow(r, mu.nominal_s());
  double area = unit_ball_volume(2) * 9.0 * r * r;
  out.c_fitted = out.eps > 0.0 ? out.integral / (out.eps * area) : 0.0;
  return out;
}

namespace {

struct ShellRun {
  std::vector<double> value;
  double normalization = 0.0;
  std::size_t evals = 0;
};

ShellRun pv_shells(const BatchFieldEval& u, int ncomp, double s,
                   const std::vector<double>& x0, double a, double r_outer,
                   int shells_per_decade, int angular) {
  int n_shell = std::max(
      4, static_cast<int>(std::ceil(shells_per_decade * std::log10(r_outer / a))));
  double grow = std::pow(r_outer / a, 1.0 / n_shell);
  std::vector<double> nodes;
  std::vector<double> wts;
  const double golden = 0.6180339887498949;
  for (int k = 0; k < n_shell; ++k) {
    double b0 = a * std::pow(grow, k), b1 = a * std::pow(grow, k + 1);
    double rho = std::sqrt(b0 * b1), width = b1 - b0;
    double off = 2.0 * M_PI * std::fmod(k * golden, 1.0) / angular;
    for (int m = 0; m < angular; ++m) {
      double th = off + 2.0 * M_PI * m / angular;
      nodes.push_back(x0[0] + rho * std::cos(th));
      nodes.push_back(x0[1] + rho * std::sin(th));
      wts.push_back(rho * width * 2.0 * M_PI / angular);
    }
  }
  std::vector<double> probe(x0);
  probe.insert(probe.end(), nodes.begin(), nodes.end());
  std::vector<double> uv = u(probe);
  const double* u0 = uv.data();
  ShellRun run;
  run.value.assign(ncomp, 0.0);
  run.evals = wts.size() + 1;
  double expo = 2.0 * 2 + 1.0 - s;  // d = 2
  for (std::size_t i = 0; i < wts.size(); ++i) {
    double rho = dist(&nodes[i * 2], x0.data(), 2);
    double w = wts[i] * std::pow(rho, -expo);
    const double* ui = &uv[(i + 1) * ncomp];
    double gap2 = 0.0;
    for (int c = 0; c < ncomp; ++c) {
      double gcomp = u0[c] - ui[c];
      run.value[c] += w * gcomp;
      gap2 += gcomp * gcomp;
    }
    run.normalization += w * std::sqrt(gap2);
  }
  return run;
}

}  // namespace

PvResult frac_laplacian_pv(const BatchFieldEval& u, int d, int ncomp, double s,
                           const std::vector<double>& x0, double r_excl, double r_outer,
                           int shells_per_decade, int angular) {
  require(d == 2, "frac_laplacian_pv: plane only");
  require(s > 1.0 && s < 2.0, "frac_laplacian_pv: s in (d-1, d)");
  require(r_excl > 0.0 && r_outer > 4.0 * r_excl, "frac_laplacian_pv: radii");
  require(angular >= 8 && angular % 2 == 0, "frac_laplacian_pv: angular nodes must pair");
  ShellRun fine = pv_shells(u, ncomp, s, x0, r_excl, r_outer, shells_per_decade, angular);
  ShellRun coarse =
      pv_shells(u, ncomp, s, x0, 2.0 * r_excl, r_outer, shells_per_decade, angular);
  PvResult out;
  out.fine = fine.value;
  out.coarse = coarse.value;
  out.evals = fine.evals + coarse.evals;
  out.normalization = fine.normalization;
  double gamma = 1.0 + s - d;
  double pw = std::pow(2.0, gamma);
  out.value.resize(ncomp);
  for (int c = 0; c < ncomp; ++c)
    out.value[c] = (pw * fine.value[c] - coarse.value[c]) / (pw - 1.0);
  out.value_norm = norm2(out.value.data(), ncomp);
  return out;
}

PhilemResult philem_check(const BatchFieldEval& u, int ncomp, const PointMeasure& mu,
                          const std::vector<double>& x, double r, double s, double half_width,
                          int grid_n, const std::vector<std::vector<double>>& gamma_candidates) {
  require(mu.dim() == 2, "philem_check: plane only");
  require(r > 0.0 && half_width > 4.0 * r, "philem_check: window must dominate r");
  int d = 2;
  GridField g = make_centered_grid(x, half_width, grid_n, ncomp);
  std::vector<double> targets(g.size() * 2);
  for (std::size_t n = 0; n < g.size(); ++n) g.node_point(n, &targets[n * 2]);
  std::vector<double> uv = u(targets);
  double cell = g.spacing * g.spacing;

  std::vector<std::vector<double>> cands = gamma_candidates;
  cands.push_back(std::vector<double>(ncomp, 0.0));
  PhilemResult out;
  out.lhs = ball_mass(mu, x.data(), r);
  out.rhs = std::numeric_limits<double>::infinity();
  for (const auto& gamma : cands) {
    require(static_cast<int>(gamma.size()) == ncomp, "philem_check: gamma size");
    double acc = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      double rho = dist(&targets[n * 2], x.data(), 2);
      double gap2 = 0.0;
      for (int c = 0; c < ncomp; ++c) gap2 += sqr(uv[n * ncomp + c] - gamma[c]);
      acc += std::sqrt(gap2) * std::pow(r + rho, s - 2.0 * d) * cell;
    }
    if (acc < out.rhs) {
      out.rhs = acc;
      out.gamma = gamma;
    }
  }
  double rd = std::pow(r, static_cast<double>(d));
  out.ratio = out.rhs * rd / std::max(out.lhs, 1e-300);
  out.c20 = out.lhs / (rd * out.rhs);

  // Tail of the weight beyond the window, with the field bounded by its rim
  // values; the closed form integrates (r + rho)^{s - 2d} rho drho.
  double rim = 0.0;
  int nx = g.dims[0], ny = g.dims[1];
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i != 0 && i != nx - 1 && j != 0 && j != ny - 1) continue;
      std::size_t n = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j;
      double val = 0.0;
      for (int c = 0; c < ncomp; ++c) val += sqr(uv[n * ncomp + c] - out.gamma[c]);
      rim = std::max(rim, std::sqrt(val));
    }
  double expo = 2.0 * d - s - 2.0;
  double tail = rim * 2.0 * M_PI * std::pow(r + half_width, -expo) / expo;
  out.tail_fraction = tail / out.rhs;
  return out;
}

FourierGResult fourier_g(int n, double half_width, double f_radius, double s,
                         int oracle_stride) {
  require(n >= 16 && (n & (n - 1)) == 0, "fourier_g: n must be a power of two");
  require(half_width > 0.0 && f_radius > 0.0, "fourier_g: sizes");
  require(f_radius <= half_width / 3.0, "fourier_g: f must sit well inside the grid");
  require(s > 0.0 && s < 2.0, "fourier_g: s in (0, 2)");
  int d = 2;
  double h = 2.0 * half_width / n;
  GridField g = make_grid({-half_width, -half_width}, h, {n, n}, 2);

  std::vector<std::complex<double>> fhat(static_cast<std::size_t>(n) * n);
  std::vector<double> fval(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double px = -half_width + i * h, py = -half_width + j * h;
      double v = bump_profile(std::sqrt(px * px + py * py) / f_radius);
      std::size_t idx = static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j;
      fval[idx] = v;
      fhat[idx] = v;
    }
  fft2(fhat.data(), n, n, -1);

  double dxi = M_PI / half_width;
  std::vector<std::complex<double>> ghat(fhat.size());
  for (int comp = 0; comp < d; ++comp) {
    for (int j = 0; j < n; ++j) {
      int jw = j <= n / 2 ? j : j - n;
      for (int i = 0; i < n; ++i) {
        int iw = i <= n / 2 ? i : i - n;
        std::size_t idx = static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j;
        if ((iw == 0 && jw == 0) || std::abs(iw) == n / 2 || std::abs(jw) == n / 2) {
          ghat[idx] = 0.0;
          continue;
        }
        double xx = iw * dxi, xy = jw * dxi;
        double xn = std::sqrt(xx * xx + xy * xy);
        double mul = (comp == 0 ? xx : xy) * std::pow(xn, d - 1.0 - s);
        ghat[idx] = std::complex<double>(0.0, mul) * fhat[idx];
      }
    }
    fft2(ghat.data(), n, n, 1);
    double scale = 1.0 / (static_cast<double>(n) * n);
    for (std::size_t idx = 0; idx < ghat.size(); ++idx)
      g.values[idx * 2 + comp] = ghat[idx].real() * scale;
  }

  FourierGResult out;
  out.g = g;
  double mean0 = 0.0, mean1 = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    mean0 += g.values[idx * 2];
    mean1 += g.values[idx * 2 + 1];
    out.g_max = std::max(out.g_max, norm2(&g.values[idx * 2], 2));
  }
  std::size_t count = g.size();
  out.mean_abs = std::max(std::abs(mean0), std::abs(mean1)) / static_cast<double>(count);

  // Direct-summation adjoint transform on a subsampled inner grid.
  if (oracle_stride <= 0) oracle_stride = std::max(1, n / 64);
  CZKernel K = make_riesz_kernel(2, s);
  int reach = static_cast<int>(std::floor(0.5 * half_width / (h * oracle_stride)));
  std::vector<std::size_t> tnodes;
  for (int kj = -reach; kj <= reach; ++kj)
    for (int ki = -reach; ki <= reach; ++ki) {
      int i = n / 2 + ki * oracle_stride, j = n / 2 + kj * oracle_stride;
      tnodes.push_back(static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * j);
    }
  out.oracle_targets = tnodes.size();
  std::vector<double> raw(tnodes.size(), 0.0);
  double cell = h * h;
  parallel_for(tnodes.size(), [&](std::size_t lo, std::size_t hi) {
    double kv[2], diffb[2];
    for (std::size_t t = lo; t < hi; ++t) {
      std::size_t tn = tnodes[t];
      double tx = -half_width + (tn % n) * h;
      double ty = -half_width + (tn / n) * h;
      double acc = 0.0;
      for (std::size_t yn = 0; yn < g.size(); ++yn) {
        if (yn == tn) continue;
        diffb[0] = tx - (-half_width + (yn % n) * h);
        diffb[1] = ty - (-half_width + (yn / n) * h);
        kernel_eval_inline(K, diffb, 0.0, kv);
        acc += kv[0] * g.values[yn * 2] + kv[1] * g.values[yn * 2 + 1];
      }
      raw[t] = acc * cell;
    }
  });
  std::size_t center = 0;
  for (std::size_t t = 0; t < tnodes.size(); ++t)
    if (tnodes[t] == static_cast<std::size_t>(n / 2) + static_cast<std::size_t>(n) * (n / 2))
      center = t;
  require(std::abs(raw[center]) > 0.0, "fourier_g: adjoint vanishes at the center");
  out.b = fval[tnodes[center]] / raw[center];
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < tnodes.size(); ++t) {
    num += sqr(out.b * raw[t] - fval[tnodes[t]]);
    den += sqr(fval[tnodes[t]]);
  }
  out.rel_l2 = std::sqrt(num / std::max(den, 1e-300));

  std::vector<double> decays;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    double px = -half_width + (idx % n) * h, py = -half_width + (idx / n) * h;
    double rho = std::sqrt(px * px + py * py);
    if (rho < 0.5 * half_width) continue;
    decays.push_back(norm2(&g.values[idx * 2], 2) * std::pow(1.0 + rho, 2.0 * d - s));
  }
  if (!decays.empty()) {
    out.decay_max = *std::max_element(decays.begin(), decays.end());
    out.decay_median = median_of(decays);
  }
  return out;
}

TruncationTable truncation_convergence(const CZKernel& K, const PointMeasure& mu, double A,
                                       const std::vector<double>& n_values,
                                       int targets_per_axis) {
  require(!n_values.empty() && A > 0.0, "truncation_convergence: inputs");
  for (double nv : n_values)
    require(nv >= 4.0 * A, "truncation_convergence: window must dominate the target ball");
  int d = mu.dim();
  std::vector<double> targets;
  std::vector<double> p(d);
  std::vector<int> idx(d, 0);
  std::vector<double> origin(d, -A);
  double step = 2.0 * A / (targets_per_axis - 1);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(targets_per_axis);
  for (std::size_t nn = 0; nn < total; ++nn) {
    std::size_t rem = nn;
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      int ia = static_cast<int>(rem % targets_per_axis);
      rem /= targets_per_axis;
      p[a] = origin[a] + ia * step;
      r2 += p[a] * p[a];
    }
    if (r2 <= A * A) targets.insert(targets.end(), p.begin(), p.end());
  }
  std::size_t nt = targets.size() / d;

  TruncationTable out;
  std::vector<double> origin0(d, 0.0);
  for (double nv : n_values) {
    std::vector<double> coords, wts;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (norm2(mu.atom(j), d) > nv) {
        coords.insert(coords.end(), mu.atom(j), mu.atom(j) + d);
        wts.push_back(mu.weight(j));
      }
    }
    double sup = 0.0;
    if (!wts.empty()) {
      PointMeasure tail(d, coords, wts, mu.mesh_scale(), mu.nominal_s(),
                        mu.generator_tag() + "-tail");
      std::vector<double> uv = apply_one(K, tail, 0.0, targets);
      for (std::size_t t = 0; t < nt; ++t)
        sup = std::max(sup, norm2(&uv[t * K.ncomp], K.ncomp));
    }
    out.n_values.push_back(nv);
    out.sup_diff.push_back(sup);
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < out.n_values.size(); ++i)
    if (out.sup_diff[i] > 0.0) {
      lx.push_back(std::log(out.n_values[i]));
      ly.push_back(std::log(out.sup_diff[i]));
    }
  out.slope = lx.size() >= 2 ? fit_slope(lx, ly) : 0.0;
  return out;
}

FieldGrowth field_l1_growth(const CZKernel& K, const PointMeasure& mu,
                            const std::vector<double>& a_values, int grid_per_axis,
                            double delta) {
  require(mu.dim() == 2, "field_l1_growth: plane only");
  FieldGrowth out;
  for (double A : a_values) {
    GridField g = make_centered_grid({0.0, 0.0}, A, grid_per_axis, K.ncomp);
    std::vector<double> targets;
    std::vector<double> p(2);
    for (std::size_t nn = 0; nn < g.size(); ++nn) {
      g.node_point(nn, p.data());
      if (norm2(p.data(), 2) <= A) targets.insert(targets.end(), p.begin(), p.end());
    }
    std::vector<double> uv = apply_one(K, mu, delta, targets);
    double cell = g.spacing * g.spacing, acc = 0.0;
    for (std::size_t t = 0; t < targets.size() / 2; ++t)
      acc += norm2(&uv[t * K.ncomp], K.ncomp) * cell;
    out.a_values.push_back(A);
    out.integrals.push_back(acc);
    out.ratios.push_back(acc / (A * A * std::log(std::exp(1.0) + A)));
  }
  return out;
}

SecondDerResult secondder_check(const CZKernel& K, const PointMeasure& mu,
                                const std::vector<double>& targets, double h) {
  require(h > 0.0, "secondder_check: h > 0");
  int d = mu.dim();
  std::size_t nt = targets.size() / d;
  require(nt >= 1, "secondder_check: no targets");
  for (std::size_t t = 0; t < nt; ++t)
    require(mu.index().nearest_distance(&targets[t * d]) >= 6.0 * h,
            "secondder_check: target too close to the support for the stencil");

  auto hess_max = [&](double step) {
    // Stencil: center, axis pairs, diagonal quadruples, batched per target.
    std::vector<double> pts;
    std::size_t per = 1 + 2 * d + 2 * d * (d - 1);
    pts.reserve(nt * per * d);
    auto push = [&](const double* base, int a, double da, int b, double db) {
      std::vector<double> q(base, base + d);
      if (a >= 0) q[a] += da;
      if (b >= 0) q[b] += db;
      pts.insert(pts.end(), q.begin(), q.end());
    };
    for (std::size_t t = 0; t < nt; ++t) {
      const double* z = &targets[t * d];
      push(z, -1, 0, -1, 0);
      for (int a = 0; a < d; ++a) {
        push(z, a, step, -1, 0);
        push(z, a, -step, -1, 0);
      }
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
          push(z, a, step, b, step);
          push(z, a, step, b, -step);
          push(z, a, -step, b, step);
          push(z, a, -step, b, -step);
        }
    }
    std::vector<double> uv = apply_one(K, mu, 0.0, pts);
    int nc = K.ncomp;
    double worst = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      const double* base = &uv[t * per * nc];
      for (int c = 0; c < nc; ++c) {
        for (int a = 0; a < d; ++a) {
          double dd = std::abs(base[(1 + 2 * a) * nc + c] + base[(2 + 2 * a) * nc + c] -
                               2.0 * base[c]) /
                      (step * step);
          worst = std::max(worst, dd);
        }
        std::size_t off = 1 + 2 * d;
        for (int a = 0; a < d; ++a)
          for (int b = a + 1; b < d; ++b) {
            double dd = std::abs(base[off * nc + c] - base[(off + 1) * nc + c] -
                                 base[(off + 2) * nc + c] + base[(off + 3) * nc + c]) /
                        (4.0 * step * step);
            worst = std::max(worst, dd);
            off += 4;
          }
      }
    }
    return worst;
  };

  SecondDerResult out;
  out.max_entry = hess_max(h);
  out.coarse = hess_max(2.0 * h);
  out.stability =
      std::abs(out.max_entry - out.coarse) / std::max(out.max_entry, 1e-300);
  return out;
}

}  // namespace czlab
