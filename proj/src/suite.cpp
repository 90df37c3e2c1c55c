#include "czlab/suite.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "czlab/collapse.hpp"
#include "czlab/common.hpp"
#include "czlab/dyadic.hpp"
#include "czlab/grid.hpp"
#include "czlab/kernel.hpp"
#include "czlab/measure.hpp"
#include "czlab/operators.hpp"
#include "czlab/parallel.hpp"
#include "czlab/reflectionless.hpp"
#include "czlab/riesz_checks.hpp"
#include "czlab/riesz_system.hpp"
#include "czlab/test_function.hpp"
#include "czlab/treecode.hpp"

namespace czlab {
namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double pnum(const json& p, const char* key, double def) {
  if (!p.contains(key)) return def;
  require(p.at(key).is_number(), std::string("param '") + key + "' must be a number");
  return p.at(key).get<double>();
}

int pint(const json& p, const char* key, int def) {
  if (!p.contains(key)) return def;
  require(p.at(key).is_number_integer(), std::string("param '") + key + "' must be an integer");
  return p.at(key).get<int>();
}

std::string pstr(const json& p, const char* key, const std::string& def) {
  if (!p.contains(key)) return def;
  require(p.at(key).is_string(), std::string("param '") + key + "' must be a string");
  return p.at(key).get<std::string>();
}

std::vector<double> pvec(const json& p, const char* key, const std::vector<double>& def) {
  if (!p.contains(key)) return def;
  require(p.at(key).is_array(), std::string("param '") + key + "' must be an array");
  return p.at(key).get<std::vector<double>>();
}

PointMeasure need_measure(const ExperimentConfig& cfg) {
  require(!cfg.measure_spec.empty(), cfg.operation + ": config needs a measure");
  return measure_from_spec(cfg.measure_spec);
}

CZKernel need_kernel(const ExperimentConfig& cfg) {
  require(!cfg.kernel_spec.empty(), cfg.operation + ": config needs a kernel");
  return kernel_from_spec(cfg.kernel_spec);
}

std::vector<double> log_grid(double a, double b, int n) {
  require(a > 0.0 && b > a && n >= 2, "log_grid: bad range");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = a * std::exp(std::log(b / a) * static_cast<double>(i) / (n - 1));
  return out;
}

std::vector<double> lattice_targets(const std::vector<double>& center, double half, int per_axis,
                                    int d) {
  require(per_axis >= 1 && d >= 1, "lattice_targets: bad shape");
  std::size_t n = 1;
  for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(per_axis);
  std::vector<double> out(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = i;
    for (int k = 0; k < d; ++k) {
      int ik = static_cast<int>(r % per_axis);
      r /= per_axis;
      double t = per_axis == 1 ? 0.5 : (ik + 0.5) / per_axis;
      out[i * d + k] = center[k] - half + 2.0 * half * t;
    }
  }
  return out;
}

std::vector<double> parse_targets(const json& p, const PointMeasure& mu) {
  int d = mu.dim();
  if (p.contains("targets")) {
    const json& arr = p.at("targets");
    require(arr.is_array(), "param 'targets' must be an array of points");
    std::vector<double> out;
    for (const json& pt : arr) {
      std::vector<double> x = pt.get<std::vector<double>>();
      require(static_cast<int>(x.size()) == d, "target dimension mismatch");
      out.insert(out.end(), x.begin(), x.end());
    }
    return out;
  }
  json g = p.value("targets_grid", json::object());
  std::vector<double> center = g.contains("center") ? g.at("center").get<std::vector<double>>()
                                                    : mu.barycenter();
  require(static_cast<int>(center.size()) == d, "targets_grid center dimension mismatch");
  double half = g.value("half_width", 0.6 * std::max(mu.diameter_bound(), mu.mesh_scale()));
  int per_axis = g.value("per_axis", 5);
  return lattice_targets(center, half, per_axis, d);
}

ApplyParams parse_apply(const json& p) {
  ApplyParams ap;
  std::string m = pstr(p, "method", "auto");
  if (m == "dense")
    ap.method = ApplyMethod::Dense;
  else if (m == "clustered")
    ap.method = ApplyMethod::Clustered;
  else
    require(m == "auto", "param 'method' must be auto, dense, or clustered");
  ap.tree.rel_tol = pnum(p, "tree_rel_tol", ap.tree.rel_tol);
  return ap;
}

// Dense largest singular value of the weighted kernel matrix
// B[(i nc + c), j] = K_delta(y_i - y_j)_c sqrt(w_i w_j), the oracle for the
// matrix-free power iteration.
double dense_operator_norm(const CZKernel& K, const PointMeasure& mu, double delta) {
  std::size_t n = mu.size();
  int d = K.d, nc = K.ncomp;
  std::vector<double> sw(n);
  for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(mu.weight(i));
  Eigen::MatrixXd B(n * static_cast<std::size_t>(nc), n);
  double kv[8];
  double diff[3];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (int a = 0; a < d; ++a) diff[a] = mu.atom(i)[a] - mu.atom(j)[a];
      kernel_eval_inline(K, diff, delta, kv);
      for (int c = 0; c < nc; ++c)
        B(static_cast<Eigen::Index>(i * nc + c), static_cast<Eigen::Index>(j)) =
            kv[c] * sw[i] * sw[j];
    }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(B);
  return svd.singularValues()(0);
}

PointMeasure random_small_measure(Rng& rng) {
  switch (rng.next_index(3)) {
    case 0: {
      std::vector<double> a{rng.uniform(-2.0, 0.0), rng.uniform(-1.0, 1.0)};
      std::vector<double> b{rng.uniform(0.0, 2.0), rng.uniform(-1.0, 1.0)};
      return make_segment(a, b, 60 + static_cast<int>(rng.next_index(300)));
    }
    case 1: {
      std::vector<double> c{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      return make_ball_lebesgue(2, c, rng.uniform(0.4, 1.2),
                                14 + static_cast<int>(rng.next_index(9)));
    }
    default:
      return make_corner_cantor(2, 0.25, 3 + static_cast<int>(rng.next_index(2)));
  }
}

CZKernel random_kernel(Rng& rng) {
  switch (rng.next_index(4)) {
    case 0: return make_riesz_kernel(2, 1.0);
    case 1: return make_riesz_kernel(2, rng.uniform(0.4, 0.9));
    case 2: return make_cauchy_kernel();
    default: return make_conj_cauchy_kernel();
  }
}

struct AntisymOutcome {
  int failures = 0;
  double worst = 0.0;  // residual / (tol * abs_sum), largest seen
};

AntisymOutcome antisym_battery(std::uint64_t seed, int instances, double rel_tol) {
  AntisymOutcome out;
  Rng rng(seed);
  for (int i = 0; i < instances; ++i) {
    PointMeasure mu = random_small_measure(rng);
    CZKernel K = random_kernel(rng);
    std::size_t j = rng.next_index(mu.size());
    std::vector<double> c(mu.atom(j), mu.atom(j) + mu.dim());
    for (int k = 0; k < mu.dim(); ++k) c[k] += rng.uniform(-0.05, 0.05) * mu.diameter_bound();
    double r = rng.log_uniform(0.15, 0.6) * mu.diameter_bound();
    double delta = rng.next_double() < 0.5 ? 0.0 : rng.log_uniform(1e-3, 0.3);
    AntisymResult ar = antisym_residual(K, mu, c, r, delta);
    double cap = rel_tol * ar.abs_sum;
    if (ar.residual > cap) ++out.failures;
    if (ar.abs_sum > 0.0) out.worst = std::max(out.worst, ar.residual / cap);
  }
  return out;
}

// ---------------------------------------------------------------------------
// run_experiment operations

Report op_measure_gen(const ExperimentConfig& cfg) {
  Report rep;
  PointMeasure mu = need_measure(cfg);
  rep.check("generated", mu.size() > 0,
            mu.generator_tag() + " atoms=" + std::to_string(mu.size()));
  Table st{"stats", {"atoms", "total_mass", "mesh_scale", "nominal_s", "diameter"}, {}};
  st.rows.push_back({static_cast<double>(mu.size()), mu.total_mass(), mu.mesh_scale(),
                     mu.nominal_s(), mu.diameter_bound()});
  rep.table(std::move(st));
  double s = pnum(cfg.params, "s", mu.nominal_s());
  std::vector<double> radii = pvec(cfg.params, "radii", {});
  if (radii.empty() && mu.size() > 1) {
    double r0 = 2.0001 * mu.mesh_scale();
    double r1 = mu.diameter_bound();
    if (r1 > r0) radii = log_grid(r0, r1, 16);
  }
  if (!radii.empty()) {
    double lam = growth_constant(mu, s, radii);
    Table gt{"growth", {"s", "lambda"}, {{s, lam}}};
    rep.table(std::move(gt));
    rep.check("growth-finite", std::isfinite(lam) && lam > 0.0, "lambda=" + num(lam));
  }
  std::string save = pstr(cfg.params, "save", "");
  if (!save.empty()) {
    save_measure_text(mu, save);
    rep.check("saved", true, save);
  }
  return rep;
}

Report op_apply(const ExperimentConfig& cfg) {
  Report rep;
  PointMeasure mu = need_measure(cfg);
  CZKernel K = need_kernel(cfg);
  double delta = pnum(cfg.params, "delta", 0.0);
  std::vector<double> targets = parse_targets(cfg.params, mu);
  std::vector<double> f = pvec(cfg.params, "f", {});
  if (f.empty()) f.assign(mu.size(), 1.0);
  require(f.size() == mu.size(), "apply: f must match the atom count");
  ApplyParams ap = parse_apply(cfg.params);
  std::vector<double> vals = apply_truncated(K, mu, delta, f, targets, ap);
  std::size_t nt = targets.size() / static_cast<std::size_t>(mu.dim());
  Table t{"field", {}, {}};
  for (int k = 0; k < mu.dim(); ++k) t.header.push_back("x" + std::to_string(k));
  for (int c = 0; c < K.ncomp; ++c) t.header.push_back("v" + std::to_string(c));
  bool finite = true;
  for (std::size_t i = 0; i < nt; ++i) {
    std::vector<double> row;
    for (int k = 0; k < mu.dim(); ++k) row.push_back(targets[i * mu.dim() + k]);
    for (int c = 0; c < K.ncomp; ++c) {
      double v = vals[i * K.ncomp + c];
      finite = finite && std::isfinite(v);
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  rep.table(std::move(t));
  rep.check("finite", finite, "targets=" + std::to_string(nt) + " delta=" + num(delta));
  return rep;
}

Report op_norm(const ExperimentConfig& cfg) {
  Report rep;
  PointMeasure mu = need_measure(cfg);
  CZKernel K = need_kernel(cfg);
  double delta = pnum(cfg.params, "delta", 10.0 * std::max(mu.mesh_scale(), 1e-9));
  double tol = pnum(cfg.params, "tol", 1e-9);
  OperatorNormResult r = operator_norm(K, mu, delta, tol);
  Table t{"norm",
          {"value", "iterations", "restarts", "converged"},
          {{r.value, static_cast<double>(r.iterations), static_cast<double>(r.restarts),
            r.converged ? 1.0 : 0.0}}};
  rep.table(std::move(t));
  rep.check("converged", r.converged, "value=" + num(r.value));
  return rep;
}

Report op_defect(const ExperimentConfig& cfg) {
  Report rep;
  PointMeasure mu = need_measure(cfg);
  CZKernel K = need_kernel(cfg);
  std::vector<double> center = pvec(cfg.params, "center", mu.barycenter());
  double R = pnum(cfg.params, "radius", 0.25 * mu.diameter_bound());
  FamilyParams fp;
  fp.scales = pint(cfg.params, "scales", fp.scales);
  fp.offsets_per_axis = pint(cfg.params, "offsets_per_axis", fp.offsets_per_axis);
  fp.lip_target = pnum(cfg.params, "lip_target", fp.lip_target);
  double threshold = pnum(cfg.params, "threshold", 0.05);
  ApplyParams ap = parse_apply(cfg.params);
  DefectResult dr = defect(K, mu, center, R, fp, ap);
  Table t{"members", {"index", "rel", "raw"}, {}};
  for (std::size_t m = 0; m < dr.member_rel.size(); ++m)
    t.rows.push_back({static_cast<double>(m), dr.member_rel[m], dr.member_raw[m]});
  rep.table(std::move(t));
  rep.check("family-nonempty", dr.members > 0, "members=" + std::to_string(dr.members));
  rep.check("defect-bounded", dr.max_rel <= threshold,
            "max_rel=" + num(dr.max_rel) + " cap=" + num(threshold));
  return rep;
}

Report op_ttilde(const ExperimentConfig& cfg) {
  Report rep;
  PointMeasure mu = need_measure(cfg);
  CZKernel K = need_kernel(cfg);
  std::vector<double> deltas = pvec(cfg.params, "deltas", {});
  if (deltas.empty())
    deltas = log_grid(5.0 * std::max(mu.mesh_scale(), 1e-9),
                      0.5 * std::max(mu.diameter_bound(), 1.0), 9);
  std::vector<double> targets = parse_targets(cfg.params, mu);
  ReferenceBall ref = default_reference(mu);
  TtildeOptions opts;
  opts.apply = parse_apply(cfg.params);
  std::vector<double> vals = ttilde_one(K, mu, deltas, targets, ref, opts);
  int d = mu.dim(), nc = K.ncomp;
  std::size_t nt = targets.size() / static_cast<std::size_t>(d);
  Table t{"values", {"delta", "t"}, {}};
  for (int k = 0; k < d; ++k) t.header.push_back("x" + std::to_string(k));
  for (int c = 0; c < nc; ++c) t.header.push_back("v" + std::to_string(c));
  bool finite = true;
  for (std::size_t di = 0; di < deltas.size(); ++di)
    for (std::size_t ti = 0; ti < nt; ++ti) {
      std::vector<double> row{deltas[di], static_cast<double>(ti)};
      for (int k = 0; k < d; ++k) row.push_back(targets[ti * d + k]);
      for (int c = 0; c < nc; ++c) {
        double v = vals[(di * nt + ti) * nc + c];
        finite = finite && std::isfinite(v);
        row.push_back(v);
      }
      t.rows.push_back(std::move(row));
    }
  rep.table(std::move(t));
  Table ct{"sup_over_delta", {"t", "sup"}, {}};
  for (std::size_t ti = 0; ti < nt; ++ti) {
    double sup = 0.0;
    for (std::size_t di = 0; di < deltas.size(); ++di)
      sup = std::max(sup, norm2(&vals[(di * nt + ti) * nc], nc));
    ct.rows.push_back({static_cast<double>(ti), sup});
  }
  rep.table(std::move(ct));
  rep.check("finite", finite,
            "deltas=" + std::to_string(deltas.size()) + " targets=" + std::to_string(nt));
  return rep;
}

Report op_riesz_system(const ExperimentConfig& cfg) {
  Report rep;
  PointMeasure mu = need_measure(cfg);
  int d = mu.dim();
  double s = pnum(cfg.params, "s", mu.nominal_s());
  std::vector<double> corner = pvec(cfg.params, "root_corner", mu.box_min());
  double side = 0.0;
  for (int k = 0; k < d; ++k) side = std::max(side, mu.box_max()[k] - mu.box_min()[k]);
  side = pnum(cfg.params, "root_side", side);
  int max_level = pint(cfg.params, "max_level", 3);
  std::vector<DyadicCube> cubes = dyadic_cubes(mu, corner, side, max_level);
  rep.check("cubes-built", !cubes.empty(), "cubes=" + std::to_string(cubes.size()));

  std::vector<double> As = pvec(cfg.params, "window_factors", {});
  if (As.empty()) {
    double rd = std::sqrt(static_cast<double>(d));
    As = {8.0 * rd, 16.0 * rd, 32.0 * rd};
  }
  RieszScaling sc = riesz_scaling(mu, cubes, As, s);
  Table t{"scaling", {"A", "lambda_max"}, {}};
  for (std::size_t i = 0; i < sc.A.size(); ++i) t.rows.push_back({sc.A[i], sc.lambda_max[i]});
  rep.table(std::move(t));
  double cap = pnum(cfg.params, "slope_cap", d + 2.0 + 1.5 * s + 0.5);
  rep.check("scaling-slope", sc.slope <= cap, "slope=" + num(sc.slope) + " cap=" + num(cap));

  double floor = pnum(cfg.params, "density_floor", 0.5);
  CarlesonResult cr = carleson_sum(mu, corner, side, max_level, s, floor);
  Table pt{"carleson", {"level", "contribution"}, {}};
  for (std::size_t l = 0; l < cr.per_level.size(); ++l)
    pt.rows.push_back({static_cast<double>(l), cr.per_level[l]});
  rep.table(std::move(pt));
  rep.check("carleson-finite", std::isfinite(cr.total), "total=" + num(cr.total));
  return rep;
}

Report op_collapse_schedule(const ExperimentConfig& cfg) {
  Report rep;
  double eps0 = pnum(cfg.params, "eps0", 0.2);
  double c6 = pnum(cfg.params, "c6", 2.0);
  double c9 = pnum(cfg.params, "c9", std::sqrt(4.0 / kPi));
  double alpha = pnum(cfg.params, "alpha", 1.0);
  int d = pint(cfg.params, "d", 2);
  double lg = pnum(cfg.params, "lambda_growth", 1.0);
  ScheduleParams sp = derive_schedule_params(eps0, c6, c9, alpha, d, lg);
  ScheduleResult sr = run_schedule(sp);
  Table t{"schedule",
          {"eps0", "m0", "kappa0", "steps", "eps_final", "t_final", "kappa_sum"},
          {{sp.eps0, sp.m0, sp.kappa0, static_cast<double>(sr.steps), sr.eps_final, sr.t_final,
            sr.kappa_sum}}};
  rep.table(std::move(t));
  rep.check("feasible", sr.feasible, sr.note);
  rep.check("conservation", sr.conservation_ok,
            "eps_final=" + num(sr.eps_final) + " t_final=" + num(sr.t_final));
  std::vector<double> grid = pvec(cfg.params, "eps_grid", {});
  if (!grid.empty()) {
    KappaExponentFit fit = kappa_of_eps(grid, c6, c9, alpha, d, lg);
    Table ft{"kappa_fit", {"eps", "kappa0"}, {}};
    for (std::size_t i = 0; i < fit.eps.size(); ++i)
      ft.rows.push_back({fit.eps[i], fit.kappa0[i]});
    rep.table(std::move(ft));
    rep.check("exponent-positive", fit.exponent > 0.0 && std::isfinite(fit.exponent),
              "exponent=" + num(fit.exponent));
  }
  return rep;
}

Report op_porosity(const ExperimentConfig& cfg) {
  Report rep;
  PointMeasure mu = need_measure(cfg);
  CZKernel K = need_kernel(cfg);
  BallQuery q;
  q.center = pvec(cfg.params, "center", mu.barycenter());
  q.radius = pnum(cfg.params, "radius", 0.5 * mu.diameter_bound());
  double eps = pnum(cfg.params, "eps", 0.02);
  double delta_eff =
      pnum(cfg.params, "delta_eff", std::max(10.0 * mu.mesh_scale(), 0.05 * mu.diameter_bound()));
  ReferenceBall ref = default_reference(mu);
  PorosityResult pr = porosity_scan(K, mu, q, eps, delta_eff, ref,
                                    pint(cfg.params, "grid_per_axis", 64),
                                    pint(cfg.params, "refine_rounds", 3));
  Table t{"porosity", {"field_avg", "threshold", "lambda_found", "hole_radius"}, {}};
  t.rows.push_back({pr.field_avg, pr.threshold, pr.lambda_found, pr.hole_radius});
  rep.table(std::move(t));
  std::string expect = pstr(cfg.params, "expect", "");
  if (expect.empty())
    rep.check("scan-ran", true, pr.status + " lambda=" + num(pr.lambda_found));
  else
    rep.check("expected-outcome", pr.status == expect,
              "status=" + pr.status + " expected=" + expect + " avg=" + num(pr.field_avg));
  return rep;
}

Report op_riesz_checks(const ExperimentConfig& cfg) {
  Report rep;
  const json& p = cfg.params;
  std::string exp = pstr(p, "experiment", "");
  require(!exp.empty(), "riesz-checks: param 'experiment' required");
  if (exp == "divergence") {
    PointMeasure mu = need_measure(cfg);
    double s = pnum(p, "s", 1.0);
    std::vector<double> center = pvec(p, "center", mu.barycenter());
    double half = pnum(p, "half_width", 0.8 * mu.diameter_bound());
    int grid_n = pint(p, "grid_n", 128);
    double moll = pnum(p, "mollifier_radius", 0.5);
    DivergenceResult dr = divergence_identity(mu, s, center, half, grid_n, moll);
    Table t{"divergence", {"b", "b_fitted", "rel_l1", "interior_nodes"}, {}};
    t.rows.push_back({dr.b, dr.b_fitted ? 1.0 : 0.0, dr.rel_l1,
                      static_cast<double>(dr.interior_nodes)});
    rep.table(std::move(t));
    rep.check("identity", dr.rel_l1 <= pnum(p, "tol", 0.05),
              "rel_l1=" + num(dr.rel_l1) + (dr.b_fitted ? " b-fitted=" : " b-analytic=") +
                  num(dr.b));
  } else if (exp == "pv") {
    PointMeasure mu = need_measure(cfg);
    CZKernel K = need_kernel(cfg);
    std::vector<double> x0 = pvec(p, "x0", mu.barycenter());
    double delta = pnum(p, "delta", 3.0 * mu.mesh_scale());
    double r_excl = pnum(p, "r_excl", 0.05);
    double r_outer = pnum(p, "r_outer", 6.0);
    BatchFieldEval u = field_from_measure(K, mu, delta);
    PvResult pv = frac_laplacian_pv(u, mu.dim(), K.ncomp, K.s, x0, r_excl, r_outer);
    Table t{"pv", {"value_norm", "normalization", "evals"}, {}};
    t.rows.push_back({pv.value_norm, pv.normalization, static_cast<double>(pv.evals)});
    rep.table(std::move(t));
    rep.check("pv-vanishes", pv.value_norm <= pnum(p, "tol", 0.05) * pv.normalization,
              "|pv|=" + num(pv.value_norm) + " norm=" + num(pv.normalization));
  } else if (exp == "philem") {
    PointMeasure mu = need_measure(cfg);
    CZKernel K = need_kernel(cfg);
    std::vector<double> x = pvec(p, "x", mu.barycenter());
    double r = pnum(p, "r", 0.25 * mu.diameter_bound());
    double half = pnum(p, "half_width", 5.0 * r);
    int grid_n = pint(p, "grid_n", 96);
    double delta = pnum(p, "delta", 3.0 * mu.mesh_scale());
    BatchFieldEval u = field_from_measure(K, mu, delta);
    PhilemResult ph = philem_check(u, K.ncomp, mu, x, r, K.s, half, grid_n);
    Table t{"philem", {"lhs", "rhs", "ratio", "c20", "tail_fraction"}, {}};
    t.rows.push_back({ph.lhs, ph.rhs, ph.ratio, ph.c20, ph.tail_fraction});
    rep.table(std::move(t));
    rep.check("tail-small", ph.tail_fraction < 0.01, "tail=" + num(ph.tail_fraction));
    rep.check("ratio-finite", std::isfinite(ph.ratio) && ph.ratio > 0.0,
              "ratio=" + num(ph.ratio) + " c20=" + num(ph.c20));
  } else if (exp == "fourier-g") {
    int n = pint(p, "n", 256);
    double half = pnum(p, "half_width", 4.0);
    double fr = pnum(p, "f_radius", 1.0);
    double s = pnum(p, "s", 1.0);
    FourierGResult fg = fourier_g(n, half, fr, s, pint(p, "oracle_stride", 0));
    Table t{"fourier_g",
            {"b", "rel_l2", "mean_abs", "g_max", "decay_max", "decay_median"},
            {{fg.b, fg.rel_l2, fg.mean_abs, fg.g_max, fg.decay_max, fg.decay_median}}};
    rep.table(std::move(t));
    rep.check("reconstruction", fg.rel_l2 <= pnum(p, "tol", 0.05), "rel_l2=" + num(fg.rel_l2));
    rep.check("mean-zero", fg.mean_abs <= 1e-6 * fg.g_max,
              "mean=" + num(fg.mean_abs) + " max=" + num(fg.g_max));
    rep.check("decay-envelope", fg.decay_max <= 10.0 * fg.decay_median,
              "max=" + num(fg.decay_max) + " median=" + num(fg.decay_median));
  } else if (exp == "truncation") {
    PointMeasure mu = need_measure(cfg);
    CZKernel K = need_kernel(cfg);
    double A = pnum(p, "A", 2.0);
    std::vector<double> ns = pvec(p, "n_values", {8.0, 16.0, 32.0, 64.0});
    TruncationTable tt = truncation_convergence(K, mu, A, ns, pint(p, "targets_per_axis", 21));
    Table t{"truncation", {"N", "sup_diff"}, {}};
    for (std::size_t i = 0; i < tt.n_values.size(); ++i)
      t.rows.push_back({tt.n_values[i], tt.sup_diff[i]});
    rep.table(std::move(t));
    rep.check("rate", tt.slope <= pnum(p, "slope_cap", -0.8), "slope=" + num(tt.slope));
  } else if (exp == "growth") {
    PointMeasure mu = need_measure(cfg);
    CZKernel K = need_kernel(cfg);
    std::vector<double> as = pvec(p, "a_values", {1.0, 2.0, 4.0, 8.0});
    double delta = pnum(p, "delta", 5.0 * mu.mesh_scale());
    FieldGrowth fgr = field_l1_growth(K, mu, as, pint(p, "grid_per_axis", 48), delta);
    Table t{"field_growth", {"A", "integral", "ratio"}, {}};
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < fgr.a_values.size(); ++i) {
      t.rows.push_back({fgr.a_values[i], fgr.integrals[i], fgr.ratios[i]});
      lo = std::min(lo, fgr.ratios[i]);
      hi = std::max(hi, fgr.ratios[i]);
    }
    rep.table(std::move(t));
    rep.check("ratio-bounded", hi <= pnum(p, "cap", 10.0) * lo,
              "min=" + num(lo) + " max=" + num(hi));
  } else if (exp == "secondder") {
    PointMeasure mu = need_measure(cfg);
    CZKernel K = need_kernel(cfg);
    double h = pnum(p, "h", 0.02 * mu.diameter_bound());
    std::vector<double> targets = pvec(p, "targets", {});
    if (targets.empty()) {
      std::vector<double> c = mu.barycenter();
      double rr = 0.75 * mu.diameter_bound();
      for (int i = 0; i < 8; ++i) {
        targets.push_back(c[0] + rr * std::cos(2.0 * kPi * i / 8.0));
        targets.push_back(c[1] + rr * std::sin(2.0 * kPi * i / 8.0));
      }
    }
    SecondDerResult sd = secondder_check(K, mu, targets, h);
    Table t{"secondder", {"max_entry", "coarse", "stability"},
            {{sd.max_entry, sd.coarse, sd.stability}}};
    rep.table(std::move(t));
    rep.check("stable", sd.stability <= pnum(p, "tol", 0.25), "stability=" + num(sd.stability));
  } else if (exp == "rl1") {
    PointMeasure mu = need_measure(cfg);
    CZKernel K = need_kernel(cfg);
    std::vector<double> x = pvec(p, "x", mu.barycenter());
    double r = pnum(p, "r", 0.2 * mu.diameter_bound());
    Rl1LowerBound rb = rl1_lower_bound(K, mu, x, r, pint(p, "grid_per_axis", 96));
    Table t{"rl1", {"integral", "eps", "c_fitted"}, {{rb.integral, rb.eps, rb.c_fitted}}};
    rep.table(std::move(t));
    rep.check("positive", std::isfinite(rb.c_fitted) && rb.c_fitted > 0.0,
              "c=" + num(rb.c_fitted));
  } else {
    throw std::invalid_argument("riesz-checks: unknown experiment '" + exp + "'");
  }
  return rep;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
  auto t0 = Clock::now();
  if (cfg.threads > 0) set_max_threads(cfg.threads);
  Report rep;
  if (cfg.operation == "measure-gen")
    rep = op_measure_gen(cfg);
  else if (cfg.operation == "apply")
    rep = op_apply(cfg);
  else if (cfg.operation == "norm")
    rep = op_norm(cfg);
  else if (cfg.operation == "defect")
    rep = op_defect(cfg);
  else if (cfg.operation == "ttilde")
    rep = op_ttilde(cfg);
  else if (cfg.operation == "riesz-system")
    rep = op_riesz_system(cfg);
  else if (cfg.operation == "collapse-schedule")
    rep = op_collapse_schedule(cfg);
  else if (cfg.operation == "porosity")
    rep = op_porosity(cfg);
  else if (cfg.operation == "riesz-checks")
    rep = op_riesz_checks(cfg);
  else if (cfg.operation == "suite") {
    std::string which = pstr(cfg.params, "which", "quick");
    if (which == "acceptance")
      rep = run_acceptance_suite(cfg.seed);
    else {
      require(which == "quick", "suite: param 'which' must be quick or acceptance");
      rep = run_quick_suite(cfg.seed);
    }
  } else {
    throw std::invalid_argument("unknown operation '" + cfg.operation + "'");
  }
  rep.config = cfg.raw;
  rep.threads = max_threads();
  rep.wall_ms = ms_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// quick suite

Report run_quick_suite(std::uint64_t seed) {
  Report rep;
  rep.config = {{"operation", "suite"}, {"which", "quick"}, {"seed", seed}};

  {
    bool ok = true;
    std::string worst;
    for (const CZKernel& K : {make_riesz_kernel(2, 1.0), make_riesz_kernel(2, 0.5),
                              make_cauchy_kernel(), make_conj_cauchy_kernel()}) {
      KernelValidation v = validate_kernel(K, 400);
      if (!v.all_ok()) {
        ok = false;
        worst = K.name;
      }
    }
    rep.check("kernel-validate", ok, ok ? "4 kernels" : "failed: " + worst);
  }

  {
    PointMeasure mu = make_corner_cantor(2, 0.25, 3);
    PointMeasure back = measure_from_json(measure_to_json(mu));
    bool same = back.size() == mu.size() && back.atoms_flat() == mu.atoms_flat() &&
                back.weights() == mu.weights() && back.mesh_scale() == mu.mesh_scale();
    rep.check("measure-roundtrip", same, "atoms=" + std::to_string(mu.size()));
  }

  {
    PointMeasure disc = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 64);
    double m = disc.total_mass();
    double c[2] = {0.0, 0.0};
    double half = ball_mass(disc, c, 0.5);
    bool ok = std::abs(m - kPi) <= 0.015 * kPi && std::abs(half - kPi / 4.0) <= 0.02 * kPi;
    rep.check("ball-mass", ok, "mass=" + num(m) + " half=" + num(half));
  }

  {
    PointMeasure seg = make_segment({-10.0, 0.0}, {10.0, 0.0}, 2000);
    double lam = growth_constant(seg, 1.0, log_grid(2.0001 * seg.mesh_scale(), 20.0, 24));
    rep.check("growth-line", lam >= 1.8 && lam <= 2.6, "lambda=" + num(lam));
  }

  {
    PointMeasure disc = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 32);
    CZKernel K = make_riesz_kernel(2, 1.0);
    std::vector<double> v = apply_one(K, disc, 0.0, {0.0, 0.0});
    double r = norm2(v.data(), 2);
    rep.check("pv-symmetry", r <= 1e-10, "|T(1)(0)|=" + num(r));
  }

  {
    AntisymOutcome a = antisym_battery(seed + 11, 10, 1e-12);
    rep.check("antisymmetry-small", a.failures == 0,
              "instances=10 worst=" + num(a.worst));
  }

  {
    PointMeasure disc = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 64);
    CZKernel K = make_riesz_kernel(2, 1.0);
    Rng rng(seed + 13);
    std::vector<double> targets;
    for (int i = 0; i < 100; ++i) {
      targets.push_back(rng.uniform(-1.4, 1.4));
      targets.push_back(rng.uniform(-1.4, 1.4));
    }
    ApplyParams tp, dp;
    tp.method = ApplyMethod::Clustered;
    tp.tree.rel_tol = 1e-6;
    dp.method = ApplyMethod::Dense;
    std::vector<double> a = apply_one(K, disc, 0.0, targets, tp);
    std::vector<double> b = apply_one(K, disc, 0.0, targets, dp);
    double err = 0.0, den = 0.0;
    for (std::size_t t = 0; t < targets.size() / 2; ++t) {
      double e[2] = {a[2 * t] - b[2 * t], a[2 * t + 1] - b[2 * t + 1]};
      err = std::max(err, norm2(e, 2));
      den = std::max(den, norm2(&b[2 * t], 2));
    }
    rep.check("treecode-dense", err <= 1e-4 * den, "rel=" + num(den > 0 ? err / den : 0.0));
  }

  {
    // Ratio-1/4 corner clusters sit inside single side-1/4 dyadic cubes, so
    // level 2 holds 4 nonempty cubes; the clusters only split at level 3.
    PointMeasure cant = make_corner_cantor(2, 0.25, 2);
    std::vector<DyadicCube> cubes = dyadic_cubes(cant, {0.0, 0.0}, 1.0, 2);
    std::vector<DyadicCube> deeper = dyadic_cubes(cant, {0.0, 0.0}, 1.0, 3);
    rep.check("dyadic-count", cubes.size() == 9 && deeper.size() == 25,
              "cubes=" + std::to_string(cubes.size()) + "/" + std::to_string(deeper.size()) +
                  " expected=9/25");
  }

  {
    Rng rng(seed + 17);
    int bad = 0;
    for (int i = 0; i < 2000; ++i) {
      double b = rng.log_uniform(1e-8, 1e8);
      double a = i % 10 == 0 ? 0.0 : (i % 11 == 0 ? b : rng.next_double() * b);
      RearrangeCheck rc =
          rearrange_bound(a, b, rng.log_uniform(0.25, 64.0), rng.uniform(1e-3, 1.0));
      if (!rc.ok) ++bad;
    }
    rep.check("rearrange-quick", bad == 0, "tuples=2000 bad=" + std::to_string(bad));
  }

  {
    ScheduleParams sp = derive_schedule_params(0.4, 2.0, std::sqrt(4.0 / kPi), 1.0, 2, 1.0);
    ScheduleResult sr = run_schedule(sp);
    rep.check("schedule-quick", sr.feasible && sr.conservation_ok,
              "steps=" + std::to_string(sr.steps) + " eps_final=" + num(sr.eps_final));
  }

  {
    PointMeasure seg = make_segment({-1.0, 0.0}, {1.0, 0.0}, 120);
    CZKernel K = make_riesz_kernel(2, 1.0);
    OperatorNormResult r = operator_norm(K, seg, 0.1, 1e-11);
    double oracle = dense_operator_norm(K, seg, 0.1);
    double rel = std::abs(r.value - oracle) / oracle;
    rep.check("norm-oracle-small", r.converged && rel <= 1e-6,
              "value=" + num(r.value) + " rel=" + num(rel));
  }

  {
    bool threw = false;
    std::string msg;
    try {
      load_config_text("{\"operation\": \"warp\", \"params\": []}");
    } catch (const std::invalid_argument& e) {
      threw = true;
      msg = e.what();
    }
    bool ok = threw && msg.find("operation") != std::string::npos &&
              msg.find("seed") != std::string::npos;
    rep.check("config-reject", ok, ok ? "lists all problems" : "incomplete diagnostics");
  }

  {
    Report a, b;
    a.config = {{"k", 1}};
    b.config = {{"k", 1}};
    a.check("x", true, "d");
    b.check("x", true, "d");
    a.wall_ms = 1.0;
    b.wall_ms = 2.0;
    bool same = a.to_json(false).dump() == b.to_json(false).dump();
    rep.check("report-determinism", same, "timing excluded");
  }

  {
    GridField g = make_centered_grid({0.0, 0.0}, 1.0, 48, 2);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double x[2];
      g.node_point(i, x);
      g.values[i * 2] = std::sin(x[0]) + x[1] * x[1];
      g.values[i * 2 + 1] = std::cos(x[1]) * x[0];
    }
    double r = divergence_theorem_residual(g);
    rep.check("divergence-theorem", r <= 1e-12, "residual=" + num(r));
  }

  {
    PointMeasure seg = make_segment({-5.0, 0.0}, {5.0, 0.0}, 1000);
    double lam = growth_constant(seg, 1.0, log_grid(2.0001 * seg.mesh_scale(), 10.0, 24));
    Rng rng(seed + 19);
    int bad = 0;
    for (int i = 0; i < 10; ++i) {
      double x[2] = {rng.uniform(-6.0, 6.0), rng.uniform(-1.0, 1.0)};
      TailBoundResult tr = tail_integral(seg, x, rng.log_uniform(0.05, 2.0), 1.0,
                                         rng.uniform(0.1, 1.0), lam);
      if (tr.violated) ++bad;
    }
    rep.check("tail-quick", bad == 0, "bad=" + std::to_string(bad));
  }

  rep.threads = max_threads();
  return rep;
}

// ---------------------------------------------------------------------------
// acceptance suite

namespace {

// Acceptance thresholds, fixed here.
constexpr double kC1DefectCap = 1e-2;
constexpr double kDecaySlopeCap = -0.8;
constexpr double kC2DefectCap = 0.05;
// Upper refinement-ratio cap only: boundary-cell subsampling makes the disc
// quadrature converge beyond first order, so the defect drops faster than a
// plain halving between the two grids.
constexpr double kC2RatioHi = 0.65;
constexpr double kAntisymRel = 1e-12;
constexpr double kCotlarCap = 3.0;
constexpr double kHolderStab = 0.2;
constexpr double kGramSlopeCap = 6.0;  // d + 2 + 3 s / 2 + 1/2 at d = 2, s = 1
constexpr double kNormRelErr = 1e-6;
constexpr double kPorosityLo = 0.15, kPorosityHi = 0.35;
constexpr double kDivRelL1 = 0.05;
constexpr double kDivOrderMin = 1.0;
constexpr double kPvRel = 0.05;
constexpr double kFourierRelL2 = 0.05;
// Weighted tail amplitude sup |g|(1+|x|)^{2d-s} over the outer annulus must
// stay within the peak amplitude of g itself.
constexpr double kFourierDecayCap = 1.0;
constexpr double kTreeRelErr = 1e-4;
constexpr double kTreeSpeedup = 5.0;

struct Criterion {
  std::string name;
  std::function<std::pair<bool, std::string>()> body;
};

void run_criteria(Report& rep, const std::vector<Criterion>& list) {
  Table timing{"timing", {"criterion", "ms", "pass"}, {}};
  for (std::size_t i = 0; i < list.size(); ++i) {
    auto t0 = Clock::now();
    bool pass = false;
    std::string detail;
    try {
      std::pair<bool, std::string> r = list[i].body();
      pass = r.first;
      detail = r.second;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double ms = ms_since(t0);
    rep.check(list[i].name, pass, detail + " (" + num(ms) + " ms)");
    timing.rows.push_back({static_cast<double>(i + 1), ms, pass ? 1.0 : 0.0});
  }
  rep.table(std::move(timing));
}

std::pair<double, double> tree_err_and_den(const CZKernel& K, const PointMeasure& mu,
                                           const std::vector<double>& targets) {
  ApplyParams tp, dp;
  tp.method = ApplyMethod::Clustered;
  tp.tree.rel_tol = 1e-6;
  dp.method = ApplyMethod::Dense;
  std::vector<double> a = apply_one(K, mu, 0.0, targets, tp);
  std::vector<double> b = apply_one(K, mu, 0.0, targets, dp);
  std::size_t nt = targets.size() / static_cast<std::size_t>(mu.dim());
  double err = 0.0, den = 0.0;
  std::vector<double> e(K.ncomp);
  for (std::size_t t = 0; t < nt; ++t) {
    for (int c = 0; c < K.ncomp; ++c) e[c] = a[t * K.ncomp + c] - b[t * K.ncomp + c];
    err = std::max(err, norm2(e.data(), K.ncomp));
    den = std::max(den, norm2(&b[t * K.ncomp], K.ncomp));
  }
  return {err, den};
}

std::vector<double> box_targets(const PointMeasure& mu, int count, Rng& rng) {
  int d = mu.dim();
  double span = 0.0;
  for (int k = 0; k < d; ++k) span = std::max(span, mu.box_max()[k] - mu.box_min()[k]);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count) * d);
  for (int i = 0; i < count; ++i)
    for (int k = 0; k < d; ++k)
      out.push_back(rng.uniform(mu.box_min()[k] - 0.15 * span, mu.box_max()[k] + 0.15 * span));
  return out;
}

}  // namespace

Report run_acceptance_suite(std::uint64_t seed) {
  Report rep;
  rep.config = {{"operation", "suite"}, {"which", "acceptance"}, {"seed", seed}};
  std::vector<Criterion> cs;

  cs.push_back({"criterion-01-line-defect", [seed]() {
    PointMeasure mu = make_segment({-50.0, 0.0}, {50.0, 0.0}, 10000);
    CZKernel K = make_riesz_kernel(2, 1.0);
    DefectResult dr = defect(K, mu, {0.0, 0.0}, 1.0);
    std::vector<TestFunction> fam = standard_family(mu, {0.0, 0.0}, 1.0);
    TruncationDecay td = truncation_decay(K, mu, fam.at(dr.argmax), {4.0, 8.0, 16.0, 32.0});
    // Gaps cancelled below roundoff decay faster than any rate the fit could
    // certify, so the rate check applies only to resolvable gaps.
    bool rate_ok = !td.resolvable || td.slope <= kDecaySlopeCap;
    bool ok = dr.members > 0 && dr.max_rel <= kC1DefectCap && rate_ok;
    (void)seed;
    return std::make_pair(ok, "max_rel=" + num(dr.max_rel) + " slope=" + num(td.slope) +
                                  (td.resolvable ? "" : " (below roundoff floor)") +
                                  " members=" + std::to_string(dr.members));
  }});

  cs.push_back({"criterion-02-disc-defect", []() {
    CZKernel K = make_conj_cauchy_kernel();
    ApplyParams dense;
    dense.method = ApplyMethod::Dense;
    PointMeasure m128 = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 128);
    PointMeasure m256 = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 256);
    DefectResult d128 = defect(K, m128, {0.0, 0.0}, 0.5, {}, dense);
    DefectResult d256 = defect(K, m256, {0.0, 0.0}, 0.5, {}, dense);
    double ratio = d128.max_rel > 0.0 ? d256.max_rel / d128.max_rel : 0.0;
    // A vanishing defect would mean a degenerate family, not success.
    bool ok = d256.max_rel > 0.0 && d256.max_rel <= kC2DefectCap && ratio <= kC2RatioHi;
    return std::make_pair(ok, "rel128=" + num(d128.max_rel) + " rel256=" + num(d256.max_rel) +
                                  " ratio=" + num(ratio));
  }});

  cs.push_back({"criterion-03-antisymmetry", [seed]() {
    AntisymOutcome a = antisym_battery(seed + 303, 100, kAntisymRel);
    return std::make_pair(a.failures == 0, "instances=100 failures=" +
                                               std::to_string(a.failures) +
                                               " worst=" + num(a.worst));
  }});

  cs.push_back({"criterion-04-tail-bound", [seed]() {
    Rng rng(seed + 404);
    int bad = 0;
    double worst = 0.0;
    std::string lams;
    PointMeasure mus[2] = {make_segment({-20.0, 0.0}, {20.0, 0.0}, 4000),
                           make_corner_cantor(2, 0.25, 5)};
    for (const PointMeasure& mu : mus) {
      double diam = mu.diameter_bound();
      double lam =
          growth_constant(mu, 1.0, log_grid(2.0001 * mu.mesh_scale(), diam, 48));
      lams += (lams.empty() ? "" : "/") + num(lam);
      for (int i = 0; i < 50; ++i) {
        double x[2];
        if (rng.next_double() < 0.5) {
          const double* a = mu.atom(rng.next_index(mu.size()));
          x[0] = a[0];
          x[1] = a[1];
        } else {
          for (int k = 0; k < 2; ++k)
            x[k] = rng.uniform(mu.box_min()[k] - 0.25 * diam, mu.box_max()[k] + 0.25 * diam);
        }
        double r = rng.log_uniform(2.5 * mu.mesh_scale(), 0.4 * diam);
        TailBoundResult tr = tail_integral(mu, x, r, 1.0, rng.uniform(0.1, 1.0), lam);
        if (tr.violated) ++bad;
        if (tr.bound > 0.0) worst = std::max(worst, tr.value / tr.bound);
      }
    }
    return std::make_pair(bad == 0, "violations=" + std::to_string(bad) + " worst=" +
                                        num(worst) + " lambda=" + lams);
  }});

  cs.push_back({"criterion-05-rearrange", [seed]() {
    Rng rng(seed + 505);
    int bad = 0;
    for (int i = 0; i < 100000; ++i) {
      double b = rng.log_uniform(1e-8, 1e8);
      double a = i % 10 == 0 ? 0.0 : (i % 11 == 0 ? b : rng.next_double() * b);
      RearrangeCheck rc =
          rearrange_bound(a, b, rng.log_uniform(0.25, 64.0), rng.uniform(1e-3, 1.0));
      if (!rc.ok) ++bad;
    }
    return std::make_pair(bad == 0, "tuples=100000 violations=" + std::to_string(bad));
  }});

  cs.push_back({"criterion-06-cotlar", [seed]() {
    PointMeasure mu = make_segment({-50.0, 0.0}, {50.0, 0.0}, 10000);
    CZKernel K = make_riesz_kernel(2, 1.0);
    ReferenceBall ref = default_reference(mu);
    Rng rng(seed + 606);
    std::vector<double> targets;
    for (int i = 0; i < 50; ++i) {
      targets.push_back(rng.uniform(-45.0, 45.0));
      targets.push_back(0.0);
    }
    std::vector<double> deltas = log_grid(0.05, 50.0, 13);
    std::vector<double> vals = ttilde_one(K, mu, deltas, targets, ref);
    std::vector<double> sups(50, 0.0);
    for (std::size_t di = 0; di < deltas.size(); ++di)
      for (std::size_t t = 0; t < 50; ++t)
        sups[t] = std::max(sups[t], norm2(&vals[(di * 50 + t) * 2], 2));
    double mx = *std::max_element(sups.begin(), sups.end());
    double med = median_of(sups);
    double ratio = med > 0.0 ? mx / med : 1e300;
    return std::make_pair(ratio <= kCotlarCap,
                          "max=" + num(mx) + " median=" + num(med) + " ratio=" + num(ratio));
  }});

  cs.push_back({"criterion-07-holder", [seed]() {
    CZKernel K = make_riesz_kernel(2, 1.0);
    PointMeasure m5 = make_segment({-50.0, 0.0}, {50.0, 0.0}, 5000);
    PointMeasure m10 = make_segment({-50.0, 0.0}, {50.0, 0.0}, 10000);
    double delta = 0.5;
    std::vector<HolderPair> pairs =
        make_holder_pairs(m10, {-45.0, -1.0}, {45.0, 1.0}, delta, 200, seed + 707);
    HolderResult h5 = holder_check(K, m5, delta, pairs, default_reference(m5));
    HolderResult h10 = holder_check(K, m10, delta, pairs, default_reference(m10));
    double stab = std::abs(h10.c6 - h5.c6) / std::max(h10.c6, h5.c6);
    return std::make_pair(stab <= kHolderStab, "c6(5k)=" + num(h5.c6) + " c6(10k)=" +
                                                   num(h10.c6) + " gap=" + num(stab) +
                                                   " pairs=" + std::to_string(pairs.size()));
  }});

  cs.push_back({"criterion-08-riesz-scaling", []() {
    PointMeasure cant = make_corner_cantor(2, 0.25, 3);
    std::vector<DyadicCube> cubes = dyadic_cubes(cant, {0.0, 0.0}, 1.0, 3);
    double rd = std::sqrt(2.0);
    RieszScaling sc = riesz_scaling(cant, cubes, {8.0 * rd, 16.0 * rd, 32.0 * rd}, 1.0);
    PointMeasure seg = make_segment({-1.0, 0.0}, {1.0, 0.0}, 600);
    CZKernel K = make_riesz_kernel(2, 1.0);
    OperatorNormResult pn = operator_norm(K, seg, 0.05, 1e-11);
    double oracle = dense_operator_norm(K, seg, 0.05);
    double rel = std::abs(pn.value - oracle) / oracle;
    bool ok = sc.slope <= kGramSlopeCap && pn.converged && rel <= kNormRelErr;
    return std::make_pair(ok, "slope=" + num(sc.slope) + " norm=" + num(pn.value) +
                                  " svd_rel=" + num(rel));
  }});

  cs.push_back({"criterion-09-schedule", []() {
    double c6 = 2.0, c9 = std::sqrt(4.0 / kPi), alpha = 1.0, lg = 1.0;
    int d = 2;
    ScheduleParams sp = derive_schedule_params(0.2, c6, c9, alpha, d, lg);
    ScheduleResult sr = run_schedule(sp);
    KappaExponentFit fit = kappa_of_eps({0.4, 0.2, 0.1, 0.05}, c6, c9, alpha, d, lg);
    bool ok = sr.feasible && sr.conservation_ok && fit.exponent > 0.0 &&
              std::isfinite(fit.exponent);
    return std::make_pair(ok, "steps=" + std::to_string(sr.steps) + " eps_final=" +
                                  num(sr.eps_final) + " t_final=" + num(sr.t_final) +
                                  " exponent=" + num(fit.exponent));
  }});

  cs.push_back({"criterion-10-porosity", []() {
    PointMeasure cant = make_corner_cantor(2, 0.25, 4);
    CZKernel Kr = make_riesz_kernel(2, 1.0);
    BallQuery q{{0.5, 0.5}, 1.05};
    PorosityResult pr = porosity_scan(Kr, cant, q, 0.02, 0.1, default_reference(cant));
    bool ok1 = pr.status == "found" && pr.lambda_found >= kPorosityLo &&
               pr.lambda_found <= kPorosityHi;
    PointMeasure disc = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 128);
    CZKernel Kc = make_conj_cauchy_kernel();
    BallQuery q2{{0.0, 0.0}, 0.5};
    PorosityResult p2 = porosity_scan(Kc, disc, q2, 0.02, 0.2, default_reference(disc));
    bool ok2 = p2.status == "skipped";
    return std::make_pair(ok1 && ok2, "lambda=" + num(pr.lambda_found) + " cantor_avg=" +
                                          num(pr.field_avg) + " disc_status=" + p2.status +
                                          " disc_avg=" + num(p2.field_avg));
  }});

  cs.push_back({"criterion-11-divergence", []() {
    PointMeasure m256 = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 256);
    DivergenceResult r256 = divergence_identity(m256, 1.0, {0.0, 0.0}, 1.6, 256, 0.5);
    PointMeasure m128 = make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 128);
    DivergenceResult r128 = divergence_identity(m128, 1.0, {0.0, 0.0}, 1.6, 128, 0.5);
    double order = std::log2(r128.rel_l1 / r256.rel_l1);
    bool ok = !r256.b_fitted && r256.rel_l1 <= kDivRelL1 && order >= kDivOrderMin;
    return std::make_pair(ok, "rel256=" + num(r256.rel_l1) + " rel128=" + num(r128.rel_l1) +
                                  " order=" + num(order) + " b=" + num(r256.b));
  }});

  cs.push_back({"criterion-12-principal-value", []() {
    PointMeasure ann = make_annulus_lebesgue(2, {0.0, 0.0}, 1.0, 1.5, 256);
    CZKernel K = make_riesz_kernel(2, 1.5);
    BatchFieldEval u = field_from_measure(K, ann, 3.0 * ann.mesh_scale());
    PvResult pv = frac_laplacian_pv(u, 2, 2, 1.5, {0.0, 0.0}, 0.05, 6.0);
    bool ok = pv.value_norm <= kPvRel * pv.normalization;
    return std::make_pair(ok, "|pv|=" + num(pv.value_norm) + " norm=" + num(pv.normalization) +
                                  " ratio=" + num(pv.value_norm / pv.normalization));
  }});

  cs.push_back({"criterion-13-fourier-density", []() {
    FourierGResult fg = fourier_g(256, 4.0, 1.0, 1.0);
    bool ok = fg.rel_l2 <= kFourierRelL2 && fg.mean_abs <= 1e-6 * fg.g_max &&
              fg.decay_max <= kFourierDecayCap * fg.g_max;
    return std::make_pair(ok, "rel_l2=" + num(fg.rel_l2) + " mean=" + num(fg.mean_abs) +
                              " decay/peak=" +
                              num(fg.g_max > 0 ? fg.decay_max / fg.g_max : 0.0));
  }});

  cs.push_back({"criterion-14-truncation", []() {
    PointMeasure seg = make_segment({-256.0, 0.0}, {256.0, 0.0}, 51200);
    CZKernel K = make_riesz_kernel(2, 1.0);
    TruncationTable tt = truncation_convergence(K, seg, 2.0, {8.0, 16.0, 32.0, 64.0});
    return std::make_pair(tt.slope <= kDecaySlopeCap, "slope=" + num(tt.slope) + " sup8=" +
                                                          num(tt.sup_diff.front()) + " sup64=" +
                                                          num(tt.sup_diff.back()));
  }});

  cs.push_back({"criterion-15-treecode", [seed]() {
    Rng rng(seed + 1515);
    CZKernel K = make_riesz_kernel(2, 1.0);
    double worst = 0.0;
    PointMeasure suite_mus[4] = {make_segment({-50.0, 0.0}, {50.0, 0.0}, 10000),
                                 make_ball_lebesgue(2, {0.0, 0.0}, 1.0, 128),
                                 make_annulus_lebesgue(2, {0.0, 0.0}, 1.0, 1.5, 128),
                                 make_corner_cantor(2, 0.25, 5)};
    for (const PointMeasure& mu : suite_mus) {
      std::vector<double> targets = box_targets(mu, 200, rng);
      std::pair<double, double> ed = tree_err_and_den(K, mu, targets);
      if (ed.second > 0.0) worst = std::max(worst, ed.first / ed.second);
    }
    PointMeasure big = make_segment({-50.0, 0.0}, {50.0, 0.0}, 100000);
    std::vector<double> targets;
    for (int i = 0; i < 1000; ++i) {
      targets.push_back(rng.uniform(-50.0, 50.0));
      targets.push_back(rng.uniform(-5.0, 5.0));
    }
    ApplyParams tp, dp;
    tp.method = ApplyMethod::Clustered;
    tp.tree.rel_tol = 1e-6;
    dp.method = ApplyMethod::Dense;
    auto t0 = Clock::now();
    std::vector<double> b = apply_one(K, big, 0.0, targets, dp);
    double dense_ms = ms_since(t0);
    t0 = Clock::now();
    std::vector<double> a = apply_one(K, big, 0.0, targets, tp);
    double tree_ms = ms_since(t0);
    double err = 0.0, den = 0.0;
    for (std::size_t t = 0; t < 1000; ++t) {
      double e[2] = {a[2 * t] - b[2 * t], a[2 * t + 1] - b[2 * t + 1]};
      err = std::max(err, norm2(e, 2));
      den = std::max(den, norm2(&b[2 * t], 2));
    }
    worst = std::max(worst, err / den);
    double speedup = dense_ms / std::max(tree_ms, 1e-9);
    bool ok = worst <= kTreeRelErr && speedup >= kTreeSpeedup;
    return std::make_pair(ok, "worst_rel=" + num(worst) + " speedup=" + num(speedup) +
                                  " dense_ms=" + num(dense_ms) + " tree_ms=" + num(tree_ms));
  }});

  run_criteria(rep, cs);
  rep.threads = max_threads();
  return rep;
}

}  // namespace czlab
