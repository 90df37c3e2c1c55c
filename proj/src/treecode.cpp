#include "czlab/treecode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "czlab/common.hpp"
#include "czlab/parallel.hpp"

namespace czlab {

TreeKernel tree_kernel(const CZKernel& K, double delta) {
  require(delta >= 0.0, "tree_kernel: delta >= 0");
  TreeKernel tk;
  tk.d = K.d;
  tk.ncomp = K.ncomp;
  CZKernel kc = K;
  tk.eval = [kc, delta](const double* diff, double* out) {
    kernel_eval_inline(kc, diff, delta, out);
  };
  double omega_sup = K.omega_sup;
  double s = K.s;
  tk.magnitude = [omega_sup, s, delta](double m) {
    double t = std::max(delta, m);
    if (t <= 0.0) return std::numeric_limits<double>::infinity();
    return omega_sup / std::pow(t, s);
  };
  tk.seam = delta > 0.0 ? delta : -1.0;
  return tk;
}

namespace {

constexpr int kMaxCheb = 12;

// Chebyshev points of the second kind over [lo, hi], plus barycentric weights.
struct AxisGrid {
  int q = 1;
  double t[kMaxCheb];
  double lam[kMaxCheb];
};

void axis_grid(double lo, double hi, int q, AxisGrid& g) {
  double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  if (h <= 1e-13 * (1.0 + std::abs(c)) || q == 1) {
    g.q = 1;
    g.t[0] = c;
    g.lam[0] = 1.0;
    return;
  }
  g.q = q;
  for (int i = 0; i < q; ++i) {
    g.t[i] = c + h * std::cos(M_PI * i / (q - 1));
    g.lam[i] = (i % 2 == 0 ? 1.0 : -1.0) * ((i == 0 || i == q - 1) ? 0.5 : 1.0);
  }
}

// Barycentric Lagrange basis values at y.
void axis_basis(const AxisGrid& g, double y, double* out) {
  if (g.q == 1) {
    out[0] = 1.0;
    return;
  }
  double denom = 0.0;
  int hit = -1;
  for (int i = 0; i < g.q; ++i) {
    double diff = y - g.t[i];
    if (diff == 0.0) {
      hit = i;
      break;
    }
    out[i] = g.lam[i] / diff;
    denom += out[i];
  }
  if (hit >= 0) {
    for (int i = 0; i < g.q; ++i) out[i] = (i == hit) ? 1.0 : 0.0;
    return;
  }
  double inv = 1.0 / denom;
  for (int i = 0; i < g.q; ++i) out[i] *= inv;
}

struct NodeProxy {
  AxisGrid axis[3];
  int npts = 0;                 // product of axis counts
  std::vector<double> moments;  // npts entries: sum fw * tensor basis
};

struct Workspace {
  const TreeKernel* K;
  const SpatialIndex* index;
  const TreecodeParams* params;
  std::vector<double> fw;       // tree order
  std::vector<double> afw_pre;  // prefix sums of |fw| in tree order
  std::vector<NodeProxy> proxies;
  std::vector<std::uint8_t> ready;
  double wabs_total = 0.0;
};

double node_wabs(const Workspace& ws, const SpatialIndex::Node& nd) {
  return ws.afw_pre[nd.end] - ws.afw_pre[nd.begin];
}

void build_proxy(Workspace& ws, std::size_t ni) {
  const SpatialIndex::Node& nd = ws.index->nodes()[ni];
  NodeProxy& px = ws.proxies[ni];
  int d = ws.K->d;
  int q = std::min(ws.params->cheb, kMaxCheb);
  px.npts = 1;
  for (int a = 0; a < d; ++a) {
    axis_grid(nd.box_min[a], nd.box_max[a], q, px.axis[a]);
    px.npts *= px.axis[a].q;
  }
  px.moments.assign(static_cast<std::size_t>(px.npts), 0.0);
  double basis[3][kMaxCheb];
  for (std::size_t j = nd.begin; j < nd.end; ++j) {
    double f = ws.fw[j];
    if (f == 0.0) continue;
    const double* y = ws.index->point(j);
    for (int a = 0; a < d; ++a) axis_basis(px.axis[a], y[a], basis[a]);
    // Tensor accumulation, axis 0 fastest.
    int idx = 0;
    if (d == 1) {
      for (int i0 = 0; i0 < px.axis[0].q; ++i0) px.moments[i0] += f * basis[0][i0];
    } else if (d == 2) {
      for (int i1 = 0; i1 < px.axis[1].q; ++i1) {
        double b1 = f * basis[1][i1];
        for (int i0 = 0; i0 < px.axis[0].q; ++i0) px.moments[idx++] += b1 * basis[0][i0];
      }
    } else {
      for (int i2 = 0; i2 < px.axis[2].q; ++i2)
        for (int i1 = 0; i1 < px.axis[1].q; ++i1) {
          double b12 = f * basis[2][i2] * basis[1][i1];
          for (int i0 = 0; i0 < px.axis[0].q; ++i0) px.moments[idx++] += b12 * basis[0][i0];
        }
    }
  }
  ws.ready[ni] = 1;
}

// Upper estimate of sum_j |K(x - y_j)| |fw_j| used to size the error budget.
double abs_field_estimate(const Workspace& ws, const double* x) {
  const auto& nodes = ws.index->nodes();
  double acc = 0.0;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t ni = stack.back();
    stack.pop_back();
    const SpatialIndex::Node& nd = nodes[ni];
    double w = node_wabs(ws, nd);
    if (w == 0.0) continue;
    double D = dist(x, nd.center.data(), ws.K->d);
    double m = D - nd.radius;
    // Compactly supported kernels: a cluster entirely past the support radius
    // contributes exactly zero.
    if (m > 0.0 && ws.K->magnitude(m) == 0.0) continue;
    if (m > 0.0 && nd.radius <= 0.7 * D) {
      acc += w * ws.K->magnitude(m);
      continue;
    }
    if (nd.leaf()) {
      for (std::size_t j = nd.begin; j < nd.end; ++j) {
        double fa = std::abs(ws.fw[j]);
        if (fa == 0.0) continue;
        double r = dist(x, ws.index->point(j), ws.K->d);
        if (r > 0.0 || ws.K->seam > 0.0) acc += fa * ws.K->magnitude(r);
      }
    } else {
      stack.push_back(nd.child[0]);
      stack.push_back(nd.child[1]);
    }
  }
  return acc;
}

void eval_target(Workspace& ws, const double* x, double* out) {
  const auto& nodes = ws.index->nodes();
  const TreeKernel& K = *ws.K;
  int d = K.d, nc = K.ncomp;
  for (int c = 0; c < nc; ++c) out[c] = 0.0;
  if (ws.wabs_total == 0.0) return;

  double tol_abs = ws.params->rel_tol * abs_field_estimate(ws, x);
  // Acceptance threshold on magnitude(0.6 m) * eta^q, independent of cluster mass.
  double budget_rate = tol_abs / (ws.params->model_constant * ws.wabs_total);

  double kv[8];
  double diff[3];
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t ni = stack.back();
    stack.pop_back();
    const SpatialIndex::Node& nd = nodes[ni];
    if (node_wabs(ws, nd) == 0.0) continue;
    double D = dist(x, nd.center.data(), d);
    double rho = nd.radius;
    double m = D - rho;
    if (m > 0.0 && K.magnitude(m) == 0.0) continue;
    bool open = nd.leaf();
    if (!open) {
      if (m <= 0.0 || rho > ws.params->theta * D) {
        open = true;
      } else if (K.seam > 0.0 && m < K.seam && D + rho > K.seam) {
        open = true;  // cluster straddles the truncation seam
      } else {
        double eta = rho / (D + std::sqrt(std::max(D * D - rho * rho, 0.0)));
        int q = std::min(ws.params->cheb, kMaxCheb);
        double err_rate = K.magnitude(0.6 * m) * std::pow(eta, q);
        if (err_rate > budget_rate) open = true;
      }
    }
    if (!open) {
      if (!ws.ready[ni]) build_proxy(ws, ni);
      const NodeProxy& px = ws.proxies[ni];
      int q0 = px.axis[0].q, q1 = d >= 2 ? px.axis[1].q : 1, q2 = d >= 3 ? px.axis[2].q : 1;
      int idx = 0;
      for (int i2 = 0; i2 < q2; ++i2)
        for (int i1 = 0; i1 < q1; ++i1)
          for (int i0 = 0; i0 < q0; ++i0, ++idx) {
            double mom = px.moments[idx];
            if (mom == 0.0) continue;
            diff[0] = x[0] - px.axis[0].t[i0];
            if (d >= 2) diff[1] = x[1] - px.axis[1].t[i1];
            if (d >= 3) diff[2] = x[2] - px.axis[2].t[i2];
            K.eval(diff, kv);
            for (int c = 0; c < nc; ++c) out[c] += kv[c] * mom;
          }
      continue;
    }
    if (nd.leaf()) {
      for (std::size_t j = nd.begin; j < nd.end; ++j) {
        double f = ws.fw[j];
        if (f == 0.0) continue;
        const double* y = ws.index->point(j);
        for (int a = 0; a < d; ++a) diff[a] = x[a] - y[a];
        K.eval(diff, kv);
        for (int c = 0; c < nc; ++c) out[c] += kv[c] * f;
      }
    } else {
      stack.push_back(nd.child[0]);
      stack.push_back(nd.child[1]);
    }
  }
}

}  // namespace

std::vector<double> treecode_apply(const TreeKernel& K, const SpatialIndex& index,
                                   const std::vector<double>& f,
                                   const std::vector<double>& targets,
                                   const TreecodeParams& params) {
  require(K.d == index.dim(), "treecode_apply: kernel/index dimension mismatch");
  require(f.size() == index.size(), "treecode_apply: f size mismatch");
  require(targets.size() % static_cast<std::size_t>(K.d) == 0, "treecode_apply: targets size");
  require(K.ncomp <= 8, "treecode_apply: ncomp <= 8");
  std::size_t nt = targets.size() / K.d;
  std::vector<double> out(nt * K.ncomp, 0.0);
  if (index.size() == 0 || nt == 0) return out;

  Workspace ws;
  ws.K = &K;
  ws.index = &index;
  ws.params = &params;
  ws.fw.resize(index.size());
  ws.afw_pre.assign(index.size() + 1, 0.0);
  for (std::size_t j = 0; j < index.size(); ++j) {
    ws.fw[j] = f[index.perm()[j]] * index.point_weight(j);
    ws.afw_pre[j + 1] = ws.afw_pre[j] + std::abs(ws.fw[j]);
  }
  ws.wabs_total = ws.afw_pre[index.size()];
  ws.proxies.resize(index.nodes().size());
  ws.ready.assign(index.nodes().size(), 0);

  // Proxy construction is memoized lazily, so the traversal itself is kept
  // sequential; the per-target loop stays deterministic either way.
  for (std::size_t t = 0; t < nt; ++t)
    eval_target(ws, &targets[t * K.d], &out[t * K.ncomp]);
  return out;
}

std::vector<double> dense_apply(const TreeKernel& K, const SpatialIndex& index,
                                const std::vector<double>& f,
                                const std::vector<double>& targets) {
  require(K.d == index.dim(), "dense_apply: kernel/index dimension mismatch");
  require(f.size() == index.size(), "dense_apply: f size mismatch");
  require(K.ncomp <= 8, "dense_apply: ncomp <= 8");
  std::size_t nt = targets.size() / K.d;
  std::vector<double> out(nt * K.ncomp, 0.0);
  std::vector<double> fw(index.size());
  for (std::size_t j = 0; j < index.size(); ++j) fw[j] = f[index.perm()[j]] * index.point_weight(j);
  int d = K.d, nc = K.ncomp;
  parallel_for(nt, [&](std::size_t b, std::size_t e) {
    double kv[8];
    double diff[3];
    for (std::size_t t = b; t < e; ++t) {
      const double* x = &targets[t * d];
      double* o = &out[t * nc];
      for (std::size_t j = 0; j < index.size(); ++j) {
        double fv = fw[j];
        if (fv == 0.0) continue;
        const double* y = index.point(j);
        for (int a = 0; a < d; ++a) diff[a] = x[a] - y[a];
        K.eval(diff, kv);
        for (int c = 0; c < nc; ++c) o[c] += kv[c] * fv;
      }
    }
  });
  return out;
}

}  // namespace czlab
