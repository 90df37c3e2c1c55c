#include "czlab/reflectionless.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "czlab/common.hpp"

namespace czlab {

double CutoffBall::eval(const double* y, int d) const {
  double t = dist(y, center.data(), d) / radius;
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  return 2.0 - t;
}

namespace {

// Gathers the atoms where the cutoff is strictly below 1, with their deficit.
struct FarSet {
  std::vector<std::size_t> idx;
  std::vector<double> deficit;  // (1 - phi) at those atoms
};

FarSet far_atoms(const PointMeasure& mu, const std::vector<double>& phi) {
  FarSet fs;
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (phi[j] < 1.0) {
      fs.idx.push_back(j);
      fs.deficit.push_back(1.0 - phi[j]);
    }
  return fs;
}

std::vector<double> cutoff_values(const PointMeasure& mu, const CutoffBall& B) {
  std::vector<double> phi(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) phi[j] = B.eval(mu.atom(j), mu.dim());
  return phi;
}

}  // namespace

PairingResult pairing_T1(const CZKernel& K, const PointMeasure& mu, const TestFunction& psi,
                         double cutoff_scale, const ApplyParams& ap) {
  require(cutoff_scale >= 2.0, "pairing_T1: cutoff must cover twice the support ball");
  require(K.d == mu.dim(), "pairing_T1: dimension mismatch");
  PairingResult out;
  out.value.assign(K.ncomp, 0.0);
  if (mu.size() == 0) return out;

  CutoffBall B{psi.support_center(), cutoff_scale * psi.support_radius()};
  std::vector<double> phi = cutoff_values(mu, B);
  FarSet far = far_atoms(mu, phi);

  std::vector<std::size_t> supp =
      mu.index().ball_points(psi.support_center().data(), psi.support_radius());
  std::vector<double> psi_vals(supp.size());
  std::vector<double> supp_pts(supp.size() * static_cast<std::size_t>(mu.dim()));
  double psi_l1 = 0.0, psi_mass = 0.0;
  for (std::size_t a = 0; a < supp.size(); ++a) {
    psi_vals[a] = psi.eval(mu.atom(supp[a]), mu.dim());
    psi_l1 += std::abs(psi_vals[a]) * mu.weight(supp[a]);
    psi_mass += psi_vals[a] * mu.weight(supp[a]);
    for (int k = 0; k < mu.dim(); ++k)
      supp_pts[a * mu.dim() + k] = mu.atom(supp[a])[k];
  }
  out.psi_l1 = psi_l1;
  if (psi_l1 == 0.0) return out;

  // Near part: <T_0(phi), psi>_mu.
  std::vector<double> u = apply_truncated(K, mu, 0.0, phi, supp_pts, ap);
  for (std::size_t a = 0; a < supp.size(); ++a) {
    double pw = psi_vals[a] * mu.weight(supp[a]);
    for (int c = 0; c < K.ncomp; ++c) out.value[c] += pw * u[a * K.ncomp + c];
  }

  // Far part via the field V(t) = sum_{far} (1 - phi(y)) w_y K(t - y):
  // <V, psi>_mu - (integral of psi) V(z).
  if (!far.idx.empty()) {
    std::vector<double> fdef(mu.size(), 0.0);
    for (std::size_t a = 0; a < far.idx.size(); ++a) fdef[far.idx[a]] = far.deficit[a];
    std::vector<double> vt(supp_pts);
    vt.insert(vt.end(), psi.support_center().begin(), psi.support_center().end());
    std::vector<double> V = apply_truncated(K, mu, 0.0, fdef, vt, ap);
    for (std::size_t a = 0; a < supp.size(); ++a) {
      double pw = psi_vals[a] * mu.weight(supp[a]);
      for (int c = 0; c < K.ncomp; ++c) out.value[c] += pw * V[a * K.ncomp + c];
    }
    const double* Vz = &V[supp.size() * K.ncomp];
    for (int c = 0; c < K.ncomp; ++c) out.value[c] -= psi_mass * Vz[c];
  }

  out.raw = norm2(out.value.data(), K.ncomp);
  out.rel = out.raw / psi_l1;
  return out;
}

DefectResult defect(const CZKernel& K, const PointMeasure& mu, const std::vector<double>& center,
                    double R, const FamilyParams& fp, const ApplyParams& ap) {
  require(K.d == mu.dim(), "defect: dimension mismatch");
  DefectResult out;
  std::vector<TestFunction> family = standard_family(mu, center, R, fp);
  out.members = family.size();
  if (family.empty()) return out;

  // One cutoff for the whole family: 1 on B(center, 2R) covers twice every
  // member's support ball.
  CutoffBall B{center, 2.0 * R};
  std::vector<double> phi = cutoff_values(mu, B);
  FarSet far = far_atoms(mu, phi);

  std::vector<std::size_t> supp = mu.index().ball_points(center.data(), R);
  std::vector<double> supp_pts(supp.size() * static_cast<std::size_t>(mu.dim()));
  for (std::size_t a = 0; a < supp.size(); ++a)
    for (int k = 0; k < mu.dim(); ++k) supp_pts[a * mu.dim() + k] = mu.atom(supp[a])[k];

  std::vector<double> u = apply_truncated(K, mu, 0.0, phi, supp_pts, ap);

  std::vector<double> V;
  std::vector<double> member_centers;
  if (!far.idx.empty()) {
    std::vector<double> fdef(mu.size(), 0.0);
    for (std::size_t a = 0; a < far.idx.size(); ++a) fdef[far.idx[a]] = far.deficit[a];
    std::vector<double> vt(supp_pts);
    for (const TestFunction& psi : family)
      vt.insert(vt.end(), psi.support_center().begin(), psi.support_center().end());
    V = apply_truncated(K, mu, 0.0, fdef, vt, ap);
  }

  // Map atom index -> slot in supp for fast member gathering.
  std::vector<std::size_t> slot(mu.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t a = 0; a < supp.size(); ++a) slot[supp[a]] = a;

  out.member_rel.resize(family.size());
  out.member_raw.resize(family.size());
  for (std::size_t m = 0; m < family.size(); ++m) {
    const TestFunction& psi = family[m];
    std::vector<double> val(K.ncomp, 0.0);
    double psi_l1 = 0.0, psi_mass = 0.0;
    for (std::size_t j :
         mu.index().ball_points(psi.support_center().data(), psi.support_radius())) {
      double pv = psi.eval(mu.atom(j), mu.dim());
      if (pv == 0.0) continue;
      double pw = pv * mu.weight(j);
      psi_l1 += std::abs(pv) * mu.weight(j);
      psi_mass += pw;
      std::size_t a = slot[j];
      for (int c = 0; c < K.ncomp; ++c) {
        val[c] += pw * u[a * K.ncomp + c];
        if (!V.empty()) val[c] += pw * V[a * K.ncomp + c];
      }
    }
    if (!V.empty()) {
      const double* Vz = &V[(supp.size() + m) * K.ncomp];
      for (int c = 0; c < K.ncomp; ++c) val[c] -= psi_mass * Vz[c];
    }
    double raw = norm2(val.data(), K.ncomp);
    out.member_raw[m] = raw;
    out.member_rel[m] = psi_l1 > 0.0 ? raw / psi_l1 : 0.0;
    if (out.member_rel[m] > out.max_rel) {
      out.max_rel = out.member_rel[m];
      out.max_raw = raw;
      out.argmax = m;
    }
  }
  return out;
}

ReferenceBall default_reference(const PointMeasure& mu) {
  require(mu.size() > 0, "default_reference: empty measure");
  ReferenceBall ref;
  ref.center = mu.barycenter();
  double r = std::max(mu.diameter_bound(), mu.mesh_scale());
  double half = 0.5 * mu.total_mass();
  // Shrink while the ball keeps half the mass; one doubling back up ensures
  // the tent (which vanishes at the rim) still sees mass.
  for (int k = 0; k < 60; ++k) {
    if (ball_mass(mu, ref.center.data(), 0.5 * r) < half) break;
    r *= 0.5;
  }
  ref.radius = 2.0 * r;
  Bump tent{ref.center, ref.radius, 1.0, BumpProfile::Tent};
  require(bump_mass(tent, mu) > 0.0, "default_reference: reference tent sees no mass");
  return ref;
}

std::vector<double> ttilde_one(const CZKernel& K, const PointMeasure& mu,
                               const std::vector<double>& deltas,
                               const std::vector<double>& targets, const ReferenceBall& ref,
                               const TtildeOptions& opts, TtildeDetail* detail) {
  require(K.d == mu.dim(), "ttilde_one: dimension mismatch");
  require(!deltas.empty(), "ttilde_one: empty delta grid");
  require(opts.cutoff_scale >= 1.0, "ttilde_one: cutoff must cover the bounding ball");
  int d = K.d, nc = K.ncomp;
  std::size_t nt = targets.size() / d;
  std::vector<double> out(deltas.size() * nt * nc, 0.0);
  if (mu.size() == 0 || nt == 0) return out;
  for (double dl : deltas) require(dl >= 0.0, "ttilde_one: delta >= 0");

  // Bounding ball of targets and reference ball.
  std::vector<double> c(d, 0.0);
  std::vector<double> lo(ref.center), hi(ref.center);
  for (int k = 0; k < d; ++k) {
    lo[k] -= ref.radius;
    hi[k] += ref.radius;
  }
  for (std::size_t t = 0; t < nt; ++t)
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], targets[t * d + k]);
      hi[k] = std::max(hi[k], targets[t * d + k]);
    }
  for (int k = 0; k < d; ++k) c[k] = 0.5 * (lo[k] + hi[k]);
  double rad = dist(ref.center.data(), c.data(), d) + ref.radius;
  for (std::size_t t = 0; t < nt; ++t) rad = std::max(rad, dist(&targets[t * d], c.data(), d));
  rad = std::max(rad, mu.mesh_scale());
  CutoffBall B{c, opts.cutoff_scale * rad};

  std::vector<double> phi = cutoff_values(mu, B);
  FarSet far = far_atoms(mu, phi);

  // Normalized reference density.
  Bump tent{ref.center, ref.radius, 1.0, BumpProfile::Tent};
  std::vector<double> eta(mu.size(), 0.0);
  double norm = 0.0;
  std::vector<std::size_t> refsel = mu.index().ball_points(ref.center.data(), ref.radius);
  for (std::size_t j : refsel) {
    eta[j] = tent.eval(mu.atom(j), d);
    norm += eta[j] * mu.weight(j);
  }
  require(norm > 0.0, "ttilde_one: reference ball carries no mass");
  for (std::size_t j : refsel) eta[j] /= norm;

  // Mean term <eta, T_0(phi)>_mu, shared across deltas.
  std::vector<double> ref_pts(refsel.size() * static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < refsel.size(); ++a)
    for (int k = 0; k < d; ++k) ref_pts[a * d + k] = mu.atom(refsel[a])[k];
  std::vector<double> u0 = apply_truncated(K, mu, 0.0, phi, ref_pts, opts.apply);
  std::vector<double> mean_term(nc, 0.0);
  for (std::size_t a = 0; a < refsel.size(); ++a) {
    double ew = eta[refsel[a]] * mu.weight(refsel[a]);
    for (int cmp = 0; cmp < nc; ++cmp) mean_term[cmp] += ew * u0[a * nc + cmp];
  }

  // kappa at far atoms, also delta independent.
  std::vector<double> kappa;
  std::vector<double> far_pts;
  if (!far.idx.empty()) {
    far_pts.resize(far.idx.size() * static_cast<std::size_t>(d));
    for (std::size_t a = 0; a < far.idx.size(); ++a)
      for (int k = 0; k < d; ++k) far_pts[a * d + k] = mu.atom(far.idx[a])[k];
    kappa = apply_truncated(K, mu, 0.0, eta, far_pts, opts.apply);
  }

  if (detail != nullptr) {
    detail->phi = phi;
    detail->eta = eta;
    detail->mean_term = mean_term;
    detail->bounding = B;
  }

  double kv[8];
  double diff[3];
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    std::vector<double> t1 = apply_truncated(K, mu, deltas[di], phi, targets, opts.apply);
    for (std::size_t t = 0; t < nt; ++t) {
      double* o = &out[(di * nt + t) * nc];
      const double* x = &targets[t * d];
      for (int cmp = 0; cmp < nc; ++cmp) o[cmp] = t1[t * nc + cmp] - mean_term[cmp];
      for (std::size_t a = 0; a < far.idx.size(); ++a) {
        for (int k = 0; k < d; ++k) diff[k] = x[k] - far_pts[a * d + k];
        kernel_eval_inline(K, diff, deltas[di], kv);
        double w = far.deficit[a] * mu.weight(far.idx[a]);
        for (int cmp = 0; cmp < nc; ++cmp) o[cmp] += w * (kv[cmp] - kappa[a * nc + cmp]);
      }
    }
  }
  return out;
}

CotlarResult cotlar_sup(const CZKernel& K, const PointMeasure& mu, const double* x,
                        const std::vector<double>& deltas, const ReferenceBall& ref,
                        const TtildeOptions& opts) {
  std::vector<double> targets(x, x + K.d);
  std::vector<double> vals = ttilde_one(K, mu, deltas, targets, ref, opts);
  CotlarResult out;
  out.per_delta.resize(deltas.size());
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    out.per_delta[di] = norm2(&vals[di * K.ncomp], K.ncomp);
    if (out.per_delta[di] > out.sup) {
      out.sup = out.per_delta[di];
      out.argmax_delta = deltas[di];
    }
  }
  return out;
}

std::vector<HolderPair> make_holder_pairs(const PointMeasure& mu, const std::vector<double>& lo,
                                          const std::vector<double>& hi, double delta,
                                          std::size_t n, std::uint64_t seed) {
  require(delta > 0.0, "make_holder_pairs: delta > 0");
  require(lo.size() == hi.size() && static_cast<int>(lo.size()) == mu.dim(),
          "make_holder_pairs: box dims");
  int d = mu.dim();
  Rng rng(seed);
  std::vector<HolderPair> pairs;
  std::vector<double> dir(d);
  int guard = 0;
  while (pairs.size() < n && guard < 200000) {
    ++guard;
    HolderPair p;
    p.x.resize(d);
    for (int k = 0; k < d; ++k) p.x[k] = rng.uniform(lo[k], hi[k]);
    // The base must see mass at scale delta, otherwise the potential there
    // says nothing about the measure.
    if (ball_mass(mu, p.x.data(), 2.0 * delta) <= 0.0) continue;
    rng.unit_vector(d, dir.data());
    double sep = rng.log_uniform(delta / 8.0, 8.0 * delta);
    p.xprime = p.x;
    for (int k = 0; k < d; ++k) p.xprime[k] += sep * dir[k];
    pairs.push_back(std::move(p));
  }
  require(pairs.size() == n, "make_holder_pairs: box sees too little mass");
  return pairs;
}

HolderResult holder_check(const CZKernel& K, const PointMeasure& mu, double delta,
                          const std::vector<HolderPair>& pairs, const ReferenceBall& ref,
                          const TtildeOptions& opts) {
  require(delta > 0.0, "holder_check: delta > 0");
  int d = K.d, nc = K.ncomp;
  std::vector<double> targets;
  targets.reserve(pairs.size() * 2 * d);
  for (const HolderPair& p : pairs) {
    targets.insert(targets.end(), p.x.begin(), p.x.end());
    targets.insert(targets.end(), p.xprime.begin(), p.xprime.end());
  }
  std::vector<double> vals = ttilde_one(K, mu, {delta}, targets, ref, opts);
  HolderResult out;
  out.ratios.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    double gap2 = 0.0;
    for (int c = 0; c < nc; ++c)
      gap2 += sqr(vals[(2 * i) * nc + c] - vals[(2 * i + 1) * nc + c]);
    double t = dist(pairs[i].x.data(), pairs[i].xprime.data(), d);
    double modulus =
        std::pow(t / delta, K.alpha) * std::pow(std::max(1.0, t / delta), 1.0 - K.alpha);
    out.ratios[i] = modulus > 0.0 ? std::sqrt(gap2) / modulus : 0.0;
    out.c6 = std::max(out.c6, out.ratios[i]);
  }
  return out;
}

TruncationDecay truncation_decay(const CZKernel& K, const PointMeasure& mu,
                                 const TestFunction& psi, const std::vector<double>& rprimes,
                                 const ApplyParams& ap) {
  require(rprimes.size() >= 2, "truncation_decay: need >= 2 radii");
  TruncationDecay out;
  out.rprimes = rprimes;

  // Reference: cutoff covering the entire support, so the far set is empty
  // and the pairing equals <T_0(1), psi>_mu exactly.
  double cover = 0.0;
  int d = mu.dim();
  for (std::size_t j = 0; j < mu.size(); ++j)
    cover = std::max(cover, dist(mu.atom(j), psi.support_center().data(), d));
  double full_scale = std::max(2.0, 1.05 * cover / std::max(psi.support_radius(), 1e-300));
  PairingResult full = pairing_T1(K, mu, psi, full_scale, ap);
  out.reference_raw = full.raw;

  std::vector<std::size_t> supp =
      mu.index().ball_points(psi.support_center().data(), psi.support_radius());
  std::vector<double> supp_pts(supp.size() * static_cast<std::size_t>(d));
  std::vector<double> psi_w(supp.size());
  for (std::size_t a = 0; a < supp.size(); ++a) {
    psi_w[a] = psi.eval(mu.atom(supp[a]), d) * mu.weight(supp[a]);
    for (int k = 0; k < d; ++k) supp_pts[a * d + k] = mu.atom(supp[a])[k];
  }

  std::vector<double> lx, ly;
  for (double rp : rprimes) {
    require(rp >= psi.support_radius(), "truncation_decay: R' below the support radius");
    CutoffBall B{psi.support_center(), rp};
    std::vector<double> phi = cutoff_values(mu, B);
    std::vector<double> u = apply_truncated(K, mu, 0.0, phi, supp_pts, ap);
    std::vector<double> val(K.ncomp, 0.0);
    double abs_acc = 0.0;
    for (std::size_t a = 0; a < supp.size(); ++a) {
      for (int c = 0; c < K.ncomp; ++c) val[c] += psi_w[a] * u[a * K.ncomp + c];
      abs_acc += std::abs(psi_w[a]) * norm2(&u[a * K.ncomp], K.ncomp);
    }
    out.abs_scale = std::max(out.abs_scale, abs_acc);
    double gap2 = 0.0;
    for (int c = 0; c < K.ncomp; ++c) gap2 += sqr(val[c] - full.value[c]);
    out.gaps.push_back(std::sqrt(gap2));
    if (out.gaps.back() > 0.0) {
      lx.push_back(std::log(rp));
      ly.push_back(std::log(out.gaps.back()));
    }
  }
  out.slope = lx.size() >= 2 ? fit_slope(lx, ly) : 0.0;
  double floor = 1e-11 * out.abs_scale;
  for (double g : out.gaps) out.resolvable = out.resolvable || g > floor;
  return out;
}

}  // namespace czlab
