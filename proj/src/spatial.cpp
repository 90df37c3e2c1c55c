#include "czlab/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "czlab/common.hpp"

namespace czlab {

SpatialIndex::SpatialIndex(int dim, const std::vector<double>& points_flat,
                           const std::vector<double>& weights, int leaf_size)
    : dim_(dim), n_(weights.size()) {
  require(dim >= 1, "SpatialIndex: dim >= 1");
  require(points_flat.size() == n_ * static_cast<std::size_t>(dim),
          "SpatialIndex: points/weights size mismatch");
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  pts_ = points_flat;
  wts_ = weights;
  if (n_ == 0) return;
  nodes_.reserve(2 * (n_ / std::max(1, leaf_size / 2) + 2));
  nodes_.emplace_back();
  build(0, 0, n_, std::max(1, leaf_size));
}

void SpatialIndex::build(std::size_t node, std::size_t begin, std::size_t end, int leaf_size) {
  Node& nd0 = nodes_[node];
  nd0.begin = begin;
  nd0.end = end;
  nd0.box_min.assign(dim_, std::numeric_limits<double>::infinity());
  nd0.box_max.assign(dim_, -std::numeric_limits<double>::infinity());
  double w = 0.0, ws = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double* p = &pts_[i * dim_];
    for (int k = 0; k < dim_; ++k) {
      nd0.box_min[k] = std::min(nd0.box_min[k], p[k]);
      nd0.box_max[k] = std::max(nd0.box_max[k], p[k]);
    }
    w += std::abs(wts_[i]);
    ws += wts_[i];
  }
  nd0.weight = w;
  nd0.weight_signed = ws;
  nd0.center.resize(dim_);
  double diag2 = 0.0;
  for (int k = 0; k < dim_; ++k) {
    nd0.center[k] = 0.5 * (nd0.box_min[k] + nd0.box_max[k]);
    diag2 += sqr(nd0.box_max[k] - nd0.box_min[k]);
  }
  nd0.radius = 0.5 * std::sqrt(diag2);

  if (end - begin <= static_cast<std::size_t>(leaf_size)) return;

  int axis = 0;
  double widest = -1.0;
  for (int k = 0; k < dim_; ++k) {
    double w_k = nd0.box_max[k] - nd0.box_min[k];
    if (w_k > widest) {
      widest = w_k;
      axis = k;
    }
  }
  if (widest <= 0.0) return;  // all points coincide

  std::size_t mid = begin + (end - begin) / 2;
  // Sort index triples (coordinate, perm, point row) via a scratch permutation.
  std::vector<std::size_t> order(end - begin);
  std::iota(order.begin(), order.end(), begin);
  std::nth_element(order.begin(), order.begin() + (mid - begin), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     double ca = pts_[a * dim_ + axis], cb = pts_[b * dim_ + axis];
                     if (ca != cb) return ca < cb;
                     return perm_[a] < perm_[b];
                   });
  // Apply the permutation to the range.
  std::vector<double> tmp_pts((end - begin) * dim_);
  std::vector<double> tmp_w(end - begin);
  std::vector<std::size_t> tmp_perm(end - begin);
  for (std::size_t j = 0; j < order.size(); ++j) {
    std::size_t src = order[j];
    for (int k = 0; k < dim_; ++k) tmp_pts[j * dim_ + k] = pts_[src * dim_ + k];
    tmp_w[j] = wts_[src];
    tmp_perm[j] = perm_[src];
  }
  std::copy(tmp_pts.begin(), tmp_pts.end(), pts_.begin() + begin * dim_);
  std::copy(tmp_w.begin(), tmp_w.end(), wts_.begin() + begin);
  std::copy(tmp_perm.begin(), tmp_perm.end(), perm_.begin() + begin);

  std::size_t left = nodes_.size();
  nodes_.emplace_back();
  std::size_t right = nodes_.size();
  nodes_.emplace_back();
  nodes_[node].child[0] = static_cast<int>(left);
  nodes_[node].child[1] = static_cast<int>(right);
  build(left, begin, mid, leaf_size);
  build(right, mid, end, leaf_size);
}

double SpatialIndex::box_dist2(const Node& nd, const double* x) const {
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double lo = nd.box_min[k] - x[k];
    double hi = x[k] - nd.box_max[k];
    double m = std::max({lo, hi, 0.0});
    s += m * m;
  }
  return s;
}

double SpatialIndex::box_far_dist2(const Node& nd, const double* x) const {
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double m = std::max(std::abs(x[k] - nd.box_min[k]), std::abs(x[k] - nd.box_max[k]));
    s += m * m;
  }
  return s;
}

double SpatialIndex::ball_weight(const double* x, double r) const {
  if (n_ == 0 || r < 0.0) return 0.0;
  double r2 = r * r;
  double total = 0.0;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t ni = stack.back();
    stack.pop_back();
    const Node& nd = nodes_[ni];
    if (box_dist2(nd, x) > r2) continue;
    if (box_far_dist2(nd, x) <= r2) {
      total += nd.weight_signed;
      continue;
    }
    if (nd.leaf()) {
      for (std::size_t i = nd.begin; i < nd.end; ++i)
        if (dist2(&pts_[i * dim_], x, dim_) <= r2) total += wts_[i];
    } else {
      stack.push_back(nd.child[0]);
      stack.push_back(nd.child[1]);
    }
  }
  return total;
}

std::size_t SpatialIndex::ball_count(const double* x, double r) const {
  if (n_ == 0 || r < 0.0) return 0;
  double r2 = r * r;
  std::size_t total = 0;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t ni = stack.back();
    stack.pop_back();
    const Node& nd = nodes_[ni];
    if (box_dist2(nd, x) > r2) continue;
    if (box_far_dist2(nd, x) <= r2) {
      total += nd.end - nd.begin;
      continue;
    }
    if (nd.leaf()) {
      for (std::size_t i = nd.begin; i < nd.end; ++i)
        if (dist2(&pts_[i * dim_], x, dim_) <= r2) ++total;
    } else {
      stack.push_back(nd.child[0]);
      stack.push_back(nd.child[1]);
    }
  }
  return total;
}

std::vector<std::size_t> SpatialIndex::ball_points(const double* x, double r) const {
  std::vector<std::size_t> out;
  if (n_ == 0 || r < 0.0) return out;
  double r2 = r * r;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t ni = stack.back();
    stack.pop_back();
    const Node& nd = nodes_[ni];
    if (box_dist2(nd, x) > r2) continue;
    if (box_far_dist2(nd, x) <= r2) {
      for (std::size_t i = nd.begin; i < nd.end; ++i) out.push_back(perm_[i]);
      continue;
    }
    if (nd.leaf()) {
      for (std::size_t i = nd.begin; i < nd.end; ++i)
        if (dist2(&pts_[i * dim_], x, dim_) <= r2) out.push_back(perm_[i]);
    } else {
      stack.push_back(nd.child[0]);
      stack.push_back(nd.child[1]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double SpatialIndex::nearest_distance(const double* x) const {
  if (n_ == 0) return std::numeric_limits<double>::infinity();
  double best2 = std::numeric_limits<double>::infinity();
  // Depth-first with near-child ordering.
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t ni = stack.back();
    stack.pop_back();
    const Node& nd = nodes_[ni];
    if (box_dist2(nd, x) >= best2) continue;
    if (nd.leaf()) {
      for (std::size_t i = nd.begin; i < nd.end; ++i)
        best2 = std::min(best2, dist2(&pts_[i * dim_], x, dim_));
    } else {
      std::size_t c0 = nd.child[0], c1 = nd.child[1];
      double d0 = box_dist2(nodes_[c0], x), d1 = box_dist2(nodes_[c1], x);
      // Push the farther child first so the nearer one is explored next.
      if (d0 < d1) {
        stack.push_back(c1);
        stack.push_back(c0);
      } else {
        stack.push_back(c0);
        stack.push_back(c1);
      }
    }
  }
  return std::sqrt(best2);
}

}  // namespace czlab
