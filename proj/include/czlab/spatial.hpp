#pragma once

#include <cstddef>
#include <vector>

namespace czlab {

// Median-split bounding-box tree over a fixed point set.  Serves ball queries
// for measures and the cluster hierarchy for the treecode.  Nodes hold their
// aggregate weight so fully-contained subtrees resolve in O(1).
class SpatialIndex {
 public:
  struct Node {
    std::vector<double> box_min;
    std::vector<double> box_max;
    std::size_t begin = 0;  // range into the permuted order
    std::size_t end = 0;
    int child[2] = {-1, -1};
    double weight = 0.0;          // sum of |w| over the range
    double weight_signed = 0.0;   // plain sum of w over the range
    std::vector<double> center;   // box center
    double radius = 0.0;          // half box diagonal
    bool leaf() const { return child[0] < 0; }
  };

  SpatialIndex(int dim, const std::vector<double>& points_flat,
               const std::vector<double>& weights, int leaf_size = 40);

  int dim() const { return dim_; }
  std::size_t size() const { return n_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  // perm()[k] = original index of the k-th point in tree order.
  const std::vector<std::size_t>& perm() const { return perm_; }
  const double* point(std::size_t tree_pos) const { return &pts_[tree_pos * dim_]; }
  double point_weight(std::size_t tree_pos) const { return wts_[tree_pos]; }

  // Sum of weights over the closed ball |y - x| <= r.
  double ball_weight(const double* x, double r) const;
  // Number of points in the closed ball.
  std::size_t ball_count(const double* x, double r) const;
  // Original indices of points in the closed ball, ascending.
  std::vector<std::size_t> ball_points(const double* x, double r) const;
  // Distance from x to the nearest point (infinity when empty).
  double nearest_distance(const double* x) const;

 private:
  void build(std::size_t node, std::size_t begin, std::size_t end, int leaf_size);
  double box_dist2(const Node& nd, const double* x) const;
  double box_far_dist2(const Node& nd, const double* x) const;

  int dim_;
  std::size_t n_;
  std::vector<double> pts_;  // permuted, flat
  std::vector<double> wts_;  // permuted
  std::vector<std::size_t> perm_;
  std::vector<Node> nodes_;
};

}  // namespace czlab
