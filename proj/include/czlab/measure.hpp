#pragma once

#include <memory>
#include <string>
#include <vector>

#include "czlab/spatial.hpp"

namespace czlab {

// Finite atomic measure: atoms y_j in R^d with weights w_j > 0.  Immutable
// after construction; derived quantities (total mass, bounding box, spatial
// index) are built once.  mesh_scale records the discretization pitch of the
// generator and gates which truncation scales are meaningful; nominal_s is the
// dimension the generator intends the measure to approximate.
class PointMeasure {
 public:
  PointMeasure(int dim, std::vector<double> atoms_flat, std::vector<double> weights,
               double mesh_scale, double nominal_s, std::string generator_tag);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  const double* atom(std::size_t i) const { return &atoms_[i * dim_]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& atoms_flat() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }
  double mesh_scale() const { return mesh_scale_; }
  double nominal_s() const { return nominal_s_; }
  const std::string& generator_tag() const { return tag_; }
  // Axis-aligned bounding box; empty measure reports [0,0]^d.
  const std::vector<double>& box_min() const { return box_min_; }
  const std::vector<double>& box_max() const { return box_max_; }
  double diameter_bound() const { return diameter_; }
  std::vector<double> barycenter() const;
  const SpatialIndex& index() const { return *index_; }

 private:
  int dim_;
  std::vector<double> atoms_;
  std::vector<double> weights_;
  double mesh_scale_;
  double nominal_s_;
  std::string tag_;
  double total_mass_;
  std::vector<double> box_min_, box_max_;
  double diameter_;
  std::shared_ptr<const SpatialIndex> index_;
};

// Lebesgue measure on the ball B(center, radius), discretized on a uniform
// grid of cells_per_axis^d cells over the bounding box.  Interior cells carry
// the full cell volume; cells meeting the boundary get their share from
// 4^d-point subsampling.  Atoms sit at cell centers.
PointMeasure make_ball_lebesgue(int d, const std::vector<double>& center, double radius,
                                int cells_per_axis);

// Lebesgue measure on the annulus r_inner <= |x - center| <= r_outer.
PointMeasure make_annulus_lebesgue(int d, const std::vector<double>& center, double r_inner,
                                   double r_outer, int cells_per_axis);

// Length measure on the segment [a, b], n midpoint atoms of weight |b-a|/n.
PointMeasure make_segment(const std::vector<double>& a, const std::vector<double>& b, int n);

// Self-similar Cantor measure on [0,1]^d: each cell spawns children of side
// ratio at the given corner offsets (offsets in [0, 1-ratio]^d, pairwise
// non-overlapping).  Atoms at depth-level cell centers, each of mass k^-depth
// for k children.  nominal_s = log k / log(1/ratio).
PointMeasure make_cantor(int d, double ratio, int depth,
                         const std::vector<std::vector<double>>& offsets);

// Four-corner variant: offsets at the corners of [0, 1-ratio]^d.
PointMeasure make_corner_cantor(int d, double ratio, int depth);

// Restriction of mu to the closed ball / halfspace {x : n.x <= c}.
PointMeasure restrict_ball(const PointMeasure& mu, const std::vector<double>& center,
                           double radius);
PointMeasure restrict_halfspace(const PointMeasure& mu, const std::vector<double>& normal,
                                double offset);

// Pushforward under x -> lambda x with masses scaled by lambda^s.
PointMeasure rescale(const PointMeasure& mu, double lambda, double s);

// mu(B(x, r)), closed ball.
double ball_mass(const PointMeasure& mu, const double* x, double r);

// Largest mu(B(x,r)) / r^s over the given radii, centered at every atom and at
// a coarse lattice over the bounding box.  Radii below 2 * mesh_scale are
// rejected: growth below the pitch measures atoms, not the measure.
double growth_constant(const PointMeasure& mu, double s, const std::vector<double>& radii);

// Doubling ladder: least j >= 0 with mu(B(x, 2^{j+1} r0)) < 2^{s+1} mu(B(x, 2^j r0)),
// returned as the radius 2^j r0.  Requires mu(B(x, r0)) > 0.
double doubling_radius(const PointMeasure& mu, const double* x, double r0, double s);

// Columnar text round-trip.  One header line (format tag, d, nominal_s,
// mesh_scale, generator_tag, atom count), then one atom per line with %.17g
// fields, so reloaded doubles are bit-identical.
void save_measure_text(const PointMeasure& mu, const std::string& path);
PointMeasure load_measure_text(const std::string& path);

std::string measure_to_json(const PointMeasure& mu);
PointMeasure measure_from_json(const std::string& text);

// Builds a generator measure from its JSON description {"kind": ..., ...}.
// Accepted kinds: ball, annulus, segment, cantor, corner-cantor, file.
PointMeasure measure_from_spec(const std::string& json_text);

}  // namespace czlab
