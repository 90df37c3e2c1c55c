#include "czlab/measure.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "czlab/common.hpp"

namespace czlab {

using nlohmann::json;

PointMeasure::PointMeasure(int dim, std::vector<double> atoms_flat, std::vector<double> weights,
                           double mesh_scale, double nominal_s, std::string generator_tag)
    : dim_(dim),
      atoms_(std::move(atoms_flat)),
      weights_(std::move(weights)),
      mesh_scale_(mesh_scale),
      nominal_s_(nominal_s),
      tag_(std::move(generator_tag)) {
  require(dim_ >= 1, "PointMeasure: dim >= 1");
  require(atoms_.size() == weights_.size() * static_cast<std::size_t>(dim_),
          "PointMeasure: atoms/weights size mismatch");
  require(mesh_scale_ > 0.0, "PointMeasure: mesh_scale > 0");
  require(nominal_s_ > 0.0, "PointMeasure: nominal_s > 0");
  require(tag_.find_first_of(" \t\n") == std::string::npos,
          "PointMeasure: generator_tag must not contain whitespace");
  total_mass_ = 0.0;
  for (double w : weights_) {
    require(w > 0.0 && std::isfinite(w), "PointMeasure: weights must be positive finite");
    total_mass_ += w;
  }
  for (double c : atoms_) require(std::isfinite(c), "PointMeasure: atom coordinates must be finite");
  box_min_.assign(dim_, 0.0);
  box_max_.assign(dim_, 0.0);
  if (!weights_.empty()) {
    box_min_.assign(dim_, std::numeric_limits<double>::infinity());
    box_max_.assign(dim_, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < weights_.size(); ++i)
      for (int k = 0; k < dim_; ++k) {
        box_min_[k] = std::min(box_min_[k], atoms_[i * dim_ + k]);
        box_max_[k] = std::max(box_max_[k], atoms_[i * dim_ + k]);
      }
  }
  double diag2 = 0.0;
  for (int k = 0; k < dim_; ++k) diag2 += sqr(box_max_[k] - box_min_[k]);
  diameter_ = std::sqrt(diag2);
  index_ = std::make_shared<SpatialIndex>(dim_, atoms_, weights_);
}

std::vector<double> PointMeasure::barycenter() const {
  std::vector<double> c(dim_, 0.0);
  if (total_mass_ <= 0.0) return c;
  for (std::size_t i = 0; i < size(); ++i)
    for (int k = 0; k < dim_; ++k) c[k] += weights_[i] * atoms_[i * dim_ + k];
  for (int k = 0; k < dim_; ++k) c[k] /= total_mass_;
  return c;
}

namespace {

// Fraction of the cell around `cc` (half-width `half` per axis) inside the
// shell r_in <= |x - center| <= r_out, from a 4^d midpoint subsample.
double cell_fraction(int d, const double* cc, double half, const double* center, double r_in,
                     double r_out) {
  int total = 1;
  for (int k = 0; k < d; ++k) total *= 4;
  int inside = 0;
  std::vector<int> idx(d, 0);
  std::vector<double> p(d);
  for (int t = 0; t < total; ++t) {
    int rem = t;
    for (int k = 0; k < d; ++k) {
      idx[k] = rem % 4;
      rem /= 4;
    }
    for (int k = 0; k < d; ++k) p[k] = cc[k] - half + (idx[k] + 0.5) * (2.0 * half / 4.0);
    double r = dist(p.data(), center, d);
    if (r >= r_in && r <= r_out) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(total);
}

PointMeasure make_shell_lebesgue(int d, const std::vector<double>& center, double r_in,
                                 double r_out, int cells_per_axis, const std::string& tag) {
  require(d >= 1 && d <= 3, "shell generator: 1 <= d <= 3");
  require(static_cast<int>(center.size()) == d, "shell generator: center size");
  require(r_out > 0.0 && r_in >= 0.0 && r_in < r_out, "shell generator: need 0 <= r_in < r_out");
  require(cells_per_axis >= 2, "shell generator: cells_per_axis >= 2");
  double side = 2.0 * r_out / cells_per_axis;
  double half = 0.5 * side;
  double half_diag = half * std::sqrt(static_cast<double>(d));
  double cell_vol = std::pow(side, d);
  std::vector<double> atoms, weights;
  std::vector<int> idx(d, 0);
  std::vector<double> cc(d);
  std::size_t ncells = 1;
  for (int k = 0; k < d; ++k) ncells *= cells_per_axis;
  for (std::size_t t = 0; t < ncells; ++t) {
    std::size_t rem = t;
    for (int k = 0; k < d; ++k) {
      idx[k] = static_cast<int>(rem % cells_per_axis);
      rem /= cells_per_axis;
    }
    for (int k = 0; k < d; ++k) cc[k] = center[k] - r_out + (idx[k] + 0.5) * side;
    double rc = dist(cc.data(), center.data(), d);
    double w;
    if (rc + half_diag <= r_out && rc - half_diag >= r_in) {
      w = cell_vol;
    } else if (rc - half_diag > r_out || rc + half_diag < r_in) {
      continue;
    } else {
      double frac = cell_fraction(d, cc.data(), half, center.data(), r_in, r_out);
      if (frac == 0.0) continue;
      w = cell_vol * frac;
    }
    for (int k = 0; k < d; ++k) atoms.push_back(cc[k]);
    weights.push_back(w);
  }
  double mesh = side * std::sqrt(static_cast<double>(d));
  return PointMeasure(d, std::move(atoms), std::move(weights), mesh, static_cast<double>(d), tag);
}

}  // namespace

PointMeasure make_ball_lebesgue(int d, const std::vector<double>& center, double radius,
                                int cells_per_axis) {
  std::ostringstream tag;
  tag << "ball-" << d << "d-n" << cells_per_axis;
  return make_shell_lebesgue(d, center, 0.0, radius, cells_per_axis, tag.str());
}

PointMeasure make_annulus_lebesgue(int d, const std::vector<double>& center, double r_inner,
                                   double r_outer, int cells_per_axis) {
  require(r_inner > 0.0, "annulus: r_inner > 0");
  std::ostringstream tag;
  tag << "annulus-" << d << "d-n" << cells_per_axis;
  return make_shell_lebesgue(d, center, r_inner, r_outer, cells_per_axis, tag.str());
}

PointMeasure make_segment(const std::vector<double>& a, const std::vector<double>& b, int n) {
  int d = static_cast<int>(a.size());
  require(b.size() == a.size() && d >= 1, "segment: endpoint dims");
  require(n >= 1, "segment: n >= 1");
  double len = dist(a.data(), b.data(), d);
  require(len > 0.0, "segment: endpoints must differ");
  std::vector<double> atoms(static_cast<std::size_t>(n) * d);
  std::vector<double> weights(n, len / n);
  for (int i = 0; i < n; ++i) {
    double t = (i + 0.5) / n;
    for (int k = 0; k < d; ++k) atoms[static_cast<std::size_t>(i) * d + k] = a[k] + t * (b[k] - a[k]);
  }
  return PointMeasure(d, std::move(atoms), std::move(weights), len / n, 1.0, "segment");
}

PointMeasure make_cantor(int d, double ratio, int depth,
                         const std::vector<std::vector<double>>& offsets) {
  require(d >= 1 && d <= 3, "cantor: 1 <= d <= 3");
  require(ratio > 0.0 && ratio < 1.0, "cantor: ratio in (0,1)");
  require(depth >= 0 && depth <= 12, "cantor: 0 <= depth <= 12");
  std::size_t k = offsets.size();
  require(k >= 2, "cantor: need >= 2 offsets");
  for (const auto& o : offsets) {
    require(static_cast<int>(o.size()) == d, "cantor: offset dim");
    for (double c : o) require(c >= -1e-12 && c <= 1.0 - ratio + 1e-12, "cantor: offset outside [0, 1-ratio]");
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      bool overlap = true;
      for (int a = 0; a < d; ++a)
        if (std::abs(offsets[i][a] - offsets[j][a]) >= ratio - 1e-12) overlap = false;
      require(!overlap, "cantor: child cells overlap");
    }

  // Corner coordinates of all depth-level cells.
  std::vector<std::vector<double>> corners{std::vector<double>(d, 0.0)};
  double side = 1.0;
  for (int lev = 0; lev < depth; ++lev) {
    std::vector<std::vector<double>> next;
    next.reserve(corners.size() * k);
    for (const auto& c : corners)
      for (const auto& o : offsets) {
        std::vector<double> nc(d);
        for (int a = 0; a < d; ++a) nc[a] = c[a] + side * o[a];
        next.push_back(std::move(nc));
      }
    corners = std::move(next);
    side *= ratio;
  }
  double w = std::pow(static_cast<double>(k), -static_cast<double>(depth));
  std::vector<double> atoms;
  atoms.reserve(corners.size() * d);
  for (const auto& c : corners)
    for (int a = 0; a < d; ++a) atoms.push_back(c[a] + 0.5 * side);
  std::vector<double> weights(corners.size(), w);
  double s = std::log(static_cast<double>(k)) / std::log(1.0 / ratio);
  std::ostringstream tag;
  tag << "cantor-" << d << "d-k" << k << "-depth" << depth;
  return PointMeasure(d, std::move(atoms), std::move(weights), side, s, tag.str());
}

PointMeasure make_corner_cantor(int d, double ratio, int depth) {
  require(ratio <= 0.5, "corner-cantor: ratio <= 1/2 for disjoint corners");
  std::size_t k = std::size_t{1} << d;
  std::vector<std::vector<double>> offsets;
  for (std::size_t m = 0; m < k; ++m) {
    std::vector<double> o(d, 0.0);
    for (int a = 0; a < d; ++a)
      if (m & (std::size_t{1} << a)) o[a] = 1.0 - ratio;
    offsets.push_back(std::move(o));
  }
  return make_cantor(d, ratio, depth, offsets);
}

namespace {
PointMeasure filter_atoms(const PointMeasure& mu, const std::vector<char>& keep,
                          const std::string& tag_suffix) {
  std::vector<double> atoms, weights;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (keep[i]) {
      for (int k = 0; k < mu.dim(); ++k) atoms.push_back(mu.atom(i)[k]);
      weights.push_back(mu.weight(i));
    }
  require(!weights.empty(), "restriction: no atoms remain");
  return PointMeasure(mu.dim(), std::move(atoms), std::move(weights), mu.mesh_scale(),
                      mu.nominal_s(), mu.generator_tag() + tag_suffix);
}
}  // namespace

PointMeasure restrict_ball(const PointMeasure& mu, const std::vector<double>& center,
                           double radius) {
  require(static_cast<int>(center.size()) == mu.dim(), "restrict_ball: center dim");
  std::vector<char> keep(mu.size(), 0);
  for (std::size_t i = 0; i < mu.size(); ++i)
    keep[i] = dist(mu.atom(i), center.data(), mu.dim()) <= radius;
  return filter_atoms(mu, keep, "-ball");
}

PointMeasure restrict_halfspace(const PointMeasure& mu, const std::vector<double>& normal,
                                double offset) {
  require(static_cast<int>(normal.size()) == mu.dim(), "restrict_halfspace: normal dim");
  std::vector<char> keep(mu.size(), 0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double dot = 0.0;
    for (int k = 0; k < mu.dim(); ++k) dot += normal[k] * mu.atom(i)[k];
    keep[i] = dot <= offset;
  }
  return filter_atoms(mu, keep, "-half");
}

PointMeasure rescale(const PointMeasure& mu, double lambda, double s) {
  require(lambda > 0.0, "rescale: lambda > 0");
  require(s > 0.0, "rescale: s > 0");
  std::vector<double> atoms(mu.atoms_flat());
  for (double& c : atoms) c *= lambda;
  double mass_factor = std::pow(lambda, s);
  std::vector<double> weights(mu.weights());
  for (double& w : weights) w *= mass_factor;
  return PointMeasure(mu.dim(), std::move(atoms), std::move(weights),
                      mu.mesh_scale() * lambda, mu.nominal_s(), mu.generator_tag() + "-scaled");
}

double ball_mass(const PointMeasure& mu, const double* x, double r) {
  return mu.index().ball_weight(x, r);
}

double growth_constant(const PointMeasure& mu, double s, const std::vector<double>& radii) {
  require(s > 0.0, "growth_constant: s > 0");
  require(!radii.empty(), "growth_constant: radii empty");
  if (mu.size() == 0) return 0.0;
  for (double r : radii)
    require(r >= 2.0 * mu.mesh_scale(), "growth_constant: radius below 2 * mesh_scale");

  // Centers: every atom plus an 8-per-axis lattice over the box.
  std::vector<std::vector<double>> lattice;
  int d = mu.dim();
  int per_axis = 8;
  std::size_t nl = 1;
  for (int k = 0; k < d; ++k) nl *= per_axis;
  for (std::size_t t = 0; t < nl; ++t) {
    std::size_t rem = t;
    std::vector<double> p(d);
    for (int k = 0; k < d; ++k) {
      int i = static_cast<int>(rem % per_axis);
      rem /= per_axis;
      double lo = mu.box_min()[k], hi = mu.box_max()[k];
      p[k] = lo + (hi - lo) * (i + 0.5) / per_axis;
    }
    lattice.push_back(std::move(p));
  }

  double best = 0.0;
  for (double r : radii) {
    double rs = std::pow(r, s);
    for (std::size_t i = 0; i < mu.size(); ++i)
      best = std::max(best, mu.index().ball_weight(mu.atom(i), r) / rs);
    for (const auto& p : lattice)
      best = std::max(best, mu.index().ball_weight(p.data(), r) / rs);
  }
  return best;
}

double doubling_radius(const PointMeasure& mu, const double* x, double r0, double s) {
  require(r0 > 0.0, "doubling_radius: r0 > 0");
  double m0 = ball_mass(mu, x, r0);
  require(m0 > 0.0, "doubling_radius: mu(B(x, r0)) = 0");
  double factor = std::pow(2.0, s + 1.0);
  double r = r0;
  for (int j = 0; j < 256; ++j) {
    double m1 = ball_mass(mu, x, 2.0 * r);
    if (m1 < factor * ball_mass(mu, x, r)) return r;
    r *= 2.0;
  }
  throw ConvergenceError("doubling_radius: no doubling scale found", r, 256);
}

void save_measure_text(const PointMeasure& mu, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  require(f != nullptr, "save_measure_text: cannot open " + path);
  std::fprintf(f, "czlab-measure-v1 %d %.17g %.17g %s %zu\n", mu.dim(), mu.nominal_s(),
               mu.mesh_scale(), mu.generator_tag().c_str(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (int k = 0; k < mu.dim(); ++k) std::fprintf(f, "%.17g ", mu.atom(i)[k]);
    std::fprintf(f, "%.17g\n", mu.weight(i));
  }
  std::fclose(f);
}

PointMeasure load_measure_text(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "load_measure_text: cannot open " + path);
  std::string magic, tag;
  int d = 0;
  double s = 0.0, mesh = 0.0;
  std::size_t n = 0;
  in >> magic >> d >> s >> mesh >> tag >> n;
  require(magic == "czlab-measure-v1", "load_measure_text: bad header in " + path);
  require(d >= 1 && d <= 16, "load_measure_text: bad dimension");
  std::vector<double> atoms(n * static_cast<std::size_t>(d));
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) in >> atoms[i * d + k];
    in >> weights[i];
  }
  require(!in.fail(), "load_measure_text: truncated atom table");
  return PointMeasure(d, std::move(atoms), std::move(weights), mesh, s, tag);
}

std::string measure_to_json(const PointMeasure& mu) {
  json j;
  j["format"] = "czlab-measure-v1";
  j["d"] = mu.dim();
  j["nominal_s"] = mu.nominal_s();
  j["mesh_scale"] = mu.mesh_scale();
  j["generator_tag"] = mu.generator_tag();
  j["atoms"] = mu.atoms_flat();
  j["weights"] = mu.weights();
  return j.dump();
}

PointMeasure measure_from_json(const std::string& text) {
  json j = json::parse(text);
  require(j.value("format", "") == "czlab-measure-v1", "measure_from_json: bad format tag");
  return PointMeasure(j.at("d").get<int>(), j.at("atoms").get<std::vector<double>>(),
                      j.at("weights").get<std::vector<double>>(),
                      j.at("mesh_scale").get<double>(), j.at("nominal_s").get<double>(),
                      j.at("generator_tag").get<std::string>());
}

PointMeasure measure_from_spec(const std::string& json_text) {
  json j = json::parse(json_text);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "ball") {
    return make_ball_lebesgue(j.at("d").get<int>(),
                              j.value("center", std::vector<double>(j.at("d").get<int>(), 0.0)),
                              j.value("radius", 1.0), j.at("cells_per_axis").get<int>());
  }
  if (kind == "annulus") {
    return make_annulus_lebesgue(j.at("d").get<int>(),
                                 j.value("center", std::vector<double>(j.at("d").get<int>(), 0.0)),
                                 j.at("r_inner").get<double>(), j.at("r_outer").get<double>(),
                                 j.at("cells_per_axis").get<int>());
  }
  if (kind == "segment") {
    return make_segment(j.at("a").get<std::vector<double>>(), j.at("b").get<std::vector<double>>(),
                        j.at("n").get<int>());
  }
  if (kind == "cantor") {
    return make_cantor(j.at("d").get<int>(), j.at("ratio").get<double>(), j.at("depth").get<int>(),
                       j.at("offsets").get<std::vector<std::vector<double>>>());
  }
  if (kind == "corner-cantor") {
    return make_corner_cantor(j.at("d").get<int>(), j.at("ratio").get<double>(),
                              j.at("depth").get<int>());
  }
  if (kind == "file") {
    std::string path = j.at("path").get<std::string>();
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
      std::ifstream in(path);
      require(in.good(), "measure spec: cannot open " + path);
      std::stringstream ss;
      ss << in.rdbuf();
      return measure_from_json(ss.str());
    }
    return load_measure_text(path);
  }
  throw std::invalid_argument("measure spec: unknown kind '" + kind + "'");
}

}  // namespace czlab
