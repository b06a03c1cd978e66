#pragma once

#include "core/common.hpp"

#include <utility>
#include <vector>

namespace attrikit {

// Half-space normal.y <= offset. Normals are stored unit length. A strict
// half-space excludes its boundary for measure-membership queries (used for
// the "active" side of a ReLU split so boundary points are counted once);
// geometric queries (vertices, volume) ignore strictness.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
  bool strict = false;
};

// Simplices are stored as (d+1) corner points.
using Simplex = std::vector<Vec>;

// Bounded convex polytope inside the unit box, kept in H-representation
// with cached vertices and a cached fan triangulation. Immutable.
class Polytope {
 public:
  static Polytope unit_box(int d);
  // Extra halfspaces intersected with the unit box.
  static Polytope from_halfspaces(int d, std::vector<Halfspace> halfspaces);

  int dim() const { return dim_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::vector<Vec>& vertices() const { return vertices_; }

  bool empty() const { return empty_; }
  // Full-dimensional: triangulated with volume above the sliver threshold.
  bool degenerate() const { return degenerate_; }

  // Closed membership with tolerance; ignores strict flags.
  bool contains(const Vec& y, double tol = 1e-9) const;
  // Membership with zero tolerance honoring strict flags. A point exactly
  // on a split plane belongs to exactly one of the two sides.
  bool contains_for_mass(const Vec& y) const;

  const std::vector<Simplex>& simplices() const { return simplices_; }
  double volume() const { return volume_; }
  Vec centroid() const;        // Lebesgue centroid; zero vector when degenerate
  Vec interior_point() const;  // vertex average

  // P cut by normal.y <= offset: (below, above). The above side gets the
  // strict flag. Sides of volume below the sliver threshold come back empty.
  std::pair<Polytope, Polytope> split(const Vec& normal, double offset) const;

  // Substitutes fixed coordinate values and drops those coordinates,
  // producing a polytope over the remaining ones (in ascending original
  // order). Empty result means the pinned values are incompatible.
  Polytope slice(const std::vector<std::pair<int, double>>& pinned) const;

  static constexpr double kSliverVolume = 1e-12;
  static constexpr double kFeasibilityTol = 1e-9;
  static constexpr double kVertexDedupTol = 1e-8;
  static constexpr double kTightTol = 1e-7;

 private:
  Polytope() = default;
  void build(int d, std::vector<Halfspace> halfspaces);

  int dim_ = 0;
  std::vector<Halfspace> halfspaces_;
  std::vector<Vec> vertices_;
  std::vector<Simplex> simplices_;
  double volume_ = 0.0;
  bool empty_ = true;
  bool degenerate_ = true;
};

double simplex_volume(const Simplex& s);

}  // namespace attrikit
