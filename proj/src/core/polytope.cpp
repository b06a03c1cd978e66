#include "core/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace attrikit {

namespace {

bool is_box_facet(const Halfspace& h) {
  int axis = -1;
  for (Eigen::Index i = 0; i < h.normal.size(); ++i) {
    if (h.normal[i] != 0.0) {
      if (axis >= 0) return false;
      axis = static_cast<int>(i);
    }
  }
  if (axis < 0) return false;
  const double n = h.normal[axis];
  return (n == 1.0 && h.offset == 1.0) || (n == -1.0 && h.offset == 0.0);
}

// Columns span the orthogonal complement of the unit vector n.
Mat hyperplane_basis(const Vec& n) {
  const Eigen::Index d = n.size();
  Mat m(d, 1);
  m.col(0) = n;
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  return q.rightCols(d - 1);
}

std::vector<Halfspace> restrict_to_face(const std::vector<Halfspace>& hs, std::size_t face,
                                        const Vec& origin, const Mat& basis) {
  std::vector<Halfspace> out;
  out.reserve(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (i == face) continue;
    Vec n = basis.transpose() * hs[i].normal;
    const double len = n.norm();
    if (len < 1e-10) continue;  // parallel to the face plane
    out.push_back({n / len, (hs[i].offset - hs[i].normal.dot(origin)) / len, false});
  }
  return out;
}

// Triangulates a face polytope given its vertices and bounding halfspaces,
// fanning from the first vertex through the facets that avoid it.
std::vector<Simplex> triangulate_face(int d, const std::vector<Halfspace>& hs,
                                      const std::vector<Vec>& verts) {
  std::vector<Simplex> out;
  if (static_cast<int>(verts.size()) < d + 1) {
    if (static_cast<int>(verts.size()) == d + 0 && d >= 1) {
      // Exactly d points span at most a (d-1)-simplex: degenerate, no volume.
    }
    if (d == 1 && verts.size() == 2) out.push_back({verts[0], verts[1]});
    return out;
  }
  if (d == 1) {
    Vec lo = verts[0], hi = verts[0];
    for (const auto& v : verts) {
      if (v[0] < lo[0]) lo = v;
      if (v[0] > hi[0]) hi = v;
    }
    out.push_back({lo, hi});
    return out;
  }

  const Vec& apex = verts[0];
  std::set<std::vector<int>> seen;
  for (std::size_t f = 0; f < hs.size(); ++f) {
    std::vector<int> tight;
    bool apex_on_facet = false;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      if (std::abs(hs[f].normal.dot(verts[v]) - hs[f].offset) <= Polytope::kTightTol) {
        tight.push_back(static_cast<int>(v));
        if (v == 0) apex_on_facet = true;
      }
    }
    if (apex_on_facet || static_cast<int>(tight.size()) < d) continue;
    if (!seen.insert(tight).second) continue;

    const Vec origin = verts[static_cast<std::size_t>(tight[0])];
    const Mat basis = hyperplane_basis(hs[f].normal);
    std::vector<Vec> face_verts;
    face_verts.reserve(tight.size());
    for (int idx : tight) {
      face_verts.push_back(basis.transpose() * (verts[static_cast<std::size_t>(idx)] - origin));
    }
    const auto face_hs = restrict_to_face(hs, f, origin, basis);
    for (const auto& sub : triangulate_face(d - 1, face_hs, face_verts)) {
      Simplex s;
      s.reserve(sub.size() + 1);
      s.push_back(apex);
      for (const auto& u : sub) s.push_back(origin + basis * u);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace

double simplex_volume(const Simplex& s) {
  const int d = static_cast<int>(s.size()) - 1;
  if (d <= 0) return 0.0;
  Mat m(d, d);
  for (int c = 0; c < d; ++c) m.col(c) = s[static_cast<std::size_t>(c + 1)] - s[0];
  double factorial = 1.0;
  for (int k = 2; k <= d; ++k) factorial *= k;
  return std::abs(m.determinant()) / factorial;
}

Polytope Polytope::unit_box(int d) { return from_halfspaces(d, {}); }

Polytope Polytope::from_halfspaces(int d, std::vector<Halfspace> halfspaces) {
  require(d >= 1, "polytope dimension must be positive");
  std::vector<Halfspace> all;
  all.reserve(2 * static_cast<std::size_t>(d) + halfspaces.size());
  for (int i = 0; i < d; ++i) {
    Vec lo = Vec::Zero(d);
    lo[i] = -1.0;
    all.push_back({lo, 0.0, false});
    Vec hi = Vec::Zero(d);
    hi[i] = 1.0;
    all.push_back({hi, 1.0, false});
  }
  for (auto& h : halfspaces) all.push_back(std::move(h));
  Polytope p;
  p.build(d, std::move(all));
  return p;
}

void Polytope::build(int d, std::vector<Halfspace> halfspaces) {
  dim_ = d;
  halfspaces_.clear();
  halfspaces_.reserve(halfspaces.size());
  for (auto& h : halfspaces) {
    require(h.normal.size() == d, "halfspace dimension mismatch");
    const double len = h.normal.norm();
    if (len < 1e-14) {
      const bool infeasible = h.strict ? h.offset <= 0.0 : h.offset < 0.0;
      if (infeasible) {
        vertices_.clear();
        simplices_.clear();
        volume_ = 0.0;
        empty_ = true;
        degenerate_ = true;
        halfspaces_.push_back(std::move(h));
        return;
      }
      continue;  // trivially true
    }
    halfspaces_.push_back({h.normal / len, h.offset / len, h.strict});
  }

  // Vertices: feasible solutions of every d-subset of facet equalities.
  vertices_.clear();
  const int m = static_cast<int>(halfspaces_.size());
  std::vector<int> combo(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) combo[static_cast<std::size_t>(i)] = i;
  Mat a(d, d);
  Vec rhs(d);
  while (true) {
    for (int i = 0; i < d; ++i) {
      a.row(i) = halfspaces_[static_cast<std::size_t>(combo[static_cast<std::size_t>(i)])].normal;
      rhs[i] = halfspaces_[static_cast<std::size_t>(combo[static_cast<std::size_t>(i)])].offset;
    }
    Eigen::FullPivLU<Mat> lu(a);
    if (lu.isInvertible()) {
      const Vec v = lu.solve(rhs);
      bool feasible = true;
      for (const auto& h : halfspaces_) {
        if (h.normal.dot(v) > h.offset + kFeasibilityTol) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        bool duplicate = false;
        for (const auto& existing : vertices_) {
          if ((existing - v).lpNorm<Eigen::Infinity>() <= kVertexDedupTol) {
            duplicate = true;
            break;
          }
        }
        if (!duplicate) vertices_.push_back(v);
      }
    }
    // next combination
    int k = d - 1;
    while (k >= 0 && combo[static_cast<std::size_t>(k)] == m - d + k) --k;
    if (k < 0) break;
    ++combo[static_cast<std::size_t>(k)];
    for (int i = k + 1; i < d; ++i) {
      combo[static_cast<std::size_t>(i)] = combo[static_cast<std::size_t>(i - 1)] + 1;
    }
  }

  if (vertices_.empty()) {
    simplices_.clear();
    volume_ = 0.0;
    empty_ = true;
    degenerate_ = true;
    return;
  }

  // Drop non-box halfspaces that are tight at no vertex; they are redundant
  // and would otherwise accumulate along recursive subdivision.
  {
    std::vector<Halfspace> kept;
    kept.reserve(halfspaces_.size());
    for (const auto& h : halfspaces_) {
      bool tight = is_box_facet(h);
      if (!tight) {
        for (const auto& v : vertices_) {
          if (std::abs(h.normal.dot(v) - h.offset) <= kTightTol) {
            tight = true;
            break;
          }
        }
      }
      if (tight) kept.push_back(h);
    }
    halfspaces_ = std::move(kept);
  }

  // Fan triangulation from the vertex average through every facet.
  simplices_.clear();
  volume_ = 0.0;
  if (static_cast<int>(vertices_.size()) >= dim_ + 1) {
    Vec center = Vec::Zero(dim_);
    for (const auto& v : vertices_) center += v;
    center /= static_cast<double>(vertices_.size());

    if (dim_ == 1) {
      Vec lo = vertices_[0], hi = vertices_[0];
      for (const auto& v : vertices_) {
        if (v[0] < lo[0]) lo = v;
        if (v[0] > hi[0]) hi = v;
      }
      simplices_.push_back({lo, hi});
    } else {
      std::set<std::vector<int>> seen;
      for (std::size_t f = 0; f < halfspaces_.size(); ++f) {
        std::vector<int> tight;
        for (std::size_t v = 0; v < vertices_.size(); ++v) {
          if (std::abs(halfspaces_[f].normal.dot(vertices_[v]) - halfspaces_[f].offset) <=
              kTightTol) {
            tight.push_back(static_cast<int>(v));
          }
        }
        if (static_cast<int>(tight.size()) < dim_) continue;
        if (!seen.insert(tight).second) continue;

        const Vec origin = vertices_[static_cast<std::size_t>(tight[0])];
        const Mat basis = hyperplane_basis(halfspaces_[f].normal);
        std::vector<Vec> face_verts;
        face_verts.reserve(tight.size());
        for (int idx : tight) {
          face_verts.push_back(basis.transpose() *
                               (vertices_[static_cast<std::size_t>(idx)] - origin));
        }
        const auto face_hs = restrict_to_face(halfspaces_, f, origin, basis);
        for (const auto& sub : triangulate_face(dim_ - 1, face_hs, face_verts)) {
          Simplex s;
          s.reserve(sub.size() + 1);
          s.push_back(center);
          for (const auto& u : sub) s.push_back(origin + basis * u);
          simplices_.push_back(std::move(s));
        }
      }
    }
    for (const auto& s : simplices_) volume_ += simplex_volume(s);
  }

  degenerate_ = volume_ < kSliverVolume;
  empty_ = degenerate_;
  if (degenerate_) simplices_.clear();
}

bool Polytope::contains(const Vec& y, double tol) const {
  for (const auto& h : halfspaces_) {
    if (h.normal.dot(y) > h.offset + tol) return false;
  }
  return true;
}

bool Polytope::contains_for_mass(const Vec& y) const {
  if (empty_) return false;
  for (const auto& h : halfspaces_) {
    const double s = h.normal.dot(y) - h.offset;
    if (h.strict ? s >= 0.0 : s > 0.0) return false;
  }
  return true;
}

Vec Polytope::centroid() const {
  if (degenerate_ || simplices_.empty()) return Vec::Zero(dim_);
  Vec acc = Vec::Zero(dim_);
  double total = 0.0;
  for (const auto& s : simplices_) {
    const double vol = simplex_volume(s);
    Vec mean = Vec::Zero(dim_);
    for (const auto& corner : s) mean += corner;
    mean /= static_cast<double>(s.size());
    acc += vol * mean;
    total += vol;
  }
  return total > 0.0 ? Vec(acc / total) : Vec(Vec::Zero(dim_));
}

Vec Polytope::interior_point() const {
  require(!vertices_.empty(), "empty polytope has no interior point");
  Vec center = Vec::Zero(dim_);
  for (const auto& v : vertices_) center += v;
  return center / static_cast<double>(vertices_.size());
}

std::pair<Polytope, Polytope> Polytope::split(const Vec& normal, double offset) const {
  require(normal.size() == dim_, "split plane dimension mismatch");
  const double len = normal.norm();
  Polytope below, above;
  if (len < 1e-14) {
    // Degenerate plane: one side is everything, the other empty.
    if (offset >= 0.0) {
      below = *this;
      above.dim_ = dim_;
    } else {
      above = *this;
      below.dim_ = dim_;
    }
    return {below, above};
  }
  const Vec n = normal / len;
  const double c = offset / len;

  std::vector<Halfspace> below_hs = halfspaces_;
  below_hs.push_back({n, c, false});
  below.build(dim_, std::move(below_hs));

  std::vector<Halfspace> above_hs = halfspaces_;
  above_hs.push_back({-n, -c, true});
  above.build(dim_, std::move(above_hs));
  return {below, above};
}

Polytope Polytope::slice(const std::vector<std::pair<int, double>>& pinned) const {
  require(!pinned.empty() && static_cast<int>(pinned.size()) < dim_,
          "slice needs between 1 and dim-1 pinned coordinates");
  std::vector<bool> is_pinned(static_cast<std::size_t>(dim_), false);
  Vec pin_value = Vec::Zero(dim_);
  for (const auto& [coord, value] : pinned) {
    require(coord >= 0 && coord < dim_, "pinned coordinate out of range");
    is_pinned[static_cast<std::size_t>(coord)] = true;
    pin_value[coord] = value;
  }
  std::vector<int> kept;
  for (int i = 0; i < dim_; ++i) {
    if (!is_pinned[static_cast<std::size_t>(i)]) kept.push_back(i);
  }
  const int kd = static_cast<int>(kept.size());

  Polytope out;
  std::vector<Halfspace> sliced;
  sliced.reserve(halfspaces_.size());
  for (const auto& h : halfspaces_) {
    Vec n(kd);
    for (int i = 0; i < kd; ++i) n[i] = h.normal[kept[static_cast<std::size_t>(i)]];
    double o = h.offset;
    for (int i = 0; i < dim_; ++i) {
      if (is_pinned[static_cast<std::size_t>(i)]) o -= h.normal[i] * pin_value[i];
    }
    if (n.norm() < 1e-12) {
      const bool infeasible = h.strict ? o <= 0.0 : o < 0.0;
      if (infeasible) {
        out.dim_ = kd;
        return out;  // empty
      }
      continue;
    }
    sliced.push_back({std::move(n), o, h.strict});
  }
  out.build(kd, std::move(sliced));
  return out;
}

}  // namespace attrikit
