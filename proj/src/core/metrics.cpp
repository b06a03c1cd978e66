#include "core/metrics.hpp"

#include <cmath>

namespace attrikit {

namespace {

void validate_thresholds(double alpha, double beta) {
  require(alpha > 0.0, "alpha must be positive");
  require(beta > 0.0, "beta must be positive");
}

void validate_centers(const CenterProjection& centers, int dim) {
  require(static_cast<int>(centers.size()) == dim,
          "need one center of mass per feature (" + std::to_string(dim) + ")");
  for (const auto& m : centers) {
    require(m.size() == dim, "center of mass has wrong dimension");
    require(in_unit_box(m, 1e-12), "centers of mass must lie in [0,1]^d");
  }
}

// Projected attribution of the linear model w under the measure vector
// represented by its centers of mass.
Vec projected_phi(const Vec& w, const CenterProjection& centers) {
  Vec phi(static_cast<Eigen::Index>(centers.size()));
  for (std::size_t j = 0; j < centers.size(); ++j) {
    phi[static_cast<Eigen::Index>(j)] = w.dot(centers[j]);
  }
  return phi;
}

}  // namespace

GoldenSplit golden_split(const Vec& w, double beta) {
  require(beta > 0.0, "beta must be positive");
  GoldenSplit split;
  split.beta = beta;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) > beta) {
      split.d1.push_back(static_cast<int>(i));
    } else {
      split.d0.push_back(static_cast<int>(i));
    }
  }
  return split;
}

double recall(const Vec& w, double alpha, double beta, const Vec& phi) {
  validate_thresholds(alpha, beta);
  require(phi.size() == w.size(), "phi dimension mismatch");
  const GoldenSplit split = golden_split(w, beta);
  if (split.d1.empty()) {
    throw UndefinedMetricError("recall is undefined: the golden set is empty");
  }
  int hits = 0;
  for (int j : split.d1) {
    if (std::abs(phi[j]) >= alpha) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(split.d1.size());
}

double precision(const Vec& w, double alpha, double beta, const Vec& phi) {
  validate_thresholds(alpha, beta);
  require(phi.size() == w.size(), "phi dimension mismatch");
  const GoldenSplit split = golden_split(w, beta);
  int hits_d1 = 0;
  int hits_d0 = 0;
  for (int j : split.d1) {
    if (std::abs(phi[j]) >= alpha) ++hits_d1;
  }
  for (int j : split.d0) {
    if (std::abs(phi[j]) >= alpha) ++hits_d0;
  }
  if (hits_d1 + hits_d0 == 0) {
    throw UndefinedMetricError("precision is undefined: no feature was flagged");
  }
  return static_cast<double>(hits_d1) / static_cast<double>(hits_d1 + hits_d0);
}

bool recall_solution_set_contains(const Vec& w, double alpha, double beta, int j, const Vec& m) {
  validate_thresholds(alpha, beta);
  require(j >= 0 && j < w.size(), "feature index out of range");
  require(m.size() == w.size(), "center of mass has wrong dimension");
  const GoldenSplit split = golden_split(w, beta);
  const bool in_d1 =
      std::find(split.d1.begin(), split.d1.end(), j) != split.d1.end();
  if (!in_d1) return true;  // S_j is the whole box
  return std::abs(w.dot(m)) >= alpha;
}

bool precision_solution_set_contains(const Vec& w, double alpha, double beta, int j,
                                     const Vec& m) {
  validate_thresholds(alpha, beta);
  require(j >= 0 && j < w.size(), "feature index out of range");
  require(m.size() == w.size(), "center of mass has wrong dimension");
  const GoldenSplit split = golden_split(w, beta);
  const bool in_d1 =
      std::find(split.d1.begin(), split.d1.end(), j) != split.d1.end();
  const double proj = std::abs(w.dot(m));
  return in_d1 ? proj >= alpha : proj < alpha;
}

namespace {

ReluMetricResult relu_metric(const ReluNetwork& net, double alpha, double beta,
                             const CenterProjection& centers, const GeometryCaps& caps,
                             bool use_recall) {
  validate_thresholds(alpha, beta);
  validate_centers(centers, net.input_dim());
  const auto decomp = enumerate_regions_cached(net, caps);
  ReluMetricResult out;
  out.region_count = static_cast<int>(decomp->regions.size());
  for (const auto& region : decomp->regions) {
    const Vec phi = projected_phi(region.a, centers);
    try {
      out.value += use_recall ? recall(region.a, alpha, beta, phi)
                              : precision(region.a, alpha, beta, phi);
    } catch (const UndefinedMetricError&) {
      ++out.skipped_regions;
    }
  }
  return out;
}

}  // namespace

ReluMetricResult relu_recall(const ReluNetwork& net, double alpha, double beta,
                             const CenterProjection& centers, const GeometryCaps& caps) {
  return relu_metric(net, alpha, beta, centers, caps, true);
}

ReluMetricResult relu_precision(const ReluNetwork& net, double alpha, double beta,
                                const CenterProjection& centers, const GeometryCaps& caps) {
  return relu_metric(net, alpha, beta, centers, caps, false);
}

bool relu_solution_set_contains(const ReluNetwork& net, double alpha, double beta, int j,
                                const Vec& m, SolutionKind kind, const GeometryCaps& caps) {
  validate_thresholds(alpha, beta);
  require(j >= 0 && j < net.input_dim(), "feature index out of range");
  require(m.size() == net.input_dim(), "center of mass has wrong dimension");
  const auto decomp = enumerate_regions_cached(net, caps);
  for (const auto& region : decomp->regions) {
    if (kind == SolutionKind::Recall) {
      const GoldenSplit split = golden_split(region.a, beta);
      const bool in_d1 =
          std::find(split.d1.begin(), split.d1.end(), j) != split.d1.end();
      if (in_d1 && std::abs(region.a.dot(m)) < alpha) return false;
    } else {
      if (!precision_solution_set_contains(region.a, alpha, beta, j, m)) return false;
    }
  }
  return true;
}

}  // namespace attrikit
