#pragma once

#include "core/common.hpp"
#include "core/regions.hpp"
#include "core/relu_network.hpp"

#include <vector>

namespace attrikit {

struct GoldenSplit {
  std::vector<int> d1;  // |w_i| > beta
  std::vector<int> d0;  // complement (boundary inclusive)
  double beta = 0.0;
};

GoldenSplit golden_split(const Vec& w, double beta);

// Fraction of golden features flagged: |phi_j| >= alpha over j in D1.
// Throws UndefinedMetricError when the golden set is empty.
double recall(const Vec& w, double alpha, double beta, const Vec& phi);

// Flagged-golden over all flagged. Throws UndefinedMetricError when nothing
// is flagged.
double precision(const Vec& w, double alpha, double beta, const Vec& phi);

// Optimal-projection solution sets: membership of a center of mass m.
bool recall_solution_set_contains(const Vec& w, double alpha, double beta, int j, const Vec& m);
bool precision_solution_set_contains(const Vec& w, double alpha, double beta, int j, const Vec& m);

// Centers of mass representing a measure vector, one point per feature.
using CenterProjection = std::vector<Vec>;

struct ReluMetricResult {
  double value = 0.0;
  int region_count = 0;
  int skipped_regions = 0;  // regions where the per-region metric is undefined
};

ReluMetricResult relu_recall(const ReluNetwork& net, double alpha, double beta,
                             const CenterProjection& centers, const GeometryCaps& caps = {});
ReluMetricResult relu_precision(const ReluNetwork& net, double alpha, double beta,
                                const CenterProjection& centers, const GeometryCaps& caps = {});

enum class SolutionKind { Recall, Precision };

bool relu_solution_set_contains(const ReluNetwork& net, double alpha, double beta, int j,
                                const Vec& m, SolutionKind kind, const GeometryCaps& caps = {});

}  // namespace attrikit
