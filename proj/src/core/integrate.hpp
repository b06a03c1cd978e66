#pragma once

#include "core/function.hpp"
#include "core/measure.hpp"

#include <cstdint>

namespace attrikit {

// Tensor midpoint quadrature of integral f dmu for product measures: Dirac
// coordinates are fixed at their locations, every other coordinate gets a
// `resolution`-point midpoint rule weighted by its (scaled) density. Exact
// for Dirac-only measures.
double integrate_grid(const EvaluableFunction& f, const ProductMeasure& m, int resolution);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

// Seeded Monte Carlo estimate of integral f dmu. Work is split into chunks
// of 4096 samples seeded seed+chunk, so the sample stream is identical for
// any worker count. Non-probability masses integrate via the mass-weighted
// decomposition: draws come from the normalized shape, the estimate is
// scaled by the total (signed) mass.
McEstimate integrate_mc(const EvaluableFunction& f, const Measure& m, std::int64_t samples,
                        std::uint64_t seed);

// Exact integral against a finite-support empirical measure.
double integrate_data_exact(const EvaluableFunction& f, const DataMeasure& m);

// The atomic-attribution sum: over all grid cells of f_p, cell value at the
// lower-left corner times the cell's measure mass.
double approx_attribution_sum(const PiecewiseConstantApprox& fp, const Measure& m);

}  // namespace attrikit
