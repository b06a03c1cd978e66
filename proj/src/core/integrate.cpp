#include "core/integrate.hpp"

#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace attrikit {

namespace {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

constexpr std::int64_t kMcChunk = 4096;

struct ChunkStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

// Runs the per-chunk sampler and merges chunk statistics in index order, so
// the result is bit-identical for any worker count.
McEstimate chunked_mc(std::int64_t samples, double total_mass,
                      const std::function<void(std::int64_t chunk, std::int64_t count,
                                               ChunkStats&)>& run_chunk) {
  const std::int64_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  std::vector<ChunkStats> stats(static_cast<std::size_t>(chunks));
  parallel_indexed(chunks, [&](std::int64_t chunk) {
    const std::int64_t begin = chunk * kMcChunk;
    const std::int64_t count = std::min(kMcChunk, samples - begin);
    run_chunk(chunk, count, stats[static_cast<std::size_t>(chunk)]);
  });

  NeumaierSum sum, sum_sq;
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (const auto& s : stats) {
    sum.add(s.sum);
    sum_sq.add(s.sum_sq);
    vmin = std::min(vmin, s.min);
    vmax = std::max(vmax, s.max);
  }

  McEstimate out;
  if (vmin == vmax) {
    // Degenerate sample stream (constant integrand or all-Dirac measure).
    out.estimate = total_mass * vmin;
    out.stderr_ = 0.0;
    return out;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, (sum_sq.value() - n * mean * mean) / (n - 1.0));
  out.estimate = total_mass * mean;
  out.stderr_ = std::abs(total_mass) * std::sqrt(var / n);
  return out;
}

}  // namespace

double integrate_grid(const EvaluableFunction& f, const ProductMeasure& m, int resolution) {
  require(f.dim() == m.dim(), "dimension mismatch");
  require(resolution >= 2, "grid resolution must be >= 2");
  const int d = m.dim();

  Vec point(d);
  std::vector<int> free_coords;
  double dirac_scale = 1.0;
  for (int i = 0; i < d; ++i) {
    const auto& comp = m.component(i);
    if (comp.is_dirac()) {
      point[i] = comp.dirac_location();
      dirac_scale *= comp.scale();
    } else {
      free_coords.push_back(i);
    }
  }
  if (free_coords.empty()) return dirac_scale * f.value(point);
  if (dirac_scale == 0.0) return 0.0;

  std::int64_t grid_size = 1;
  for (std::size_t k = 0; k < free_coords.size(); ++k) {
    grid_size *= resolution;
    if (grid_size > kMaxGridCells) {
      throw CapacityError("quadrature grid " + std::to_string(resolution) + "^" +
                          std::to_string(free_coords.size()) + " exceeds cell budget");
    }
  }

  // Midpoint weights per free coordinate, rescaled so each column sums to
  // the component's exact interval mass.
  std::vector<std::vector<double>> weights(free_coords.size());
  std::vector<std::vector<double>> nodes(free_coords.size());
  for (std::size_t k = 0; k < free_coords.size(); ++k) {
    const auto& comp = m.component(free_coords[k]);
    auto& w = weights[k];
    auto& y = nodes[k];
    w.resize(static_cast<std::size_t>(resolution));
    y.resize(static_cast<std::size_t>(resolution));
    NeumaierSum raw_total;
    for (int i = 0; i < resolution; ++i) {
      y[static_cast<std::size_t>(i)] = (i + 0.5) / resolution;
      w[static_cast<std::size_t>(i)] = comp.density_at(y[static_cast<std::size_t>(i)]) / resolution;
      raw_total.add(w[static_cast<std::size_t>(i)]);
    }
    const double target = comp.total_mass();
    const double raw = raw_total.value();
    if (raw != 0.0) {
      const double fix = target / raw;
      for (auto& wi : w) wi *= fix;
    }
  }

  // Outermost free coordinate parallelized; slices merged in index order.
  const std::size_t nk = free_coords.size();
  const std::int64_t slice_size = grid_size / resolution;
  std::vector<double> slice_values(static_cast<std::size_t>(resolution));
  parallel_indexed(resolution, [&](std::int64_t outer) {
    Vec y = point;
    std::vector<int> idx(nk, 0);
    idx[nk - 1] = static_cast<int>(outer);
    y[free_coords[nk - 1]] = nodes[nk - 1][static_cast<std::size_t>(outer)];
    NeumaierSum acc;
    for (std::int64_t flat = 0; flat < slice_size; ++flat) {
      double w = weights[nk - 1][static_cast<std::size_t>(outer)];
      for (std::size_t k = 0; k + 1 < nk; ++k) {
        y[free_coords[k]] = nodes[k][static_cast<std::size_t>(idx[k])];
        w *= weights[k][static_cast<std::size_t>(idx[k])];
      }
      acc.add(w * f.value(y));
      for (std::size_t k = 0; k + 1 < nk; ++k) {
        if (++idx[k] < resolution) break;
        idx[k] = 0;
      }
    }
    slice_values[static_cast<std::size_t>(outer)] = acc.value();
  });

  NeumaierSum total;
  for (double v : slice_values) total.add(v);
  return dirac_scale * total.value();
}

McEstimate integrate_mc(const EvaluableFunction& f, const Measure& m, std::int64_t samples,
                        std::uint64_t seed) {
  require(f.dim() == measure_dim(m), "dimension mismatch");
  require(samples >= 2, "Monte Carlo needs at least 2 samples");
  const int d = measure_dim(m);
  const double total_mass = measure_total_mass(m);

  if (const auto* product = std::get_if<ProductMeasure>(&m)) {
    return chunked_mc(samples, total_mass,
                      [&](std::int64_t chunk, std::int64_t count, ChunkStats& stats) {
                        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(chunk));
                        Vec y(d);
                        for (std::int64_t i = 0; i < count; ++i) {
                          for (int k = 0; k < d; ++k) {
                            y[k] = product->component(k).sample(uniform01(rng));
                          }
                          const double v = f.value(y);
                          stats.sum += v;
                          stats.sum_sq += v * v;
                          stats.min = std::min(stats.min, v);
                          stats.max = std::max(stats.max, v);
                        }
                      });
  }

  const auto& data = std::get<DataMeasure>(m);
  if (data.has_finite_rows()) {
    return chunked_mc(samples, total_mass,
                      [&](std::int64_t chunk, std::int64_t count, ChunkStats& stats) {
                        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(chunk));
                        for (std::int64_t i = 0; i < count; ++i) {
                          const Vec y = data.effective_row(data.sample_row(uniform01(rng)));
                          const double v = f.value(y);
                          stats.sum += v;
                          stats.sum_sq += v * v;
                          stats.min = std::min(stats.min, v);
                          stats.max = std::max(stats.max, v);
                        }
                      });
  }

  return chunked_mc(samples, total_mass,
                    [&](std::int64_t chunk, std::int64_t count, ChunkStats& stats) {
                      std::mt19937_64 rng(seed + static_cast<std::uint64_t>(chunk));
                      Vec y(d);
                      for (std::int64_t i = 0; i < count; ++i) {
                        for (int k = 0; k < d; ++k) {
                          y[k] = data.sample_marginal(k, uniform01(rng));
                        }
                        const double v = f.value(y);
                        stats.sum += v;
                        stats.sum_sq += v * v;
                        stats.min = std::min(stats.min, v);
                        stats.max = std::max(stats.max, v);
                      }
                    });
}

double integrate_data_exact(const EvaluableFunction& f, const DataMeasure& m) {
  require(f.dim() == m.dim(), "dimension mismatch");
  require(m.has_finite_rows(), "marginals-product has no finite support; use Monte Carlo");
  NeumaierSum acc;
  for (std::int64_t r = 0; r < m.effective_row_count(); ++r) {
    acc.add(m.effective_weight(r) * f.value(m.effective_row(r)));
  }
  return acc.value();
}

double approx_attribution_sum(const PiecewiseConstantApprox& fp, const Measure& m) {
  require(fp.dim() == measure_dim(m), "dimension mismatch");
  const int d = fp.dim();
  const int p = fp.resolution();

  // Finite-support empirical measures reduce to a weighted sum of cell
  // values at the rows.
  if (const auto* data = std::get_if<DataMeasure>(&m); data && data->has_finite_rows()) {
    NeumaierSum acc;
    for (std::int64_t r = 0; r < data->effective_row_count(); ++r) {
      acc.add(data->effective_weight(r) * fp.value(data->effective_row(r)));
    }
    return acc.value();
  }

  // Product-structured measures: per-coordinate cell masses, then one pass
  // over the value grid.
  std::vector<std::vector<double>> cell_mass(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    auto& masses = cell_mass[static_cast<std::size_t>(k)];
    masses.resize(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
      const double a = static_cast<double>(i) / p;
      const double b = static_cast<double>(i + 1) / p;
      if (const auto* product = std::get_if<ProductMeasure>(&m)) {
        masses[static_cast<std::size_t>(i)] = product->component(k).interval_mass(a, b);
      } else {
        masses[static_cast<std::size_t>(i)] =
            std::get<DataMeasure>(m).marginal_interval_mass(k, a, b);
      }
    }
  }

  NeumaierSum acc;
  std::vector<int> cell(static_cast<std::size_t>(d), 0);
  const std::size_t cells = fp.grid_values().size();
  for (std::size_t flat = 0; flat < cells; ++flat) {
    double mass = 1.0;
    for (int k = 0; k < d; ++k) {
      mass *= cell_mass[static_cast<std::size_t>(k)][static_cast<std::size_t>(
          cell[static_cast<std::size_t>(k)])];
      if (mass == 0.0) break;
    }
    if (mass != 0.0) acc.add(fp.grid_values()[flat] * mass);
    for (int k = 0; k < d; ++k) {
      if (++cell[static_cast<std::size_t>(k)] < p) break;
      cell[static_cast<std::size_t>(k)] = 0;
    }
  }
  return acc.value();
}

}  // namespace attrikit
