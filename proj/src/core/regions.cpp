#include "core/regions.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <random>
#include <unordered_map>
#include <utility>

namespace attrikit {

namespace {

struct WorkCell {
  Polytope poly;
  std::vector<std::vector<bool>> masks;
};

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform point in a triangulated polytope: simplex by volume, then a
// Dirichlet(1,...,1) barycentric draw.
Vec sample_polytope(const Polytope& p, const std::vector<double>& cum_volumes,
                    std::mt19937_64& rng) {
  const double target = uniform01(rng) * cum_volumes.back();
  const auto it = std::lower_bound(cum_volumes.begin(), cum_volumes.end(), target);
  const std::size_t idx =
      std::min(static_cast<std::size_t>(it - cum_volumes.begin()), cum_volumes.size() - 1);
  const Simplex& s = p.simplices()[idx];
  Vec point = Vec::Zero(p.dim());
  double total = 0.0;
  std::vector<double> bary(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double e = -std::log(1.0 - uniform01(rng));
    bary[k] = e;
    total += e;
  }
  for (std::size_t k = 0; k < s.size(); ++k) point += (bary[k] / total) * s[k];
  return point;
}

}  // namespace

RegionDecomposition enumerate_regions(const ReluNetwork& net, const GeometryCaps& caps) {
  const int d = net.input_dim();
  if (d > caps.max_dim) {
    throw CapacityError("region enumeration capped at dimension " +
                        std::to_string(caps.max_dim) + ", network has " + std::to_string(d));
  }
  if (net.hidden_unit_count() > caps.max_hidden_units) {
    throw CapacityError("region enumeration capped at " + std::to_string(caps.max_hidden_units) +
                        " hidden units, network has " + std::to_string(net.hidden_unit_count()));
  }

  std::vector<WorkCell> cells;
  cells.push_back({Polytope::unit_box(d), {}});

  for (int layer = 0; layer < net.hidden_layer_count(); ++layer) {
    std::vector<WorkCell> next;
    for (auto& cell : cells) {
      const auto affine = net.preactivation_affine(cell.masks);
      struct SubCell {
        Polytope poly;
        std::vector<bool> bits;
      };
      std::vector<SubCell> subs;
      subs.push_back({std::move(cell.poly), {}});

      for (Eigen::Index unit = 0; unit < affine.linear.rows(); ++unit) {
        const Vec normal = affine.linear.row(unit).transpose();
        const double c = affine.constant[unit];
        std::vector<SubCell> refined;
        for (auto& sub : subs) {
          double smin = std::numeric_limits<double>::infinity();
          double smax = -std::numeric_limits<double>::infinity();
          for (const auto& v : sub.poly.vertices()) {
            const double s = normal.dot(v) + c;
            smin = std::min(smin, s);
            smax = std::max(smax, s);
          }
          if (smax <= 0.0) {  // entirely inactive (ties count as inactive)
            sub.bits.push_back(false);
            refined.push_back(std::move(sub));
          } else if (smin >= 0.0) {
            sub.bits.push_back(true);
            refined.push_back(std::move(sub));
          } else {
            auto [below, above] = sub.poly.split(normal, -c);
            if (below.empty() && above.empty()) continue;
            if (below.empty()) {
              sub.bits.push_back(true);
              refined.push_back({std::move(above), sub.bits});
            } else if (above.empty()) {
              sub.bits.push_back(false);
              refined.push_back({std::move(below), sub.bits});
            } else {
              auto bits_true = sub.bits;
              sub.bits.push_back(false);
              refined.push_back({std::move(below), std::move(sub.bits)});
              bits_true.push_back(true);
              refined.push_back({std::move(above), std::move(bits_true)});
            }
          }
        }
        subs = std::move(refined);
      }

      for (auto& sub : subs) {
        auto masks = cell.masks;
        masks.push_back(std::move(sub.bits));
        next.push_back({std::move(sub.poly), std::move(masks)});
      }
    }
    cells = std::move(next);
  }

  RegionDecomposition out;
  out.dim = d;
  out.fingerprint = net.fingerprint();
  out.regions.reserve(cells.size());
  for (auto& cell : cells) {
    const auto coeffs = net.affine_coeffs(cell.masks);
    out.regions.push_back({std::move(cell.poly), std::move(cell.masks), coeffs.a, coeffs.b});
  }
  return out;
}

std::shared_ptr<const RegionDecomposition> enumerate_regions_cached(const ReluNetwork& net,
                                                                    const GeometryCaps& caps) {
  static std::mutex mutex;
  static std::unordered_map<std::string, std::shared_ptr<const RegionDecomposition>> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    const auto it = cache.find(net.fingerprint());
    if (it != cache.end()) return it->second;
  }
  auto computed = std::make_shared<const RegionDecomposition>(enumerate_regions(net, caps));
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(net.fingerprint(), std::move(computed)).first->second;
}

double lebesgue_volume(const Polytope& p) { return p.volume(); }

Vec lebesgue_centroid(const Polytope& p) { return p.centroid(); }

namespace {

RegionMass zero_mass(int dim) {
  RegionMass out;
  out.center = Vec::Zero(dim);
  return out;
}

RegionMass product_mass_centroid(const Polytope& p, const ProductMeasure& m,
                                 const RegionMassOptions& opts) {
  const int d = m.dim();
  RegionMass out = zero_mass(d);
  if (p.empty()) return out;

  std::vector<std::pair<int, double>> pinned;
  double dirac_scale = 1.0;
  std::vector<int> kept;
  for (int i = 0; i < d; ++i) {
    const auto& comp = m.component(i);
    if (comp.is_dirac()) {
      pinned.emplace_back(i, comp.dirac_location());
      dirac_scale *= comp.scale();
    } else {
      kept.push_back(i);
    }
  }
  if (dirac_scale == 0.0) return out;

  if (kept.empty()) {
    Vec point(d);
    for (const auto& [coord, value] : pinned) point[coord] = value;
    if (!p.contains_for_mass(point)) return out;
    out.mass = dirac_scale;
    out.center = point;
    return out;
  }

  const Polytope* domain = &p;
  std::optional<Polytope> sliced;
  if (!pinned.empty()) {
    sliced.emplace(p.slice(pinned));
    domain = &*sliced;
  }
  if (domain->empty()) return out;

  if (!m.has_density()) {
    // Remaining coordinates are (scaled) Lebesgue: exact via triangulation.
    double scale = dirac_scale;
    for (int i : kept) scale *= m.component(i).scale();
    out.mass = scale * domain->volume();
    if (out.mass == 0.0) return out;
    const Vec centroid = domain->centroid();
    for (const auto& [coord, value] : pinned) out.center[coord] = value;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      out.center[kept[k]] = centroid[static_cast<Eigen::Index>(k)];
    }
    return out;
  }

  // Density components: Monte Carlo with a uniform simplex-sampling proposal.
  const auto& simplices = domain->simplices();
  if (simplices.empty()) return out;
  std::vector<double> cum_volumes(simplices.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    acc += simplex_volume(simplices[s]);
    cum_volumes[s] = acc;
  }
  const double vol = acc;
  if (vol <= 0.0) return out;

  const std::int64_t n = std::max<std::int64_t>(opts.mc_samples, 16);
  NeumaierSum w_sum, w_sq;
  std::vector<NeumaierSum> wy(kept.size());
  constexpr std::int64_t kChunk = 4096;
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  std::int64_t done = 0;
  for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
    std::mt19937_64 rng(mix64(opts.seed, static_cast<std::uint64_t>(chunk)));
    const std::int64_t take = std::min(kChunk, n - done);
    for (std::int64_t i = 0; i < take; ++i) {
      const Vec y = sample_polytope(*domain, cum_volumes, rng);
      double w = 1.0;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        w *= m.component(kept[k]).density_at(y[static_cast<Eigen::Index>(k)]);
      }
      w_sum.add(w);
      w_sq.add(w * w);
      for (std::size_t k = 0; k < kept.size(); ++k) {
        wy[k].add(w * y[static_cast<Eigen::Index>(k)]);
      }
    }
    done += take;
  }
  const double mean_w = w_sum.value() / static_cast<double>(n);
  const double var_w =
      std::max(0.0, (w_sq.value() - static_cast<double>(n) * mean_w * mean_w) /
                        static_cast<double>(n - 1));
  out.mass = dirac_scale * vol * mean_w;
  out.monte_carlo = true;
  out.mass_stderr = std::abs(dirac_scale) * vol * std::sqrt(var_w / static_cast<double>(n));
  if (std::abs(out.mass) < 1e-12) return out;  // zero-center convention
  for (const auto& [coord, value] : pinned) out.center[coord] = value;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const double n_k = dirac_scale * vol * (wy[k].value() / static_cast<double>(n));
    out.center[kept[k]] = n_k / out.mass;
  }
  return out;
}

RegionMass data_mass_centroid(const Polytope& p, const DataMeasure& m,
                              const RegionMassOptions& opts) {
  const int d = m.dim();
  RegionMass out = zero_mass(d);
  if (p.empty()) return out;

  if (m.has_finite_rows()) {
    Vec weighted = Vec::Zero(d);
    for (std::int64_t r = 0; r < m.effective_row_count(); ++r) {
      const Vec row = m.effective_row(r);
      if (p.contains_for_mass(row)) {
        const double w = m.effective_weight(r);
        out.mass += w;
        weighted += w * row;
      }
    }
    if (out.mass != 0.0) out.center = weighted / out.mass;
    return out;
  }

  // Product of empirical marginals: sample coordinates independently and
  // test membership.
  const std::int64_t n = std::max<std::int64_t>(opts.mc_samples, 16);
  std::int64_t hits = 0;
  Vec acc = Vec::Zero(d);
  constexpr std::int64_t kChunk = 4096;
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  std::int64_t done = 0;
  Vec y(d);
  for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
    std::mt19937_64 rng(mix64(opts.seed, static_cast<std::uint64_t>(chunk)));
    const std::int64_t take = std::min(kChunk, n - done);
    for (std::int64_t i = 0; i < take; ++i) {
      for (int k = 0; k < d; ++k) y[k] = m.sample_marginal(k, uniform01(rng));
      if (p.contains_for_mass(y)) {
        ++hits;
        acc += y;
      }
    }
    done += take;
  }
  const double rate = static_cast<double>(hits) / static_cast<double>(n);
  out.mass = rate;
  out.monte_carlo = true;
  out.mass_stderr = std::sqrt(std::max(0.0, rate * (1.0 - rate) / static_cast<double>(n)));
  if (hits > 0) out.center = acc / static_cast<double>(hits);
  return out;
}

}  // namespace

RegionMass measure_mass_centroid(const Polytope& p, const Measure& m,
                                 const RegionMassOptions& opts) {
  require(p.dim() == measure_dim(m), "dimension mismatch");
  if (const auto* product = std::get_if<ProductMeasure>(&m)) {
    return product_mass_centroid(p, *product, opts);
  }
  return data_mass_centroid(p, std::get<DataMeasure>(m), opts);
}

MassCenter center_of_mass(const Measure& m, const Polytope& p) {
  const RegionMass r = measure_mass_centroid(p, m);
  return {r.mass, r.center};
}

}  // namespace attrikit
