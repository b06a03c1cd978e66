#include "core/attribution.hpp"

#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace attrikit {

namespace {

// Per-feature seed stride; chunk indices (samples/4096) stay far below it.
constexpr std::uint64_t kFeatureSeedStride = 1000003;

std::string fingerprint_of(const EvaluableFunction& f) {
  if (const auto* net = dynamic_cast<const NetworkFunction*>(&f)) {
    return net->network().fingerprint();
  }
  return fnv1a_hex(f.description());
}

nlohmann::ordered_json settings_echo(const MeasureFamily& family, const AttributeOptions& opts,
                                     int grid_res_used) {
  nlohmann::ordered_json settings;
  settings["preset"] = family.name();
  settings["grid_res"] = grid_res_used;
  settings["mc_samples"] = opts.mc_samples;
  settings["seed"] = opts.seed;
  return settings;
}

int capacity_clamped_resolution(int requested, int free_dims) {
  if (free_dims <= 0) return requested;
  int res = requested;
  while (res > 2) {
    std::int64_t size = 1;
    bool fits = true;
    for (int k = 0; k < free_dims; ++k) {
      size *= res;
      if (size > kMaxGridCells) {
        fits = false;
        break;
      }
    }
    if (fits) return res;
    res /= 2;
  }
  return 2;
}

int free_dimensions(const Measure& m) {
  if (const auto* product = std::get_if<ProductMeasure>(&m)) {
    int free = 0;
    for (int i = 0; i < product->dim(); ++i) {
      if (!product->component(i).is_dirac()) ++free;
    }
    return free;
  }
  return measure_dim(m);
}

}  // namespace

AttrMethod attr_method_from_string(const std::string& name) {
  if (name == "auto") return AttrMethod::Auto;
  if (name == "exact") return AttrMethod::Exact;
  if (name == "grid") return AttrMethod::Grid;
  if (name == "mc") return AttrMethod::Mc;
  throw ValidationError("unknown method: " + name + " (expected exact|grid|mc|auto)");
}

std::string attr_method_name(AttrMethod m) {
  switch (m) {
    case AttrMethod::Auto: return "auto";
    case AttrMethod::Exact: return "exact";
    case AttrMethod::Grid: return "grid";
    case AttrMethod::Mc: return "mc";
  }
  return "auto";
}

AttributionReport attribute(const EvaluableFunction& f, const MeasureFamily& family, const Vec& x,
                            const AttributeOptions& opts) {
  const int d = f.dim();
  require(family.dim() == d, "family dimension does not match the function");
  require(x.size() == d, "explained point has wrong dimension");
  require(in_unit_box(x, 1e-12), "explained point must lie in [0,1]^d");

  const auto* as_network = dynamic_cast<const NetworkFunction*>(&f);
  AttrMethod method = opts.method;
  if (method == AttrMethod::Exact && as_network == nullptr) {
    throw ValidationError("exact requires relu model");
  }

  // Probe one measure to steer auto selection and grid dispatch.
  const Measure probe = family.measure_for(0, x);
  const bool data_backed = std::holds_alternative<DataMeasure>(probe);
  const bool data_finite =
      data_backed && std::get<DataMeasure>(probe).has_finite_rows();

  if (method == AttrMethod::Auto) {
    const bool caps_ok = as_network != nullptr &&
                         d <= opts.caps.max_dim &&
                         as_network->network().hidden_unit_count() <= opts.caps.max_hidden_units;
    if (caps_ok && !data_backed) {
      method = AttrMethod::Exact;
    } else if (data_backed) {
      method = data_finite ? AttrMethod::Grid : AttrMethod::Mc;
    } else {
      method = free_dimensions(probe) <= 4 ? AttrMethod::Grid : AttrMethod::Mc;
    }
  }

  if (method == AttrMethod::Exact) {
    return attribute_relu_exact(as_network->network(), family, x, opts);
  }

  AttributionReport report;
  report.x = x;
  report.phi = Vec::Zero(d);
  report.model_fingerprint = fingerprint_of(f);

  if (method == AttrMethod::Grid) {
    int res_used = opts.grid_res;
    for (int j = 0; j < d; ++j) {
      const Measure measure = family.measure_for(j, x);
      if (const auto* product = std::get_if<ProductMeasure>(&measure)) {
        const int res =
            opts.method == AttrMethod::Auto
                ? capacity_clamped_resolution(opts.grid_res, free_dimensions(measure))
                : opts.grid_res;
        res_used = res;
        report.phi[j] = integrate_grid(f, *product, res);
      } else {
        const auto& data = std::get<DataMeasure>(measure);
        require(data.has_finite_rows(),
                "grid backend cannot integrate marginals-product measures; use mc");
        report.phi[j] = integrate_data_exact(f, data);
      }
    }
    report.method = "grid";
    report.settings = settings_echo(family, opts, res_used);
    return report;
  }

  // Monte Carlo: independent seeded stream per feature.
  Vec stderrs = Vec::Zero(d);
  for (int j = 0; j < d; ++j) {
    const Measure measure = family.measure_for(j, x);
    const auto est = integrate_mc(f, measure, opts.mc_samples,
                                  opts.seed + static_cast<std::uint64_t>(j) * kFeatureSeedStride);
    report.phi[j] = est.estimate;
    stderrs[j] = est.stderr_;
  }
  report.method = "mc";
  report.stderr_ = stderrs;
  report.settings = settings_echo(family, opts, opts.grid_res);
  return report;
}

AttributionReport attribute_relu_exact(const ReluNetwork& net, const MeasureFamily& family,
                                       const Vec& x, const AttributeOptions& opts) {
  const int d = net.input_dim();
  require(family.dim() == d, "family dimension does not match the network");
  require(x.size() == d, "explained point has wrong dimension");
  require(in_unit_box(x, 1e-12), "explained point must lie in [0,1]^d");

  const auto decomp = enumerate_regions_cached(net, opts.caps);
  AttributionReport report;
  report.x = x;
  report.phi = Vec::Zero(d);
  report.model_fingerprint = net.fingerprint();

  const auto region_count = static_cast<std::int64_t>(decomp->regions.size());
  for (int j = 0; j < d; ++j) {
    const Measure measure = family.measure_for(j, x);
    std::vector<double> terms(static_cast<std::size_t>(region_count));
    parallel_indexed(region_count, [&](std::int64_t r) {
      const Region& region = decomp->regions[static_cast<std::size_t>(r)];
      RegionMassOptions mass_opts;
      mass_opts.mc_samples = opts.region_mc_samples;
      mass_opts.seed = mix64(mix64(opts.seed, static_cast<std::uint64_t>(j)),
                             static_cast<std::uint64_t>(r));
      const RegionMass rm = measure_mass_centroid(region.polytope, measure, mass_opts);
      terms[static_cast<std::size_t>(r)] =
          rm.mass == 0.0 ? 0.0 : rm.mass * (region.a.dot(rm.center) + region.b);
    });
    NeumaierSum acc;
    for (double t : terms) acc.add(t);
    report.phi[j] = acc.value();
  }
  report.method = "exact";
  report.settings = settings_echo(family, opts, opts.grid_res);
  report.settings["regions"] = region_count;
  return report;
}

Vec attribute_linear_closed_form(const Vec& w, LinearPreset preset, const Vec* x) {
  if (preset == LinearPreset::Global) return w;
  require(x != nullptr, "local closed form needs the explained point");
  require(x->size() == w.size(), "dimension mismatch");
  for (Eigen::Index i = 0; i < x->size(); ++i) {
    if (!((*x)[i] > 0.0 && (*x)[i] < 1.0)) {
      throw ValidationError(
          "local closed form requires x in the open box (0,1)^d; coordinate " +
          std::to_string(i + 1) + " violates it");
    }
  }
  return w.cwiseProduct(*x);
}

AttributionReport pdp(const EvaluableFunction& f, const Vec& x, DatasetPtr data,
                      const AttributeOptions& opts) {
  const MeasureFamily family =
      data ? MeasureFamily::pdp_data(data) : MeasureFamily::pdp_uniform(f.dim());
  return attribute(f, family, x, opts);
}

AttributionReport conditional_expectation(const EvaluableFunction& f, const Vec& x,
                                          DatasetPtr data, double bandwidth,
                                          const AttributeOptions& opts) {
  require(static_cast<bool>(data), "conditional expectation needs a dataset");
  require(bandwidth > 0.0, "bandwidth must be positive");
  return attribute(f, MeasureFamily::conditional(data, bandwidth), x, opts);
}

AttributionReport marginal_product_attribution(const EvaluableFunction& f, const Vec& x,
                                               DatasetPtr data, std::int64_t samples,
                                               std::uint64_t seed) {
  require(static_cast<bool>(data), "marginal-product attribution needs a dataset");
  AttributeOptions opts;
  opts.method = AttrMethod::Mc;
  opts.mc_samples = samples;
  opts.seed = seed;
  return attribute(f, MeasureFamily::marginal_product(data), x, opts);
}

std::vector<Vec> approx_attribution_sequence(const EvaluableFunction& f,
                                             const MeasureFamily& family, const Vec& x,
                                             const std::vector<int>& p_list) {
  require(!p_list.empty(), "p_list must not be empty");
  for (std::size_t i = 0; i + 1 < p_list.size(); ++i) {
    require(p_list[i] < p_list[i + 1], "p_list must be ascending");
  }
  const int d = f.dim();
  require(family.dim() == d, "family dimension does not match the function");

  std::vector<Vec> out;
  out.reserve(p_list.size());
  for (int p : p_list) {
    const PiecewiseConstantApprox fp = approximate(f, p);
    Vec phi(d);
    for (int j = 0; j < d; ++j) {
      phi[j] = approx_attribution_sum(fp, family.measure_for(j, x));
    }
    out.push_back(std::move(phi));
  }
  return out;
}

}  // namespace attrikit
