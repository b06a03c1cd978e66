#pragma once

#include "core/function.hpp"
#include "core/integrate.hpp"
#include "core/measure.hpp"
#include "core/regions.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace attrikit {

enum class AttrMethod { Auto, Exact, Grid, Mc };

AttrMethod attr_method_from_string(const std::string& name);
std::string attr_method_name(AttrMethod m);

struct AttributeOptions {
  AttrMethod method = AttrMethod::Auto;
  int grid_res = 1024;
  std::int64_t mc_samples = 100000;
  std::uint64_t seed = 0;
  GeometryCaps caps{};
  std::int64_t region_mc_samples = 65536;  // density measures inside exact regions
};

struct AttributionReport {
  Vec x;
  Vec phi;
  std::string method;  // "exact" | "grid" | "mc" | "closed-form" | "atomic-sum"
  std::optional<Vec> stderr_;  // per-feature, Monte Carlo only
  nlohmann::ordered_json settings;
  std::string model_fingerprint;
};

// phi_j = integral of f against the family's measure for (j, x), computed by
// the requested backend. Auto picks exact for ReLU networks within the
// geometry caps, an exact weighted sum for finite-support data measures,
// grid quadrature up to 4 free dimensions, Monte Carlo otherwise.
AttributionReport attribute(const EvaluableFunction& f, const MeasureFamily& family, const Vec& x,
                            const AttributeOptions& opts = {});

// Closed-form region sum of the piecewise-affine representation:
// phi_j = sum over regions P of mu_jx(P) (a_P . m + b_P).
AttributionReport attribute_relu_exact(const ReluNetwork& net, const MeasureFamily& family,
                                       const Vec& x, const AttributeOptions& opts = {});

enum class LinearPreset { Global, Local };

// w (global) or w*x elementwise (local; requires x in the open box).
Vec attribute_linear_closed_form(const Vec& w, LinearPreset preset, const Vec* x = nullptr);

AttributionReport pdp(const EvaluableFunction& f, const Vec& x, DatasetPtr data = nullptr,
                      const AttributeOptions& opts = {});
AttributionReport conditional_expectation(const EvaluableFunction& f, const Vec& x,
                                          DatasetPtr data, double bandwidth,
                                          const AttributeOptions& opts = {});
AttributionReport marginal_product_attribution(const EvaluableFunction& f, const Vec& x,
                                               DatasetPtr data, std::int64_t samples,
                                               std::uint64_t seed);

// phi(x, f_p) for each resolution in ascending p_list, via the literal
// atomic-attribution sum on the piecewise-constant surrogate.
std::vector<Vec> approx_attribution_sequence(const EvaluableFunction& f,
                                             const MeasureFamily& family, const Vec& x,
                                             const std::vector<int>& p_list);

}  // namespace attrikit
