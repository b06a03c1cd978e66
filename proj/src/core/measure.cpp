#include "core/measure.hpp"

#include "core/expression.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace attrikit {

namespace {

constexpr int kDensityTableRes = 4096;

// Interval membership under the right-closed convention.
inline bool interval_contains(double a, double b, double y) {
  return a == 0.0 ? (y >= 0.0 && y <= b) : (y > a && y <= b);
}

}  // namespace

HyperRectangle::HyperRectangle(Vec lo, Vec up) : lower(std::move(lo)), upper(std::move(up)) {
  require(lower.size() == upper.size() && lower.size() > 0, "rectangle bounds mismatch");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    require(lower[i] <= upper[i], "rectangle has lower > upper at coordinate " +
                                      std::to_string(i + 1));
    require(lower[i] >= 0.0 && upper[i] <= 1.0, "rectangle must lie in the unit box");
  }
}

HyperRectangle HyperRectangle::unit_box(int d) {
  return HyperRectangle(Vec::Zero(d), Vec::Ones(d));
}

bool HyperRectangle::contains(const Vec& y) const {
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!interval_contains(lower[i], upper[i], y[i])) return false;
  }
  return true;
}

struct MeasureComponent::Tables {
  std::vector<double> cum_mass;
  std::vector<double> cum_moment;
  double total = 0.0;

  static double interp(const std::vector<double>& cum, double y) {
    if (y <= 0.0) return cum.front();
    if (y >= 1.0) return cum.back();
    const double t = y * kDensityTableRes;
    const int k = static_cast<int>(t);
    const double frac = t - k;
    const auto ku = static_cast<std::size_t>(k);
    return cum[ku] + frac * (cum[ku + 1] - cum[ku]);
  }
};

MeasureComponent MeasureComponent::dirac(double location) {
  require(location >= 0.0 && location <= 1.0, "Dirac location must lie in [0,1]");
  MeasureComponent c;
  c.kind_ = Kind::Dirac;
  c.location_ = location;
  return c;
}

MeasureComponent MeasureComponent::lebesgue() {
  MeasureComponent c;
  c.kind_ = Kind::Lebesgue;
  return c;
}

MeasureComponent MeasureComponent::density(std::function<double(double)> h, std::string name) {
  require(static_cast<bool>(h), "null density");
  MeasureComponent c;
  c.kind_ = Kind::Density;
  c.h_ = std::move(h);
  c.density_name_ = std::move(name);

  auto tables = std::make_shared<Tables>();
  tables->cum_mass.resize(kDensityTableRes + 1);
  tables->cum_moment.resize(kDensityTableRes + 1);
  double prev_h = 0.0;
  for (int k = 0; k <= kDensityTableRes; ++k) {
    const double y = static_cast<double>(k) / kDensityTableRes;
    const double hy = c.h_(y);
    require(std::isfinite(hy), "density is non-finite at y=" + std::to_string(y));
    require(hy >= -1e-9, "density must be nonnegative; wrap with scaled() for signed measures");
    const double clamped = std::max(hy, 0.0);
    if (k == 0) {
      tables->cum_mass[0] = 0.0;
      tables->cum_moment[0] = 0.0;
    } else {
      const double step = 1.0 / kDensityTableRes;
      const double y_prev = static_cast<double>(k - 1) / kDensityTableRes;
      tables->cum_mass[static_cast<std::size_t>(k)] =
          tables->cum_mass[static_cast<std::size_t>(k - 1)] + 0.5 * (prev_h + clamped) * step;
      tables->cum_moment[static_cast<std::size_t>(k)] =
          tables->cum_moment[static_cast<std::size_t>(k - 1)] +
          0.5 * (y_prev * prev_h + y * clamped) * step;
    }
    prev_h = clamped;
  }
  tables->total = tables->cum_mass.back();
  c.tables_ = std::move(tables);
  return c;
}

MeasureComponent MeasureComponent::scaled(MeasureComponent inner, double factor) {
  require(std::isfinite(factor), "scale factor must be finite");
  inner.scale_ *= factor;
  return inner;
}

double MeasureComponent::dirac_location() const {
  require(kind_ == Kind::Dirac, "component is not a Dirac");
  return location_;
}

double MeasureComponent::total_mass() const {
  switch (kind_) {
    case Kind::Dirac: return scale_;
    case Kind::Lebesgue: return scale_;
    case Kind::Density: return scale_ * tables_->total;
  }
  return 0.0;
}

double MeasureComponent::interval_mass(double a, double b) const {
  switch (kind_) {
    case Kind::Dirac: return interval_contains(a, b, location_) ? scale_ : 0.0;
    case Kind::Lebesgue: return scale_ * (b - a);
    case Kind::Density:
      return scale_ * (Tables::interp(tables_->cum_mass, b) - Tables::interp(tables_->cum_mass, a));
  }
  return 0.0;
}

double MeasureComponent::interval_moment(double a, double b) const {
  switch (kind_) {
    case Kind::Dirac:
      return interval_contains(a, b, location_) ? scale_ * location_ : 0.0;
    case Kind::Lebesgue: return scale_ * 0.5 * (b * b - a * a);
    case Kind::Density:
      return scale_ *
             (Tables::interp(tables_->cum_moment, b) - Tables::interp(tables_->cum_moment, a));
  }
  return 0.0;
}

double MeasureComponent::density_at(double y) const {
  switch (kind_) {
    case Kind::Dirac: throw ValidationError("Dirac component has no density");
    case Kind::Lebesgue: return scale_;
    case Kind::Density: return scale_ * std::max(h_(y), 0.0);
  }
  return 0.0;
}

double MeasureComponent::sample(double u) const {
  switch (kind_) {
    case Kind::Dirac: return location_;
    case Kind::Lebesgue: return u;
    case Kind::Density: {
      const auto& cum = tables_->cum_mass;
      require(tables_->total > 0.0, "cannot sample from a zero-mass density");
      const double target = u * tables_->total;
      auto it = std::lower_bound(cum.begin(), cum.end(), target);
      if (it == cum.begin()) return 0.0;
      const auto hi = static_cast<std::size_t>(it - cum.begin());
      const std::size_t lo = hi - 1;
      const double seg = cum[hi] - cum[lo];
      const double frac = seg > 0.0 ? (target - cum[lo]) / seg : 0.0;
      return (static_cast<double>(lo) + frac) / kDensityTableRes;
    }
  }
  return 0.0;
}

std::string MeasureComponent::describe() const {
  std::string base;
  switch (kind_) {
    case Kind::Dirac: base = "dirac(" + std::to_string(location_) + ")"; break;
    case Kind::Lebesgue: base = "lebesgue"; break;
    case Kind::Density: base = "density(" + density_name_ + ")"; break;
  }
  if (scale_ != 1.0) base += "*" + std::to_string(scale_);
  return base;
}

ProductMeasure::ProductMeasure(std::vector<MeasureComponent> components)
    : components_(std::move(components)) {
  require(!components_.empty(), "product measure needs at least one component");
}

double ProductMeasure::total_mass() const {
  double m = 1.0;
  for (const auto& c : components_) m *= c.total_mass();
  return m;
}

bool ProductMeasure::all_dirac() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const MeasureComponent& c) { return c.is_dirac(); });
}

bool ProductMeasure::has_density() const {
  return std::any_of(components_.begin(), components_.end(), [](const MeasureComponent& c) {
    return c.kind() == MeasureComponent::Kind::Density;
  });
}

DataMeasure::DataMeasure(DatasetPtr data, Mode mode, int feature, double value, double bandwidth)
    : data_(std::move(data)), mode_(mode), feature_(feature), value_(value),
      bandwidth_(bandwidth) {
  require(static_cast<bool>(data_), "data measure needs a dataset");
  if (mode_ != Mode::Joint) {
    require(feature_ >= 0 && feature_ < data_->dim(), "feature index out of range");
  }
  if (mode_ == Mode::Conditional) {
    require(bandwidth_ > 0.0, "conditional bandwidth must be positive");
    for (std::int64_t r = 0; r < data_->row_count(); ++r) {
      if (std::abs(data_->rows()(r, feature_) - value_) <= bandwidth_) selected_.push_back(r);
    }
    if (selected_.empty()) {
      throw ValidationError("empty-measure: no dataset row within bandwidth " +
                            std::to_string(bandwidth_) + " of feature " +
                            std::to_string(feature_ + 1));
    }
  }
  const std::int64_t rows =
      mode_ == Mode::Conditional ? static_cast<std::int64_t>(selected_.size())
                                 : data_->row_count();
  cumulative_weights_.resize(rows);
  double acc = 0.0;
  for (std::int64_t r = 0; r < rows; ++r) {
    acc += mode_ == Mode::MarginalsProduct ? data_->weights()[r] : effective_weight(r);
    cumulative_weights_[r] = acc;
  }
}

DataMeasure DataMeasure::joint(DatasetPtr data) {
  return DataMeasure(std::move(data), Mode::Joint, -1, 0.0, 0.0);
}

DataMeasure DataMeasure::conditional(DatasetPtr data, int feature, double value,
                                     double bandwidth) {
  return DataMeasure(std::move(data), Mode::Conditional, feature, value, bandwidth);
}

DataMeasure DataMeasure::marginals_product(DatasetPtr data, int pinned_feature,
                                           double pinned_value) {
  return DataMeasure(std::move(data), Mode::MarginalsProduct, pinned_feature, pinned_value, 0.0);
}

DataMeasure DataMeasure::pdp_data(DatasetPtr data, int feature, double value) {
  return DataMeasure(std::move(data), Mode::PdpData, feature, value, 0.0);
}

std::int64_t DataMeasure::effective_row_count() const {
  require(has_finite_rows(), "marginals-product has no finite row support");
  return mode_ == Mode::Conditional ? static_cast<std::int64_t>(selected_.size())
                                    : data_->row_count();
}

Vec DataMeasure::effective_row(std::int64_t r) const {
  Vec row;
  if (mode_ == Mode::Conditional) {
    row = data_->rows().row(selected_[static_cast<std::size_t>(r)]).transpose();
  } else {
    row = data_->rows().row(r).transpose();
  }
  if (mode_ == Mode::PdpData) row[feature_] = value_;
  return row;
}

double DataMeasure::effective_weight(std::int64_t r) const {
  if (mode_ == Mode::Conditional) return 1.0 / static_cast<double>(selected_.size());
  return data_->weights()[r];
}

double DataMeasure::marginal_interval_mass(int k, double a, double b) const {
  if (mode_ == Mode::MarginalsProduct && k == feature_) {
    return interval_contains(a, b, value_) ? 1.0 : 0.0;
  }
  double mass = 0.0;
  for (std::int64_t r = 0; r < data_->row_count(); ++r) {
    if (interval_contains(a, b, data_->rows()(r, k))) mass += data_->weights()[r];
  }
  return mass;
}

double DataMeasure::marginal_interval_moment(int k, double a, double b) const {
  if (mode_ == Mode::MarginalsProduct && k == feature_) {
    return interval_contains(a, b, value_) ? value_ : 0.0;
  }
  double moment = 0.0;
  for (std::int64_t r = 0; r < data_->row_count(); ++r) {
    const double y = data_->rows()(r, k);
    if (interval_contains(a, b, y)) moment += data_->weights()[r] * y;
  }
  return moment;
}

double DataMeasure::sample_marginal(int k, double u) const {
  if (mode_ == Mode::MarginalsProduct && k == feature_) return value_;
  const double target = u * cumulative_weights_[cumulative_weights_.size() - 1];
  const double* begin = cumulative_weights_.data();
  const double* end = begin + cumulative_weights_.size();
  const auto idx = std::lower_bound(begin, end, target) - begin;
  const auto row = std::min<std::int64_t>(idx, data_->row_count() - 1);
  return data_->rows()(row, k);
}

std::int64_t DataMeasure::sample_row(double u) const {
  require(has_finite_rows(), "marginals-product has no finite row support");
  const double target = u * cumulative_weights_[cumulative_weights_.size() - 1];
  const double* begin = cumulative_weights_.data();
  const double* end = begin + cumulative_weights_.size();
  const auto idx = std::lower_bound(begin, end, target) - begin;
  return std::min<std::int64_t>(idx, effective_row_count() - 1);
}

int measure_dim(const Measure& m) {
  return std::visit([](const auto& v) { return v.dim(); }, m);
}

double measure_total_mass(const Measure& m) {
  return std::visit([](const auto& v) { return v.total_mass(); }, m);
}

double rect_mass(const ProductMeasure& m, const HyperRectangle& rect) {
  require(m.dim() == rect.dim(), "dimension mismatch");
  double mass = 1.0;
  for (int i = 0; i < m.dim(); ++i) {
    mass *= m.component(i).interval_mass(rect.lower[i], rect.upper[i]);
    if (mass == 0.0) return 0.0;
  }
  return mass;
}

double rect_mass(const DataMeasure& m, const HyperRectangle& rect) {
  require(m.dim() == rect.dim(), "dimension mismatch");
  if (!m.has_finite_rows()) {
    double mass = 1.0;
    for (int k = 0; k < m.dim(); ++k) {
      mass *= m.marginal_interval_mass(k, rect.lower[k], rect.upper[k]);
      if (mass == 0.0) return 0.0;
    }
    return mass;
  }
  double mass = 0.0;
  for (std::int64_t r = 0; r < m.effective_row_count(); ++r) {
    if (rect.contains(m.effective_row(r))) mass += m.effective_weight(r);
  }
  return mass;
}

double rect_mass(const Measure& m, const HyperRectangle& rect) {
  return std::visit([&](const auto& v) { return rect_mass(v, rect); }, m);
}

double increment(const std::function<double(const Vec&)>& g, const HyperRectangle& rect) {
  const int d = rect.dim();
  if (d > 20) throw CapacityError("increment over " + std::to_string(d) + " dimensions needs 2^" +
                                  std::to_string(d) + " corners");
  NeumaierSum sum;
  Vec corner(d);
  const std::uint32_t corners = 1u << d;
  for (std::uint32_t mask = 0; mask < corners; ++mask) {
    int parity = 0;
    for (int i = 0; i < d; ++i) {
      const bool from_lower = (mask >> i) & 1u;
      corner[i] = from_lower ? rect.lower[i] : rect.upper[i];
      parity ^= from_lower ? 1 : 0;
    }
    const double v = g(corner);
    sum.add(parity ? -v : v);
  }
  return sum.value();
}

MassCenter center_of_mass(const Measure& m, const HyperRectangle& rect) {
  const int d = measure_dim(m);
  require(d == rect.dim(), "dimension mismatch");
  MassCenter out;
  out.center = Vec::Zero(d);

  if (const auto* product = std::get_if<ProductMeasure>(&m)) {
    Vec mass(d), moment(d);
    for (int i = 0; i < d; ++i) {
      mass[i] = product->component(i).interval_mass(rect.lower[i], rect.upper[i]);
      moment[i] = product->component(i).interval_moment(rect.lower[i], rect.upper[i]);
    }
    out.mass = mass.prod();
    if (out.mass != 0.0) {
      for (int i = 0; i < d; ++i) out.center[i] = moment[i] / mass[i];
    }
    return out;
  }

  const auto& data = std::get<DataMeasure>(m);
  if (!data.has_finite_rows()) {
    Vec mass(d), moment(d);
    for (int k = 0; k < d; ++k) {
      mass[k] = data.marginal_interval_mass(k, rect.lower[k], rect.upper[k]);
      moment[k] = data.marginal_interval_moment(k, rect.lower[k], rect.upper[k]);
    }
    out.mass = mass.prod();
    if (out.mass != 0.0) {
      for (int k = 0; k < d; ++k) out.center[k] = moment[k] / mass[k];
    }
    return out;
  }

  Vec weighted = Vec::Zero(d);
  for (std::int64_t r = 0; r < data.effective_row_count(); ++r) {
    const Vec row = data.effective_row(r);
    if (rect.contains(row)) {
      const double w = data.effective_weight(r);
      out.mass += w;
      weighted += w * row;
    }
  }
  if (out.mass != 0.0) out.center = weighted / out.mass;
  return out;
}

MeasureFamily::MeasureFamily(std::string name, int dim, Rule rule)
    : name_(std::move(name)), dim_(dim), rule_(std::move(rule)) {
  require(dim_ >= 1, "family dimension must be positive");
}

Measure MeasureFamily::measure_for(int j, const Vec& x) const {
  require(j >= 0 && j < dim_, "feature index out of range");
  require(x.size() == dim_, "explained point has wrong dimension");
  require(in_unit_box(x, 1e-12), "explained point must lie in [0,1]^d");
  return rule_(j, x);
}

MeasureFamily MeasureFamily::pdp_uniform(int dim) {
  return MeasureFamily("pdp-uniform", dim, [dim](int j, const Vec& x) -> Measure {
    std::vector<MeasureComponent> comps;
    comps.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      comps.push_back(i == j ? MeasureComponent::dirac(x[j]) : MeasureComponent::lebesgue());
    }
    return ProductMeasure(std::move(comps));
  });
}

MeasureFamily MeasureFamily::dirac_product(int dim) {
  return MeasureFamily("dirac-product", dim, [dim](int, const Vec& x) -> Measure {
    std::vector<MeasureComponent> comps;
    comps.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) comps.push_back(MeasureComponent::dirac(x[i]));
    return ProductMeasure(std::move(comps));
  });
}

MeasureFamily MeasureFamily::global_linear(int dim) {
  // Coordinate j carries the measure 2 dy (total mass 2); the factor 2 is
  // what makes the first moment equal 1, so the attribution of w.x is w_j.
  return MeasureFamily("global-linear", dim, [dim](int j, const Vec&) -> Measure {
    std::vector<MeasureComponent> comps;
    comps.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      comps.push_back(i == j ? MeasureComponent::scaled(MeasureComponent::lebesgue(), 2.0)
                             : MeasureComponent::dirac(0.0));
    }
    return ProductMeasure(std::move(comps));
  });
}

MeasureFamily MeasureFamily::local_linear(int dim) {
  return MeasureFamily("local-linear", dim, [dim](int j, const Vec& x) -> Measure {
    std::vector<MeasureComponent> comps;
    comps.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      comps.push_back(i == j ? MeasureComponent::dirac(x[j]) : MeasureComponent::dirac(0.0));
    }
    return ProductMeasure(std::move(comps));
  });
}

MeasureFamily MeasureFamily::conditional(DatasetPtr data, double bandwidth) {
  require(static_cast<bool>(data), "conditional family needs a dataset");
  const int dim = data->dim();
  return MeasureFamily("conditional", dim, [data, bandwidth](int j, const Vec& x) -> Measure {
    return DataMeasure::conditional(data, j, x[j], bandwidth);
  });
}

MeasureFamily MeasureFamily::marginal_product(DatasetPtr data) {
  require(static_cast<bool>(data), "marginal-product family needs a dataset");
  const int dim = data->dim();
  return MeasureFamily("marginal-product", dim, [data](int j, const Vec& x) -> Measure {
    return DataMeasure::marginals_product(data, j, x[j]);
  });
}

MeasureFamily MeasureFamily::pdp_data(DatasetPtr data) {
  require(static_cast<bool>(data), "pdp-data family needs a dataset");
  const int dim = data->dim();
  return MeasureFamily("pdp-data", dim, [data](int j, const Vec& x) -> Measure {
    return DataMeasure::pdp_data(data, j, x[j]);
  });
}

MeasureFamily MeasureFamily::custom(std::string name, int dim, Rule rule) {
  return MeasureFamily(std::move(name), dim, std::move(rule));
}

MeasureFamily MeasureFamily::preset(const std::string& name, int dim, DatasetPtr data,
                                    double bandwidth) {
  if (data) {
    if (dim <= 0) dim = data->dim();
    require(dim == data->dim(), "dataset dimension does not match requested dimension");
  }
  require(dim >= 1, "preset needs a dimension (or a dataset)");
  if (name == "pdp" || name == "pdp-uniform") return pdp_uniform(dim);
  if (name == "dirac-product") return dirac_product(dim);
  if (name == "global-linear") return global_linear(dim);
  if (name == "local-linear") return local_linear(dim);
  if (name == "conditional") {
    require(static_cast<bool>(data), "preset 'conditional' needs a dataset");
    return conditional(data, bandwidth > 0.0 ? bandwidth : kDefaultBandwidth);
  }
  if (name == "marginal-product") {
    require(static_cast<bool>(data), "preset 'marginal-product' needs a dataset");
    return marginal_product(data);
  }
  if (name == "pdp-data") {
    require(static_cast<bool>(data), "preset 'pdp-data' needs a dataset");
    return pdp_data(data);
  }
  throw ValidationError("unknown measure preset: " + name);
}

namespace {

// Descriptor -> component factory. "at":"x" resolves to the explained
// point's value at the component's own coordinate.
std::function<MeasureComponent(int i, const Vec& x)> parse_component_spec(
    const nlohmann::json& spec) {
  require(spec.is_object() && spec.contains("type"), "component descriptor needs a type");
  const std::string type = spec["type"].get<std::string>();
  if (type == "dirac") {
    require(spec.contains("at"), "dirac descriptor needs 'at'");
    if (spec["at"].is_string()) {
      require(spec["at"].get<std::string>() == "x",
              "dirac 'at' must be a number or the placeholder \"x\"");
      return [](int i, const Vec& x) { return MeasureComponent::dirac(x[i]); };
    }
    const double at = spec["at"].get<double>();
    return [at](int, const Vec&) { return MeasureComponent::dirac(at); };
  }
  if (type == "lebesgue") {
    return [](int, const Vec&) { return MeasureComponent::lebesgue(); };
  }
  if (type == "density") {
    require(spec.contains("expr"), "density descriptor needs 'expr'");
    const std::string expr = spec["expr"].get<std::string>();
    FuncPtr h = parse_expression(expr, std::vector<std::string>{"y"});
    auto fn = [h](double y) {
      Vec v(1);
      v[0] = y;
      return h->value(v);
    };
    // Built once so the quadrature tables are shared across (j, x) calls.
    const MeasureComponent built = MeasureComponent::density(fn, expr);
    return [built](int, const Vec&) { return built; };
  }
  if (type == "scaled") {
    require(spec.contains("factor") && spec.contains("inner"),
            "scaled descriptor needs 'factor' and 'inner'");
    const double factor = spec["factor"].get<double>();
    auto inner = parse_component_spec(spec["inner"]);
    return [factor, inner](int i, const Vec& x) {
      return MeasureComponent::scaled(inner(i, x), factor);
    };
  }
  throw ValidationError("unknown component type: " + type);
}

}  // namespace

MeasureFamily MeasureFamily::from_spec_json(const std::string& text, int dim, DatasetPtr data,
                                            double bandwidth) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed measure spec: ") + e.what());
  }
  require(doc.is_object() && doc.value("format", "") == "attrikit-measure/1",
          "measure spec must declare format attrikit-measure/1");
  require(doc.contains("family"), "measure spec missing 'family'");
  const auto& family = doc["family"];
  if (family.is_string()) return preset(family.get<std::string>(), dim, data, bandwidth);

  require(family.is_object() && family.contains("custom"),
          "family must be a preset name or a custom object");
  const auto& custom_spec = family["custom"];
  require(custom_spec.is_object() && custom_spec.contains("explained") &&
              custom_spec.contains("others"),
          "custom family needs 'explained' and 'others' descriptors");
  require(dim >= 1, "custom family needs a dimension");
  auto explained = parse_component_spec(custom_spec["explained"]);
  auto others = parse_component_spec(custom_spec["others"]);
  const std::string name = doc.value("name", std::string("custom"));
  return MeasureFamily(name, dim, [dim, explained, others](int j, const Vec& x) -> Measure {
    std::vector<MeasureComponent> comps;
    comps.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) comps.push_back(i == j ? explained(i, x) : others(i, x));
    return ProductMeasure(std::move(comps));
  });
}

}  // namespace attrikit
