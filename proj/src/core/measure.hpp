#pragma once

#include "core/common.hpp"
#include "core/dataset.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace attrikit {

// Axis-aligned box, right-closed: (a,b], left-closed along coordinates
// where a_i == 0 (the exterior-cell convention).
struct HyperRectangle {
  Vec lower;
  Vec upper;

  HyperRectangle(Vec lo, Vec up);
  int dim() const { return static_cast<int>(lower.size()); }
  static HyperRectangle unit_box(int d);
  bool contains(const Vec& y) const;
};

// One-dimensional measure on [0,1]: a Dirac, the unit Lebesgue measure, or
// a nonnegative density, each carrying a (possibly negative) scale factor.
// Density components cache cumulative mass/moment tables (trapezoid rule,
// resolution 4096); those tables define the component's mass everywhere.
class MeasureComponent {
 public:
  enum class Kind { Dirac, Lebesgue, Density };

  static MeasureComponent dirac(double location);
  static MeasureComponent lebesgue();
  static MeasureComponent density(std::function<double(double)> h, std::string name);
  static MeasureComponent scaled(MeasureComponent inner, double factor);

  Kind kind() const { return kind_; }
  bool is_dirac() const { return kind_ == Kind::Dirac; }
  double scale() const { return scale_; }
  double dirac_location() const;

  double total_mass() const;
  // Mass / first moment on (a,b], left-closed when a == 0.
  double interval_mass(double a, double b) const;
  double interval_moment(double a, double b) const;
  // Signed weight per unit length at y; invalid for Dirac components.
  double density_at(double y) const;
  // Maps u in [0,1) to a draw from the normalized component shape.
  double sample(double u) const;

  std::string describe() const;

 private:
  MeasureComponent() = default;

  Kind kind_ = Kind::Lebesgue;
  double scale_ = 1.0;
  double location_ = 0.0;
  std::function<double(double)> h_;
  std::string density_name_;
  struct Tables;
  std::shared_ptr<const Tables> tables_;
};

// Product of per-coordinate components; coordinate i is governed by
// components()[i].
class ProductMeasure {
 public:
  explicit ProductMeasure(std::vector<MeasureComponent> components);

  int dim() const { return static_cast<int>(components_.size()); }
  const MeasureComponent& component(int i) const {
    return components_[static_cast<std::size_t>(i)];
  }
  const std::vector<MeasureComponent>& components() const { return components_; }
  double total_mass() const;
  bool all_dirac() const;
  bool has_density() const;

 private:
  std::vector<MeasureComponent> components_;
};

// Empirical measure built from a dataset. Modes follow the removal-based
// attribution families: the full joint, a hard-window conditional on one
// feature, the product of marginals with one feature pinned, and the joint
// of the remaining features with one feature pinned.
class DataMeasure {
 public:
  enum class Mode { Joint, Conditional, MarginalsProduct, PdpData };

  static DataMeasure joint(DatasetPtr data);
  static DataMeasure conditional(DatasetPtr data, int feature, double value, double bandwidth);
  static DataMeasure marginals_product(DatasetPtr data, int pinned_feature, double pinned_value);
  static DataMeasure pdp_data(DatasetPtr data, int feature, double value);

  Mode mode() const { return mode_; }
  int dim() const { return data_->dim(); }
  double total_mass() const { return 1.0; }
  const Dataset& data() const { return *data_; }

  int pinned_feature() const { return feature_; }
  double pinned_value() const { return value_; }
  double bandwidth() const { return bandwidth_; }

  // Finite weighted-row support; false for MarginalsProduct.
  bool has_finite_rows() const { return mode_ != Mode::MarginalsProduct; }
  std::int64_t effective_row_count() const;
  Vec effective_row(std::int64_t r) const;
  double effective_weight(std::int64_t r) const;

  // 1-D empirical marginal mass / moment of coordinate k on (a,b].
  double marginal_interval_mass(int k, double a, double b) const;
  double marginal_interval_moment(int k, double a, double b) const;
  // Draw from coordinate k's marginal (MarginalsProduct) or a row index
  // from the effective weights (finite-row modes), given u in [0,1).
  double sample_marginal(int k, double u) const;
  std::int64_t sample_row(double u) const;

 private:
  DataMeasure(DatasetPtr data, Mode mode, int feature, double value, double bandwidth);

  DatasetPtr data_;
  Mode mode_;
  int feature_ = -1;
  double value_ = 0.0;
  double bandwidth_ = 0.0;
  std::vector<std::int64_t> selected_;  // Conditional window rows
  Vec cumulative_weights_;              // over effective rows
};

using Measure = std::variant<ProductMeasure, DataMeasure>;

int measure_dim(const Measure& m);
double measure_total_mass(const Measure& m);

// mu(R): product of 1-D interval masses for products; weight of the rows
// inside R for empirical measures.
double rect_mass(const ProductMeasure& m, const HyperRectangle& rect);
double rect_mass(const DataMeasure& m, const HyperRectangle& rect);
double rect_mass(const Measure& m, const HyperRectangle& rect);

// Signed corner sum over the 2^d corners of R. Refuses d > 20.
double increment(const std::function<double(const Vec&)>& g, const HyperRectangle& rect);

struct MassCenter {
  double mass = 0.0;
  Vec center;  // zero vector when mass == 0
};

MassCenter center_of_mass(const Measure& m, const HyperRectangle& rect);

// Rule mapping (feature j, explained point x) to a measure; an attribution
// method is exactly such a family.
class MeasureFamily {
 public:
  using Rule = std::function<Measure(int j, const Vec& x)>;

  static MeasureFamily pdp_uniform(int dim);
  static MeasureFamily dirac_product(int dim);
  static MeasureFamily global_linear(int dim);
  static MeasureFamily local_linear(int dim);
  static MeasureFamily conditional(DatasetPtr data, double bandwidth);
  static MeasureFamily marginal_product(DatasetPtr data);
  static MeasureFamily pdp_data(DatasetPtr data);
  static MeasureFamily custom(std::string name, int dim, Rule rule);

  // Preset by CLI name; data-backed presets require a dataset.
  static MeasureFamily preset(const std::string& name, int dim, DatasetPtr data,
                              double bandwidth);
  // "attrikit-measure/1" document (preset name or custom descriptors).
  static MeasureFamily from_spec_json(const std::string& text, int dim, DatasetPtr data,
                                      double bandwidth);

  Measure measure_for(int j, const Vec& x) const;
  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

 private:
  MeasureFamily(std::string name, int dim, Rule rule);

  std::string name_;
  int dim_;
  Rule rule_;
};

inline constexpr double kDefaultBandwidth = 0.05;

}  // namespace attrikit
