#pragma once

#include "core/common.hpp"
#include "core/relu_network.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace attrikit {

// Deterministic, side-effect-free scalar function on (a neighborhood of)
// the unit box. Gradients fall back to clamped central differences with
// step 1e-5 when no analytic form exists.
class EvaluableFunction {
 public:
  virtual ~EvaluableFunction() = default;

  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual std::string description() const = 0;

  virtual bool has_analytic_gradient() const { return false; }
  virtual Vec analytic_gradient(const Vec&) const {
    throw ValidationError("function has no analytic gradient");
  }

  Vec gradient(const Vec& x) const;
};

using FuncPtr = std::shared_ptr<const EvaluableFunction>;

class LinearFunction : public EvaluableFunction {
 public:
  explicit LinearFunction(Vec w, double b = 0.0) : w_(std::move(w)), b_(b) {}
  int dim() const override { return static_cast<int>(w_.size()); }
  double value(const Vec& x) const override { return w_.dot(x) + b_; }
  std::string description() const override;
  bool has_analytic_gradient() const override { return true; }
  Vec analytic_gradient(const Vec&) const override { return w_; }
  const Vec& weights() const { return w_; }

 private:
  Vec w_;
  double b_;
};

class NetworkFunction : public EvaluableFunction {
 public:
  explicit NetworkFunction(std::shared_ptr<const ReluNetwork> net) : net_(std::move(net)) {}
  int dim() const override { return net_->input_dim(); }
  double value(const Vec& x) const override { return net_->value(x); }
  std::string description() const override { return "relu-net:" + net_->fingerprint(); }
  const ReluNetwork& network() const { return *net_; }
  std::shared_ptr<const ReluNetwork> network_ptr() const { return net_; }

 private:
  std::shared_ptr<const ReluNetwork> net_;
};

// Wraps a plain callable; optional analytic gradient.
class CallableFunction : public EvaluableFunction {
 public:
  using Value = std::function<double(const Vec&)>;
  using Gradient = std::function<Vec(const Vec&)>;
  CallableFunction(int dim, Value fn, std::string name, Gradient grad = nullptr)
      : dim_(dim), fn_(std::move(fn)), grad_(std::move(grad)), name_(std::move(name)) {}
  int dim() const override { return dim_; }
  double value(const Vec& x) const override { return fn_(x); }
  std::string description() const override { return name_; }
  bool has_analytic_gradient() const override { return grad_ != nullptr; }
  Vec analytic_gradient(const Vec& x) const override { return grad_(x); }

 private:
  int dim_;
  Value fn_;
  Gradient grad_;
  std::string name_;
};

// f + lambda * g, sharing the operands.
FuncPtr linear_combination(FuncPtr f, double lambda, FuncPtr g);

// Piecewise-constant grid surrogate: cell values are the function at the
// lower-left corner i/p of each cell; cells are right-closed, left-closed
// along coordinates at 0.
class PiecewiseConstantApprox : public EvaluableFunction {
 public:
  PiecewiseConstantApprox(int dim, int resolution, std::vector<double> grid_values);

  int dim() const override { return dim_; }
  double value(const Vec& x) const override;
  std::string description() const override;

  int resolution() const { return resolution_; }
  const std::vector<double>& grid_values() const { return grid_values_; }
  // Flat layout: coordinate 0 varies fastest.
  std::size_t flat_index(const std::vector<int>& cell) const;

 private:
  int dim_;
  int resolution_;
  std::vector<double> grid_values_;
};

// Grid cells per axis beyond which grid-shaped work is refused.
inline constexpr std::int64_t kMaxGridCells = std::int64_t{1} << 26;

PiecewiseConstantApprox approximate(const EvaluableFunction& f, int resolution);

}  // namespace attrikit
