#include "core/function.hpp"

#include <algorithm>
#include <sstream>

namespace attrikit {

Vec EvaluableFunction::gradient(const Vec& x) const {
  if (has_analytic_gradient()) return analytic_gradient(x);
  const double h = 1e-5;
  Vec g(dim());
  for (int j = 0; j < dim(); ++j) {
    Vec hi = x;
    Vec lo = x;
    hi[j] = std::min(x[j] + h, 1.0);
    lo[j] = std::max(x[j] - h, 0.0);
    g[j] = (value(hi) - value(lo)) / (hi[j] - lo[j]);
  }
  return g;
}

std::string LinearFunction::description() const {
  std::ostringstream out;
  out << "linear:";
  for (Eigen::Index i = 0; i < w_.size(); ++i) out << (i ? "," : "") << w_[i];
  out << ";" << b_;
  return out.str();
}

FuncPtr linear_combination(FuncPtr f, double lambda, FuncPtr g) {
  require(f && g, "null function");
  require(f->dim() == g->dim(), "dimension mismatch in linear combination");
  const int d = f->dim();
  const std::string name = "(" + f->description() + ")+" + std::to_string(lambda) + "*(" +
                           g->description() + ")";
  const bool analytic = f->has_analytic_gradient() && g->has_analytic_gradient();
  CallableFunction::Gradient grad;
  if (analytic) {
    grad = [f, g, lambda](const Vec& x) {
      return Vec(f->analytic_gradient(x) + lambda * g->analytic_gradient(x));
    };
  }
  return std::make_shared<CallableFunction>(
      d, [f, g, lambda](const Vec& x) { return f->value(x) + lambda * g->value(x); }, name,
      std::move(grad));
}

PiecewiseConstantApprox::PiecewiseConstantApprox(int dim, int resolution,
                                                 std::vector<double> grid_values)
    : dim_(dim), resolution_(resolution), grid_values_(std::move(grid_values)) {
  require(dim_ >= 1 && resolution_ >= 1, "approximation needs dim >= 1 and resolution >= 1");
  std::size_t expected = 1;
  for (int k = 0; k < dim_; ++k) expected *= static_cast<std::size_t>(resolution_);
  require(grid_values_.size() == expected, "grid value count must be resolution^dim");
}

std::size_t PiecewiseConstantApprox::flat_index(const std::vector<int>& cell) const {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int k = 0; k < dim_; ++k) {
    idx += static_cast<std::size_t>(cell[static_cast<std::size_t>(k)]) * stride;
    stride *= static_cast<std::size_t>(resolution_);
  }
  return idx;
}

double PiecewiseConstantApprox::value(const Vec& x) const {
  require(x.size() == dim_, "dimension mismatch");
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int k = 0; k < dim_; ++k) {
    // Cell i covers (i/p, (i+1)/p], except cell 0 which includes 0.
    int cell;
    if (x[k] <= 0.0) {
      cell = 0;
    } else {
      cell = static_cast<int>(std::ceil(x[k] * resolution_)) - 1;
      cell = std::clamp(cell, 0, resolution_ - 1);
    }
    idx += static_cast<std::size_t>(cell) * stride;
    stride *= static_cast<std::size_t>(resolution_);
  }
  return grid_values_[idx];
}

std::string PiecewiseConstantApprox::description() const {
  return "piecewise-constant:p=" + std::to_string(resolution_) + ",d=" + std::to_string(dim_);
}

PiecewiseConstantApprox approximate(const EvaluableFunction& f, int resolution) {
  require(resolution >= 1, "resolution must be >= 1");
  const int d = f.dim();
  std::int64_t cells = 1;
  for (int k = 0; k < d; ++k) {
    cells *= resolution;
    if (cells > kMaxGridCells) {
      throw CapacityError("approximation grid " + std::to_string(resolution) + "^" +
                          std::to_string(d) + " exceeds cell budget");
    }
  }
  std::vector<double> values(static_cast<std::size_t>(cells));
  std::vector<int> cell(static_cast<std::size_t>(d), 0);
  Vec anchor = Vec::Zero(d);
  for (std::int64_t flat = 0; flat < cells; ++flat) {
    for (int k = 0; k < d; ++k) anchor[k] = static_cast<double>(cell[static_cast<std::size_t>(k)]) / resolution;
    values[static_cast<std::size_t>(flat)] = f.value(anchor);
    for (int k = 0; k < d; ++k) {
      if (++cell[static_cast<std::size_t>(k)] < resolution) break;
      cell[static_cast<std::size_t>(k)] = 0;
    }
  }
  return PiecewiseConstantApprox(d, resolution, std::move(values));
}

}  // namespace attrikit
