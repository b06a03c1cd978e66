#pragma once

#include "core/attribution.hpp"
#include "core/function.hpp"

#include "json.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace attrikit {

// Black-box attribution method under test: deterministic explain(x, f).
class AttributionMethod {
 public:
  virtual ~AttributionMethod() = default;
  virtual std::string name() const = 0;
  virtual Vec explain(const Vec& x, const EvaluableFunction& f) const = 0;
  virtual std::optional<Vec> baseline() const { return std::nullopt; }
};

Vec gradient_x_input(const EvaluableFunction& f, const Vec& x);
Vec integrated_gradients(const EvaluableFunction& f, const Vec& x, const Vec& baseline,
                         int steps);

class GradientXInputMethod : public AttributionMethod {
 public:
  std::string name() const override { return "gxi"; }
  Vec explain(const Vec& x, const EvaluableFunction& f) const override {
    return gradient_x_input(f, x);
  }
};

class IntegratedGradientsMethod : public AttributionMethod {
 public:
  IntegratedGradientsMethod(Vec baseline, int steps)
      : baseline_(std::move(baseline)), steps_(steps) {}
  std::string name() const override { return "ig"; }
  Vec explain(const Vec& x, const EvaluableFunction& f) const override {
    return integrated_gradients(f, x, baseline_, steps_);
  }
  std::optional<Vec> baseline() const override { return baseline_; }

 private:
  Vec baseline_;
  int steps_;
};

// The engine's own attribution as a method under test.
class EngineAttributionMethod : public AttributionMethod {
 public:
  EngineAttributionMethod(MeasureFamily family, AttributeOptions opts, std::string name)
      : family_(std::move(family)), opts_(opts), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  Vec explain(const Vec& x, const EvaluableFunction& f) const override {
    return attribute(f, family_, x, opts_).phi;
  }

 private:
  MeasureFamily family_;
  AttributeOptions opts_;
  std::string name_;
};

class CallableMethod : public AttributionMethod {
 public:
  using Fn = std::function<Vec(const Vec&, const EvaluableFunction&)>;
  CallableMethod(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  Vec explain(const Vec& x, const EvaluableFunction& f) const override { return fn_(x, f); }

 private:
  std::string name_;
  Fn fn_;
};

struct AxiomReport {
  std::string axiom;
  std::string method;
  int cases = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // Echo of the worst-offending inputs, present when failing.
  std::optional<nlohmann::ordered_json> counterexample;
  // The axiom was vacuously untested (e.g. the invariance probes failed).
  std::optional<std::string> precondition_failure;
};

AxiomReport check_linearity(const AttributionMethod& method, const EvaluableFunction& f,
                            const EvaluableFunction& g, const std::vector<double>& lambdas,
                            const std::vector<Vec>& points, double tol);

AxiomReport check_completeness(const AttributionMethod& method, const EvaluableFunction& f,
                               const Vec& baseline, const std::vector<Vec>& points, double tol);

// Requires f to be invariant in coordinate j; the checker samples
// probe_count random (x, x') pairs first and reports a precondition
// failure when invariance does not hold on them (sound-only check).
AxiomReport check_sensitivity(const AttributionMethod& method, const EvaluableFunction& f, int j,
                              int probe_count, const std::vector<Vec>& points, double tol,
                              std::uint64_t seed = 7);

// Residual of phi(x,f) = grad f(x0) * (x - x') + phi(x, R_{x0}) with the
// Taylor remainder R built as f(z) - f(x0) - grad f(x0).(z - x0).
AxiomReport remainder_decomposition_check(const AttributionMethod& method,
                                          const EvaluableFunction& f,
                                          const std::vector<Vec>& points, const Vec& x0,
                                          const Vec& baseline, double tol);

// Estimates M = max over a grid of the Hessian operator norm and returns
// M*d/2, the remainder bound per unit Lipschitz constant.
double remainder_bound_estimate(const EvaluableFunction& f, int grid_res);

// Named method/suite runner backing `axioms check`.
std::vector<AxiomReport> run_axiom_suite(const std::string& method_name,
                                         const std::string& suite_name);

}  // namespace attrikit
