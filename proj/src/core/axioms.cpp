#include "core/axioms.hpp"

#include "core/expression.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace attrikit {

namespace {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

nlohmann::ordered_json point_json(const Vec& x) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) arr.push_back(x[i]);
  return arr;
}

constexpr double kHessianStep = 1e-3;

Mat fd_hessian(const EvaluableFunction& f, const Vec& x) {
  const int d = f.dim();
  Mat h(d, d);
  const double step = kHessianStep;
  const double fx = f.value(x);
  for (int i = 0; i < d; ++i) {
    Vec up = x, down = x;
    up[i] += step;
    down[i] -= step;
    h(i, i) = (f.value(up) - 2.0 * fx + f.value(down)) / (step * step);
    for (int j = i + 1; j < d; ++j) {
      Vec pp = x, pm = x, mp = x, mm = x;
      pp[i] += step; pp[j] += step;
      pm[i] += step; pm[j] -= step;
      mp[i] -= step; mp[j] += step;
      mm[i] -= step; mm[j] -= step;
      const double mixed =
          (f.value(pp) - f.value(pm) - f.value(mp) + f.value(mm)) / (4.0 * step * step);
      h(i, j) = mixed;
      h(j, i) = mixed;
    }
  }
  return h;
}

}  // namespace

Vec gradient_x_input(const EvaluableFunction& f, const Vec& x) {
  return f.gradient(x).cwiseProduct(x);
}

Vec integrated_gradients(const EvaluableFunction& f, const Vec& x, const Vec& baseline,
                         int steps) {
  require(steps >= 2, "integrated gradients needs at least 2 steps");
  require(x.size() == f.dim() && baseline.size() == f.dim(), "dimension mismatch");
  // Trapezoid average of the gradient along the straight path.
  Vec avg = Vec::Zero(f.dim());
  for (int k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) / (steps - 1);
    const Vec point = baseline + t * (x - baseline);
    const double weight = (k == 0 || k == steps - 1) ? 0.5 : 1.0;
    avg += weight * f.gradient(point);
  }
  avg /= static_cast<double>(steps - 1);
  return (x - baseline).cwiseProduct(avg);
}

AxiomReport check_linearity(const AttributionMethod& method, const EvaluableFunction& f,
                            const EvaluableFunction& g, const std::vector<double>& lambdas,
                            const std::vector<Vec>& points, double tol) {
  AxiomReport report;
  report.axiom = "linearity";
  report.method = method.name();
  report.tolerance = tol;

  // explain(x, f) and explain(x, g) are reused across lambda values.
  FuncPtr f_shared = std::make_shared<CallableFunction>(
      f.dim(), [&f](const Vec& z) { return f.value(z); }, f.description(),
      [&f](const Vec& z) { return f.gradient(z); });
  FuncPtr g_shared = std::make_shared<CallableFunction>(
      g.dim(), [&g](const Vec& z) { return g.value(z); }, g.description(),
      [&g](const Vec& z) { return g.gradient(z); });

  for (const Vec& x : points) {
    const Vec phi_f = method.explain(x, f);
    const Vec phi_g = method.explain(x, g);
    for (double lambda : lambdas) {
      const FuncPtr combo = linear_combination(f_shared, lambda, g_shared);
      const Vec phi_combo = method.explain(x, *combo);
      const double violation =
          (phi_combo - phi_f - lambda * phi_g).lpNorm<Eigen::Infinity>();
      ++report.cases;
      if (violation > report.max_violation) {
        report.max_violation = violation;
        if (violation > tol) {
          nlohmann::ordered_json ce;
          ce["x"] = point_json(x);
          ce["lambda"] = lambda;
          ce["violation"] = violation;
          report.counterexample = ce;
        }
      }
    }
  }
  report.pass = report.max_violation <= tol;
  if (report.pass) report.counterexample.reset();
  return report;
}

AxiomReport check_completeness(const AttributionMethod& method, const EvaluableFunction& f,
                               const Vec& baseline, const std::vector<Vec>& points, double tol) {
  AxiomReport report;
  report.axiom = "completeness";
  report.method = method.name();
  report.tolerance = tol;
  const double f_base = f.value(baseline);
  for (const Vec& x : points) {
    const Vec phi = method.explain(x, f);
    const double violation = std::abs(f.value(x) - f_base - phi.sum());
    ++report.cases;
    if (violation > report.max_violation) {
      report.max_violation = violation;
      if (violation > tol) {
        nlohmann::ordered_json ce;
        ce["x"] = point_json(x);
        ce["baseline"] = point_json(baseline);
        ce["violation"] = violation;
        report.counterexample = ce;
      }
    }
  }
  report.pass = report.max_violation <= tol;
  if (report.pass) report.counterexample.reset();
  return report;
}

AxiomReport check_sensitivity(const AttributionMethod& method, const EvaluableFunction& f, int j,
                              int probe_count, const std::vector<Vec>& points, double tol,
                              std::uint64_t seed) {
  AxiomReport report;
  report.axiom = "sensitivity";
  report.method = method.name();
  report.tolerance = tol;
  require(j >= 0 && j < f.dim(), "feature index out of range");

  // Sampled invariance probes; they can falsify the precondition, never
  // verify it.
  std::mt19937_64 rng(seed);
  Vec x(f.dim());
  for (int probe = 0; probe < probe_count; ++probe) {
    for (int k = 0; k < f.dim(); ++k) x[k] = uniform01(rng);
    const double before = f.value(x);
    Vec perturbed = x;
    perturbed[j] = uniform01(rng);
    const double after = f.value(perturbed);
    if (std::abs(before - after) > 1e-9 * (1.0 + std::abs(before))) {
      report.precondition_failure =
          "function is not invariant in coordinate " + std::to_string(j + 1) +
          " (probe " + std::to_string(probe + 1) + ")";
      report.pass = false;
      return report;
    }
  }

  for (const Vec& p : points) {
    const Vec phi = method.explain(p, f);
    const double violation = std::abs(phi[j]);
    ++report.cases;
    if (violation > report.max_violation) {
      report.max_violation = violation;
      if (violation > tol) {
        nlohmann::ordered_json ce;
        ce["x"] = point_json(p);
        ce["feature"] = j + 1;
        ce["attribution"] = phi[j];
        report.counterexample = ce;
      }
    }
  }
  report.pass = report.max_violation <= tol;
  if (report.pass) report.counterexample.reset();
  return report;
}

AxiomReport remainder_decomposition_check(const AttributionMethod& method,
                                          const EvaluableFunction& f,
                                          const std::vector<Vec>& points, const Vec& x0,
                                          const Vec& baseline, double tol) {
  AxiomReport report;
  report.axiom = "remainder-decomposition";
  report.method = method.name();
  report.tolerance = tol;

  const Vec grad0 = f.gradient(x0);
  const double f0 = f.value(x0);
  const CallableFunction remainder(
      f.dim(),
      [&f, x0, grad0, f0](const Vec& z) { return f.value(z) - f0 - grad0.dot(z - x0); },
      "taylor-remainder",
      [&f, grad0](const Vec& z) { return Vec(f.gradient(z) - grad0); });

  // Precondition: the method must behave linear and complete at this scale,
  // otherwise the identity is vacuous.
  const auto lin =
      check_linearity(method, f, remainder, {1.0}, points, std::max(tol, 1e-6));
  if (!lin.pass) {
    report.precondition_failure = "method failed the linearity precheck";
    return report;
  }
  const auto comp = check_completeness(method, f, baseline, points, std::max(tol, 1e-3));
  if (!comp.pass) {
    report.precondition_failure = "method failed the completeness precheck";
    return report;
  }

  for (const Vec& x : points) {
    const Vec lhs = method.explain(x, f);
    const Vec taylor_part = grad0.cwiseProduct(x - baseline);
    const Vec phi_remainder = method.explain(x, remainder);
    const double violation =
        (lhs - taylor_part - phi_remainder).lpNorm<Eigen::Infinity>();
    ++report.cases;
    if (violation > report.max_violation) {
      report.max_violation = violation;
      if (violation > tol) {
        nlohmann::ordered_json ce;
        ce["x"] = point_json(x);
        ce["x0"] = point_json(x0);
        ce["violation"] = violation;
        report.counterexample = ce;
      }
    }
  }
  report.pass = report.max_violation <= tol;
  if (report.pass) report.counterexample.reset();
  return report;
}

double remainder_bound_estimate(const EvaluableFunction& f, int grid_res) {
  require(grid_res >= 2, "grid resolution must be >= 2");
  const int d = f.dim();
  std::int64_t count = 1;
  for (int k = 0; k < d; ++k) {
    count *= grid_res;
    if (count > kMaxGridCells) {
      throw CapacityError("Hessian grid exceeds cell budget");
    }
  }
  double m_max = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vec x(d);
  for (std::int64_t flat = 0; flat < count; ++flat) {
    for (int k = 0; k < d; ++k) {
      x[k] = static_cast<double>(idx[static_cast<std::size_t>(k)]) / (grid_res - 1);
    }
    const Mat h = fd_hessian(f, x);
    Eigen::SelfAdjointEigenSolver<Mat> eig(h);
    const double op_norm = eig.eigenvalues().cwiseAbs().maxCoeff();
    m_max = std::max(m_max, op_norm);
    for (int k = 0; k < d; ++k) {
      if (++idx[static_cast<std::size_t>(k)] < grid_res) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return m_max * static_cast<double>(d) / 2.0;
}

namespace {

std::unique_ptr<AttributionMethod> make_method(const std::string& name, int dim) {
  if (name == "ig") {
    return std::make_unique<IntegratedGradientsMethod>(Vec::Zero(dim), 256);
  }
  if (name == "gxi") {
    return std::make_unique<GradientXInputMethod>();
  }
  if (name == "pdp-uniform") {
    AttributeOptions opts;
    opts.method = AttrMethod::Grid;
    opts.grid_res = 512;
    return std::make_unique<EngineAttributionMethod>(MeasureFamily::pdp_uniform(dim), opts,
                                                     "pdp-uniform");
  }
  throw ValidationError("unknown attribution method: " + name + " (expected ig|gxi|pdp-uniform)");
}

std::vector<Vec> suite_points() {
  std::vector<Vec> points;
  const double raw[][2] = {{0.3, 0.7}, {0.5, 0.5}, {0.9, 0.2}, {0.1, 0.8}, {0.6, 0.4}};
  for (const auto& p : raw) {
    Vec v(2);
    v[0] = p[0];
    v[1] = p[1];
    points.push_back(v);
  }
  return points;
}

}  // namespace

std::vector<AxiomReport> run_axiom_suite(const std::string& method_name,
                                         const std::string& suite_name) {
  const int dim = 2;
  const auto method = make_method(method_name, dim);
  const auto points = suite_points();
  const FuncPtr f = parse_expression("x1^2 + x2", dim);
  const FuncPtr g = parse_expression("x1*x2", dim);
  const Vec baseline = Vec::Zero(dim);

  std::vector<AxiomReport> reports;
  const bool reference = suite_name == "reference" || suite_name == "all";
  const bool remainder = suite_name == "remainder" || suite_name == "all";
  require(reference || remainder, "unknown suite: " + suite_name +
                                      " (expected reference|remainder|all)");

  if (reference) {
    reports.push_back(check_linearity(*method, *f, *g, {-1.0, 2.0}, points,
                                      method_name == "pdp-uniform" ? 1e-8 : 1e-9));
    reports.push_back(check_completeness(*method, *f, baseline, points, 1e-3));
    const FuncPtr first_coord = parse_expression("x1", dim);
    reports.push_back(check_sensitivity(*method, *first_coord, 1, 32, points,
                                        method_name == "pdp-uniform" ? 1e-9 : 1e-9));
  }
  if (remainder) {
    Vec x0(dim);
    x0[0] = 0.5;
    x0[1] = 0.5;
    reports.push_back(remainder_decomposition_check(*method, *f, points, x0, baseline, 1e-3));

    const FuncPtr quad = parse_expression("0.5*(x1^2 + x2^2)", dim);
    const double bound = remainder_bound_estimate(*quad, 9);
    AxiomReport bound_report;
    bound_report.axiom = "remainder-bound";
    bound_report.method = method_name;
    bound_report.cases = 1;
    bound_report.tolerance = 1e-3;
    bound_report.max_violation = std::abs(bound - 1.0);
    bound_report.pass = bound_report.max_violation <= bound_report.tolerance;
    reports.push_back(bound_report);
  }
  return reports;
}

}  // namespace attrikit
