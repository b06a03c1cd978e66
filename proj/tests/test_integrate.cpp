#include "core/integrate.hpp"

#include "core/parallel.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>

using namespace attrikit;
using attrikit::testing::vec;

namespace {

ProductMeasure dirac_lebesgue(double c) {
  return ProductMeasure({MeasureComponent::dirac(c), MeasureComponent::lebesgue()});
}

const CallableFunction kSum(2, [](const Vec& x) { return x[0] + x[1]; }, "x+y");
const CallableFunction kProduct(2, [](const Vec& x) { return x[0] * x[1]; }, "x*y");
const CallableFunction kOne(2, [](const Vec&) { return 1.0; }, "one");

}  // namespace

TEST_CASE("grid quadrature fixes dirac coordinates") {
  CHECK(integrate_grid(kSum, dirac_lebesgue(0.3), 512) ==
        doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("grid quadrature normalizes probability measures to machine accuracy") {
  const std::vector<ProductMeasure> measures = {
      dirac_lebesgue(0.3),
      ProductMeasure({MeasureComponent::lebesgue(), MeasureComponent::lebesgue()}),
      ProductMeasure({MeasureComponent::density([](double y) { return 2.0 * y; }, "2*y"),
                      MeasureComponent::lebesgue()}),
  };
  for (const auto& m : measures) {
    CHECK(std::abs(integrate_grid(kOne, m, 512) - 1.0) <= 1e-12);
  }
}

TEST_CASE("grid quadrature integrates xy over the unit square") {
  const ProductMeasure uniform({MeasureComponent::lebesgue(), MeasureComponent::lebesgue()});
  CHECK(std::abs(integrate_grid(kProduct, uniform, 512) - 0.25) <= 1e-5);
}

TEST_CASE("grid quadrature is exact for dirac-only measures") {
  const ProductMeasure point({MeasureComponent::dirac(0.3), MeasureComponent::dirac(0.7)});
  CHECK(integrate_grid(kSum, point, 2) == kSum.value(vec({0.3, 0.7})));
}

TEST_CASE("grid quadrature refuses oversized grids") {
  const ProductMeasure uniform({MeasureComponent::lebesgue(), MeasureComponent::lebesgue()});
  CHECK_THROWS_AS(integrate_grid(kSum, uniform, 10000), CapacityError);
}

TEST_CASE("grid integral is linear in the integrand") {
  const ProductMeasure m({MeasureComponent::density([](double y) { return 2.0 * y; }, "2*y"),
                          MeasureComponent::lebesgue()});
  const double alpha = 2.5, beta = -1.25;
  const CallableFunction combo(
      2, [&](const Vec& x) { return alpha * kSum.value(x) + beta * kProduct.value(x); },
      "combo");
  const double lhs = integrate_grid(combo, m, 256);
  const double rhs =
      alpha * integrate_grid(kSum, m, 256) + beta * integrate_grid(kProduct, m, 256);
  CHECK(std::abs(lhs - rhs) <= 1e-9);
}

TEST_CASE("monte carlo is exact for constant integrands") {
  const auto est = integrate_mc(kOne, Measure(dirac_lebesgue(0.3)), 10000, 42);
  CHECK(est.estimate == 1.0);
  CHECK(est.stderr_ == 0.0);
}

TEST_CASE("monte carlo matches the analytic value within four standard errors") {
  const auto est = integrate_mc(kSum, Measure(dirac_lebesgue(0.3)), 100000, 7);
  CHECK(est.stderr_ > 0.0);
  CHECK(std::abs(est.estimate - 0.8) <= 4.0 * est.stderr_);
}

TEST_CASE("monte carlo over a data measure matches the exact dataset mean") {
  Mat rows(64, 2);
  std::mt19937_64 rng(3);
  for (int r = 0; r < 64; ++r) {
    rows(r, 0) = testing::uniform01(rng);
    rows(r, 1) = testing::uniform01(rng);
  }
  const auto data = std::make_shared<const Dataset>(rows);
  const DataMeasure joint = DataMeasure::joint(data);
  const double exact = integrate_data_exact(kProduct, joint);
  const auto est = integrate_mc(kProduct, Measure(joint), 200000, 11);
  CHECK(std::abs(est.estimate - exact) <= 4.0 * est.stderr_);
}

TEST_CASE("monte carlo rejects degenerate sample counts") {
  CHECK_THROWS_AS(integrate_mc(kOne, Measure(dirac_lebesgue(0.3)), 1, 0), ValidationError);
}

TEST_CASE("grid and monte carlo agree across a function/measure suite") {
  const std::vector<std::pair<std::string, std::function<double(const Vec&)>>> functions = {
      {"x+y", [](const Vec& x) { return x[0] + x[1]; }},
      {"x*y", [](const Vec& x) { return x[0] * x[1]; }},
      {"x^2+y^2", [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; }},
      {"sin", [](const Vec& x) { return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]); }},
      {"exp", [](const Vec& x) { return std::exp(x[0] + x[1]) / std::exp(2.0); }},
      {"cos", [](const Vec& x) { return std::cos(M_PI * x[0] * x[1]); }},
      {"cubic", [](const Vec& x) { return x[0] * x[0] * x[0] - x[1]; }},
      {"rational", [](const Vec& x) { return 1.0 / (1.0 + x[0] + x[1]); }},
      {"x^2*y", [](const Vec& x) { return x[0] * x[0] * x[1]; }},
      {"sin-sum", [](const Vec& x) { return std::sin(x[0] + x[1]); }},
  };
  const std::vector<ProductMeasure> measures = {
      dirac_lebesgue(0.3),
      ProductMeasure({MeasureComponent::lebesgue(), MeasureComponent::lebesgue()}),
      ProductMeasure({MeasureComponent::density([](double y) { return 2.0 * y; }, "2*y"),
                      MeasureComponent::lebesgue()}),
      ProductMeasure({MeasureComponent::dirac(0.4), MeasureComponent::dirac(0.9)}),
      ProductMeasure({MeasureComponent::density([](double y) { return 1.5 - y; }, "1.5-y"),
                      MeasureComponent::density([](double y) { return 3.0 * y * y; }, "3y^2")}),
  };
  std::uint64_t seed = 1000;
  for (const auto& [name, fn] : functions) {
    const CallableFunction f(2, fn, name);
    for (const auto& m : measures) {
      const double grid = integrate_grid(f, m, 512);
      const auto mc = integrate_mc(f, Measure(m), 1000000, seed++);
      CHECK_MESSAGE(std::abs(grid - mc.estimate) <= 4.0 * mc.stderr_ + 1e-9,
                    name, " grid=", grid, " mc=", mc.estimate, " se=", mc.stderr_);
    }
  }
}

TEST_CASE("monte carlo is deterministic and thread-count independent") {
  const Measure m(dirac_lebesgue(0.3));
  set_worker_count(1);
  const auto one = integrate_mc(kSum, m, 300000, 99);
  set_worker_count(2);
  const auto two = integrate_mc(kSum, m, 300000, 99);
  set_worker_count(8);
  const auto eight = integrate_mc(kSum, m, 300000, 99);
  set_worker_count(0);
  CHECK(one.estimate == two.estimate);
  CHECK(one.estimate == eight.estimate);
  CHECK(one.stderr_ == two.stderr_);
  CHECK(one.stderr_ == eight.stderr_);
}

TEST_CASE("atomic-attribution sum for constants and degenerate grids") {
  const CallableFunction c(2, [](const Vec&) { return 2.5; }, "c");
  const auto fp = approximate(c, 4);
  CHECK(approx_attribution_sum(fp, Measure(dirac_lebesgue(0.3))) == doctest::Approx(2.5));

  const auto fp1 = approximate(kSum, 1);  // single cell: f(0,0) * mass
  CHECK(approx_attribution_sum(fp1, Measure(dirac_lebesgue(0.3))) == doctest::Approx(0.0));
}

TEST_CASE("atomic-attribution sum converges toward the quadrature value") {
  const Measure m(dirac_lebesgue(0.3));
  const double target = 0.8;
  const double err8 = std::abs(approx_attribution_sum(approximate(kSum, 8), m) - target);
  const double err64 = std::abs(approx_attribution_sum(approximate(kSum, 64), m) - target);
  CHECK(err64 < err8);
  CHECK(err64 <= 0.5 * err8);
}

TEST_CASE("atomic-attribution sum over finite data measures") {
  Mat rows(3, 2);
  rows << 0.1, 0.9, 0.5, 0.5, 0.9, 0.1;
  const auto data = std::make_shared<const Dataset>(rows);
  const auto fp = approximate(kSum, 32);
  const DataMeasure joint = DataMeasure::joint(data);
  double expected = 0.0;
  for (std::int64_t r = 0; r < 3; ++r) expected += fp.value(joint.effective_row(r)) / 3.0;
  CHECK(approx_attribution_sum(fp, Measure(joint)) == doctest::Approx(expected).epsilon(1e-12));
}
