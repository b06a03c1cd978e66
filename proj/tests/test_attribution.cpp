#include "core/attribution.hpp"

#include "core/expression.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <random>

using namespace attrikit;
using attrikit::testing::vec;

namespace {

AttributeOptions with_method(AttrMethod m) {
  AttributeOptions opts;
  opts.method = m;
  return opts;
}

DatasetPtr uniform_dataset(int rows, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mat data(rows, dim);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < dim; ++c) data(r, c) = testing::uniform01(rng);
  }
  return std::make_shared<const Dataset>(data);
}

}  // namespace

TEST_CASE("uniform pdp of x+y matches the closed form") {
  const LinearFunction f(vec({1.0, 1.0}));
  const auto report =
      attribute(f, MeasureFamily::pdp_uniform(2), vec({0.3, 0.7}), with_method(AttrMethod::Grid));
  CHECK(report.method == "grid");
  CHECK(std::abs(report.phi[0] - 0.8) <= 1e-6);
  CHECK(std::abs(report.phi[1] - 1.2) <= 1e-6);
  CHECK(!report.stderr_.has_value());
}

TEST_CASE("constant models attribute the constant under probability families") {
  const CallableFunction f(2, [](const Vec&) { return 1.75; }, "c");
  for (auto method : {AttrMethod::Grid, AttrMethod::Mc}) {
    const auto report =
        attribute(f, MeasureFamily::pdp_uniform(2), vec({0.4, 0.6}), with_method(method));
    CHECK(report.phi[0] == doctest::Approx(1.75).epsilon(1e-9));
    CHECK(report.phi[1] == doctest::Approx(1.75).epsilon(1e-9));
  }
}

TEST_CASE("exact backend equals the closed form on a single-region network") {
  const auto net = std::make_shared<const ReluNetwork>(testing::identity_sum_network());
  const NetworkFunction f(net);
  const auto report = attribute(f, MeasureFamily::pdp_uniform(2), vec({0.3, 0.7}),
                                 with_method(AttrMethod::Exact));
  CHECK(report.method == "exact");
  CHECK(report.phi[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(report.phi[1] == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("exact requires a relu model") {
  const LinearFunction f(vec({1.0, 1.0}));
  CHECK_THROWS_WITH_AS(attribute(f, MeasureFamily::pdp_uniform(2), vec({0.3, 0.7}),
                                 with_method(AttrMethod::Exact)),
                       doctest::Contains("exact requires relu model"), ValidationError);
}

TEST_CASE("dirac-product measures pick the active region's affine value") {
  const auto net = std::make_shared<const ReluNetwork>(testing::step_network());
  const NetworkFunction f(net);
  const Vec x = vec({0.7, 0.3});
  const auto report = attribute(f, MeasureFamily::dirac_product(2), x,
                                 with_method(AttrMethod::Exact));
  CHECK(report.phi[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(report.phi[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("dirac-pick degeneracy: all-dirac families reproduce f(x) exactly") {
  const auto net = std::make_shared<const ReluNetwork>(testing::random_network(2, 6, 271));
  const NetworkFunction f(net);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = testing::random_point(2, rng);
    const auto report = attribute(f, MeasureFamily::dirac_product(2), x,
                                   with_method(AttrMethod::Exact));
    const double fx = f.value(x);
    CHECK(std::abs(report.phi[0] - fx) <= 1e-12);
    CHECK(std::abs(report.phi[1] - fx) <= 1e-12);
  }
}

TEST_CASE("exact agrees with grid quadrature on random networks") {
  for (std::uint64_t seed : {5u, 6u}) {
    const auto net = std::make_shared<const ReluNetwork>(testing::random_network(2, 8, seed));
    const NetworkFunction f(net);
    const Vec x = vec({0.41, 0.67});
    const auto exact = attribute(f, MeasureFamily::pdp_uniform(2), x,
                                  with_method(AttrMethod::Exact));
    AttributeOptions grid_opts = with_method(AttrMethod::Grid);
    grid_opts.grid_res = 1024;
    const auto grid = attribute(f, MeasureFamily::pdp_uniform(2), x, grid_opts);
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(exact.phi[j] - grid.phi[j]) <= 1e-3);
    }
  }
}

TEST_CASE("exact agrees with monte carlo within four standard errors") {
  const auto net = std::make_shared<const ReluNetwork>(testing::random_network(2, 8, 21));
  const NetworkFunction f(net);
  const Vec x = vec({0.25, 0.85});
  const auto exact =
      attribute(f, MeasureFamily::pdp_uniform(2), x, with_method(AttrMethod::Exact));
  AttributeOptions mc_opts = with_method(AttrMethod::Mc);
  mc_opts.mc_samples = 1000000;
  mc_opts.seed = 31;
  const auto mc = attribute(f, MeasureFamily::pdp_uniform(2), x, mc_opts);
  REQUIRE(mc.stderr_.has_value());
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(exact.phi[j] - mc.phi[j]) <= 4.0 * (*mc.stderr_)[j] + 1e-9);
  }
}

TEST_CASE("linear closed forms") {
  const Vec w = vec({2.0, -3.0});
  CHECK(attribute_linear_closed_form(w, LinearPreset::Global).isApprox(w));
  const Vec x = vec({0.5, 0.5});
  const Vec local = attribute_linear_closed_form(w, LinearPreset::Local, &x);
  CHECK(local[0] == doctest::Approx(1.0));
  CHECK(local[1] == doctest::Approx(-1.5));

  const Vec boundary = vec({0.0, 0.5});
  CHECK_THROWS_WITH_AS(attribute_linear_closed_form(w, LinearPreset::Local, &boundary),
                       doctest::Contains("open box"), ValidationError);
}

TEST_CASE("global-linear integral path recovers the coefficients") {
  const Vec w = vec({2.0, -3.0});
  const LinearFunction f(w);
  AttributeOptions opts = with_method(AttrMethod::Grid);
  opts.grid_res = 2048;
  const auto report = attribute(f, MeasureFamily::global_linear(2), vec({0.5, 0.5}), opts);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(report.phi[j] - w[j]) <= 1e-4);
  }
}

TEST_CASE("local-linear family recovers w*x through the exact dirac path") {
  const Vec w = vec({2.0, -3.0});
  const LinearFunction f(w);
  const Vec x = vec({0.3, 0.8});
  const auto report =
      attribute(f, MeasureFamily::local_linear(2), x, with_method(AttrMethod::Grid));
  CHECK(report.phi[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(report.phi[1] == doctest::Approx(-2.4).epsilon(1e-12));
}

TEST_CASE("uniform pdp of xy at the corner") {
  const CallableFunction f(2, [](const Vec& x) { return x[0] * x[1]; }, "xy");
  const auto report = pdp(f, vec({1.0, 1.0}));
  CHECK(report.phi[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(report.phi[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("conditional expectation with a full-width window is the dataset mean") {
  const auto data = uniform_dataset(200, 2, 17);
  const CallableFunction f(2, [](const Vec& x) { return x[0] * x[0] + x[1]; }, "q");
  double mean = 0.0;
  for (std::int64_t r = 0; r < data->row_count(); ++r) {
    mean += data->weights()[r] * f.value(data->rows().row(r).transpose());
  }
  const auto report = conditional_expectation(f, vec({0.5, 0.5}), data, 1.0);
  CHECK(report.phi[0] == doctest::Approx(mean).epsilon(1e-12));
  CHECK(report.phi[1] == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("marginal-product matches pdp-data on independent columns") {
  const auto data = uniform_dataset(5000, 2, 23);
  const CallableFunction f(2, [](const Vec& x) { return x[0] + 2.0 * x[1]; }, "lin");
  const Vec x = vec({0.35, 0.65});
  const auto marginal = marginal_product_attribution(f, x, data, 400000, 3);
  const auto exact_pdp = pdp(f, x, data);
  REQUIRE(marginal.stderr_.has_value());
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(marginal.phi[j] - exact_pdp.phi[j]) <= 4.0 * (*marginal.stderr_)[j]);
  }
}

TEST_CASE("approximation sequence converges for the linear model") {
  const LinearFunction f(vec({1.0, 1.0}));
  const auto entries =
      approx_attribution_sequence(f, MeasureFamily::pdp_uniform(2), vec({0.3, 0.7}), {8, 64});
  const Vec target = vec({0.8, 1.2});
  const double err8 = (entries[0] - target).lpNorm<Eigen::Infinity>();
  const double err64 = (entries[1] - target).lpNorm<Eigen::Infinity>();
  CHECK(err64 <= 0.5 * err8);
}

TEST_CASE("approximation sequence is constant for constant models") {
  const CallableFunction f(2, [](const Vec&) { return 0.75; }, "c");
  const auto entries =
      approx_attribution_sequence(f, MeasureFamily::pdp_uniform(2), vec({0.5, 0.5}), {4, 16});
  for (const auto& phi : entries) {
    CHECK(phi[0] == doctest::Approx(0.75));
    CHECK(phi[1] == doctest::Approx(0.75));
  }
}

TEST_CASE("approximation sequence approaches the exact relu attribution") {
  const auto net = std::make_shared<const ReluNetwork>(testing::random_network(2, 6, 47));
  const NetworkFunction f(net);
  const Vec x = vec({0.45, 0.55});
  const auto exact =
      attribute(f, MeasureFamily::pdp_uniform(2), x, with_method(AttrMethod::Exact));
  const auto entries =
      approx_attribution_sequence(f, MeasureFamily::pdp_uniform(2), x, {128});
  CHECK((entries[0] - exact.phi).lpNorm<Eigen::Infinity>() <= 5e-2);
}

TEST_CASE("approximation sequence validates its resolution list") {
  const LinearFunction f(vec({1.0, 1.0}));
  CHECK_THROWS_AS(
      approx_attribution_sequence(f, MeasureFamily::pdp_uniform(2), vec({0.3, 0.7}), {16, 8}),
      ValidationError);
}

TEST_CASE("attribution is linear in the model (grid backend)") {
  const auto f = parse_expression("x1^2 + x2", 2);
  const auto g = parse_expression("x1*x2", 2);
  const double lambda = 2.5;
  const auto combo = linear_combination(f, lambda, g);
  AttributeOptions opts = with_method(AttrMethod::Grid);
  opts.grid_res = 512;
  const MeasureFamily family = MeasureFamily::pdp_uniform(2);
  const Vec x = vec({0.3, 0.7});
  const Vec lhs = attribute(*combo, family, x, opts).phi;
  const Vec rhs =
      attribute(*f, family, x, opts).phi + lambda * attribute(*g, family, x, opts).phi;
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("exact attribution is invariant under region refinement") {
  const auto net = std::make_shared<const ReluNetwork>(testing::random_network(2, 6, 333));
  const auto decomp = enumerate_regions(*net);
  const MeasureFamily family = MeasureFamily::pdp_uniform(2);
  const Vec x = vec({0.52, 0.18});
  std::mt19937_64 rng(4);

  for (int j = 0; j < 2; ++j) {
    const Measure measure = family.measure_for(j, x);
    double base_sum = 0.0;
    double refined_sum = 0.0;
    for (const auto& region : decomp.regions) {
      const auto whole = measure_mass_centroid(region.polytope, measure);
      base_sum += whole.mass * (region.a.dot(whole.center) + region.b);

      // Cut the region by an arbitrary plane; the affine integrand makes
      // the two-piece sum identical.
      Vec normal = testing::random_point(2, rng) - Vec::Constant(2, 0.5);
      const double offset = normal.dot(region.polytope.interior_point());
      const auto [below, above] = region.polytope.split(normal, offset);
      for (const Polytope* piece : {&below, &above}) {
        if (piece->empty()) continue;
        const auto part = measure_mass_centroid(*piece, measure);
        refined_sum += part.mass * (region.a.dot(part.center) + region.b);
      }
    }
    CHECK(std::abs(base_sum - refined_sum) <= 1e-9);
  }
}

TEST_CASE("auto method selection follows the accuracy ladder") {
  const auto net = std::make_shared<const ReluNetwork>(testing::step_network());
  const NetworkFunction nf(net);
  CHECK(attribute(nf, MeasureFamily::pdp_uniform(2), vec({0.5, 0.5})).method == "exact");

  const LinearFunction lf(vec({1.0, 1.0}));
  CHECK(attribute(lf, MeasureFamily::pdp_uniform(2), vec({0.5, 0.5})).method == "grid");

  const auto data = uniform_dataset(50, 2, 9);
  CHECK(attribute(lf, MeasureFamily::pdp_data(data), vec({0.5, 0.5})).method == "grid");
  CHECK(attribute(lf, MeasureFamily::marginal_product(data), vec({0.5, 0.5})).method == "mc");
}

TEST_CASE("reports echo settings and fingerprints") {
  const auto net = std::make_shared<const ReluNetwork>(testing::step_network());
  const NetworkFunction f(net);
  AttributeOptions opts = with_method(AttrMethod::Mc);
  opts.mc_samples = 5000;
  opts.seed = 123;
  const auto report = attribute(f, MeasureFamily::pdp_uniform(2), vec({0.5, 0.5}), opts);
  CHECK(report.model_fingerprint == net->fingerprint());
  CHECK(report.settings["preset"] == "pdp-uniform");
  CHECK(report.settings["seed"] == 123);
  CHECK(report.stderr_.has_value());
}
