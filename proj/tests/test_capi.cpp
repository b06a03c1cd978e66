#include "attrikit/attrikit.h"

#include "doctest.h"
#include "json.hpp"

#include <cmath>
#include <string>

namespace {

constexpr const char* kIdentityNet = R"({
  "format": "attrikit-relu/1",
  "input_dim": 2,
  "layers": [
    {"weights": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0]},
    {"weights": [[1.0, 1.0]], "bias": [0.0]}
  ]
})";

struct Owned {
  char* value = nullptr;
  ~Owned() { attrikit_string_free(value); }
};

}  // namespace

TEST_CASE("model lifecycle and forward evaluation") {
  attrikit_model* model = nullptr;
  REQUIRE(attrikit_model_load_json(kIdentityNet, &model) == ATTRIKIT_OK);
  CHECK(attrikit_model_input_dim(model) == 2);

  const double x[2] = {0.3, 0.7};
  double value = 0.0;
  REQUIRE(attrikit_model_forward(model, x, 2, &value) == ATTRIKIT_OK);
  CHECK(value == doctest::Approx(1.0));

  Owned text;
  REQUIRE(attrikit_model_to_json(model, &text.value) == ATTRIKIT_OK);
  attrikit_model* reloaded = nullptr;
  REQUIRE(attrikit_model_load_json(text.value, &reloaded) == ATTRIKIT_OK);
  Owned text2;
  REQUIRE(attrikit_model_to_json(reloaded, &text2.value) == ATTRIKIT_OK);
  CHECK(std::string(text.value) == text2.value);

  attrikit_model_free(reloaded);
  attrikit_model_free(model);
}

TEST_CASE("validation errors carry messages and the right status") {
  attrikit_model* model = nullptr;
  CHECK(attrikit_model_load_json("not json", &model) == ATTRIKIT_ERROR_VALIDATION);
  CHECK(std::string(attrikit_last_error()).find("malformed") != std::string::npos);

  attrikit_function* fn = nullptr;
  CHECK(attrikit_function_parse("x1 +", 1, &fn) == ATTRIKIT_ERROR_VALIDATION);
}

TEST_CASE("function parse and evaluation") {
  attrikit_function* fn = nullptr;
  REQUIRE(attrikit_function_parse("x1*x2 + 0.5*x1", 2, &fn) == ATTRIKIT_OK);
  CHECK(attrikit_function_dim(fn) == 2);
  const double x[2] = {0.4, 0.5};
  double value = 0.0;
  REQUIRE(attrikit_function_eval(fn, x, 2, &value) == ATTRIKIT_OK);
  CHECK(value == doctest::Approx(0.4 * 0.5 + 0.2));
  attrikit_function_free(fn);
}

TEST_CASE("attribution through the C API: exact pdp report") {
  attrikit_model* model = nullptr;
  REQUIRE(attrikit_model_load_json(kIdentityNet, &model) == ATTRIKIT_OK);
  attrikit_family* family = nullptr;
  REQUIRE(attrikit_family_preset("pdp", 2, nullptr, 0.0, &family) == ATTRIKIT_OK);

  attrikit_attr_options options{};
  options.method = "exact";
  const double x[2] = {0.3, 0.7};
  Owned report;
  REQUIRE(attrikit_attribute_model(model, family, x, 2, &options, &report.value) == ATTRIKIT_OK);

  const auto doc = nlohmann::json::parse(report.value);
  CHECK(doc["format"] == "attrikit-report/1");
  CHECK(doc["method"] == "exact");
  CHECK(doc["phi"][0].get<double>() == doctest::Approx(0.8));
  CHECK(doc["phi"][1].get<double>() == doctest::Approx(1.2));
  CHECK(!doc.contains("stderr"));

  attrikit_family_free(family);
  attrikit_model_free(model);
}

TEST_CASE("exact on a plain function maps to a validation error") {
  attrikit_function* fn = nullptr;
  REQUIRE(attrikit_function_parse("x1 + x2", 2, &fn) == ATTRIKIT_OK);
  attrikit_family* family = nullptr;
  REQUIRE(attrikit_family_preset("pdp", 2, nullptr, 0.0, &family) == ATTRIKIT_OK);
  attrikit_attr_options options{};
  options.method = "exact";
  const double x[2] = {0.3, 0.7};
  Owned report;
  CHECK(attrikit_attribute_function(fn, family, x, 2, &options, &report.value) ==
        ATTRIKIT_ERROR_VALIDATION);
  CHECK(std::string(attrikit_last_error()).find("exact requires relu model") !=
        std::string::npos);
  attrikit_family_free(family);
  attrikit_function_free(fn);
}

TEST_CASE("mc attribution is byte-identical for a fixed seed") {
  attrikit_function* fn = nullptr;
  REQUIRE(attrikit_function_parse("x1*x2", 2, &fn) == ATTRIKIT_OK);
  attrikit_family* family = nullptr;
  REQUIRE(attrikit_family_preset("pdp", 2, nullptr, 0.0, &family) == ATTRIKIT_OK);
  attrikit_attr_options options{};
  options.method = "mc";
  options.mc_samples = 50000;
  options.seed = 7;
  const double x[2] = {0.25, 0.5};

  Owned first, second;
  attrikit_set_threads(1);
  REQUIRE(attrikit_attribute_function(fn, family, x, 2, &options, &first.value) == ATTRIKIT_OK);
  attrikit_set_threads(4);
  REQUIRE(attrikit_attribute_function(fn, family, x, 2, &options, &second.value) == ATTRIKIT_OK);
  attrikit_set_threads(0);
  CHECK(std::string(first.value) == second.value);

  const auto doc = nlohmann::json::parse(first.value);
  CHECK(doc.contains("stderr"));

  attrikit_family_free(family);
  attrikit_function_free(fn);
}

TEST_CASE("regions dump through the C API") {
  const char* step_net = R"({
    "format": "attrikit-relu/1",
    "input_dim": 2,
    "layers": [
      {"weights": [[1.0, 0.0]], "bias": [-0.5]},
      {"weights": [[1.0]], "bias": [0.0]}
    ]
  })";
  attrikit_model* model = nullptr;
  REQUIRE(attrikit_model_load_json(step_net, &model) == ATTRIKIT_OK);
  Owned dump;
  REQUIRE(attrikit_regions_json(model, &dump.value) == ATTRIKIT_OK);
  const auto doc = nlohmann::json::parse(dump.value);
  CHECK(doc["format"] == "attrikit-regions/1");
  CHECK(doc["region_count"] == 2);
  CHECK(doc["regions"][0]["volume"].get<double>() == doctest::Approx(0.5));
  attrikit_model_free(model);
}

TEST_CASE("metrics and solution sets through the C API") {
  const double w[2] = {1.0, 0.1};
  // Row-major centers: feature 1 then feature 2.
  const double centers[4] = {0.9, 0.9, 0.1, 0.1};
  Owned record;
  REQUIRE(attrikit_metric_linear("recall", w, 2, 0.5, 0.5, centers, &record.value) ==
          ATTRIKIT_OK);
  const auto doc = nlohmann::json::parse(record.value);
  CHECK(doc["metric"] == "recall");
  CHECK(doc["value"].get<double>() == doctest::Approx(1.0));

  Owned undefined;
  const double weak[4] = {0.1, 0.1, 0.1, 0.1};
  CHECK(attrikit_metric_linear("precision", w, 2, 0.5, 0.5, weak, &undefined.value) ==
        ATTRIKIT_ERROR_UNDEFINED_METRIC);

  int contains = -1;
  const double m[2] = {0.9, 0.9};
  REQUIRE(attrikit_solution_set_contains("recall", w, 2, 0.5, 0.5, 0, m, &contains) ==
          ATTRIKIT_OK);
  CHECK(contains == 1);
}

TEST_CASE("axiom checks and convergence through the C API") {
  Owned reports;
  REQUIRE(attrikit_axioms_check("gxi", "reference", &reports.value) == ATTRIKIT_OK);
  const auto doc = nlohmann::json::parse(reports.value);
  CHECK(doc["format"] == "attrikit-axioms/1");
  CHECK(doc["reports"].size() == 3);

  attrikit_function* fn = nullptr;
  REQUIRE(attrikit_function_parse("x1 + x2", 2, &fn) == ATTRIKIT_OK);
  attrikit_family* family = nullptr;
  REQUIRE(attrikit_family_preset("pdp", 2, nullptr, 0.0, &family) == ATTRIKIT_OK);
  const double x[2] = {0.3, 0.7};
  const int p_list[2] = {8, 64};
  Owned csv;
  REQUIRE(attrikit_converge_csv(fn, family, x, 2, p_list, 2, 0, &csv.value) == ATTRIKIT_OK);
  const std::string text(csv.value);
  CHECK(text.find("p,phi_1,phi_2,sup_error") == 0);
  attrikit_family_free(family);
  attrikit_function_free(fn);
}

TEST_CASE("dataset loading and conditional families through the C API") {
  const char* csv = "a,b\n0.1,0.2\n0.5,0.6\n0.9,0.8\n";
  attrikit_dataset* data = nullptr;
  REQUIRE(attrikit_dataset_load_csv(csv, &data) == ATTRIKIT_OK);
  CHECK(attrikit_dataset_rows(data) == 3);
  CHECK(attrikit_dataset_columns(data) == 2);

  attrikit_family* family = nullptr;
  REQUIRE(attrikit_family_preset("conditional", 2, data, 0.2, &family) == ATTRIKIT_OK);

  attrikit_function* fn = nullptr;
  REQUIRE(attrikit_function_parse("x1 + x2", 2, &fn) == ATTRIKIT_OK);
  const double x[2] = {0.5, 0.5};
  Owned report;
  REQUIRE(attrikit_attribute_function(fn, family, x, 2, nullptr, &report.value) == ATTRIKIT_OK);
  const auto doc = nlohmann::json::parse(report.value);
  CHECK(doc["phi"][0].get<double>() == doctest::Approx(1.1));  // the 0.5,0.6 row

  attrikit_function_free(fn);
  attrikit_family_free(family);
  attrikit_dataset_free(data);
}
