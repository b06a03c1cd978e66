// attrikit command-line front end. Talks to the engine exclusively through
// the shared-library C API; JSON/CSV plumbing stays on this side.

#include "attrikit/attrikit.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void bail(int code, const std::string& message) {
  throw CliError{code, message};
}

[[noreturn]] void bail_status(attrikit_status status) {
  throw CliError{static_cast<int>(status), attrikit_last_error()};
}

void check(attrikit_status status) {
  if (status != ATTRIKIT_OK) bail_status(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bail(2, "cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      bail(2, std::string("invalid ") + what + ": '" + field + "'");
    }
  }
  if (out.empty()) bail(2, std::string("empty ") + what);
  return out;
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      out.push_back(std::stoi(field));
    } catch (const std::exception&) {
      bail(2, std::string("invalid ") + what + ": '" + field + "'");
    }
  }
  if (out.empty()) bail(2, std::string("empty ") + what);
  return out;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) bail(2, "cannot write file: " + out_path);
  out << content;
}

struct OwnedString {
  char* value = nullptr;
  ~OwnedString() { attrikit_string_free(value); }
};

struct ModelHandle {
  attrikit_model* value = nullptr;
  ~ModelHandle() { attrikit_model_free(value); }
};

struct FunctionHandle {
  attrikit_function* value = nullptr;
  ~FunctionHandle() { attrikit_function_free(value); }
};

struct DatasetHandle {
  attrikit_dataset* value = nullptr;
  ~DatasetHandle() { attrikit_dataset_free(value); }
};

struct FamilyHandle {
  attrikit_family* value = nullptr;
  ~FamilyHandle() { attrikit_family_free(value); }
};

// A --model file can hold either a ReLU network (attrikit-relu/1) or an
// expression function (attrikit-function/1).
void load_subject(const std::string& path, ModelHandle& model, FunctionHandle& function) {
  const std::string content = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    bail(2, "malformed model file: " + std::string(e.what()));
  }
  const std::string format = doc.is_object() ? doc.value("format", "") : "";
  if (format == "attrikit-relu/1") {
    check(attrikit_model_load_json(content.c_str(), &model.value));
  } else if (format == "attrikit-function/1") {
    check(attrikit_function_load_json(content.c_str(), &function.value));
  } else {
    bail(2, "model file must declare format attrikit-relu/1 or attrikit-function/1");
  }
}

void load_family(const std::string& spec, int dim, const DatasetHandle& data, double bandwidth,
                 FamilyHandle& family) {
  if (std::filesystem::exists(spec)) {
    const std::string content = read_file(spec);
    check(attrikit_family_load_json(content.c_str(), dim, data.value, bandwidth, &family.value));
  } else {
    check(attrikit_family_preset(spec.c_str(), dim, data.value, bandwidth, &family.value));
  }
}

int run(int argc, char** argv) {
  CLI::App app{"attrikit: measure-based feature attribution toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = auto / ATTRIKIT_THREADS)");

  // attribute
  auto* attribute = app.add_subcommand("attribute", "compute a feature attribution report");
  std::string model_path, input_text, measure_spec, data_path, method = "auto", out_path;
  int grid_res = 0;
  long long mc_samples = 0;
  std::uint64_t seed = 0;
  double bandwidth = 0.0;
  attribute->add_option("--model", model_path, "model file (relu network or function spec)")
      ->required();
  attribute->add_option("--input", input_text, "explained point, comma separated")->required();
  attribute->add_option("--measure", measure_spec, "measure preset name or spec file")
      ->required();
  attribute->add_option("--data", data_path, "dataset CSV for data-backed presets");
  attribute->add_option("--method", method, "exact|grid|mc|auto (default auto)");
  attribute->add_option("--grid-res", grid_res, "grid resolution (default 1024)");
  attribute->add_option("--mc-samples", mc_samples, "Monte Carlo samples (default 100000)");
  attribute->add_option("--seed", seed, "Monte Carlo seed");
  attribute->add_option("--bandwidth", bandwidth, "conditional bandwidth (default 0.05)");
  attribute->add_option("--out", out_path, "output file (default stdout)");

  // regions
  auto* regions = app.add_subcommand("regions", "dump the exact linear-region partition");
  std::string regions_model, regions_out;
  regions->add_option("--model", regions_model, "relu network file")->required();
  regions->add_option("--out", regions_out, "output file (default stdout)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "recall/precision metrics from centers of mass");
  std::string metric_name, centers_path, metrics_model, weights_text, metrics_out;
  double alpha = 0.1, beta = 0.1;
  metrics->add_option("metric", metric_name, "recall|precision|rrecall|rprecision")->required();
  metrics->add_option("--alpha", alpha, "attribution threshold (default 0.1)");
  metrics->add_option("--beta", beta, "golden-set threshold (default 0.1)");
  metrics->add_option("--centers", centers_path, "centers file (attrikit-centers/1)")->required();
  metrics->add_option("--model", metrics_model, "relu network file (rrecall/rprecision)");
  metrics->add_option("--weights", weights_text, "linear weights (recall/precision)");
  metrics->add_option("--out", metrics_out, "output file (default stdout)");

  // axioms
  auto* axioms = app.add_subcommand("axioms", "axiom checks");
  auto* axioms_check = axioms->add_subcommand("check", "run an axiom suite for a method");
  std::string axiom_method, axiom_suite = "all", axioms_out;
  axioms_check->add_option("--method", axiom_method, "ig|gxi|pdp-uniform")->required();
  axioms_check->add_option("--suite", axiom_suite, "reference|remainder|all (default all)");
  axioms_check->add_option("--out", axioms_out, "output file (default stdout)");

  // converge
  auto* converge = app.add_subcommand("converge", "atomic-sum convergence table");
  std::string conv_model, conv_measure, conv_input, conv_plist = "8,16,32,64", conv_out,
              conv_data;
  int conv_grid_res = 0;
  double conv_bandwidth = 0.0;
  converge->add_option("--model", conv_model, "model file (relu network or function spec)")
      ->required();
  converge->add_option("--measure", conv_measure, "measure preset name or spec file")->required();
  converge->add_option("--input", conv_input, "explained point, comma separated")->required();
  converge->add_option("--p-list", conv_plist, "resolutions, comma separated (default 8,16,32,64)");
  converge->add_option("--data", conv_data, "dataset CSV for data-backed presets");
  converge->add_option("--grid-res", conv_grid_res, "reference grid resolution (default 1024)");
  converge->add_option("--bandwidth", conv_bandwidth, "conditional bandwidth (default 0.05)");
  converge->add_option("--out", conv_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (threads > 0) attrikit_set_threads(threads);

  if (attribute->parsed()) {
    ModelHandle model;
    FunctionHandle function;
    load_subject(model_path, model, function);
    DatasetHandle data;
    if (!data_path.empty()) check(attrikit_dataset_load_csv_file(data_path.c_str(), &data.value));
    const int dim = model.value != nullptr ? attrikit_model_input_dim(model.value)
                                           : attrikit_function_dim(function.value);
    FamilyHandle family;
    load_family(measure_spec, dim, data, bandwidth, family);
    const auto input = parse_doubles(input_text, "--input");
    attrikit_attr_options options{};
    options.method = method.c_str();
    options.grid_res = grid_res;
    options.mc_samples = mc_samples;
    options.seed = seed;
    OwnedString report;
    if (model.value != nullptr) {
      check(attrikit_attribute_model(model.value, family.value, input.data(), input.size(),
                                     &options, &report.value));
    } else {
      check(attrikit_attribute_function(function.value, family.value, input.data(), input.size(),
                                        &options, &report.value));
    }
    emit(report.value, out_path);
    return 0;
  }

  if (regions->parsed()) {
    ModelHandle model;
    check(attrikit_model_load_file(regions_model.c_str(), &model.value));
    OwnedString dump;
    check(attrikit_regions_json(model.value, &dump.value));
    emit(dump.value, regions_out);
    return 0;
  }

  if (metrics->parsed()) {
    const bool relu_metric = metric_name == "rrecall" || metric_name == "rprecision";
    ModelHandle model;
    std::vector<double> weights;
    int dim = 0;
    if (relu_metric) {
      if (metrics_model.empty()) bail(2, metric_name + " needs --model");
      check(attrikit_model_load_file(metrics_model.c_str(), &model.value));
      dim = attrikit_model_input_dim(model.value);
    } else if (metric_name == "recall" || metric_name == "precision") {
      if (weights_text.empty()) bail(2, metric_name + " needs --weights");
      weights = parse_doubles(weights_text, "--weights");
      dim = static_cast<int>(weights.size());
    } else {
      bail(2, "unknown metric: " + metric_name);
    }

    nlohmann::json centers_doc;
    try {
      centers_doc = nlohmann::json::parse(read_file(centers_path));
    } catch (const nlohmann::json::exception& e) {
      bail(2, "malformed centers file: " + std::string(e.what()));
    }
    if (!centers_doc.is_object() || centers_doc.value("format", "") != "attrikit-centers/1" ||
        !centers_doc.contains("centers")) {
      bail(2, "centers file must declare format attrikit-centers/1 with a 'centers' array");
    }
    const auto& rows = centers_doc["centers"];
    if (static_cast<int>(rows.size()) != dim) {
      bail(2, "centers file must provide one center per feature");
    }
    std::vector<double> centers;
    centers.reserve(static_cast<std::size_t>(dim * dim));
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim) {
        bail(2, "each center must have " + std::to_string(dim) + " coordinates");
      }
      for (const auto& v : row) centers.push_back(v.get<double>());
    }

    OwnedString record;
    if (relu_metric) {
      check(attrikit_metric_relu(metric_name.c_str(), model.value, alpha, beta, centers.data(),
                                 &record.value));
    } else {
      check(attrikit_metric_linear(metric_name.c_str(), weights.data(), weights.size(), alpha,
                                   beta, centers.data(), &record.value));
    }
    emit(record.value, metrics_out);
    return 0;
  }

  if (axioms_check->parsed()) {
    OwnedString reports;
    check(attrikit_axioms_check(axiom_method.c_str(), axiom_suite.c_str(), &reports.value));
    emit(reports.value, axioms_out);
    return 0;
  }

  if (converge->parsed()) {
    ModelHandle model;
    FunctionHandle function;
    load_subject(conv_model, model, function);
    if (model.value != nullptr) {
      check(attrikit_function_from_model(model.value, &function.value));
    }
    DatasetHandle data;
    if (!conv_data.empty()) check(attrikit_dataset_load_csv_file(conv_data.c_str(), &data.value));
    const int dim = attrikit_function_dim(function.value);
    FamilyHandle family;
    load_family(conv_measure, dim, data, conv_bandwidth, family);
    const auto input = parse_doubles(conv_input, "--input");
    const auto p_list = parse_ints(conv_plist, "--p-list");
    OwnedString csv;
    check(attrikit_converge_csv(function.value, family.value, input.data(), input.size(),
                                p_list.data(), p_list.size(), conv_grid_res, &csv.value));
    emit(csv.value, conv_out);
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code == 0 ? 1 : e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
