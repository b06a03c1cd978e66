#include "attrikit/attrikit.h"

#include "core/attribution.hpp"
#include "core/axioms.hpp"
#include "core/common.hpp"
#include "core/dataset.hpp"
#include "core/expression.hpp"
#include "core/function.hpp"
#include "core/measure.hpp"
#include "core/metrics.hpp"
#include "core/parallel.hpp"
#include "core/regions.hpp"
#include "core/relu_network.hpp"
#include "core/report_json.hpp"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

struct attrikit_model {
  std::shared_ptr<const attrikit::ReluNetwork> net;
};

struct attrikit_function {
  attrikit::FuncPtr fn;
};

struct attrikit_dataset {
  attrikit::DatasetPtr data;
};

struct attrikit_family {
  std::shared_ptr<const attrikit::MeasureFamily> family;
};

namespace {

thread_local std::string g_last_error;

attrikit_status fail(attrikit_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
attrikit_status guarded(Fn&& fn) {
  try {
    fn();
    return ATTRIKIT_OK;
  } catch (const attrikit::ValidationError& e) {
    return fail(ATTRIKIT_ERROR_VALIDATION, e.what());
  } catch (const attrikit::CapacityError& e) {
    return fail(ATTRIKIT_ERROR_CAPACITY, e.what());
  } catch (const attrikit::UndefinedMetricError& e) {
    return fail(ATTRIKIT_ERROR_UNDEFINED_METRIC, e.what());
  } catch (const std::exception& e) {
    return fail(ATTRIKIT_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(ATTRIKIT_ERROR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  attrikit::require(static_cast<bool>(in), std::string("cannot open file: ") + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

attrikit::Vec to_vec(const double* x, size_t dim) {
  attrikit::require(x != nullptr && dim > 0, "null input vector");
  attrikit::Vec v(static_cast<Eigen::Index>(dim));
  for (size_t i = 0; i < dim; ++i) v[static_cast<Eigen::Index>(i)] = x[i];
  return v;
}

attrikit::AttributeOptions to_options(const attrikit_attr_options* options) {
  attrikit::AttributeOptions opts;
  if (options == nullptr) return opts;
  if (options->method != nullptr) {
    opts.method = attrikit::attr_method_from_string(options->method);
  }
  if (options->grid_res > 0) opts.grid_res = options->grid_res;
  if (options->mc_samples > 0) opts.mc_samples = options->mc_samples;
  opts.seed = options->seed;
  return opts;
}

attrikit::CenterProjection to_centers(const double* centers, int dim) {
  attrikit::require(centers != nullptr, "null centers");
  attrikit::CenterProjection out;
  out.reserve(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    attrikit::Vec m(dim);
    for (int i = 0; i < dim; ++i) m[i] = centers[j * dim + i];
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

extern "C" {

const char* attrikit_version(void) { return "attrikit 1.0.0"; }

const char* attrikit_last_error(void) { return g_last_error.c_str(); }

void attrikit_set_threads(int n) { attrikit::set_worker_count(n); }

void attrikit_string_free(char* s) { delete[] s; }

attrikit_status attrikit_model_load_json(const char* text, attrikit_model** out) {
  return guarded([&] {
    attrikit::require(text != nullptr && out != nullptr, "null argument");
    auto net = std::make_shared<const attrikit::ReluNetwork>(
        attrikit::ReluNetwork::from_json(text));
    *out = new attrikit_model{std::move(net)};
  });
}

attrikit_status attrikit_model_load_file(const char* path, attrikit_model** out) {
  return guarded([&] {
    attrikit::require(path != nullptr && out != nullptr, "null argument");
    auto net = std::make_shared<const attrikit::ReluNetwork>(
        attrikit::ReluNetwork::from_json(read_file(path)));
    *out = new attrikit_model{std::move(net)};
  });
}

attrikit_status attrikit_model_to_json(const attrikit_model* model, char** out_text) {
  return guarded([&] {
    attrikit::require(model != nullptr && out_text != nullptr, "null argument");
    *out_text = copy_string(model->net->to_json());
  });
}

int attrikit_model_input_dim(const attrikit_model* model) {
  return model == nullptr ? 0 : model->net->input_dim();
}

attrikit_status attrikit_model_forward(const attrikit_model* model, const double* x, size_t dim,
                                       double* out_value) {
  return guarded([&] {
    attrikit::require(model != nullptr && out_value != nullptr, "null argument");
    *out_value = model->net->value(to_vec(x, dim));
  });
}

void attrikit_model_free(attrikit_model* model) { delete model; }

attrikit_status attrikit_function_parse(const char* expression, int dim,
                                        attrikit_function** out) {
  return guarded([&] {
    attrikit::require(expression != nullptr && out != nullptr, "null argument");
    *out = new attrikit_function{attrikit::parse_expression(expression, dim)};
  });
}

attrikit_status attrikit_function_load_json(const char* text, attrikit_function** out) {
  return guarded([&] {
    attrikit::require(text != nullptr && out != nullptr, "null argument");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw attrikit::ValidationError(std::string("malformed function file: ") + e.what());
    }
    attrikit::require(doc.is_object() && doc.value("format", "") == "attrikit-function/1",
                      "function file must declare format attrikit-function/1");
    attrikit::require(doc.contains("dim") && doc["dim"].is_number_integer(),
                      "function file missing integer dim");
    attrikit::require(doc.contains("expr") && doc["expr"].is_string(),
                      "function file missing expr");
    *out = new attrikit_function{
        attrikit::parse_expression(doc["expr"].get<std::string>(), doc["dim"].get<int>())};
  });
}

attrikit_status attrikit_function_from_model(const attrikit_model* model,
                                             attrikit_function** out) {
  return guarded([&] {
    attrikit::require(model != nullptr && out != nullptr, "null argument");
    *out = new attrikit_function{std::make_shared<attrikit::NetworkFunction>(model->net)};
  });
}

int attrikit_function_dim(const attrikit_function* fn) {
  return fn == nullptr ? 0 : fn->fn->dim();
}

attrikit_status attrikit_function_eval(const attrikit_function* fn, const double* x, size_t dim,
                                       double* out_value) {
  return guarded([&] {
    attrikit::require(fn != nullptr && out_value != nullptr, "null argument");
    *out_value = fn->fn->value(to_vec(x, dim));
  });
}

void attrikit_function_free(attrikit_function* fn) { delete fn; }

attrikit_status attrikit_dataset_load_csv(const char* text, attrikit_dataset** out) {
  return guarded([&] {
    attrikit::require(text != nullptr && out != nullptr, "null argument");
    *out = new attrikit_dataset{
        std::make_shared<const attrikit::Dataset>(attrikit::Dataset::from_csv(text))};
  });
}

attrikit_status attrikit_dataset_load_csv_file(const char* path, attrikit_dataset** out) {
  return guarded([&] {
    attrikit::require(path != nullptr && out != nullptr, "null argument");
    *out = new attrikit_dataset{
        std::make_shared<const attrikit::Dataset>(attrikit::Dataset::from_csv_file(path))};
  });
}

long long attrikit_dataset_rows(const attrikit_dataset* data) {
  return data == nullptr ? 0 : data->data->row_count();
}

int attrikit_dataset_columns(const attrikit_dataset* data) {
  return data == nullptr ? 0 : data->data->dim();
}

void attrikit_dataset_free(attrikit_dataset* data) { delete data; }

attrikit_status attrikit_family_preset(const char* name, int dim, const attrikit_dataset* data,
                                       double bandwidth, attrikit_family** out) {
  return guarded([&] {
    attrikit::require(name != nullptr && out != nullptr, "null argument");
    auto family = std::make_shared<const attrikit::MeasureFamily>(attrikit::MeasureFamily::preset(
        name, dim, data != nullptr ? data->data : attrikit::DatasetPtr(), bandwidth));
    *out = new attrikit_family{std::move(family)};
  });
}

attrikit_status attrikit_family_load_json(const char* text, int dim,
                                          const attrikit_dataset* data, double bandwidth,
                                          attrikit_family** out) {
  return guarded([&] {
    attrikit::require(text != nullptr && out != nullptr, "null argument");
    auto family =
        std::make_shared<const attrikit::MeasureFamily>(attrikit::MeasureFamily::from_spec_json(
            text, dim, data != nullptr ? data->data : attrikit::DatasetPtr(), bandwidth));
    *out = new attrikit_family{std::move(family)};
  });
}

void attrikit_family_free(attrikit_family* family) { delete family; }

attrikit_status attrikit_attribute_model(const attrikit_model* model,
                                         const attrikit_family* family, const double* x,
                                         size_t dim, const attrikit_attr_options* options,
                                         char** out_report_json) {
  return guarded([&] {
    attrikit::require(model != nullptr && family != nullptr && out_report_json != nullptr,
                      "null argument");
    const attrikit::NetworkFunction fn(model->net);
    const auto report =
        attrikit::attribute(fn, *family->family, to_vec(x, dim), to_options(options));
    *out_report_json = copy_string(attrikit::report_to_string(report));
  });
}

attrikit_status attrikit_attribute_function(const attrikit_function* fn,
                                            const attrikit_family* family, const double* x,
                                            size_t dim, const attrikit_attr_options* options,
                                            char** out_report_json) {
  return guarded([&] {
    attrikit::require(fn != nullptr && family != nullptr && out_report_json != nullptr,
                      "null argument");
    const auto report =
        attrikit::attribute(*fn->fn, *family->family, to_vec(x, dim), to_options(options));
    *out_report_json = copy_string(attrikit::report_to_string(report));
  });
}

attrikit_status attrikit_regions_json(const attrikit_model* model, char** out_json) {
  return guarded([&] {
    attrikit::require(model != nullptr && out_json != nullptr, "null argument");
    const auto decomp = attrikit::enumerate_regions_cached(*model->net);
    *out_json = copy_string(attrikit::regions_to_string(*decomp));
  });
}

attrikit_status attrikit_metric_linear(const char* metric, const double* weights, size_t dim,
                                       double alpha, double beta, const double* centers,
                                       char** out_json) {
  return guarded([&] {
    attrikit::require(metric != nullptr && out_json != nullptr, "null argument");
    const attrikit::Vec w = to_vec(weights, dim);
    const auto m_list = to_centers(centers, static_cast<int>(dim));
    attrikit::Vec phi(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      phi[j] = w.dot(m_list[static_cast<std::size_t>(j)]);
    }
    const std::string name = metric;
    double value = 0.0;
    if (name == "recall") {
      value = attrikit::recall(w, alpha, beta, phi);
    } else if (name == "precision") {
      value = attrikit::precision(w, alpha, beta, phi);
    } else {
      throw attrikit::ValidationError("unknown linear metric: " + name);
    }
    nlohmann::ordered_json config;
    config["alpha"] = alpha;
    config["beta"] = beta;
    config["dim"] = dim;
    *out_json = copy_string(attrikit::metric_to_string(name, value, config));
  });
}

attrikit_status attrikit_metric_relu(const char* metric, const attrikit_model* model,
                                     double alpha, double beta, const double* centers,
                                     char** out_json) {
  return guarded([&] {
    attrikit::require(metric != nullptr && model != nullptr && out_json != nullptr,
                      "null argument");
    const int dim = model->net->input_dim();
    const auto m_list = to_centers(centers, dim);
    const std::string name = metric;
    attrikit::ReluMetricResult result;
    if (name == "rrecall") {
      result = attrikit::relu_recall(*model->net, alpha, beta, m_list);
    } else if (name == "rprecision") {
      result = attrikit::relu_precision(*model->net, alpha, beta, m_list);
    } else {
      throw attrikit::ValidationError("unknown relu metric: " + name);
    }
    nlohmann::ordered_json config;
    config["alpha"] = alpha;
    config["beta"] = beta;
    config["regions"] = result.region_count;
    *out_json = copy_string(
        attrikit::metric_to_string(name, result.value, config, result.skipped_regions));
  });
}

attrikit_status attrikit_solution_set_contains(const char* kind, const double* weights,
                                               size_t dim, double alpha, double beta, int j,
                                               const double* m, int* out_contains) {
  return guarded([&] {
    attrikit::require(kind != nullptr && out_contains != nullptr, "null argument");
    const attrikit::Vec w = to_vec(weights, dim);
    const attrikit::Vec center = to_vec(m, dim);
    const std::string name = kind;
    bool contains = false;
    if (name == "recall") {
      contains = attrikit::recall_solution_set_contains(w, alpha, beta, j, center);
    } else if (name == "precision") {
      contains = attrikit::precision_solution_set_contains(w, alpha, beta, j, center);
    } else {
      throw attrikit::ValidationError("unknown solution-set kind: " + name);
    }
    *out_contains = contains ? 1 : 0;
  });
}

attrikit_status attrikit_relu_solution_set_contains(const attrikit_model* model,
                                                    const char* kind, double alpha, double beta,
                                                    int j, const double* m, int* out_contains) {
  return guarded([&] {
    attrikit::require(model != nullptr && kind != nullptr && out_contains != nullptr,
                      "null argument");
    const attrikit::Vec center = to_vec(m, static_cast<size_t>(model->net->input_dim()));
    const std::string name = kind;
    attrikit::SolutionKind sk;
    if (name == "recall") {
      sk = attrikit::SolutionKind::Recall;
    } else if (name == "precision") {
      sk = attrikit::SolutionKind::Precision;
    } else {
      throw attrikit::ValidationError("unknown solution-set kind: " + name);
    }
    *out_contains =
        attrikit::relu_solution_set_contains(*model->net, alpha, beta, j, center, sk) ? 1 : 0;
  });
}

attrikit_status attrikit_axioms_check(const char* method, const char* suite, char** out_json) {
  return guarded([&] {
    attrikit::require(method != nullptr && suite != nullptr && out_json != nullptr,
                      "null argument");
    const auto reports = attrikit::run_axiom_suite(method, suite);
    *out_json = copy_string(attrikit::axiom_reports_to_string(reports));
  });
}

attrikit_status attrikit_converge_csv(const attrikit_function* fn,
                                      const attrikit_family* family, const double* x, size_t dim,
                                      const int* p_list, size_t p_count, int reference_grid_res,
                                      char** out_csv) {
  return guarded([&] {
    attrikit::require(fn != nullptr && family != nullptr && p_list != nullptr &&
                          out_csv != nullptr && p_count > 0,
                      "null argument");
    const attrikit::Vec point = to_vec(x, dim);
    std::vector<int> ps(p_list, p_list + p_count);
    const auto entries = attrikit::approx_attribution_sequence(*fn->fn, *family->family, point, ps);

    attrikit::AttributeOptions opts;
    opts.method = attrikit::AttrMethod::Grid;
    opts.grid_res = reference_grid_res > 0 ? reference_grid_res : 1024;
    const auto reference = attrikit::attribute(*fn->fn, *family->family, point, opts);
    *out_csv = copy_string(attrikit::converge_to_csv(ps, entries, reference.phi));
  });
}

}  // extern "C"
