#include "core/report_json.hpp"

#include <sstream>

namespace attrikit {

namespace {

nlohmann::ordered_json vec_json(const Vec& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

nlohmann::ordered_json report_to_json(const AttributionReport& report) {
  nlohmann::ordered_json doc;
  doc["format"] = "attrikit-report/1";
  doc["x"] = vec_json(report.x);
  doc["phi"] = vec_json(report.phi);
  doc["method"] = report.method;
  if (report.stderr_) doc["stderr"] = vec_json(*report.stderr_);
  doc["settings"] = report.settings;
  doc["model_fingerprint"] = report.model_fingerprint;
  return doc;
}

std::string report_to_string(const AttributionReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string regions_to_string(const RegionDecomposition& decomp) {
  nlohmann::ordered_json doc;
  doc["format"] = "attrikit-regions/1";
  doc["model_fingerprint"] = decomp.fingerprint;
  doc["dim"] = decomp.dim;
  doc["region_count"] = decomp.regions.size();
  auto& regions = doc["regions"] = nlohmann::ordered_json::array();
  for (const auto& region : decomp.regions) {
    nlohmann::ordered_json entry;
    auto& pattern = entry["pattern"] = nlohmann::ordered_json::array();
    for (const auto& layer : region.pattern) {
      auto bits = nlohmann::ordered_json::array();
      for (bool b : layer) bits.push_back(b ? 1 : 0);
      pattern.push_back(std::move(bits));
    }
    auto& halfspaces = entry["halfspaces"] = nlohmann::ordered_json::array();
    for (const auto& h : region.polytope.halfspaces()) {
      nlohmann::ordered_json hs;
      hs["normal"] = vec_json(h.normal);
      hs["offset"] = h.offset;
      halfspaces.push_back(std::move(hs));
    }
    auto& vertices = entry["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : region.polytope.vertices()) vertices.push_back(vec_json(v));
    entry["volume"] = region.polytope.volume();
    entry["a"] = vec_json(region.a);
    entry["b"] = region.b;
    regions.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

nlohmann::ordered_json axiom_report_to_json(const AxiomReport& report) {
  nlohmann::ordered_json doc;
  doc["axiom"] = report.axiom;
  doc["method"] = report.method;
  doc["cases"] = report.cases;
  doc["max_violation"] = report.max_violation;
  doc["tolerance"] = report.tolerance;
  doc["pass"] = report.pass;
  if (report.counterexample) doc["counterexample"] = *report.counterexample;
  if (report.precondition_failure) doc["precondition_failure"] = *report.precondition_failure;
  return doc;
}

std::string axiom_reports_to_string(const std::vector<AxiomReport>& reports) {
  nlohmann::ordered_json doc;
  doc["format"] = "attrikit-axioms/1";
  auto& list = doc["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) list.push_back(axiom_report_to_json(r));
  return doc.dump(2) + "\n";
}

std::string metric_to_string(const std::string& metric, double value,
                             const nlohmann::ordered_json& config, int skipped_regions) {
  nlohmann::ordered_json doc;
  doc["metric"] = metric;
  doc["value"] = value;
  doc["config"] = config;
  if (skipped_regions >= 0) doc["skipped_regions"] = skipped_regions;
  return doc.dump(2) + "\n";
}

CenterProjection centers_from_json(const std::string& text, int dim) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed centers file: ") + e.what());
  }
  require(doc.is_object() && doc.value("format", "") == "attrikit-centers/1",
          "centers file must declare format attrikit-centers/1");
  require(doc.contains("centers") && doc["centers"].is_array(),
          "centers file missing 'centers' array");
  CenterProjection centers;
  for (const auto& row : doc["centers"]) {
    require(row.is_array() && static_cast<int>(row.size()) == dim,
            "each center must have " + std::to_string(dim) + " coordinates");
    Vec m(dim);
    for (int i = 0; i < dim; ++i) m[i] = row[static_cast<std::size_t>(i)].get<double>();
    centers.push_back(std::move(m));
  }
  require(static_cast<int>(centers.size()) == dim,
          "centers file must provide one center per feature");
  return centers;
}

std::string converge_to_csv(const std::vector<int>& p_list, const std::vector<Vec>& entries,
                            const Vec& reference) {
  require(p_list.size() == entries.size(), "entry count mismatch");
  std::ostringstream out;
  out.precision(17);
  out << "p";
  for (Eigen::Index j = 0; j < reference.size(); ++j) out << ",phi_" << (j + 1);
  out << ",sup_error\n";
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    out << p_list[i];
    for (Eigen::Index j = 0; j < entries[i].size(); ++j) out << "," << entries[i][j];
    out << "," << (entries[i] - reference).lpNorm<Eigen::Infinity>() << "\n";
  }
  return out.str();
}

}  // namespace attrikit
