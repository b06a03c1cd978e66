#pragma once

#include "core/attribution.hpp"
#include "core/axioms.hpp"
#include "core/metrics.hpp"
#include "core/regions.hpp"

#include "json.hpp"

#include <string>

namespace attrikit {

// Stable-field-order documents; all byte-stable given identical inputs.

// "attrikit-report/1"
nlohmann::ordered_json report_to_json(const AttributionReport& report);
std::string report_to_string(const AttributionReport& report);

// "attrikit-regions/1": one record per region with pattern bits,
// halfspaces, vertices, volume, a, b.
std::string regions_to_string(const RegionDecomposition& decomp);

nlohmann::ordered_json axiom_report_to_json(const AxiomReport& report);
std::string axiom_reports_to_string(const std::vector<AxiomReport>& reports);

std::string metric_to_string(const std::string& metric, double value,
                             const nlohmann::ordered_json& config, int skipped_regions = -1);

// Centers-of-mass file ("attrikit-centers/1"): {"centers": [[...], ...]}.
CenterProjection centers_from_json(const std::string& text, int dim);

// Convergence table: p, phi_1..phi_d, sup_error (vs a grid reference).
std::string converge_to_csv(const std::vector<int>& p_list, const std::vector<Vec>& entries,
                            const Vec& reference);

}  // namespace attrikit
