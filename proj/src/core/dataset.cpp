#include "core/dataset.hpp"

#include <fstream>
#include <sstream>

namespace attrikit {

Dataset::Dataset(Mat rows, Vec weights) : rows_(std::move(rows)), weights_(std::move(weights)) {
  require(rows_.rows() > 0 && rows_.cols() > 0, "dataset must be non-empty");
  require(rows_.allFinite(), "dataset has non-finite entries");
  require(rows_.minCoeff() >= 0.0 && rows_.maxCoeff() <= 1.0,
          "dataset entries must lie in [0,1]");
  if (weights_.size() == 0) {
    weights_ = Vec::Constant(rows_.rows(), 1.0 / static_cast<double>(rows_.rows()));
  } else {
    require(weights_.size() == rows_.rows(), "weight count must match row count");
    require(weights_.minCoeff() >= 0.0, "weights must be nonnegative");
    const double total = weights_.sum();
    require(total > 0.0, "weights must not all be zero");
    weights_ /= total;
  }
}

Dataset Dataset::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "CSV is empty");

  std::vector<std::string> names;
  {
    std::istringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) names.push_back(field);
  }
  require(!names.empty(), "CSV header has no columns");
  const std::size_t cols = names.size();

  std::vector<double> values;
  std::int64_t row_count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    std::size_t col = 0;
    while (std::getline(fields, field, ',')) {
      require(col < cols, "CSV row " + std::to_string(row_count + 1) + " has too many fields");
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ValidationError("CSV row " + std::to_string(row_count + 1) +
                              ": non-numeric field '" + field + "'");
      }
      ++col;
    }
    require(col == cols, "CSV row " + std::to_string(row_count + 1) + " has " +
                             std::to_string(col) + " fields, expected " + std::to_string(cols));
    ++row_count;
  }
  require(row_count > 0, "CSV has no data rows");

  Mat rows(row_count, static_cast<Eigen::Index>(cols));
  for (std::int64_t r = 0; r < row_count; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      rows(r, static_cast<Eigen::Index>(c)) =
          values[static_cast<std::size_t>(r) * cols + c];
    }
  }
  Dataset result(std::move(rows));
  result.column_names_ = std::move(names);
  return result;
}

Dataset Dataset::from_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open dataset file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_csv(buffer.str());
}

}  // namespace attrikit
