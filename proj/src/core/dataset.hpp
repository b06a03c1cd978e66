#pragma once

#include "core/common.hpp"

#include <memory>
#include <string>
#include <vector>

namespace attrikit {

// Immutable n x d table with entries in [0,1] and normalized row weights.
class Dataset {
 public:
  Dataset(Mat rows, Vec weights = Vec());

  static Dataset from_csv(const std::string& text);
  static Dataset from_csv_file(const std::string& path);

  std::int64_t row_count() const { return rows_.rows(); }
  int dim() const { return static_cast<int>(rows_.cols()); }
  const Mat& rows() const { return rows_; }
  const Vec& weights() const { return weights_; }
  const std::vector<std::string>& column_names() const { return column_names_; }

 private:
  Mat rows_;
  Vec weights_;
  std::vector<std::string> column_names_;
  friend Dataset with_names(Dataset, std::vector<std::string>);
};

using DatasetPtr = std::shared_ptr<const Dataset>;

}  // namespace attrikit
