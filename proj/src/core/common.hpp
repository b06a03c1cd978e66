#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace attrikit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy; categories map onto C API status codes and CLI exit codes.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UndefinedMetricError : std::runtime_error {
  explicit UndefinedMetricError(const std::string& msg) : std::runtime_error(msg) {}
};

// SplitMix64-style mixing; derives independent seed streams from (base, index).
std::uint64_t mix64(std::uint64_t base, std::uint64_t index);

// FNV-1a 64-bit hash, hex-encoded. Used for model fingerprints.
std::string fnv1a_hex(std::string_view bytes);

// Neumaier compensated summation; keeps long accumulations at ~1 ulp.
class NeumaierSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline bool in_unit_box(const Vec& x, double tol = 0.0) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < -tol || x[i] > 1.0 + tol) return false;
  }
  return true;
}

void require(bool cond, const std::string& msg);  // -> ValidationError

}  // namespace attrikit
