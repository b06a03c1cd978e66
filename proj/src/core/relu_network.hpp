#pragma once

#include "core/common.hpp"

#include <string>
#include <vector>

namespace attrikit {

struct Layer {
  Mat weights;  // d_l x d_{l-1}
  Vec bias;     // d_l
};

// Per hidden layer, true where the pre-activation is strictly positive.
// Ties (z == 0) count as inactive.
using ActivationPattern = std::vector<std::vector<bool>>;

// Fully-connected ReLU network with scalar output. Layers are immutable
// after construction; all queries are pure.
class ReluNetwork {
 public:
  explicit ReluNetwork(std::vector<Layer> layers);

  int input_dim() const { return input_dim_; }
  int hidden_layer_count() const { return static_cast<int>(layers_.size()) - 1; }
  int hidden_unit_count() const { return hidden_units_; }
  const std::vector<Layer>& layers() const { return layers_; }

  struct ForwardResult {
    double value;
    std::vector<Vec> preactivations;  // z^(1) .. z^(L+1)
  };
  ForwardResult forward(const Vec& x) const;
  double value(const Vec& x) const;

  ActivationPattern activation_pattern(const Vec& x) const;

  struct AffineCoeffs {
    Vec a;
    double b;
  };
  // Local linear model (a, b) for the region with the given activation
  // pattern: the network equals a.x + b wherever the pattern holds.
  AffineCoeffs affine_coeffs(const ActivationPattern& pattern) const;

  // Affine map x -> (A x + c) of the pre-activation of layer `depth`
  // (1-based) when the masks of the previous depth-1 hidden layers are
  // fixed. Used by the region subdivision.
  struct AffineMap {
    Mat linear;
    Vec constant;
  };
  AffineMap preactivation_affine(const std::vector<std::vector<bool>>& fixed_masks) const;

  // Canonical "attrikit-relu/1" document. Round-trips bit-exactly.
  std::string to_json() const;
  static ReluNetwork from_json(const std::string& text);

  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::vector<Layer> layers_;
  int input_dim_;
  int hidden_units_;
  std::string fingerprint_;
};

}  // namespace attrikit
