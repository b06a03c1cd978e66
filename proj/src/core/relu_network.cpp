#include "core/relu_network.hpp"

#include "json.hpp"

#include <utility>

namespace attrikit {

namespace {

void validate_layers(const std::vector<Layer>& layers) {
  require(!layers.empty(), "network needs at least one layer");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const std::string where = "layer " + std::to_string(l + 1);
    require(layer.weights.rows() > 0 && layer.weights.cols() > 0, where + ": empty weight matrix");
    require(layer.bias.size() == layer.weights.rows(),
            where + ": bias length " + std::to_string(layer.bias.size()) + " does not match " +
                std::to_string(layer.weights.rows()) + " rows");
    if (l > 0) {
      require(layer.weights.cols() == layers[l - 1].weights.rows(),
              where + ": expected " + std::to_string(layers[l - 1].weights.rows()) +
                  " columns, got " + std::to_string(layer.weights.cols()));
    }
    require(layer.weights.allFinite() && layer.bias.allFinite(), where + ": non-finite entry");
  }
  require(layers.back().weights.rows() == 1, "final layer must have output width 1");
}

}  // namespace

ReluNetwork::ReluNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  validate_layers(layers_);
  input_dim_ = static_cast<int>(layers_.front().weights.cols());
  hidden_units_ = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    hidden_units_ += static_cast<int>(layers_[l].weights.rows());
  }
  fingerprint_ = fnv1a_hex(to_json());
}

ReluNetwork::ForwardResult ReluNetwork::forward(const Vec& x) const {
  require(x.size() == input_dim_,
          "input has dimension " + std::to_string(x.size()) + ", expected " +
              std::to_string(input_dim_));
  ForwardResult out;
  out.preactivations.reserve(layers_.size());
  Vec h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Vec z = layers_[l].weights * h + layers_[l].bias;
    out.preactivations.push_back(z);
    if (l + 1 < layers_.size()) h = z.cwiseMax(0.0);
  }
  out.value = out.preactivations.back()[0];
  return out;
}

double ReluNetwork::value(const Vec& x) const { return forward(x).value; }

ActivationPattern ReluNetwork::activation_pattern(const Vec& x) const {
  const auto fwd = forward(x);
  ActivationPattern pattern;
  pattern.reserve(layers_.size() - 1);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const Vec& z = fwd.preactivations[l];
    std::vector<bool> bits(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) bits[static_cast<std::size_t>(i)] = z[i] > 0.0;
    pattern.push_back(std::move(bits));
  }
  return pattern;
}

ReluNetwork::AffineCoeffs ReluNetwork::affine_coeffs(const ActivationPattern& pattern) const {
  require(static_cast<int>(pattern.size()) == hidden_layer_count(),
          "pattern has " + std::to_string(pattern.size()) + " layers, expected " +
              std::to_string(hidden_layer_count()));
  Mat a = layers_.front().weights;
  Vec c = layers_.front().bias;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    require(static_cast<Eigen::Index>(pattern[l].size()) == a.rows(),
            "pattern width mismatch at hidden layer " + std::to_string(l + 1));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!pattern[l][static_cast<std::size_t>(i)]) {
        a.row(i).setZero();
        c[i] = 0.0;
      }
    }
    a = layers_[l + 1].weights * a;
    c = layers_[l + 1].weights * c + layers_[l + 1].bias;
  }
  return {a.row(0).transpose(), c[0]};
}

ReluNetwork::AffineMap ReluNetwork::preactivation_affine(
    const std::vector<std::vector<bool>>& fixed_masks) const {
  require(static_cast<int>(fixed_masks.size()) < static_cast<int>(layers_.size()),
          "too many fixed masks");
  Mat a = layers_.front().weights;
  Vec c = layers_.front().bias;
  for (std::size_t l = 0; l < fixed_masks.size(); ++l) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!fixed_masks[l][static_cast<std::size_t>(i)]) {
        a.row(i).setZero();
        c[i] = 0.0;
      }
    }
    a = layers_[l + 1].weights * a;
    c = layers_[l + 1].weights * c + layers_[l + 1].bias;
  }
  return {std::move(a), std::move(c)};
}

std::string ReluNetwork::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = "attrikit-relu/1";
  doc["input_dim"] = input_dim_;
  auto& layer_list = doc["layers"] = nlohmann::ordered_json::array();
  for (const auto& layer : layers_) {
    nlohmann::ordered_json entry;
    auto& w = entry["weights"] = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      auto row = nlohmann::ordered_json::array();
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) row.push_back(layer.weights(r, c));
      w.push_back(std::move(row));
    }
    auto& b = entry["bias"] = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) b.push_back(layer.bias[i]);
    layer_list.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

ReluNetwork ReluNetwork::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
  require(doc.is_object() && doc.value("format", "") == "attrikit-relu/1",
          "model file must declare format attrikit-relu/1");
  require(doc.contains("input_dim") && doc["input_dim"].is_number_integer(),
          "model file missing integer input_dim");
  require(doc.contains("layers") && doc["layers"].is_array() && !doc["layers"].empty(),
          "model file missing layers");
  const int input_dim = doc["input_dim"].get<int>();
  require(input_dim >= 1, "input_dim must be positive");

  std::vector<Layer> layers;
  int prev_width = input_dim;
  std::size_t index = 0;
  for (const auto& entry : doc["layers"]) {
    ++index;
    const std::string where = "layer " + std::to_string(index);
    require(entry.is_object() && entry.contains("weights") && entry.contains("bias"),
            where + ": needs weights and bias");
    const auto& w = entry["weights"];
    const auto& b = entry["bias"];
    require(w.is_array() && !w.empty(), where + ": weights must be a 2-D array");
    const std::size_t rows = w.size();
    require(w[0].is_array() && !w[0].empty(), where + ": weights must be a 2-D array");
    const std::size_t cols = w[0].size();
    require(static_cast<int>(cols) == prev_width,
            where + ": expected " + std::to_string(prev_width) + " columns, got " +
                std::to_string(cols));
    Layer layer;
    layer.weights.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      require(w[r].is_array() && w[r].size() == cols, where + ": ragged weight row");
      for (std::size_t c = 0; c < cols; ++c) {
        require(w[r][c].is_number(), where + ": non-numeric weight entry");
        layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            w[r][c].get<double>();
      }
    }
    require(b.is_array() && b.size() == rows, where + ": bias length must match weight rows");
    layer.bias.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
      require(b[i].is_number(), where + ": non-numeric bias entry");
      layer.bias[static_cast<Eigen::Index>(i)] = b[i].get<double>();
    }
    require(layer.weights.allFinite() && layer.bias.allFinite(), where + ": non-finite entry");
    prev_width = static_cast<int>(rows);
    layers.push_back(std::move(layer));
  }
  return ReluNetwork(std::move(layers));
}

}  // namespace attrikit
