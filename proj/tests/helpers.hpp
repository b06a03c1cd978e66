#pragma once

#include "core/common.hpp"
#include "core/relu_network.hpp"

#include <random>
#include <vector>

namespace attrikit::testing {

inline Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Vec random_point(int dim, std::mt19937_64& rng) {
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x[i] = uniform01(rng);
  return x;
}

// One-hidden-layer network with weights in [-scale, scale] and biases
// placing most hyperplanes through the box.
inline ReluNetwork random_network(int dim, int hidden, std::uint64_t seed, double scale = 2.0) {
  std::mt19937_64 rng(seed);
  auto entry = [&]() { return scale * (2.0 * uniform01(rng) - 1.0); };
  Mat w1(hidden, dim);
  Vec b1(hidden);
  for (int r = 0; r < hidden; ++r) {
    for (int c = 0; c < dim; ++c) w1(r, c) = entry();
    b1[r] = entry() * 0.5;
  }
  Mat w2(1, hidden);
  Vec b2(1);
  for (int c = 0; c < hidden; ++c) w2(0, c) = entry();
  b2[0] = entry() * 0.5;
  return ReluNetwork({{w1, b1}, {w2, b2}});
}

inline ReluNetwork random_deep_network(int dim, int h1, int h2, std::uint64_t seed,
                                       double scale = 1.5) {
  std::mt19937_64 rng(seed);
  auto entry = [&]() { return scale * (2.0 * uniform01(rng) - 1.0); };
  Mat w1(h1, dim);
  Vec b1(h1);
  for (int r = 0; r < h1; ++r) {
    for (int c = 0; c < dim; ++c) w1(r, c) = entry();
    b1[r] = entry() * 0.5;
  }
  Mat w2(h2, h1);
  Vec b2(h2);
  for (int r = 0; r < h2; ++r) {
    for (int c = 0; c < h1; ++c) w2(r, c) = entry();
    b2[r] = entry() * 0.5;
  }
  Mat w3(1, h2);
  Vec b3(1);
  for (int c = 0; c < h2; ++c) w3(0, c) = entry();
  b3[0] = entry() * 0.5;
  return ReluNetwork({{w1, b1}, {w2, b2}, {w3, b3}});
}

// {W1 = I2, b1 = 0, W2 = [1, 1], b2 = 0}: relu(x1) + relu(x2).
inline ReluNetwork identity_sum_network() {
  Mat w1 = Mat::Identity(2, 2);
  Vec b1 = Vec::Zero(2);
  Mat w2(1, 2);
  w2 << 1.0, 1.0;
  Vec b2 = Vec::Zero(1);
  return ReluNetwork({{w1, b1}, {w2, b2}});
}

// Single hidden unit computing relu(x1 - 0.5).
inline ReluNetwork step_network() {
  Mat w1(1, 2);
  w1 << 1.0, 0.0;
  Vec b1(1);
  b1 << -0.5;
  Mat w2(1, 1);
  w2 << 1.0;
  Vec b2 = Vec::Zero(1);
  return ReluNetwork({{w1, b1}, {w2, b2}});
}

}  // namespace attrikit::testing
