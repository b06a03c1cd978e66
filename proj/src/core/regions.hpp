#pragma once

#include "core/measure.hpp"
#include "core/polytope.hpp"
#include "core/relu_network.hpp"

#include <memory>
#include <string>
#include <vector>

namespace attrikit {

struct Region {
  Polytope polytope;
  ActivationPattern pattern;
  Vec a;
  double b;
};

struct RegionDecomposition {
  int dim = 0;
  std::string fingerprint;
  std::vector<Region> regions;
};

struct GeometryCaps {
  int max_dim = 6;
  int max_hidden_units = 64;
};

// Exact linear-region partition of the unit box: layer-recursive subdivision
// by the pre-activation hyperplanes, slivers below 1e-12 discarded.
RegionDecomposition enumerate_regions(const ReluNetwork& net, const GeometryCaps& caps = {});

// Memoized by network fingerprint.
std::shared_ptr<const RegionDecomposition> enumerate_regions_cached(
    const ReluNetwork& net, const GeometryCaps& caps = {});

double lebesgue_volume(const Polytope& p);
Vec lebesgue_centroid(const Polytope& p);

struct RegionMassOptions {
  std::int64_t mc_samples = 65536;
  std::uint64_t seed = 0x5eed;
};

struct RegionMass {
  double mass = 0.0;
  Vec center;  // zero vector when mass == 0
  bool monte_carlo = false;
  double mass_stderr = 0.0;
};

// mu(P) and the measure-weighted center of P. Lebesgue parts integrate
// exactly through the triangulation, Dirac coordinates slice the polytope,
// density components and empirical marginal products fall back to seeded
// Monte Carlo (hence the stderr field).
RegionMass measure_mass_centroid(const Polytope& p, const Measure& m,
                                 const RegionMassOptions& opts = {});

MassCenter center_of_mass(const Measure& m, const Polytope& p);

}  // namespace attrikit
