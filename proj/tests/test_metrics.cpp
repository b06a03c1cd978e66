#include "core/metrics.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <random>

using namespace attrikit;
using attrikit::testing::vec;

TEST_CASE("golden split follows the boundary-inclusive rule") {
  const auto split = golden_split(vec({1.0, 0.1}), 0.5);
  CHECK(split.d1 == std::vector<int>{0});
  CHECK(split.d0 == std::vector<int>{1});

  // |w_i| == beta goes to D0.
  const auto boundary = golden_split(vec({0.5, 0.5}), 0.5);
  CHECK(boundary.d1.empty());

  const auto three = golden_split(vec({2.0, -3.0, 0.01}), 0.5);
  CHECK(three.d1 == std::vector<int>{0, 1});
  CHECK(three.d0 == std::vector<int>{2});
}

TEST_CASE("recall on simple configurations") {
  const Vec w = vec({1.0, 0.1});
  CHECK(recall(w, 0.5, 0.5, vec({1.0, 0.1})) == doctest::Approx(1.0));
  CHECK(recall(w, 0.5, 0.5, vec({0.4, 0.1})) == doctest::Approx(0.0));
  CHECK_THROWS_AS(recall(vec({0.1, 0.2}), 0.5, 0.5, vec({1.0, 1.0})), UndefinedMetricError);
}

TEST_CASE("recall of the global closed form counts weights above alpha") {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    Vec w(3);
    for (int i = 0; i < 3; ++i) w[i] = 6.0 * testing::uniform01(rng) - 3.0;
    const double alpha = 0.2 + testing::uniform01(rng);
    const double beta = 0.1 + 0.5 * testing::uniform01(rng);
    const auto split = golden_split(w, beta);
    if (split.d1.empty()) continue;
    int expected = 0;
    for (int j : split.d1) {
      if (std::abs(w[j]) >= alpha) ++expected;
    }
    CHECK(recall(w, alpha, beta, w) ==
          doctest::Approx(static_cast<double>(expected) / split.d1.size()));
  }
}

TEST_CASE("precision on simple configurations") {
  const Vec w = vec({1.0, 0.1});
  CHECK(precision(w, 0.5, 0.5, vec({1.0, 0.1})) == doctest::Approx(1.0));
  CHECK(precision(w, 0.5, 0.5, vec({1.0, 0.9})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(precision(w, 0.5, 0.5, vec({0.1, 0.1})), UndefinedMetricError);
}

TEST_CASE("recall and precision are invariant under joint scaling") {
  const Vec w = vec({2.0, -0.4, 1.1});
  const Vec phi = vec({0.6, 0.05, -0.8});
  for (double scale : {0.5, 2.0, 10.0}) {
    CHECK(recall(w, 0.3, 0.5, phi) == recall(w, 0.3 * scale, 0.5, Vec(phi * scale)));
    CHECK(precision(w, 0.3, 0.5, phi) == precision(w, 0.3 * scale, 0.5, Vec(phi * scale)));
  }
}

TEST_CASE("recall solution set membership") {
  const Vec w = vec({1.0, 1.0});
  CHECK(recall_solution_set_contains(w, 0.5, 0.5, 0, vec({0.5, 0.5})));
  // alpha above the reachable maximum: infeasible for golden features.
  CHECK(!recall_solution_set_contains(w, 3.0, 0.5, 0, vec({1.0, 1.0})));
  // Non-golden features are unconstrained.
  CHECK(recall_solution_set_contains(vec({1.0, 0.1}), 3.0, 0.5, 1, vec({1.0, 1.0})));
  // Half-plane picture: |w.m| >= alpha in, below out.
  CHECK(recall_solution_set_contains(w, 0.5, 0.5, 0, vec({0.4, 0.4})));
  CHECK(!recall_solution_set_contains(w, 0.5, 0.5, 0, vec({0.2, 0.2})));
}

TEST_CASE("precision solution set membership") {
  const Vec w = vec({1.0, 1.0});
  CHECK(precision_solution_set_contains(vec({1.0, 0.1}), 0.5, 0.5, 1, vec({0.1, 0.1})));
  CHECK(!precision_solution_set_contains(vec({1.0, 0.1}), 0.5, 0.5, 1, vec({1.0, 1.0})));
  CHECK(precision_solution_set_contains(w, 0.5, 0.5, 0, vec({0.9, 0.9})));
}

TEST_CASE("membership soundness: passing all golden features forces recall one") {
  std::mt19937_64 rng(2024);
  int verified = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 2);
    Vec w(d);
    for (int i = 0; i < d; ++i) w[i] = 6.0 * testing::uniform01(rng) - 3.0;
    const double alpha = 0.1 + testing::uniform01(rng);
    const double beta = 0.05 + 0.4 * testing::uniform01(rng);
    const auto split = golden_split(w, beta);
    if (split.d1.empty()) continue;
    CenterProjection centers;
    for (int j = 0; j < d; ++j) centers.push_back(testing::random_point(d, rng));
    bool all_in = true;
    for (int j : split.d1) {
      if (!recall_solution_set_contains(w, alpha, beta, j, centers[j])) all_in = false;
    }
    if (!all_in) continue;
    ++verified;
    Vec phi(d);
    for (int j = 0; j < d; ++j) phi[j] = w.dot(centers[j]);
    CHECK(recall(w, alpha, beta, phi) == doctest::Approx(1.0));
  }
  CHECK(verified > 10);
}

TEST_CASE("precision optimality implies recall optimality on sampled grids") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    Vec w(2);
    w[0] = 6.0 * testing::uniform01(rng) - 3.0;
    w[1] = 6.0 * testing::uniform01(rng) - 3.0;
    const double alpha = 0.1 + testing::uniform01(rng);
    const double beta = 0.05 + 0.4 * testing::uniform01(rng);
    for (int g = 0; g < 25; ++g) {
      const Vec m = testing::random_point(2, rng);
      for (int j = 0; j < 2; ++j) {
        if (precision_solution_set_contains(w, alpha, beta, j, m)) {
          CHECK(recall_solution_set_contains(w, alpha, beta, j, m));
        }
      }
    }
  }
}

TEST_CASE("relu metrics reduce to the linear case on a single region") {
  const ReluNetwork net = testing::identity_sum_network();
  const Vec a = vec({1.0, 1.0});
  const CenterProjection centers = {vec({0.6, 0.6}), vec({0.1, 0.1})};
  Vec phi(2);
  for (int j = 0; j < 2; ++j) phi[j] = a.dot(centers[static_cast<std::size_t>(j)]);

  const auto rr = relu_recall(net, 0.5, 0.5, centers);
  CHECK(rr.region_count == 1);
  CHECK(rr.skipped_regions == 0);
  CHECK(rr.value == doctest::Approx(recall(a, 0.5, 0.5, phi)));

  const auto rp = relu_precision(net, 0.5, 0.5, centers);
  CHECK(rp.value == doctest::Approx(precision(a, 0.5, 0.5, phi)));
}

TEST_CASE("relu recall sums per-region values and stays within bounds") {
  const ReluNetwork net = testing::random_network(2, 6, 5150);
  const auto decomp = enumerate_regions(net);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    CenterProjection centers = {testing::random_point(2, rng), testing::random_point(2, rng)};
    const auto result = relu_recall(net, 0.3, 0.1, centers);
    CHECK(result.region_count == static_cast<int>(decomp.regions.size()));
    CHECK(result.value >= 0.0);
    CHECK(result.value <= static_cast<double>(result.region_count - result.skipped_regions));
  }
}

TEST_CASE("relu metric counts skipped regions where the metric is undefined") {
  // Zero-weight regions of the step network make the golden set empty.
  const ReluNetwork net = testing::step_network();
  const CenterProjection centers = {vec({0.9, 0.9}), vec({0.9, 0.9})};
  const auto result = relu_recall(net, 0.1, 0.1, centers);
  CHECK(result.region_count == 2);
  CHECK(result.skipped_regions == 1);  // the inactive region has a = 0
  CHECK(result.value == doctest::Approx(1.0));
}

TEST_CASE("relu solution sets intersect the per-region constraints") {
  const ReluNetwork net = testing::step_network();
  // Active region has a = (1, 0): membership demands |m_1| >= alpha.
  CHECK(relu_solution_set_contains(net, 0.5, 0.1, 0, vec({0.7, 0.2}), SolutionKind::Recall));
  CHECK(!relu_solution_set_contains(net, 0.5, 0.1, 0, vec({0.3, 0.9}), SolutionKind::Recall));
  // Feature 2 is never golden for this network: unconstrained.
  CHECK(relu_solution_set_contains(net, 0.5, 0.1, 1, vec({0.9, 0.9}), SolutionKind::Recall));
}

TEST_CASE("an empty solution-set intersection is always false") {
  // When alpha exceeds what some golden region can reach on the box, the
  // intersection over regions is empty and membership fails everywhere.
  std::mt19937_64 rng(6);
  bool found_empty = false;
  for (int trial = 0; trial < 20 && !found_empty; ++trial) {
    const ReluNetwork net = testing::random_network(2, 6, 9000 + trial);
    bool all_false = true;
    for (int g = 0; g < 200; ++g) {
      if (relu_solution_set_contains(net, 1.6, 0.1, 0, testing::random_point(2, rng),
                                     SolutionKind::Recall)) {
        all_false = false;
        break;
      }
    }
    if (all_false) found_empty = true;
  }
  CHECK(found_empty);
}

TEST_CASE("relu solution membership implies per-region recall one") {
  std::mt19937_64 rng(11);
  const ReluNetwork net = testing::random_network(2, 5, 606);
  const auto decomp = enumerate_regions(net);
  const double alpha = 0.2, beta = 0.1;
  int verified = 0;
  for (int trial = 0; trial < 400 && verified < 5; ++trial) {
    CenterProjection centers = {testing::random_point(2, rng), testing::random_point(2, rng)};
    bool all_in = true;
    for (int j = 0; j < 2; ++j) {
      if (!relu_solution_set_contains(net, alpha, beta, j, centers[j], SolutionKind::Recall)) {
        all_in = false;
      }
    }
    if (!all_in) continue;
    ++verified;
    for (const auto& region : decomp.regions) {
      const auto split = golden_split(region.a, beta);
      if (split.d1.empty()) continue;
      Vec phi(2);
      for (int j = 0; j < 2; ++j) phi[j] = region.a.dot(centers[j]);
      CHECK(recall(region.a, alpha, beta, phi) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("random search does not beat a solution-set member for rrecall") {
  const ReluNetwork net = testing::random_network(2, 5, 1818);
  const double alpha = 0.15, beta = 0.1;
  std::mt19937_64 rng(12);

  // Find a member of every feature's solution set by grid search.
  CenterProjection member;
  bool found_all = true;
  for (int j = 0; j < 2 && found_all; ++j) {
    bool found = false;
    for (int gx = 0; gx <= 40 && !found; ++gx) {
      for (int gy = 0; gy <= 40 && !found; ++gy) {
        const Vec m = vec({gx / 40.0, gy / 40.0});
        if (relu_solution_set_contains(net, alpha, beta, j, m, SolutionKind::Recall)) {
          member.push_back(m);
          found = true;
        }
      }
    }
    found_all = found;
  }
  if (!found_all) return;  // empty intersection is a legitimate outcome

  const double member_value = relu_recall(net, alpha, beta, member).value;
  for (int trial = 0; trial < 1000; ++trial) {
    CenterProjection random_centers = {testing::random_point(2, rng),
                                       testing::random_point(2, rng)};
    CHECK(relu_recall(net, alpha, beta, random_centers).value <= member_value + 1e-12);
  }
}

TEST_CASE("metric inputs are validated") {
  CHECK_THROWS_AS(recall(vec({1.0}), 0.0, 0.5, vec({1.0})), ValidationError);
  CHECK_THROWS_AS(recall(vec({1.0}), 0.5, -1.0, vec({1.0})), ValidationError);
  const ReluNetwork net = testing::step_network();
  CHECK_THROWS_AS(relu_recall(net, 0.5, 0.5, {vec({0.5, 0.5})}), ValidationError);
  CHECK_THROWS_AS(
      relu_recall(net, 0.5, 0.5, {vec({1.5, 0.5}), vec({0.5, 0.5})}), ValidationError);
}
