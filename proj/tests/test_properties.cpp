#include <gtest/gtest.h>

#include "support/random_instances.hpp"

using namespace retrace;

TEST(Properties, VariableEliminationMatchesEnumeration) {
  int with_evidence = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    fixtures::RandomNet r = fixtures::random_net(seed);
    ASSERT_LE(r.net.nodes().size(), 24u);
    with_evidence += !r.evidence.empty();
    std::vector<double> ve = posterior(r.net, r.evidence);
    std::vector<double> bf = brute_force_posterior(r.net, r.evidence);
    ASSERT_EQ(ve.size(), bf.size());
    for (size_t i = 0; i < ve.size(); ++i) ASSERT_NEAR(ve[i], bf[i], 1e-9) << "seed " << seed << " node " << i;
    std::vector<double> prior = posterior(r.net, {});
    for (size_t i = 0; i < ve.size(); ++i) ASSERT_NEAR(prior[i], r.net.node(static_cast<int>(i)).marginal, 1e-12);
  }
  EXPECT_GT(with_evidence, 100);
}

TEST(Properties, SearchMatchesExhaustiveRecovery) {
  int solvable = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    fixtures::RandomHistory h;
    fixtures::random_history(seed, RETRACE_DATA_DIR "/models/service.rmodel", h);
    auto fast = search_min_trace(h.problem);
    auto slow = brute_force_trace(h.problem);
    ASSERT_EQ(fast, slow) << "seed " << seed;
    if (fast) {
      ++solvable;
      EXPECT_TRUE(check_trace(h.problem, *fast)) << "seed " << seed;
    }
  }
  EXPECT_GT(solvable, 50);
}

TEST(Properties, RandomModelsRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed);
    RobotModel m = parse_model(fixtures::random_model_text(rng, seed % 2 == 0));
    EXPECT_EQ(parse_model(print_model(m)), m);
  }
}
