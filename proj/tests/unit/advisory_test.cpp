#include <gtest/gtest.h>

#include <algorithm>
#include <tuple>

#include "dsage/advisory.hpp"
#include "dsage/seed.hpp"
#include "scenarios.hpp"

namespace dsage {
namespace {

using testing::wm_of;

TEST(CfPercent, RoundsHalfUp) {
  EXPECT_EQ(cf_percent(CertaintyFactor(0.945)), 95);
  EXPECT_EQ(cf_percent(CertaintyFactor(0.944999)), 94);
  EXPECT_EQ(cf_percent(CertaintyFactor(0.40)), 40);
  EXPECT_EQ(cf_percent(CertaintyFactor(0.94)), 94);
  EXPECT_EQ(cf_percent(CertaintyFactor(0.005)), 1);
  EXPECT_EQ(cf_percent(CertaintyFactor(0.004999)), 0);
  EXPECT_EQ(cf_percent(CertaintyFactor(1.0)), 100);
  EXPECT_EQ(cf_percent(CertaintyFactor(0.0)), 0);
  for (int k = 0; k <= 100; ++k) {
    const double half = (k + 0.5) / 100.0;
    if (half <= 1.0) {
      EXPECT_EQ(cf_percent(CertaintyFactor(half)), k + 1) << half;
    }
    EXPECT_EQ(cf_percent(CertaintyFactor(k / 100.0)), k);
  }
}

TEST(Advisories, WorkedExample) {
  const auto kb = testing::seed_with_rules({"R25"});
  const auto adv = make_advisories(kb, run(kb, wm_of(testing::worked_example_observations())));
  ASSERT_EQ(adv.size(), 1u);
  EXPECT_EQ(adv[0].rank, 1);
  EXPECT_EQ(adv[0].cf_percent, 40);
  EXPECT_EQ(adv[0].hypothesis.display(), "No evidence of drought");
  EXPECT_FALSE(adv[0].mitigation);
}

TEST(Advisories, NoObservationsNoAdvice) {
  EXPECT_TRUE(make_advisories(seed_kb(), run(seed_kb(), WorkingMemory{})).empty());
}

TEST(Advisories, MitigationIffSevere) {
  auto obs = testing::rc38_observations();
  obs.push_back(testing::observe("soil_moisture", "high", 1.0));
  obs.push_back(testing::observe("mviti", "wilting", 1.0, Verb::shows));
  obs.push_back(testing::observe("inyosibees", "sighted", 1.0));
  obs.push_back(testing::observe("moon", "full", 1.0, Verb::appears));
  const auto adv = make_advisories(seed_kb(), run(seed_kb(), wm_of(obs)));
  ASSERT_EQ(adv.size(), 3u);
  for (const auto& a : adv) {
    EXPECT_EQ(a.mitigation.has_value(), a.hypothesis.severity() != Severity::none)
        << a.hypothesis.display();
  }
  // RC5 and RC10 fire alongside: 0.5 + 0.5 * 0.6.
  EXPECT_EQ(adv[0].hypothesis.statement(), "No evidence of drought");
  EXPECT_EQ(adv[0].cf_percent, 80);
  EXPECT_EQ(adv[1].hypothesis.statement(), "Moderate evidence of drought");
  EXPECT_EQ(adv[1].cf_percent, 75);
  EXPECT_EQ(*adv[1].mitigation, seed_kb().mitigations.at(Severity::moderate));
  EXPECT_EQ(adv[2].hypothesis.statement(), "Evidence of drought");
  EXPECT_EQ(adv[2].cf_percent, 68);
  EXPECT_EQ(*adv[2].mitigation, seed_kb().mitigations.at(Severity::evidence));
}

TEST(Advisories, RanksFollowScores) {
  const auto kb = testing::worked_example_with_prior();
  KnowledgeBase two = kb;
  two.rules.push_back({"R30", {{"rainfall", Verb::is, "high"}}, Connective::all_of,
                       Hypothesis("Rain expected"), 0.4, KnowledgeKind::derivation});
  const auto adv = make_advisories(two, run(two, wm_of(testing::worked_example_with_prior_observations())));
  ASSERT_EQ(adv.size(), 2u);
  EXPECT_EQ(adv[0].rank, 1);
  EXPECT_EQ(adv[0].cf_percent, 94);
  EXPECT_EQ(adv[1].rank, 2);
  EXPECT_EQ(adv[1].cf_percent, 40);
}

Advisory make(const char* statement, std::optional<Season> season, double score) {
  Advisory a;
  a.hypothesis = Hypothesis(statement, season);
  a.score = CertaintyFactor(score);
  a.cf_percent = cf_percent(a.score);
  return a;
}

// Independent statement of the presentation order.
auto order_key(const Advisory& a) {
  const int sev = a.hypothesis.severity() == Severity::evidence   ? 0
                  : a.hypothesis.severity() == Severity::moderate ? 1
                                                                  : 2;
  const int season = a.hypothesis.season() ? static_cast<int>(*a.hypothesis.season()) : -1;
  return std::make_tuple(-a.cf_percent, sev, a.hypothesis.display(), a.hypothesis.statement(), season);
}

TEST(Advisories, OrderingIsTotalOverAllPermutations) {
  const std::vector<Advisory> pool = {
      make("No evidence of drought", std::nullopt, 0.94),
      make("Evidence of drought", std::nullopt, 0.40),
      make("Moderate evidence of drought", Season::autumn, 0.40),
      make("No evidence of drought", Season::spring, 0.404),
      make("No evidence of drought", Season::unspecified, 0.40),
      make("No evidence of drought", std::nullopt, 0.401),
      make("Evidence of drought", Season::winter, 0.945),
  };
  const std::size_t n = pool.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    if (idx.size() > 4) continue;
    std::vector<Advisory> expected;
    for (auto i : idx) expected.push_back(pool[i]);
    std::sort(expected.begin(), expected.end(),
              [](const Advisory& a, const Advisory& b) { return order_key(a) < order_key(b); });
    do {
      std::vector<Advisory> got;
      for (auto i : idx) got.push_back(pool[i]);
      std::sort(got.begin(), got.end(), advisory_before);
      EXPECT_EQ(got, expected);
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  for (const auto& a : pool) {
    EXPECT_FALSE(advisory_before(a, a));
    for (const auto& b : pool) {
      if (&a == &b) continue;
      if (a.hypothesis == b.hypothesis) continue;
      EXPECT_NE(advisory_before(a, b), advisory_before(b, a));
    }
  }
}

}  // namespace
}  // namespace dsage
