#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>

#include "hospsim/engine.hpp"
#include "hospsim/errors.hpp"
#include "hospsim/movement.hpp"
#include "support.hpp"

using namespace hospsim;

namespace {

// Tiny network with hand-made agents: 0 Over65 county 1, 1 Under50 county 1,
// 2 Over65 county 2, 3 Under50 county 2.
struct Net {
  Bundle bundle;
  Parameters params;
  World world;
  std::unique_ptr<Router> router;

  explicit Net(const test::fs::path& dir) : bundle(test::load(dir)), params(bundle_parameters(dir)) {
    world.facilities = bundle.facilities;
    const std::pair<CountyCode, int> people[] = {{1, 75}, {1, 30}, {2, 70}, {2, 40}};
    for (auto [county, age] : people) {
      Agent a;
      a.id = static_cast<AgentId>(world.agents.size());
      a.county = county;
      a.age_years = age;
      a.age_group = bin_age(age);
      world.agents.push_back(a);
    }
    router = std::make_unique<Router>(world, bundle.transitions, bundle.distances, params);
  }
};

test::fs::path tiny() {
  static auto dir = test::tiny_bundle("movement");
  return dir;
}

template <class T, class F>
std::map<T, double> frequencies(int n, F&& f) {
  std::map<T, double> out;
  for (int i = 0; i < n; ++i) out[f()] += 1.0 / n;
  return out;
}

}  // namespace

TEST(Routing, CommunityTypeFollowsRow) {
  Net net(tiny());
  Rng rng(1);
  auto old = frequencies<FacilityCategory>(100000, [&] {
    return net.router->choose_community_type(net.world.agent(0), rng);
  });
  EXPECT_NEAR(old[FacilityCategory::UNC], 0.3, 0.01);
  EXPECT_NEAR(old[FacilityCategory::SmallNonUNC], 0.3, 0.01);
  EXPECT_NEAR(old[FacilityCategory::LTACH], 0.05, 0.005);
  EXPECT_NEAR(old[FacilityCategory::NH], 0.05, 0.005);

  auto young = frequencies<FacilityCategory>(100000, [&] {
    return net.router->choose_community_type(net.world.agent(1), rng);
  });
  EXPECT_EQ(young.count(FacilityCategory::NH), 0u);
  EXPECT_NEAR(young[FacilityCategory::SmallNonUNC], 0.35, 0.01);
}

TEST(Routing, UnderSixtyFiveNeverSentToNursingHome) {
  auto dir = test::tiny_bundle("movement-nh-mass");
  std::string lt = "county,age_group,source,community,unc,large,small,ltach,nh\n";
  for (int c = 1; c <= 2; ++c)
    for (const char* g : {"<50", "50-64", "65+"})
      for (const char* s : {"1", "2", "3", "LTACH", "NH"})
        lt += std::to_string(c) + "," + g + "," + s + ",0.5,0.1,0.1,0.1,0.1,0.1\n";
  test::write_file(dir / BundleFiles::kLocationTransitions, lt);
  Net net(dir);
  Rng rng(2);
  const auto& from = net.world.facility(1);
  for (int i = 0; i < 20000; ++i)
    ASSERT_NE(net.router->choose_transfer_type(net.world.agent(1), from, rng), FacilityCategory::NH);
  auto old = frequencies<FacilityCategory>(50000, [&] {
    return net.router->choose_transfer_type(net.world.agent(0), from, rng);
  });
  EXPECT_NEAR(old[FacilityCategory::NH], 0.1, 0.01);
}

TEST(Routing, TransferTypeFromUncUsesRowAsIs) {
  Net net(tiny());
  Rng rng(3);
  auto f = frequencies<FacilityCategory>(200000, [&] {
    return net.router->choose_transfer_type(net.world.agent(0), net.world.facility(1), rng);
  });
  const double row[6] = {0.8, 0.05, 0.05, 0.05, 0.03, 0.02};
  for (auto c : kCategories) EXPECT_NEAR(f[c], row[index(c)], 0.005) << to_string(c);
}

TEST(Routing, NonUncTransfersResplitLargeAndSmall) {
  Net net(tiny());
  Rng rng(4);
  // Large and small carry 0.10 of the row together; it is re-split by the source's split.
  auto from_large = frequencies<FacilityCategory>(200000, [&] {
    return net.router->choose_transfer_type(net.world.agent(0), net.world.facility(2), rng);
  });
  EXPECT_NEAR(from_large[FacilityCategory::LargeNonUNC], 0.08, 0.003);
  EXPECT_NEAR(from_large[FacilityCategory::SmallNonUNC], 0.02, 0.003);
  auto from_small = frequencies<FacilityCategory>(200000, [&] {
    return net.router->choose_transfer_type(net.world.agent(0), net.world.facility(3), rng);
  });
  EXPECT_NEAR(from_small[FacilityCategory::LargeNonUNC], 0.09, 0.003);
  EXPECT_NEAR(from_small[FacilityCategory::SmallNonUNC], 0.01, 0.002);
}

TEST(Routing, NursingHomeReturnPrefersPreviousHome) {
  Net net(tiny());
  auto& a = net.world.agent(0);
  ASSERT_EQ(net.world.admit(0, 1, BedNeed::NonICU, false, MoveReason::NewAdmission),
            AssignResult::Assigned);
  a.previous_location = 5;
  Rng rng(5);
  auto f = frequencies<FacilityId>(100000, [&] {
    return net.router->choose_specific_facility(a, FacilityCategory::NH, rng, RouteContext::NhReturn);
  });
  EXPECT_NEAR(f[5], 0.80, 0.005);
  EXPECT_NEAR(f[6], 0.20, 0.005);
}

TEST(Routing, SpecificStachFollowsDischargeCounts) {
  Net net(tiny());
  Rng rng(6);
  const auto& c1 = net.world.agent(0);
  EXPECT_EQ(net.router->choose_specific_facility(c1, FacilityCategory::UNC, rng,
                                                 RouteContext::NewAdmission), 1);
  EXPECT_EQ(net.router->choose_specific_facility(c1, FacilityCategory::LargeNonUNC, rng,
                                                 RouteContext::NewAdmission), 2);
  // County 2 sends nobody to a large hospital; the only one is the fallback.
  EXPECT_EQ(net.router->choose_specific_facility(net.world.agent(2), FacilityCategory::LargeNonUNC,
                                                 rng, RouteContext::NewAdmission), 2);
  EXPECT_EQ(net.router->choose_specific_facility(c1, FacilityCategory::Community, rng,
                                                 RouteContext::Transfer), kCommunity);
}

TEST(Routing, NeverChoosesCurrentFacility) {
  Net net(tiny());
  ASSERT_EQ(net.world.admit(0, 1, BedNeed::NonICU, false, MoveReason::NewAdmission),
            AssignResult::Assigned);
  const auto& a = net.world.agent(0);
  EXPECT_FALSE(net.router->can_route(a, FacilityCategory::UNC));
  EXPECT_TRUE(net.router->can_route(a, FacilityCategory::NH));
  EXPECT_TRUE(net.router->can_route(a, FacilityCategory::Community));
  Rng rng(7);
  EXPECT_THROW(net.router->choose_specific_facility(a, FacilityCategory::UNC, rng,
                                                   RouteContext::Transfer),
               RoutingError);
}

TEST(Routing, SecondChoiceDrawsOverUntriedStachs) {
  Net net(tiny());
  Rng rng(8);
  const FacilityId none[] = {0};
  auto f = frequencies<FacilityId>(100000, [&] {
    return *net.router->second_choice(net.world.agent(2), none, rng);
  });
  EXPECT_NEAR(f[1], 50.0 / 110.0, 0.01);
  EXPECT_NEAR(f[3], 60.0 / 110.0, 0.01);
  const FacilityId tried[] = {1};
  EXPECT_EQ(net.router->second_choice(net.world.agent(0), tried, rng), 2);
  const FacilityId both[] = {1, 2};
  EXPECT_FALSE(net.router->second_choice(net.world.agent(0), both, rng));
}

TEST(Routing, CatchmentAndRadiusAreNearestFirst) {
  Net net(tiny());
  EXPECT_EQ(net.router->catchment(1), (std::vector<FacilityId>{1, 2}));
  EXPECT_EQ(net.router->catchment(2), (std::vector<FacilityId>{3, 1}));
  EXPECT_TRUE(net.router->catchment(9).empty());
  EXPECT_EQ(net.router->within_radius(1, 40.0), (std::vector<FacilityId>{1, 2, 3}));
  EXPECT_EQ(net.router->within_radius(2, 39.0), (std::vector<FacilityId>{3}));
  auto any = net.router->nearby(2, 10.0, false);
  ASSERT_EQ(any.size(), 3u);
  EXPECT_EQ(any[0].first, 4);
}

TEST(Departures, BernoulliPerEligibleAgent) {
  Net net(tiny());
  for (int i = 0; i < 20000; ++i) {
    Agent a;
    a.id = static_cast<AgentId>(net.world.agents.size());
    a.county = 1;
    a.age_group = AgeGroup::From50To64;
    net.world.agents.push_back(a);
  }
  net.world.agent(10).created_day = 5;
  net.world.agent(11).alive = false;
  Rng rng(9);
  double total = 0;
  const int days = 20;
  for (int d = 1; d <= days; ++d) {
    auto out = select_community_departures(net.world, *net.router, 5, rng);
    for (auto [id, type] : out) {
      ASSERT_NE(id, 10);
      ASSERT_NE(id, 11);
      ASSERT_NE(type, FacilityCategory::NH);
    }
    total += static_cast<double>(out.size());
  }
  const double eligible = static_cast<double>(net.world.agents.size() - 2);
  EXPECT_NEAR(total / (days * eligible), 0.01, 0.001);
}

TEST(Admission, LadderRecordsEveryStageWhenAllFull) {
  Net net(tiny());
  for (FacilityId id : {1, 2, 3}) net.world.facility(id).set_beds(0, 0, 0);
  Rng rng(10);
  auto r = attempt_admission(net.world, *net.router, 0, BedNeed::NonICU, 1, false,
                             MoveReason::NewAdmission, rng);
  EXPECT_FALSE(r.admitted);
  ASSERT_EQ(net.world.turn_aways.size(), 5u);
  const TurnAwayStage order[] = {TurnAwayStage::FirstChoice, TurnAwayStage::SecondChoice,
                                 TurnAwayStage::Catchment, TurnAwayStage::Radius200,
                                 TurnAwayStage::CompletelyTurnedAway};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(net.world.turn_aways[i].stage, order[i]);
  EXPECT_EQ(net.world.turn_aways[1].facility, 2);
  ASSERT_EQ(net.world.events.size(), 2u);
  EXPECT_EQ(net.world.events[0].type, EventType::Seek);
  EXPECT_EQ(net.world.events[1].type, EventType::TurnedAway);
  EXPECT_EQ(net.world.agent(0).location, kCommunity);
}

TEST(Admission, RadiusStageFindsFarHospital) {
  Net net(tiny());
  for (FacilityId id : {1, 2}) net.world.facility(id).set_beds(0, 0, 0);
  Rng rng(11);
  auto r = attempt_admission(net.world, *net.router, 0, BedNeed::ICU, 1, false,
                             MoveReason::NewAdmission, rng);
  EXPECT_TRUE(r.admitted);
  EXPECT_EQ(r.facility, 3);
  EXPECT_EQ(net.world.turn_aways.size(), 3u);
  EXPECT_EQ(net.world.agent(0).location, 3);
  EXPECT_TRUE(net.world.agent(0).icu_flag);
}

TEST(Admission, NonStachGetsOneAttempt) {
  Net net(tiny());
  net.world.facility(4).set_beds(0, 0, 0);
  Rng rng(12);
  auto r = attempt_admission(net.world, *net.router, 2, BedNeed::NonICU, 4, false,
                             MoveReason::NewAdmission, rng);
  EXPECT_FALSE(r.admitted);
  ASSERT_EQ(net.world.turn_aways.size(), 2u);
  EXPECT_EQ(net.world.turn_aways[1].stage, TurnAwayStage::CompletelyTurnedAway);
  EXPECT_EQ(net.world.events.size(), 1u);
}

TEST(Transfer, MovesOrSendsHome) {
  Net net(tiny());
  net.world.admit(0, 1, BedNeed::NonICU, true, MoveReason::NewAdmission);
  auto r = attempt_transfer(net.world, 0, 4, BedNeed::NonICU);
  EXPECT_TRUE(r.admitted);
  EXPECT_EQ(net.world.agent(0).location, 4);
  EXPECT_EQ(net.world.agent(0).previous_location, 1);
  EXPECT_EQ(net.world.facility(4).covid_occupied(BedKind::NonICU), 1);
  EXPECT_EQ(net.world.events.back().reason, MoveReason::Transfer);

  net.world.facility(2).set_beds(0, 0, 0);
  r = attempt_transfer(net.world, 0, 2, BedNeed::NonICU);
  EXPECT_FALSE(r.admitted);
  EXPECT_EQ(net.world.agent(0).location, kCommunity);
  ASSERT_EQ(net.world.turn_aways.size(), 1u);
  EXPECT_EQ(net.world.turn_aways[0].facility, 2);
  EXPECT_THROW(attempt_transfer(net.world, 0, 2, BedNeed::NonICU), StateError);
}

TEST(Readmission, TenPercentWithinThirtyDays) {
  Parameters p;
  Agent a;
  Rng rng(13);
  EXPECT_FALSE(schedule_readmission(a, 1, 10, p, rng));
  p.readmission_enabled = true;
  const int n = 200000;
  std::vector<int> offsets(31);
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    auto r = schedule_readmission(a, 2, 10, p, rng);
    if (!r) continue;
    ++hits;
    EXPECT_EQ(r->facility, 2);
    int off = r->day - 10;
    ASSERT_GE(off, 1);
    ASSERT_LE(off, 30);
    ++offsets[static_cast<std::size_t>(off)];
  }
  EXPECT_NEAR(hits / double(n), 0.10, 0.003);
  double expected = hits / 30.0, chi2 = 0;
  for (int d = 1; d <= 30; ++d) chi2 += std::pow(offsets[d] - expected, 2) / expected;
  // 29 degrees of freedom, p = 0.001 critical value
  EXPECT_LT(chi2, 58.30);
}

TEST(Los, IcuLogistic) {
  IcuModel m;
  Agent a;
  a.age_group = AgeGroup::Over65;
  a.comorbidity = true;
  double z = m.intercept + m.age[2] + m.comorbidity + m.los * 10;
  EXPECT_DOUBLE_EQ(icu_probability(a, 10, m), 1.0 / (1.0 + std::exp(-z)));
  a.age_group = AgeGroup::Under50;
  a.comorbidity = false;
  EXPECT_DOUBLE_EQ(icu_probability(a, 0, m), 1.0 / (1.0 + std::exp(2.0)));
  EXPECT_GT(icu_probability(a, 40, m), icu_probability(a, 4, m));
}

TEST(Los, GammaCeilingMeanMatchesSurvivalSum) {
  Facility h(1, "H", FacilityCategory::UNC, 1, 1, 0, 0);
  NhLos nh;
  nh.admission = EmpiricalPool::from_counts({{7, 1}});
  LosTable table({}, GammaLos{2.0, 2.5}, GammaLos{2.0, 10.0}, nh);
  Rng rng(14);
  const int n = 200000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    int d = sample_los(h, table, rng);
    ASSERT_GE(d, 1);
    sum += d;
  }
  // E[max(1, ceil X)] = 1 + sum_{k>=1} P(X > k); for shape 2, P(X > x) = e^{-x/s}(1 + x/s).
  double oracle = 1.0;
  for (int k = 1; k < 400; ++k) oracle += std::exp(-k / 2.5) * (1.0 + k / 2.5);
  EXPECT_NEAR(sum / n, oracle, 0.02);

  Facility home(5, "N", FacilityCategory::NH, 1, 1, 0, 0);
  EXPECT_EQ(sample_los(home, table, rng), 7);
  LosTable tiny_gamma({}, GammaLos{0.5, 0.01}, GammaLos{}, nh);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(sample_los(h, tiny_gamma, rng), 1);
}

TEST(Los, RemainingSamplerConstantTenIsUniform) {
  auto r = remaining_los_sampler([] { return 10; }, 500);
  EXPECT_EQ(r.sim_days, 10);
  std::map<int, std::size_t> counts;
  for (int v : r.pool) ++counts[v];
  ASSERT_EQ(counts.size(), 10u);
  for (int d = 1; d <= 10; ++d) EXPECT_EQ(counts[d], 500u) << d;
}
