#include <gtest/gtest.h>

#include "hospsim/errors.hpp"
#include "hospsim/world.hpp"

using namespace hospsim;

namespace {

World small_world() {
  World w;
  w.facilities.push_back(Facility::community());
  w.facilities.emplace_back(1, "H", FacilityCategory::UNC, 1, 2, 2, 1);
  for (AgentId i = 0; i < 5; ++i) {
    Agent a;
    a.id = i;
    w.agents.push_back(a);
  }
  return w;
}

}  // namespace

TEST(AgeBins, Boundaries) {
  EXPECT_EQ(bin_age(0), AgeGroup::Under50);
  EXPECT_EQ(bin_age(49), AgeGroup::Under50);
  EXPECT_EQ(bin_age(50), AgeGroup::From50To64);
  EXPECT_EQ(bin_age(64), AgeGroup::From50To64);
  EXPECT_EQ(bin_age(65), AgeGroup::Over65);
  EXPECT_EQ(bin_age(104), AgeGroup::Over65);
  EXPECT_THROW(bin_age(-1), InputError);
}

TEST(AgeBins, ParseRoundTrip) {
  for (auto g : kAgeGroups) EXPECT_EQ(parse_age_group(to_string(g)), g);
  for (auto c : kCategories) EXPECT_EQ(parse_category(to_string(c)), c);
  EXPECT_THROW(parse_category("CLINIC"), InputError);
}

TEST(Facility, IcuNeedPrefersPlainIcuThenVentilator) {
  Facility f(1, "H", FacilityCategory::UNC, 1, 1, 2, 1);
  EXPECT_EQ(f.free_bed_for(BedNeed::ICU), BedKind::ICU);
  ASSERT_EQ(f.assign(10, BedNeed::ICU), AssignResult::Assigned);
  EXPECT_EQ(f.find(10)->kind, BedKind::ICU);
  ASSERT_EQ(f.assign(11, BedNeed::ICU), AssignResult::Assigned);
  EXPECT_EQ(f.find(11)->kind, BedKind::Ventilator);
  EXPECT_EQ(f.assign(12, BedNeed::ICU), AssignResult::Full);
  EXPECT_EQ(f.assign(12, BedNeed::ICUWithVentilator), AssignResult::Full);
  EXPECT_EQ(f.occupied_icu(), 2);
  EXPECT_TRUE(within_capacity(f));
}

TEST(Facility, VentilatorNeedOnlyTakesVentilatorBed) {
  Facility f(1, "H", FacilityCategory::UNC, 1, 0, 2, 1);
  ASSERT_EQ(f.assign(1, BedNeed::ICUWithVentilator, true), AssignResult::Assigned);
  EXPECT_EQ(f.find(1)->kind, BedKind::Ventilator);
  EXPECT_EQ(f.covid_occupied(BedKind::Ventilator), 1);
  EXPECT_EQ(f.assign(2, BedNeed::ICUWithVentilator), AssignResult::Full);
  EXPECT_EQ(f.assign(2, BedNeed::NonICU), AssignResult::Full);
  auto slot = f.release(1);
  EXPECT_TRUE(slot.covid);
  EXPECT_EQ(f.covid_occupied(BedKind::Ventilator), 0);
  EXPECT_THROW(f.release(1), StateError);
}

TEST(Facility, CommunityIsUnbounded) {
  auto c = Facility::community();
  for (AgentId i = 0; i < 1000; ++i) EXPECT_EQ(c.assign(i, BedNeed::ICU), AssignResult::Assigned);
  EXPECT_EQ(c.occupant_count(), 0);
}

TEST(Facility, ScaleBedsRoundsAndKeepsOne) {
  Facility f(1, "H", FacilityCategory::SmallNonUNC, 1, 100, 10, 6);
  f.scale_beds(0.01);
  EXPECT_EQ(f.non_icu_beds(), 1);
  EXPECT_EQ(f.icu_beds(), 1);
  EXPECT_EQ(f.ventilator_beds(), 1);
  Facility g(2, "H", FacilityCategory::SmallNonUNC, 1, 250, 0, 0);
  g.scale_beds(0.1);
  EXPECT_EQ(g.non_icu_beds(), 25);
  EXPECT_EQ(g.icu_beds(), 0);
}

TEST(Facility, RejectsBadBedCounts) {
  EXPECT_THROW(Facility(1, "H", FacilityCategory::UNC, 1, -1, 0, 0), ValidationError);
  EXPECT_THROW(Facility(1, "H", FacilityCategory::UNC, 1, 1, 1, 2), ValidationError);
}

TEST(World, AdmitAndDischargeLogEvents) {
  auto w = small_world();
  w.day = 3;
  w.stage = Stage::Community;
  ASSERT_EQ(w.admit(0, 1, BedNeed::ICU, false, MoveReason::NewAdmission), AssignResult::Assigned);
  EXPECT_EQ(w.agent(0).location, 1);
  EXPECT_TRUE(w.agent(0).icu_flag);
  ASSERT_EQ(w.events.size(), 1u);
  EXPECT_EQ(w.events[0].type, EventType::Admit);
  EXPECT_EQ(w.events[0].day, 3);
  EXPECT_EQ(w.events[0].bed, BedKind::ICU);

  EXPECT_THROW(w.admit(0, 1, BedNeed::NonICU, false, MoveReason::NewAdmission), StateError);
  w.discharge(0, MoveReason::Discharge);
  EXPECT_EQ(w.agent(0).location, kCommunity);
  EXPECT_EQ(w.agent(0).previous_location, 1);
  EXPECT_FALSE(w.agent(0).icu_flag);
  EXPECT_EQ(w.events.back().type, EventType::Release);
  EXPECT_THROW(w.discharge(0, MoveReason::Discharge), StateError);
}

TEST(World, FullFacilityChangesNothing) {
  auto w = small_world();
  ASSERT_EQ(w.admit(0, 1, BedNeed::NonICU, false, MoveReason::NewAdmission), AssignResult::Assigned);
  ASSERT_EQ(w.admit(1, 1, BedNeed::NonICU, false, MoveReason::NewAdmission), AssignResult::Assigned);
  auto before = w.events.size();
  EXPECT_EQ(w.admit(2, 1, BedNeed::NonICU, false, MoveReason::NewAdmission), AssignResult::Full);
  EXPECT_EQ(w.agent(2).location, kCommunity);
  EXPECT_EQ(w.events.size(), before);
}

TEST(World, AdmitCancelsReadmissionAndRejectsDead) {
  auto w = small_world();
  w.agent(3).readmission = Readmission{5, 1};
  w.admit(3, 1, BedNeed::NonICU, false, MoveReason::NewAdmission);
  EXPECT_FALSE(w.agent(3).readmission);
  w.agent(4).alive = false;
  EXPECT_THROW(w.admit(4, 1, BedNeed::NonICU, false, MoveReason::NewAdmission), StateError);
}

TEST(World, LookupErrors) {
  auto w = small_world();
  EXPECT_THROW(w.facility(9), LookupError);
  EXPECT_THROW(w.agent(-1), LookupError);
  EXPECT_EQ(w.facilities_of(FacilityCategory::UNC), std::vector<FacilityId>{1});
  EXPECT_EQ(w.living_count(), 5u);
}
