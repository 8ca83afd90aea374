#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "hospsim/errors.hpp"
#include "hospsim/ingest.hpp"
#include "support.hpp"

using namespace hospsim;
using test::write_file;

TEST(Population, ExpansionDuplicatesSourceRows) {
  std::vector<PopulationRow> rows = {{1, 'F', 30}, {2, 'M', 70}, {1, 'M', 55}};
  Rng rng(4);
  auto t = expand_population(rows, 10, rng);
  ASSERT_EQ(t.rows.size(), 10u);
  EXPECT_EQ(t.source_rows, 3u);
  ASSERT_EQ(t.duplicate_indices.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(t.rows[3 + i], rows[t.duplicate_indices[i]]);
  EXPECT_EQ(expand_population(rows, 0, rng).rows.size(), 3u);
  EXPECT_THROW(expand_population(rows, 2, rng), InputError);
  EXPECT_THROW(expand_population({}, 2, rng), InputError);
}

TEST(Population, LoadRejectsBadAge) {
  auto dir = test::scratch_dir("pop");
  write_file(dir / "p.csv", "county,sex,age\n1,F,30\n1,M,-3\n");
  Rng rng(1);
  EXPECT_THROW(load_population(dir / "p.csv", 0, rng), InputError);
  write_file(dir / "q.csv", "county,sex,age\n1,F,30\n2,M,abc\n");
  try {
    load_population(dir / "q.csv", 0, rng);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Facilities, InsertsCommunityAndRequiresDenseIds) {
  auto dir = test::scratch_dir("fac");
  write_file(dir / "f.csv",
             "facility_id,name,category,county,non_icu_beds,icu_beds,ventilator_beds\n"
             "1,\"Hospital, Main\",UNC,3,10,4,2\n2,Home,NH,3,20,0,0\n");
  auto f = load_facilities(dir / "f.csv");
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].category(), FacilityCategory::Community);
  EXPECT_EQ(f[1].name(), "Hospital, Main");
  EXPECT_EQ(f[1].ventilator_beds(), 2);
  write_file(dir / "g.csv",
             "facility_id,name,category,county,non_icu_beds,icu_beds,ventilator_beds\n"
             "1,A,UNC,3,10,4,2\n3,B,NH,3,20,0,0\n");
  EXPECT_THROW(load_facilities(dir / "g.csv"), ValidationError);
  write_file(dir / "h.csv",
             "facility_id,name,category,county,non_icu_beds,icu_beds,ventilator_beds\n"
             "1,A,CLINIC,3,10,4,2\n");
  EXPECT_THROW(load_facilities(dir / "h.csv"), InputError);
}

TEST(Transitions, RowsAreValidatedAndRenormalized) {
  auto dir = test::tiny_bundle("transitions");
  auto facilities = load_facilities(dir / BundleFiles::kFacilities);
  auto td = load_transition_tables(dir / BundleFiles::kCommunityTransitions,
                                   dir / BundleFiles::kLocationTransitions,
                                   dir / BundleFiles::kDischarges, facilities);
  const auto& row = td.tables.community(1, AgeGroup::Over65);
  EXPECT_DOUBLE_EQ(std::accumulate(row.facility_probs.begin(), row.facility_probs.end(), 0.0), 1.0);
  EXPECT_EQ(td.tables.location(2, AgeGroup::Under50, facilities[4]).probs[0], 0.9);
  EXPECT_THROW(td.tables.community(7, AgeGroup::Over65), ConfigError);

  // A row off by more than the tolerance names its file and row.
  auto bad = dir / "bad.csv";
  write_file(bad,
             "county,age_group,departure_probability,unc,large,small,ltach,nh\n"
             "1,<50,0.01,0.3,0.3,0.3,0.05,0\n");
  try {
    load_transition_tables(bad, dir / BundleFiles::kLocationTransitions,
                           dir / BundleFiles::kDischarges, facilities);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }

  // Within tolerance: accepted and rescaled to sum to one.
  write_file(bad,
             "county,age_group,departure_probability,unc,large,small,ltach,nh\n"
             "1,<50,0.01,0.3000001,0.3,0.35,0.05,0\n");
  auto ok = load_transition_tables(bad, dir / BundleFiles::kLocationTransitions,
                                   dir / BundleFiles::kDischarges, facilities);
  const auto& p = ok.tables.community(1, AgeGroup::Under50).facility_probs;
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-15);
}

TEST(Transitions, DischargesMustReferenceStachs) {
  auto dir = test::tiny_bundle("discharges");
  auto facilities = load_facilities(dir / BundleFiles::kFacilities);
  write_file(dir / "d.csv", "facility_id,county,discharges\n5,1,10\n");
  EXPECT_THROW(load_transition_tables(dir / BundleFiles::kCommunityTransitions,
                                      dir / BundleFiles::kLocationTransitions, dir / "d.csv",
                                      facilities),
               ValidationError);
}

TEST(Transitions, MinorCountiesAreDropped) {
  DischargeTable t;
  t.add(1, 1, 995);
  t.add(1, 2, 5);
  t.add(1, 3, 20);
  t.drop_minor_counties(0.01);
  EXPECT_TRUE(t.contains(1, 1));
  EXPECT_FALSE(t.contains(1, 2));
  EXPECT_TRUE(t.contains(1, 3));
}

TEST(Distances, SortedNearestFirstWithIdTies) {
  DistanceIndex d;
  d.set(1, {{4, 10.0}, {2, 3.0}, {3, 10.0}});
  const auto& s = d.sorted(1);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].first, 2);
  EXPECT_EQ(s[1].first, 3);
  EXPECT_EQ(s[2].first, 4);
  EXPECT_EQ(d.distance(1, 4), 10.0);
  EXPECT_FALSE(d.distance(1, 9));
  EXPECT_TRUE(d.sorted(5).empty());
  EXPECT_THROW(d.set(2, {{1, -1.0}}), ValidationError);
}

TEST(Distances, JsonRoundTrip) {
  auto dir = test::scratch_dir("dist");
  DistanceIndex d;
  d.set(1, {{1, 2.5}, {2, 7.25}});
  d.set(3, {{2, 0.1}});
  write_distances(dir / "d.json", d);
  auto e = load_distances(dir / "d.json");
  EXPECT_EQ(e.sorted(1), d.sorted(1));
  EXPECT_EQ(e.sorted(3), d.sorted(3));
  write_file(dir / "bad.json", "{\"x\": {}}");
  EXPECT_THROW(load_distances(dir / "bad.json"), ValidationError);
  write_file(dir / "broken.json", "{");
  EXPECT_THROW(load_distances(dir / "broken.json"), InputError);
}

TEST(EmpiricalPool, SamplesInProportionToCounts) {
  auto pool = EmpiricalPool::from_counts({{1, 1}, {5, 3}, {9, 0}, {20, 6}});
  EXPECT_EQ(pool.size(), 10);
  EXPECT_DOUBLE_EQ(pool.mean(), (1 + 15 + 120) / 10.0);
  EXPECT_EQ(pool.expanded().size(), 10u);
  Rng rng(8);
  std::map<int, int> seen;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++seen[pool.sample(rng)];
  EXPECT_EQ(seen.count(9), 0u);
  EXPECT_NEAR(seen[1] / double(n), 0.1, 0.01);
  EXPECT_NEAR(seen[5] / double(n), 0.3, 0.01);
  EXPECT_NEAR(seen[20] / double(n), 0.6, 0.01);
  EXPECT_THROW(EmpiricalPool::from_counts({{1, 0}}), ValidationError);
  EXPECT_THROW(EmpiricalPool::from_counts({{1, -2}}), ValidationError);
}

TEST(CaseSeries, GapsAreZeroAndAnchorIsLastDate) {
  auto dir = test::scratch_dir("cases");
  write_file(dir / "c.csv",
             "date,county,new_cases\n2020-03-01,1,2\n2020-03-04,1,5\n2020-03-02,2,1\n");
  auto s = load_case_series(dir / "c.csv");
  EXPECT_EQ(s.days, 4u);
  EXPECT_EQ(s.county(1), (std::vector<double>{2, 0, 0, 5}));
  EXPECT_EQ(s.county(2), (std::vector<double>{0, 1, 0, 0}));
  EXPECT_EQ(s.county(3), (std::vector<double>{0, 0, 0, 0}));
  EXPECT_EQ(s.statewide(), (std::vector<double>{2, 1, 0, 5}));
  EXPECT_EQ(s.cumulative(), 8.0);
  EXPECT_EQ(format_date(s.anchor()), "2020-03-04");
}

TEST(CaseSeries, RejectsOutOfOrderDatesAndBadRows) {
  auto dir = test::scratch_dir("cases-bad");
  write_file(dir / "a.csv", "date,county,new_cases\n2020-03-02,1,2\n2020-03-01,1,5\n");
  EXPECT_THROW(load_case_series(dir / "a.csv"), ValidationError);
  write_file(dir / "b.csv", "date,county,new_cases\n2020-02-30,1,2\n");
  EXPECT_THROW(load_case_series(dir / "b.csv"), ParseError);
  write_file(dir / "c.csv", "date,county,new_cases\n2020-03-01,1,-1\n");
  EXPECT_THROW(load_case_series(dir / "c.csv"), ValidationError);
  write_file(dir / "d.csv", "date,county\n2020-03-01,1\n");
  EXPECT_THROW(load_case_series(dir / "d.csv"), ParseError);
}

TEST(Bundle, TinyBundleLoads) {
  auto dir = test::tiny_bundle("load", {.cases = true});
  auto b = test::load(dir);
  EXPECT_EQ(b.facilities.size(), 7u);
  EXPECT_EQ(b.population.rows.size(), 300u);
  EXPECT_TRUE(b.cases);
  EXPECT_EQ(b.county_population.at(1), 60000);
  EXPECT_EQ(b.distances.sorted(2).front().first, 4);
}

TEST(Bundle, UnknownCountyIsRejected) {
  auto dir = test::tiny_bundle("unknown-county");
  write_file(dir / BundleFiles::kCounties, "county,population\n1,60000\n");
  EXPECT_THROW(test::load(dir), ValidationError);
  EXPECT_THROW(test::load(dir / "nope"), InputError);
}

TEST(Bundle, PopulationTargetExpands) {
  auto dir = test::tiny_bundle("expand");
  Parameters p = bundle_parameters(dir);
  p.population_target = 1000;
  Rng rng(3);
  auto b = load_bundle(dir, p, rng);
  EXPECT_EQ(b.population.rows.size(), 1000u);
  EXPECT_EQ(b.population.duplicate_indices.size(), 700u);
}

TEST(Synthetic, BundleIsConsistent) {
  auto spec = test::small_spec(3000);
  auto dir = test::synthetic_bundle("ingest", spec);
  auto b = test::load(dir);
  EXPECT_EQ(b.population.rows.size(), 3000u);
  std::map<FacilityCategory, int> counts;
  for (const auto& f : b.facilities) {
    ++counts[f.category()];
    EXPECT_LE(f.ventilator_beds(), f.icu_beds());
    if (f.category() == FacilityCategory::LargeNonUNC) EXPECT_GE(f.total_beds(), 400);
    if (f.category() == FacilityCategory::SmallNonUNC) EXPECT_LT(f.total_beds(), 400);
  }
  EXPECT_EQ(counts[FacilityCategory::UNC], spec.unc);
  EXPECT_EQ(counts[FacilityCategory::LargeNonUNC], spec.large);
  EXPECT_EQ(counts[FacilityCategory::SmallNonUNC], spec.small);
  EXPECT_EQ(counts[FacilityCategory::NH], spec.nh);
  ASSERT_TRUE(b.cases);
  EXPECT_EQ(b.cases->days, static_cast<std::size_t>(spec.case_days));
  // Every county reaches every facility.
  for (const auto& [c, pop] : b.county_population)
    EXPECT_EQ(b.distances.sorted(c).size(), b.facilities.size() - 1);
  auto params = read_bundle_parameters(dir);
  EXPECT_DOUBLE_EQ(std::stod(params.at("population_scale")), 0.1);
}

TEST(Synthetic, SameSeedSameBytes) {
  auto spec = test::small_spec(1000);
  auto a = test::scratch_dir("synth-a");
  auto b = test::scratch_dir("synth-b");
  generate_synthetic_bundle(spec, a);
  generate_synthetic_bundle(spec, b);
  for (const auto& e : fs::directory_iterator(a))
    EXPECT_EQ(test::read_file(e.path()), test::read_file(b / e.path().filename()))
        << e.path().filename();
}
