#include <gtest/gtest.h>

#include "hospsim/errors.hpp"
#include "hospsim/parameters.hpp"
#include "support.hpp"

using namespace hospsim;

TEST(Parameters, CovidDefaults) {
  CovidParameters c;
  EXPECT_EQ(c.los_mean, 3.0);
  EXPECT_EQ(c.los_std, 5.0);
  EXPECT_EQ(c.los_min, 0.0);
  EXPECT_EQ(c.los_max, 50.0);
  EXPECT_EQ(c.infection_duration, 14);
  EXPECT_EQ(c.ratio_to_hospital, 0.0);
  EXPECT_EQ(c.p_tested, 0.1);
  EXPECT_EQ(c.icu_with_ventilator_p, 0.75);
  EXPECT_EQ(c.initial_case_multiplier, 10.0);
  EXPECT_EQ(c.hospital_to_nh_non_icu, 0.1);
  EXPECT_EQ(c.hospital_to_nh_icu, 0.2);
  EXPECT_EQ(c.prop_hospitalized_to_icu, 0.25);
  EXPECT_EQ(c.ages_get_covid, (AgeArray{0.396, 0.328, 0.276}));
  EXPECT_EQ(c.day0_census_target, 1000.0);
  EXPECT_EQ(c.day0_radius_miles, 60.0);
}

TEST(Parameters, HospitalizationDefaults) {
  auto t = HospProbTable::defaults();
  using A = AgeGroup;
  const double tested_cc[3] = {0.0, 0.4609, 0.411};
  const double tested_no[3] = {0.0367, 0.035, 0.1213};
  const double untested_cc[3] = {0.0, 0.0651, 0.058};
  const double untested_no[3] = {0.0052, 0.0049, 0.0171};
  for (auto g : {A::Under50, A::From50To64, A::Over65}) {
    auto i = index(g);
    EXPECT_EQ(t.at(true, true, g), tested_cc[i]);
    EXPECT_EQ(t.at(true, false, g), tested_no[i]);
    EXPECT_EQ(t.at(false, true, g), untested_cc[i]);
    EXPECT_EQ(t.at(false, false, g), untested_no[i]);
  }
}

TEST(Parameters, TransferAndInitDefaults) {
  Parameters p;
  EXPECT_EQ(p.transfers.large_to_large, 0.8);
  EXPECT_EQ(p.transfers.large_to_small, 0.2);
  EXPECT_EQ(p.transfers.small_to_large, 0.9);
  EXPECT_EQ(p.transfers.small_to_small, 0.1);
  EXPECT_EQ(p.transfers.unc_to_unc, 0.90);
  EXPECT_EQ(p.transfers.non_unc_to_unc, 0.0322);
  EXPECT_EQ(p.nh_ltach_initial_fill, 0.70);
  EXPECT_EQ(p.stach_non_icu_initial_fill, 0.65);
  EXPECT_EQ(p.stach_icu_initial_fill, 0.54);
  EXPECT_EQ(p.stach_seed_age_weights, (AgeArray{0.40, 0.20, 0.40}));
  EXPECT_EQ(p.seir.case_multiplier, 10.0);
  EXPECT_FALSE(p.readmission_enabled);
  EXPECT_NO_THROW(p.validate());
}

TEST(Parameters, SetAndRenderRoundTrip) {
  Parameters p;
  p.set("p_tested", "0.2");
  p.set("death_probability", "0.001,0.002,0.003");
  p.set("readmission_enabled", "true");
  p.set("population_target", "5000");
  auto m = p.to_map();
  Parameters q;
  auto rest = apply_parameters(q, m);
  EXPECT_TRUE(rest.empty());
  EXPECT_EQ(q.to_map(), m);
  EXPECT_EQ(q.covid.p_tested, 0.2);
  EXPECT_EQ(q.death_probability[2], 0.003);
  EXPECT_TRUE(q.readmission_enabled);
  EXPECT_EQ(q.population_target, 5000u);
}

TEST(Parameters, RejectsUnknownKeysAndBadValues) {
  Parameters p;
  EXPECT_THROW(p.set("no_such_key", "1"), ConfigError);
  EXPECT_THROW(p.set("p_tested", "abc"), ConfigError);
  EXPECT_THROW(p.set("population_target", "-4"), ConfigError);
  EXPECT_THROW(p.set("death_probability", "0.1,0.2"), ConfigError);
  p.covid.p_tested = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  Parameters q;
  q.population_scale = 0.0;
  EXPECT_THROW(q.validate(), ConfigError);
  Parameters r;
  r.covid.los_mean = 60;
  EXPECT_THROW(r.validate(), ConfigError);
}

TEST(Parameters, KeyValueFile) {
  auto dir = test::scratch_dir("kv");
  test::write_file(dir / "a.cfg", "# comment\np_tested = 0.3  # trailing\n\nmode=pattern\n");
  auto m = read_key_value_file(dir / "a.cfg");
  EXPECT_EQ(m.at("p_tested"), "0.3");
  EXPECT_EQ(m.at("mode"), "pattern");
  Parameters p;
  auto rest = apply_parameters(p, m);
  EXPECT_EQ(p.covid.p_tested, 0.3);
  ASSERT_EQ(rest.size(), 1u);
  EXPECT_EQ(rest.begin()->first, "mode");

  test::write_file(dir / "bad.cfg", "p_tested 0.3\n");
  EXPECT_THROW(read_key_value_file(dir / "bad.cfg"), ParseError);
  EXPECT_THROW(read_key_value_file(dir / "missing.cfg"), InputError);
}
