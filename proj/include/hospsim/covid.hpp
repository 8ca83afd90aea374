#pragma once

#include <array>
#include <map>
#include <vector>

#include "hospsim/ingest.hpp"
#include "hospsim/movement.hpp"
#include "hospsim/parameters.hpp"
#include "hospsim/rng.hpp"
#include "hospsim/seir.hpp"
#include "hospsim/world.hpp"

namespace hospsim {

// Weight_g proportional to P(age | infection) / P(age), normalized to sum to 1.
AgeArray infection_age_weights(const AgeArray& case_age_dist, const AgeArray& pop_age_dist);

using AgePools = std::array<std::vector<AgentId>, kAgeGroupCount>;

// Draws target agents without replacement: an age group with probability n_g w_g / sum,
// then a uniform member of it. Selected agents are removed from pools. Takes everyone
// when the pools hold fewer than target.
std::vector<AgentId> select_from_pools(AgePools& pools, long long target, const AgeArray& weights,
                                       Rng& rng);

// Susceptible, living community agents of the county that are active on this day.
AgePools eligible_pools(const World& world, CountyCode county, Day day);

std::vector<AgentId> select_new_infections(const World& world, CountyCode county, Day day,
                                           long long target, const AgeArray& weights, Rng& rng);

TestStatus assign_test_status(double p_tested, Rng& rng);

struct Severity {
  CovidStatus status = CovidStatus::MildAsymptomatic;
  bool ventilator = false;
};

Severity assign_severity(const Agent& agent, const CovidParameters& params, Rng& rng);

// P(hosp | age, cc) = P(age | hosp) P(cc | hosp) P(hosp) / P(age, cc) per test status.
// p_cc_given_hosp and joint_age_cc_pop are indexed [comorbid] and [age][comorbid].
HospProbTable compute_hosp_prob_table(const AgeArray& p_age_given_hosp,
                                      const std::array<double, 2>& p_cc_given_hosp,
                                      double p_hosp_tested, double p_hosp_untested,
                                      const std::array<std::array<double, 2>, kAgeGroupCount>&
                                          joint_age_cc_pop);

// Truncated-normal COVID LOS rounded to whole days.
int sample_covid_los(const CovidParameters& params, Rng& rng);

struct RecoveryResult {
  std::vector<AgentId> recovered;
  std::vector<AgentId> stepped_down;
};

// Recovers every infected agent whose recovery day is today. COVID inpatients free
// their bed and, if 65 or over, move to the nearest NH with a free bed with the
// step-down probability for their bed type.
RecoveryResult process_recoveries(World& world, const Router& router, const CovidParameters& params,
                                  Rng& rng);

struct CovidDayReport {
  std::map<CountyCode, long long> target;
  std::map<CountyCode, long long> eligible;
  std::map<CountyCode, long long> infected;
  long long hospital_bound = 0;
  long long admitted = 0;
  long long turned_away = 0;
  // Index 0 untested, 1 tested.
  std::array<long long, 2> infections_by_test{};
  std::array<long long, 2> hospital_bound_by_test{};
};

// One day of new infections: selection, testing, severity and hospital seeking.
CovidDayReport covid_update(World& world, const Router& router,
                            const std::map<CountyCode, long long>& targets,
                            const AgeArray& weights, const CovidParameters& params, Rng& rng);

struct Day0Report {
  long long infected = 0;
  long long active = 0;
  long long recovered = 0;
  long long census_target = 0;
  long long hospitalized = 0;
  long long shortfall = 0;
  // Planned COVID beds per hospital: non-ICU, ICU.
  std::map<FacilityId, std::array<int, 2>> planned;
};

// Seeds Day-0 infections from cumulative reported cases and fills the COVID census.
Day0Report day0_covid_init(World& world, const Router& router, const CaseSeries& cases,
                           const std::map<CountyCode, double>& active_share,
                           const std::map<FacilityId, CensusRow>& census, double scale,
                           const AgeArray& weights, const CovidParameters& params, Rng& rng);

}  // namespace hospsim
