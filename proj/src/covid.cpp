#include "hospsim/covid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hospsim/errors.hpp"

namespace hospsim {

AgeArray infection_age_weights(const AgeArray& case_age_dist, const AgeArray& pop_age_dist) {
  AgeArray w{};
  double sum = 0.0;
  for (std::size_t g = 0; g < kAgeGroupCount; ++g) {
    if (case_age_dist[g] < 0.0 || pop_age_dist[g] < 0.0)
      throw DomainError("age distributions must be non-negative");
    if (pop_age_dist[g] == 0.0) {
      if (case_age_dist[g] > 0.0)
        throw DomainError("age group " + std::string(to_string(kAgeGroups[g])) +
                          " has cases but no population");
      continue;
    }
    w[g] = case_age_dist[g] / pop_age_dist[g];
    sum += w[g];
  }
  if (!(sum > 0.0)) throw DomainError("infection age weights are all zero");
  for (double& x : w) x /= sum;
  return w;
}

std::vector<AgentId> select_from_pools(AgePools& pools, long long target, const AgeArray& weights,
                                       Rng& rng) {
  std::vector<AgentId> out;
  if (target <= 0) return out;
  std::size_t total = 0;
  for (const auto& p : pools) total += p.size();
  if (static_cast<std::size_t>(target) >= total) {
    for (auto& p : pools) {
      out.insert(out.end(), p.begin(), p.end());
      p.clear();
    }
    shuffle(std::span(out), rng);
    return out;
  }
  out.reserve(static_cast<std::size_t>(target));
  for (long long k = 0; k < target; ++k) {
    std::array<double, kAgeGroupCount> w{};
    double sum = 0.0;
    for (std::size_t g = 0; g < kAgeGroupCount; ++g) {
      w[g] = static_cast<double>(pools[g].size()) * weights[g];
      sum += w[g];
    }
    std::size_t g;
    if (sum > 0.0) {
      g = weighted_index(w, rng);
    } else {
      // Only groups with zero weight remain; fall back to their sizes.
      for (std::size_t i = 0; i < kAgeGroupCount; ++i) w[i] = static_cast<double>(pools[i].size());
      g = weighted_index(w, rng);
    }
    auto& pool = pools[g];
    std::size_t j = uniform_index(rng, pool.size());
    out.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
  return out;
}

namespace {

bool eligible(const Agent& a, Day day) {
  return a.alive && a.location == kCommunity && a.covid_status == CovidStatus::Susceptible &&
         (a.created_day < day || day == 0);
}

std::map<CountyCode, AgePools> all_pools(const World& world, Day day) {
  std::map<CountyCode, AgePools> out;
  for (const auto& a : world.agents)
    if (eligible(a, day)) out[a.county][index(a.age_group)].push_back(a.id);
  return out;
}

}  // namespace

AgePools eligible_pools(const World& world, CountyCode county, Day day) {
  AgePools pools;
  for (const auto& a : world.agents)
    if (a.county == county && eligible(a, day)) pools[index(a.age_group)].push_back(a.id);
  return pools;
}

std::vector<AgentId> select_new_infections(const World& world, CountyCode county, Day day,
                                           long long target, const AgeArray& weights, Rng& rng) {
  auto pools = eligible_pools(world, county, day);
  return select_from_pools(pools, target, weights, rng);
}

TestStatus assign_test_status(double p_tested, Rng& rng) {
  return bernoulli(rng, p_tested) ? TestStatus::Tested : TestStatus::Untested;
}

Severity assign_severity(const Agent& agent, const CovidParameters& params, Rng& rng) {
  const bool tested = agent.test_status == TestStatus::Tested;
  double p = params.hospitalization.at(tested, agent.comorbidity, agent.age_group);
  Severity s;
  bool hospital_bound = bernoulli(rng, p);
  if (!hospital_bound && params.ratio_to_hospital > 0.0)
    hospital_bound = bernoulli(rng, params.ratio_to_hospital);
  if (!hospital_bound) return s;
  if (bernoulli(rng, params.prop_hospitalized_to_icu)) {
    s.status = CovidStatus::Critical;
    s.ventilator = bernoulli(rng, params.icu_with_ventilator_p);
  } else {
    s.status = CovidStatus::Severe;
  }
  return s;
}

HospProbTable compute_hosp_prob_table(
    const AgeArray& p_age_given_hosp, const std::array<double, 2>& p_cc_given_hosp,
    double p_hosp_tested, double p_hosp_untested,
    const std::array<std::array<double, 2>, kAgeGroupCount>& joint_age_cc_pop) {
  HospProbTable t;
  for (int tested = 0; tested < 2; ++tested) {
    double p_hosp = tested ? p_hosp_tested : p_hosp_untested;
    for (int cc = 0; cc < 2; ++cc)
      for (std::size_t g = 0; g < kAgeGroupCount; ++g) {
        if (cc == 1 && kAgeGroups[g] == AgeGroup::Under50) {
          t.cells[tested][cc][g] = 0.0;
          continue;
        }
        double num = p_age_given_hosp[g] * p_cc_given_hosp[cc] * p_hosp;
        double den = joint_age_cc_pop[g][cc];
        if (den <= 0.0) {
          if (num > 0.0)
            throw DomainError("population cell for age group " +
                              std::string(to_string(kAgeGroups[g])) + " is empty");
          t.cells[tested][cc][g] = 0.0;
          continue;
        }
        t.cells[tested][cc][g] = num / den;
      }
  }
  return t;
}

int sample_covid_los(const CovidParameters& params, Rng& rng) {
  if (params.los_std <= 1e-6)
    return static_cast<int>(std::lround(std::clamp(params.los_mean, params.los_min, params.los_max)));
  std::normal_distribution<double> normal(params.los_mean, params.los_std);
  for (;;) {
    double x = normal(rng);
    if (x >= params.los_min && x <= params.los_max) return static_cast<int>(std::lround(x));
  }
}

namespace {

std::optional<FacilityId> nearest_free_nh(const World& world, const Router& router,
                                          CountyCode county) {
  for (const auto& [id, miles] : router.distances().sorted(county)) {
    if (id <= 0 || static_cast<std::size_t>(id) >= world.facilities.size()) continue;
    const auto& f = world.facilities[static_cast<std::size_t>(id)];
    if (f.category() == FacilityCategory::NH && f.has_free(BedNeed::NonICU)) return id;
  }
  return std::nullopt;
}

}  // namespace

RecoveryResult process_recoveries(World& world, const Router& router,
                                  const CovidParameters& params, Rng& rng) {
  RecoveryResult out;
  std::vector<AgentId> due;
  for (const auto& a : world.agents)
    if (a.alive && is_infected(a.covid_status) && a.covid_recovery_day &&
        *a.covid_recovery_day <= world.day)
      due.push_back(a.id);
  shuffle(std::span(due), rng);

  for (auto id : due) {
    Agent& a = world.agent(id);
    a.covid_status = CovidStatus::Recovered;
    a.covid_recovery_day.reset();
    world.log(EventType::Recovery, id, a.location, MoveReason::Recovery, true);
    out.recovered.push_back(id);
    if (a.location == kCommunity) continue;
    const BedSlot* slot = world.facility(a.location).find(id);
    if (!slot || !slot->covid) continue;
    const bool icu = is_icu(slot->kind);
    world.discharge(id, MoveReason::Recovery);
    double p = icu ? params.hospital_to_nh_icu : params.hospital_to_nh_non_icu;
    if (a.age_group != AgeGroup::Over65 || !bernoulli(rng, p)) continue;
    if (auto nh = nearest_free_nh(world, router, a.county)) {
      world.admit(id, *nh, BedNeed::NonICU, false, MoveReason::NhStepDown);
      a.leave_day.reset();
      out.stepped_down.push_back(id);
    }
  }
  return out;
}

CovidDayReport covid_update(World& world, const Router& router,
                            const std::map<CountyCode, long long>& targets,
                            const AgeArray& weights, const CovidParameters& params, Rng& rng) {
  CovidDayReport report;
  auto pools = all_pools(world, world.day);
  std::vector<AgentId> infected;
  for (const auto& [county, target] : targets) {
    auto& p = pools[county];
    long long n = 0;
    for (const auto& g : p) n += static_cast<long long>(g.size());
    report.target[county] = target;
    report.eligible[county] = n;
    auto chosen = select_from_pools(p, target, weights, rng);
    report.infected[county] = static_cast<long long>(chosen.size());
    infected.insert(infected.end(), chosen.begin(), chosen.end());
  }
  shuffle(std::span(infected), rng);

  for (auto id : infected) {
    Agent& a = world.agent(id);
    a.covid_status = CovidStatus::MildAsymptomatic;
    a.infection_day = world.day;
    a.test_status = assign_test_status(params.p_tested, rng);
    world.log(EventType::Infection, id, kCommunity, MoveReason::None, true);
    auto sev = assign_severity(a, params, rng);
    a.covid_recovery_day = world.day + params.infection_duration;
    const int t = a.test_status == TestStatus::Tested ? 1 : 0;
    ++report.infections_by_test[t];
    if (sev.status == CovidStatus::MildAsymptomatic) continue;

    ++report.hospital_bound;
    ++report.hospital_bound_by_test[t];
    a.covid_status = sev.status;
    BedNeed need = sev.status == CovidStatus::Severe ? BedNeed::NonICU
                   : sev.ventilator                  ? BedNeed::ICUWithVentilator
                                                     : BedNeed::ICU;
    FacilityId first = router.choose_first_stach(a, rng);
    auto res = attempt_admission(world, router, id, need, first, true, MoveReason::NewAdmission, rng);
    if (res.admitted) {
      ++report.admitted;
      a.covid_recovery_day = world.day + std::max(1, sample_covid_los(params, rng));
    } else {
      ++report.turned_away;
      a.ventilator_flag = sev.ventilator;
      a.icu_flag = sev.status == CovidStatus::Critical;
    }
  }
  return report;
}

Day0Report day0_covid_init(World& world, const Router& router, const CaseSeries& cases,
                           const std::map<CountyCode, double>& active_share,
                           const std::map<FacilityId, CensusRow>& census, double scale,
                           const AgeArray& weights, const CovidParameters& params, Rng& rng) {
  Day0Report report;
  auto pools = all_pools(world, 0);
  std::vector<AgentId> active;
  for (const auto& [county, series] : cases.daily) {
    double reported = std::accumulate(series.begin(), series.end(), 0.0);
    auto cumulative = std::llround(reported * params.initial_case_multiplier * scale);
    if (cumulative <= 0) continue;
    auto it = active_share.find(county);
    double share = it == active_share.end() ? 0.0 : std::clamp(it->second, 0.0, 1.0);
    auto chosen = select_from_pools(pools[county], cumulative, weights, rng);
    auto n_active = std::llround(static_cast<double>(chosen.size()) * share);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      Agent& a = world.agent(chosen[i]);
      a.infection_day = 0;
      a.test_status = assign_test_status(params.p_tested, rng);
      world.log(EventType::Infection, a.id, kCommunity, MoveReason::Seed, true);
      if (static_cast<long long>(i) < n_active) {
        a.covid_status = CovidStatus::MildAsymptomatic;
        a.covid_recovery_day =
            1 + static_cast<Day>(uniform_index(rng, static_cast<std::size_t>(params.infection_duration)));
        active.push_back(a.id);
      } else {
        a.covid_status = CovidStatus::Recovered;
      }
    }
    report.infected += static_cast<long long>(chosen.size());
  }
  report.active = static_cast<long long>(active.size());
  report.recovered = report.infected - report.active;

  // Planned COVID beds per hospital, capped by free beds of each kind.
  std::vector<FacilityId> hospitals;
  for (const auto& f : world.facilities)
    if (is_stach(f.category())) hospitals.push_back(f.id());
  auto free_non_icu = [&](FacilityId id) {
    const auto& f = world.facility(id);
    return f.non_icu_beds() - f.occupied(BedKind::NonICU);
  };
  auto free_icu = [&](FacilityId id) {
    const auto& f = world.facility(id);
    return f.icu_beds() - f.occupied_icu();
  };
  if (!census.empty()) {
    for (auto id : hospitals) {
      auto it = census.find(id);
      if (it == census.end()) continue;
      auto scaled = [scale](int x) { return static_cast<int>(std::lround(x * scale)); };
      report.planned[id] = {scaled(it->second.covid_non_icu), scaled(it->second.covid_icu)};
    }
  } else if (!hospitals.empty()) {
    const auto target = std::llround(params.day0_census_target * scale);
    std::vector<double> beds;
    for (auto id : hospitals) beds.push_back(world.facility(id).total_beds());
    auto shares = apportion(target, beds);
    // Odd shares alternate their extra patient between non-ICU and ICU.
    bool extra_non_icu = true;
    for (std::size_t i = 0; i < hospitals.size(); ++i) {
      const auto n = static_cast<int>(shares[i]);
      int non_icu = n / 2;
      if (n % 2) {
        non_icu += extra_non_icu ? 1 : 0;
        extra_non_icu = !extra_non_icu;
      }
      report.planned[hospitals[i]] = {non_icu, n - non_icu};
    }
  }
  long long left = 0;
  for (auto& [id, plan] : report.planned) {
    report.census_target += plan[0] + plan[1];
    plan[0] = std::min(plan[0], std::max(0, free_non_icu(id)));
    plan[1] = std::min(plan[1], std::max(0, free_icu(id)));
    left += plan[0] + plan[1];
  }

  std::map<FacilityId, std::array<int, 2>> remaining = report.planned;
  shuffle(std::span(active), rng);
  for (auto id : active) {
    if (left == 0) break;
    Agent& a = world.agent(id);
    for (auto [fid, miles] : router.nearby(a.county, params.day0_radius_miles, true)) {
      auto it = remaining.find(fid);
      if (it == remaining.end()) continue;
      auto& slots = it->second;
      const Facility& f = world.facility(fid);
      BedNeed need;
      CovidStatus status;
      if (slots[1] > 0) {
        status = CovidStatus::Critical;
        need = BedNeed::ICU;
        if (f.has_free(BedNeed::ICUWithVentilator) && bernoulli(rng, params.icu_with_ventilator_p))
          need = BedNeed::ICUWithVentilator;
      } else if (slots[0] > 0) {
        status = CovidStatus::Severe;
        need = BedNeed::NonICU;
      } else {
        continue;
      }
      if (world.admit(id, fid, need, true, MoveReason::Seed) != AssignResult::Assigned) continue;
      --slots[is_icu(need) ? 1 : 0];
      --left;
      a.covid_status = status;
      a.covid_recovery_day = std::max(1, sample_covid_los(params, rng));
      ++report.hospitalized;
      break;
    }
  }
  report.shortfall = report.census_target - report.hospitalized;
  return report;
}

}  // namespace hospsim
