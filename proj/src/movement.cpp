#include "hospsim/movement.hpp"

#include <algorithm>
#include <cmath>

#include "hospsim/errors.hpp"

namespace hospsim {

LosTable::LosTable(std::map<FacilityId, GammaLos> gamma, GammaLos stach_default,
                   GammaLos ltach_default, NhLos nh)
    : gamma_(std::move(gamma)),
      stach_default_(stach_default),
      ltach_default_(ltach_default),
      nh_(std::move(nh)) {}

const GammaLos& LosTable::gamma_for(const Facility& f) const {
  auto it = gamma_.find(f.id());
  if (it != gamma_.end()) return it->second;
  return f.category() == FacilityCategory::LTACH ? ltach_default_ : stach_default_;
}

int sample_los(const Facility& facility, const LosTable& los, Rng& rng) {
  if (facility.category() == FacilityCategory::NH) return los.nh().admission.sample(rng);
  const auto& g = los.gamma_for(facility);
  double x = std::gamma_distribution<double>(g.shape, g.scale)(rng);
  return std::max(1, static_cast<int>(std::ceil(x)));
}

double icu_probability(const Agent& agent, int los, const IcuModel& model) {
  double z = model.intercept + model.age[index(agent.age_group)] +
             (agent.comorbidity ? model.comorbidity : 0.0) + model.los * los;
  return 1.0 / (1.0 + std::exp(-z));
}

// ---------------------------------------------------------------------------

Router::Router(const World& world, const TransitionData& transitions,
               const DistanceIndex& distances, const Parameters& params)
    : world_(world), transitions_(transitions), distances_(distances), params_(params) {
  for (const auto& f : world.facilities)
    if (f.category() != FacilityCategory::Community) by_category_[f.category()].push_back(f.id());

  std::map<CountyCode, std::vector<FacilityId>> listed;
  for (const auto& [fac, counties] : transitions.discharges.facilities()) {
    if (fac < 0 || static_cast<std::size_t>(fac) >= world.facilities.size()) continue;
    auto cat = world.facilities[static_cast<std::size_t>(fac)].category();
    for (const auto& [county, n] : counties) {
      if (n > 0) county_choices_[{county, cat}].emplace_back(fac, n);
      listed[county].push_back(fac);
    }
  }
  for (auto& [county, facs] : listed) {
    std::stable_sort(facs.begin(), facs.end(), [&](FacilityId a, FacilityId b) {
      double da = distances.distance(county, a).value_or(1e300);
      double db = distances.distance(county, b).value_or(1e300);
      return da != db ? da < db : a < b;
    });
    catchment_[county] = std::move(facs);
  }

  community_rows_.assign(static_cast<std::size_t>(kMaxCounty + 1) * kAgeGroupCount, nullptr);
  for (const auto& [key, row] : transitions.tables.community_rows())
    community_rows_[static_cast<std::size_t>(std::get<0>(key)) * kAgeGroupCount +
                    static_cast<std::size_t>(std::get<1>(key))] = &row;
}

const CommunityTransitionRow& Router::community_row(const Agent& agent) const {
  auto i = static_cast<std::size_t>(agent.county) * kAgeGroupCount + index(agent.age_group);
  if (agent.county < 0 || i >= community_rows_.size() || !community_rows_[i])
    return transitions_.tables.community(agent.county, agent.age_group);  // throws
  return *community_rows_[i];
}

double Router::departure_probability(const Agent& agent) const {
  return community_row(agent).departure_probability;
}

FacilityCategory Router::choose_community_type(const Agent& agent, Rng& rng) const {
  FacilityTypeProbs p = community_row(agent).facility_probs;
  if (agent.age_group != AgeGroup::Over65) p[4] = 0.0;
  return facility_type_at(weighted_index(p, rng));
}

FacilityCategory Router::choose_stach_type(const Agent& agent, Rng& rng) const {
  const auto& row = community_row(agent).facility_probs;
  std::array<double, 3> p = {row[0], row[1], row[2]};
  if (p[0] + p[1] + p[2] <= 0.0) {
    for (std::size_t i = 0; i < 3; ++i)
      if (auto it = county_choices_.find({agent.county, kStachCategories[i]});
          it != county_choices_.end())
        for (auto [id, n] : it->second) p[i] += n;
  }
  if (p[0] + p[1] + p[2] <= 0.0) p = {1.0, 1.0, 1.0};
  for (std::size_t i = 0; i < 3; ++i)
    if (by_category_.find(kStachCategories[i]) == by_category_.end()) p[i] = 0.0;
  return kStachCategories[weighted_index(p, rng)];
}

FacilityId Router::choose_first_stach(const Agent& agent, Rng& rng) const {
  return choose_specific_facility(agent, choose_stach_type(agent, rng), rng,
                                  RouteContext::NewAdmission);
}

FacilityCategory Router::choose_transfer_type(const Agent& agent, const Facility& current,
                                              Rng& rng) const {
  DestinationProbs p = transitions_.tables.location(agent.county, agent.age_group, current).probs;
  if (agent.age_group != AgeGroup::Over65) p[index(FacilityCategory::NH)] = 0.0;
  auto type = kCategories[weighted_index(p, rng)];
  const auto src = current.category();
  const bool non_unc_stach = type == FacilityCategory::LargeNonUNC ||
                             type == FacilityCategory::SmallNonUNC;
  if (non_unc_stach && (src == FacilityCategory::LargeNonUNC || src == FacilityCategory::SmallNonUNC)) {
    const auto& t = params_.transfers;
    double to_large = src == FacilityCategory::LargeNonUNC
                          ? t.large_to_large / (t.large_to_large + t.large_to_small)
                          : t.small_to_large / (t.small_to_large + t.small_to_small);
    type = bernoulli(rng, to_large) ? FacilityCategory::LargeNonUNC : FacilityCategory::SmallNonUNC;
  }
  return type;
}

std::vector<FacilityId> Router::others(FacilityCategory type, FacilityId exclude) const {
  std::vector<FacilityId> out;
  auto it = by_category_.find(type);
  if (it == by_category_.end()) return out;
  for (auto id : it->second)
    if (id != exclude) out.push_back(id);
  return out;
}

bool Router::can_route(const Agent& agent, FacilityCategory type) const {
  if (type == FacilityCategory::Community) return true;
  return !others(type, agent.location).empty();
}

FacilityId Router::weighted_by_distance(const Agent& agent, const std::vector<FacilityId>& pool,
                                        Rng& rng) const {
  std::vector<double> w;
  w.reserve(pool.size());
  for (auto id : pool) {
    auto d = distances_.distance(agent.county, id);
    w.push_back(d ? 1.0 / std::max(*d, 1.0) : 1.0);
  }
  return pool[weighted_index(w, rng)];
}

FacilityId Router::large_fallback(const Agent& agent, const std::vector<FacilityId>& pool,
                                  Rng& rng) const {
  double bed_sum = 0.0, inv_sum = 0.0;
  std::vector<double> beds, inv;
  for (auto id : pool) {
    beds.push_back(world_.facilities[static_cast<std::size_t>(id)].total_beds());
    auto d = distances_.distance(agent.county, id);
    inv.push_back(d ? 1.0 / std::max(*d, 1.0) : 0.0);
    bed_sum += beds.back();
    inv_sum += inv.back();
  }
  std::vector<double> w(pool.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (bed_sum > 0) w[i] += params_.large_fallback_bed_weight * beds[i] / bed_sum;
    if (inv_sum > 0) w[i] += params_.large_fallback_distance_weight * inv[i] / inv_sum;
    total += w[i];
  }
  if (total > 0.0) return pool[weighted_index(w, rng)];
  return pool[uniform_index(rng, pool.size())];
}

FacilityId Router::choose_specific_facility(const Agent& agent, FacilityCategory type, Rng& rng,
                                            RouteContext context) const {
  const FacilityId current = agent.location;
  if (type == FacilityCategory::Community) return kCommunity;

  if (context == RouteContext::NhReturn && type == FacilityCategory::NH &&
      agent.previous_location && *agent.previous_location != current &&
      world_.facility(*agent.previous_location).category() == FacilityCategory::NH) {
    if (bernoulli(rng, params_.nh_return_probability)) return *agent.previous_location;
    auto pool = others(type, current);
    std::erase(pool, *agent.previous_location);
    if (!pool.empty()) return weighted_by_distance(agent, pool, rng);
    return *agent.previous_location;
  }

  auto pool = others(type, current);
  if (pool.empty())
    throw RoutingError("no " + std::string(to_string(type)) + " facility available for agent " +
                       std::to_string(agent.id));

  if (!is_stach(type)) return weighted_by_distance(agent, pool, rng);

  if (auto it = county_choices_.find({agent.county, type}); it != county_choices_.end()) {
    std::vector<FacilityId> ids;
    std::vector<double> w;
    for (auto [id, n] : it->second) {
      if (id == current) continue;
      ids.push_back(id);
      w.push_back(n);
    }
    if (!ids.empty()) return ids[weighted_index(w, rng)];
  }

  switch (type) {
    case FacilityCategory::LargeNonUNC:
      return large_fallback(agent, pool, rng);
    case FacilityCategory::UNC: {
      std::stable_sort(pool.begin(), pool.end(), [&](FacilityId a, FacilityId b) {
        return world_.facilities[static_cast<std::size_t>(a)].total_beds() >
               world_.facilities[static_cast<std::size_t>(b)].total_beds();
      });
      return pool[uniform_index(rng, std::min<std::size_t>(2, pool.size()))];
    }
    default:
      return pool[uniform_index(rng, pool.size())];
  }
}

std::optional<FacilityId> Router::second_choice(const Agent& agent,
                                                std::span<const FacilityId> tried,
                                                Rng& rng) const {
  std::vector<FacilityId> ids;
  std::vector<double> w;
  for (auto cat : kStachCategories) {
    auto it = county_choices_.find({agent.county, cat});
    if (it == county_choices_.end()) continue;
    for (auto [id, n] : it->second) {
      if (std::find(tried.begin(), tried.end(), id) != tried.end()) continue;
      ids.push_back(id);
      w.push_back(n);
    }
  }
  if (ids.empty()) return std::nullopt;
  return ids[weighted_index(w, rng)];
}

const std::vector<FacilityId>& Router::catchment(CountyCode county) const {
  static const std::vector<FacilityId> empty;
  auto it = catchment_.find(county);
  return it == catchment_.end() ? empty : it->second;
}

std::vector<std::pair<FacilityId, double>> Router::nearby(CountyCode county, double radius_miles,
                                                          bool stach_only) const {
  std::vector<std::pair<FacilityId, double>> out;
  for (const auto& [id, miles] : distances_.sorted(county)) {
    if (miles > radius_miles) break;
    if (id <= 0 || static_cast<std::size_t>(id) >= world_.facilities.size()) continue;
    if (stach_only && !is_stach(world_.facilities[static_cast<std::size_t>(id)].category())) continue;
    out.emplace_back(id, miles);
  }
  return out;
}

std::vector<FacilityId> Router::within_radius(CountyCode county, double radius_miles) const {
  std::vector<FacilityId> out;
  for (auto [id, miles] : nearby(county, radius_miles, true)) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<AgentId, FacilityCategory>> select_community_departures(
    const World& world, const Router& router, Day day, Rng& rng) {
  std::vector<std::pair<AgentId, FacilityCategory>> out;
  for (const auto& a : world.agents) {
    if (!a.alive || a.location != kCommunity || a.created_day >= day) continue;
    if (!bernoulli(rng, router.departure_probability(a))) continue;
    out.emplace_back(a.id, router.choose_community_type(a, rng));
  }
  shuffle(std::span(out), rng);
  return out;
}

namespace {

void record(World& world, const Agent& a, FacilityId facility, BedNeed need,
            TurnAwayStage stage, bool covid) {
  world.turn_aways.push_back(
      TurnAwayRecord{world.day, a.id, a.county, facility, need, stage, covid});
}

}  // namespace

AdmissionResult attempt_admission(World& world, const Router& router, AgentId id, BedNeed need,
                                  FacilityId first_choice, bool covid, MoveReason reason,
                                  Rng& rng) {
  const Agent& a = world.agent(id);
  const bool stach = is_stach(world.facility(first_choice).category());
  if (stach) world.log(EventType::Seek, id, first_choice, reason, covid, need);

  auto try_at = [&](FacilityId f) {
    return world.admit(id, f, need, covid, reason) == AssignResult::Assigned;
  };

  if (try_at(first_choice)) return {true, first_choice};
  record(world, a, first_choice, need, TurnAwayStage::FirstChoice, covid);

  if (stach) {
    std::vector<FacilityId> tried = {first_choice};

    auto second = router.second_choice(a, tried, rng);
    if (second) {
      tried.push_back(*second);
      if (try_at(*second)) return {true, *second};
    }
    record(world, a, second.value_or(kNoFacility), need, TurnAwayStage::SecondChoice, covid);

    for (auto f : router.catchment(a.county)) {
      if (std::find(tried.begin(), tried.end(), f) != tried.end()) continue;
      tried.push_back(f);
      if (try_at(f)) return {true, f};
    }
    record(world, a, first_choice, need, TurnAwayStage::Catchment, covid);

    for (auto f : router.within_radius(a.county, router.params().transfer_radius_miles)) {
      if (std::find(tried.begin(), tried.end(), f) != tried.end()) continue;
      tried.push_back(f);
      if (try_at(f)) return {true, f};
    }
    record(world, a, first_choice, need, TurnAwayStage::Radius200, covid);
  }

  record(world, a, first_choice, need, TurnAwayStage::CompletelyTurnedAway, covid);
  world.log(EventType::TurnedAway, id, first_choice, reason, covid, need);
  return {false, kNoFacility};
}

AdmissionResult attempt_transfer(World& world, AgentId id, FacilityId destination, BedNeed need,
                                 MoveReason reason) {
  Agent& a = world.agent(id);
  const Facility& dest = world.facility(destination);
  const BedSlot* slot = world.facility(a.location).find(id);
  if (!slot) throw StateError("agent " + std::to_string(id) + " holds no bed to transfer from");
  const bool covid = slot->covid;
  if (is_stach(dest.category())) world.log(EventType::Seek, id, destination, reason, covid, need);
  if (!dest.has_free(need)) {
    world.turn_aways.push_back(
        TurnAwayRecord{world.day, id, a.county, destination, need, TurnAwayStage::FirstChoice, covid});
    world.discharge(id, MoveReason::Discharge);
    return {false, kNoFacility};
  }
  world.discharge(id, reason);
  world.admit(id, destination, need, covid, reason);
  return {true, destination};
}

std::optional<Readmission> schedule_readmission(const Agent& agent, FacilityId stach, Day today,
                                                const Parameters& params, Rng& rng) {
  (void)agent;
  if (!params.readmission_enabled) return std::nullopt;
  if (!bernoulli(rng, params.readmission_probability)) return std::nullopt;
  auto offset = 1 + static_cast<Day>(uniform_index(rng, static_cast<std::size_t>(params.readmission_window_days)));
  return Readmission{today + offset, stach};
}

}  // namespace hospsim
