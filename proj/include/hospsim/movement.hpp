#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hospsim/ingest.hpp"
#include "hospsim/parameters.hpp"
#include "hospsim/rng.hpp"
#include "hospsim/world.hpp"

namespace hospsim {

enum class RouteContext : std::uint8_t { NewAdmission, Transfer, NhReturn };

// Per-facility LOS distributions: gamma for STACH and LTACH, the empirical pool for NH.
class LosTable {
 public:
  LosTable() = default;
  LosTable(std::map<FacilityId, GammaLos> gamma, GammaLos stach_default, GammaLos ltach_default,
           NhLos nh);

  const GammaLos& gamma_for(const Facility& f) const;
  const NhLos& nh() const { return nh_; }

 private:
  std::map<FacilityId, GammaLos> gamma_;
  GammaLos stach_default_;
  GammaLos ltach_default_;
  NhLos nh_;
};

// Ceiling of a gamma draw (minimum 1) for STACH/LTACH; a pool draw for NH.
int sample_los(const Facility& facility, const LosTable& los, Rng& rng);

// Chance that a non-COVID STACH admission needs an ICU bed.
double icu_probability(const Agent& agent, int los, const IcuModel& model);

// Facility choice for one agent, backed by the county discharge tables and distances.
class Router {
 public:
  Router(const World& world, const TransitionData& transitions, const DistanceIndex& distances,
         const Parameters& params);

  // Destination type for an agent leaving the community; agents under 65 never get NH.
  FacilityCategory choose_community_type(const Agent& agent, Rng& rng) const;
  double departure_probability(const Agent& agent) const;
  // An STACH type for an agent seeking a hospital bed from the community: the
  // community row restricted to STACH types.
  FacilityCategory choose_stach_type(const Agent& agent, Rng& rng) const;
  // First-choice STACH for a community agent.
  FacilityId choose_first_stach(const Agent& agent, Rng& rng) const;

  // Destination type for an agent whose stay at current ends. Non-UNC STACH to non-UNC
  // STACH moves are re-split large/small by the transfer splits.
  FacilityCategory choose_transfer_type(const Agent& agent, const Facility& current,
                                        Rng& rng) const;

  // A facility of the given type, never the agent's current location. Throws RoutingError
  // when no candidate exists.
  FacilityId choose_specific_facility(const Agent& agent, FacilityCategory type, Rng& rng,
                                      RouteContext context) const;
  // Whether choose_specific_facility can succeed for this type.
  bool can_route(const Agent& agent, FacilityCategory type) const;

  // A further draw from the agent's county discharge distribution over every STACH,
  // skipping the facilities already tried.
  std::optional<FacilityId> second_choice(const Agent& agent, std::span<const FacilityId> tried,
                                          Rng& rng) const;
  // STACHs whose discharge table lists the county, nearest first.
  const std::vector<FacilityId>& catchment(CountyCode county) const;
  // STACHs within radius_miles of the county, nearest first.
  std::vector<FacilityId> within_radius(CountyCode county, double radius_miles) const;

  // STACHs, LTACHs or NHs of the county's nearest-first list within radius_miles.
  std::vector<std::pair<FacilityId, double>> nearby(CountyCode county, double radius_miles,
                                                    bool stach_only) const;

  const World& world() const { return world_; }
  const TransitionData& transitions() const { return transitions_; }
  const DistanceIndex& distances() const { return distances_; }
  const Parameters& params() const { return params_; }

 private:
  FacilityId weighted_by_distance(const Agent& agent, const std::vector<FacilityId>& pool,
                                  Rng& rng) const;
  FacilityId large_fallback(const Agent& agent, const std::vector<FacilityId>& pool,
                            Rng& rng) const;
  std::vector<FacilityId> others(FacilityCategory type, FacilityId exclude) const;
  const CommunityTransitionRow& community_row(const Agent& agent) const;

  const World& world_;
  const TransitionData& transitions_;
  const DistanceIndex& distances_;
  const Parameters& params_;
  std::map<FacilityCategory, std::vector<FacilityId>> by_category_;
  // Discharge-weighted STACH candidates per county and category.
  std::map<std::pair<CountyCode, FacilityCategory>, std::vector<std::pair<FacilityId, double>>>
      county_choices_;
  std::map<CountyCode, std::vector<FacilityId>> catchment_;
  std::vector<const CommunityTransitionRow*> community_rows_;
};

// Daily community departures: one Bernoulli draw per eligible community agent in id
// order, then the departing list is shuffled.
std::vector<std::pair<AgentId, FacilityCategory>> select_community_departures(
    const World& world, const Router& router, Day day, Rng& rng);

struct AdmissionResult {
  bool admitted = false;
  FacilityId facility = kNoFacility;
};

// Tries the first choice, then the second choice, the catchment STACHs and the STACHs
// within the transfer radius, recording a TurnAwayRecord for each stage that fails.
// Facilities other than STACHs get a single attempt.
AdmissionResult attempt_admission(World& world, const Router& router, AgentId agent,
                                  BedNeed need, FacilityId first_choice, bool covid,
                                  MoveReason reason, Rng& rng);

// Moves a facility occupant to destination, or to the community when it is full.
AdmissionResult attempt_transfer(World& world, AgentId agent, FacilityId destination,
                                 BedNeed need, MoveReason reason = MoveReason::Transfer);

// Readmission date and facility for an agent leaving an STACH for the community.
std::optional<Readmission> schedule_readmission(const Agent& agent, FacilityId stach, Day today,
                                                const Parameters& params, Rng& rng);

}  // namespace hospsim
