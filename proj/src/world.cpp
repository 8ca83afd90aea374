#include "hospsim/world.hpp"

#include <cmath>

#include "hospsim/errors.hpp"

namespace hospsim {

AgeGroup bin_age(int age_years) {
  if (age_years < 0) throw InputError("negative age: " + std::to_string(age_years));
  if (age_years < 50) return AgeGroup::Under50;
  if (age_years < 65) return AgeGroup::From50To64;
  return AgeGroup::Over65;
}

std::string_view to_string(AgeGroup group) {
  switch (group) {
    case AgeGroup::Under50: return "<50";
    case AgeGroup::From50To64: return "50-64";
    case AgeGroup::Over65: return "65+";
  }
  return "?";
}

AgeGroup parse_age_group(std::string_view text) {
  if (text == "<50" || text == "0" || text == "Under50") return AgeGroup::Under50;
  if (text == "50-64" || text == "1" || text == "From50To64") return AgeGroup::From50To64;
  if (text == "65+" || text == "2" || text == "Over65") return AgeGroup::Over65;
  throw InputError("unknown age group '" + std::string(text) + "'");
}

std::string_view to_string(FacilityCategory category) {
  switch (category) {
    case FacilityCategory::Community: return "COMMUNITY";
    case FacilityCategory::UNC: return "UNC";
    case FacilityCategory::LargeNonUNC: return "LARGE";
    case FacilityCategory::SmallNonUNC: return "SMALL";
    case FacilityCategory::LTACH: return "LTACH";
    case FacilityCategory::NH: return "NH";
  }
  return "?";
}

FacilityCategory parse_category(std::string_view text) {
  for (auto c : kCategories)
    if (text == to_string(c)) return c;
  if (text == "LT") return FacilityCategory::LTACH;
  throw InputError("unknown facility category '" + std::string(text) + "'");
}

std::string_view to_string(CovidStatus status) {
  switch (status) {
    case CovidStatus::Susceptible: return "SUSCEPTIBLE";
    case CovidStatus::MildAsymptomatic: return "MILD_ASYMPTOMATIC";
    case CovidStatus::Severe: return "SEVERE";
    case CovidStatus::Critical: return "CRITICAL";
    case CovidStatus::Recovered: return "RECOVERED";
  }
  return "?";
}

std::string_view to_string(BedNeed need) {
  switch (need) {
    case BedNeed::NonICU: return "NON_ICU";
    case BedNeed::ICU: return "ICU";
    case BedNeed::ICUWithVentilator: return "ICU_VENT";
  }
  return "?";
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Init: return "init";
    case Stage::Life: return "life";
    case Stage::Recovery: return "recovery";
    case Stage::LosEnd: return "los_end";
    case Stage::Covid: return "covid";
    case Stage::Community: return "community";
    case Stage::Readmission: return "readmission";
    case Stage::Recreate: return "recreate";
  }
  return "?";
}

std::string_view to_string(EventType type) {
  switch (type) {
    case EventType::Admit: return "admit";
    case EventType::Release: return "release";
    case EventType::Death: return "death";
    case EventType::Recreate: return "recreate";
    case EventType::Infection: return "infection";
    case EventType::Recovery: return "recovery";
    case EventType::Seek: return "seek";
    case EventType::TurnedAway: return "turned_away";
  }
  return "?";
}

std::string_view to_string(MoveReason reason) {
  switch (reason) {
    case MoveReason::None: return "none";
    case MoveReason::Seed: return "seed";
    case MoveReason::NewAdmission: return "new_admission";
    case MoveReason::Transfer: return "transfer";
    case MoveReason::Readmission: return "readmission";
    case MoveReason::NhStepDown: return "nh_step_down";
    case MoveReason::Discharge: return "discharge";
    case MoveReason::Death: return "death";
    case MoveReason::Recovery: return "recovery";
  }
  return "?";
}

std::string_view to_string(TurnAwayStage stage) {
  switch (stage) {
    case TurnAwayStage::FirstChoice: return "FirstChoice";
    case TurnAwayStage::SecondChoice: return "SecondChoice";
    case TurnAwayStage::Catchment: return "Catchment";
    case TurnAwayStage::Radius200: return "Radius200";
    case TurnAwayStage::CompletelyTurnedAway: return "CompletelyTurnedAway";
  }
  return "?";
}

Facility::Facility(FacilityId id, std::string name, FacilityCategory category,
                   std::optional<CountyCode> county, int non_icu_beds, int icu_beds,
                   int ventilator_beds)
    : id_(id), name_(std::move(name)), category_(category), county_(county) {
  set_beds(non_icu_beds, icu_beds, ventilator_beds);
}

Facility Facility::community() {
  return Facility(kCommunity, "Community", FacilityCategory::Community, std::nullopt, 0, 0, 0);
}

void Facility::set_beds(int non_icu, int icu, int ventilator) {
  if (non_icu < 0 || icu < 0 || ventilator < 0)
    throw ValidationError("facility " + std::to_string(id_) + ": negative bed count");
  if (ventilator > icu)
    throw ValidationError("facility " + std::to_string(id_) +
                          ": ventilator beds exceed ICU beds");
  non_icu_beds_ = non_icu;
  icu_beds_ = icu;
  ventilator_beds_ = ventilator;
}

void Facility::scale_beds(double scale) {
  auto scaled = [scale](int beds) {
    if (beds == 0) return 0;
    return std::max(1, static_cast<int>(std::lround(beds * scale)));
  };
  const int icu = scaled(icu_beds_);
  set_beds(scaled(non_icu_beds_), icu, std::min(icu, scaled(ventilator_beds_)));
}

std::optional<BedKind> Facility::free_bed_for(BedNeed need) const {
  const auto used = [this](BedKind k) { return used_[static_cast<std::size_t>(k)]; };
  switch (need) {
    case BedNeed::NonICU:
      if (used(BedKind::NonICU) < non_icu_beds_) return BedKind::NonICU;
      return std::nullopt;
    case BedNeed::ICU:
      if (used(BedKind::ICU) < icu_beds_ - ventilator_beds_) return BedKind::ICU;
      if (used(BedKind::Ventilator) < ventilator_beds_) return BedKind::Ventilator;
      return std::nullopt;
    case BedNeed::ICUWithVentilator:
      if (used(BedKind::Ventilator) < ventilator_beds_) return BedKind::Ventilator;
      return std::nullopt;
  }
  return std::nullopt;
}

AssignResult Facility::assign(AgentId agent, BedNeed need, bool covid) {
  if (unbounded()) return AssignResult::Assigned;
  if (occupants_.contains(agent))
    throw StateError("agent " + std::to_string(agent) + " already occupies facility " +
                     std::to_string(id_));
  auto kind = free_bed_for(need);
  if (!kind) return AssignResult::Full;
  occupants_.emplace(agent, BedSlot{*kind, covid});
  ++used_[static_cast<std::size_t>(*kind)];
  if (covid) ++covid_used_[static_cast<std::size_t>(*kind)];
  return AssignResult::Assigned;
}

BedSlot Facility::release(AgentId agent) {
  if (unbounded()) return {};
  auto it = occupants_.find(agent);
  if (it == occupants_.end())
    throw StateError("agent " + std::to_string(agent) + " is not an occupant of facility " +
                     std::to_string(id_));
  BedSlot slot = it->second;
  occupants_.erase(it);
  --used_[static_cast<std::size_t>(slot.kind)];
  if (slot.covid) --covid_used_[static_cast<std::size_t>(slot.kind)];
  return slot;
}

const BedSlot* Facility::find(AgentId agent) const {
  auto it = occupants_.find(agent);
  return it == occupants_.end() ? nullptr : &it->second;
}

bool within_capacity(const Facility& f) {
  if (f.unbounded()) return true;
  return f.occupied(BedKind::NonICU) <= f.non_icu_beds() &&
         f.occupied(BedKind::Ventilator) <= f.ventilator_beds() &&
         f.occupied(BedKind::ICU) <= f.icu_beds() - f.ventilator_beds();
}

Facility& World::facility(FacilityId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= facilities.size())
    throw LookupError("unknown facility id " + std::to_string(id));
  return facilities[static_cast<std::size_t>(id)];
}

const Facility& World::facility(FacilityId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= facilities.size())
    throw LookupError("unknown facility id " + std::to_string(id));
  return facilities[static_cast<std::size_t>(id)];
}

Agent& World::agent(AgentId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= agents.size())
    throw LookupError("unknown agent id " + std::to_string(id));
  return agents[static_cast<std::size_t>(id)];
}

const Agent& World::agent(AgentId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= agents.size())
    throw LookupError("unknown agent id " + std::to_string(id));
  return agents[static_cast<std::size_t>(id)];
}

AssignResult World::admit(AgentId id, FacilityId facility_id, BedNeed need, bool covid,
                          MoveReason reason) {
  Agent& a = agent(id);
  Facility& f = facility(facility_id);
  if (f.unbounded()) return AssignResult::Assigned;
  if (!a.alive) throw StateError("cannot admit dead agent " + std::to_string(id));
  if (a.location != kCommunity)
    throw StateError("agent " + std::to_string(id) + " already holds a bed at facility " +
                     std::to_string(a.location));
  if (f.assign(id, need, covid) == AssignResult::Full) return AssignResult::Full;
  const BedSlot* slot = f.find(id);
  a.location = facility_id;
  a.icu_flag = is_icu(need);
  a.ventilator_flag = need == BedNeed::ICUWithVentilator;
  // any new admission cancels a pending readmission
  a.readmission.reset();
  log(EventType::Admit, id, facility_id, reason, covid, need, slot->kind);
  return AssignResult::Assigned;
}

BedSlot World::discharge(AgentId id, MoveReason reason) {
  Agent& a = agent(id);
  if (a.location == kCommunity)
    throw StateError("agent " + std::to_string(id) + " is not in a facility");
  Facility& f = facility(a.location);
  BedSlot slot = f.release(id);
  log(EventType::Release, id, a.location, reason, slot.covid,
      slot.kind == BedKind::NonICU   ? BedNeed::NonICU
      : slot.kind == BedKind::ICU    ? BedNeed::ICU
                                     : BedNeed::ICUWithVentilator,
      slot.kind);
  a.previous_location = a.location;
  a.location = kCommunity;
  a.leave_day.reset();
  a.icu_flag = false;
  a.ventilator_flag = false;
  return slot;
}

void World::log(Event e) { events.push_back(e); }

void World::log(EventType type, AgentId agent_id, FacilityId facility_id, MoveReason reason,
                bool covid, BedNeed need, BedKind bed) {
  events.push_back(Event{day, stage, type, reason, bed, need, covid, agent_id, facility_id});
}

std::size_t World::living_count() const {
  std::size_t n = 0;
  for (const auto& a : agents) n += a.alive ? 1 : 0;
  return n;
}

std::vector<FacilityId> World::facilities_of(FacilityCategory category) const {
  std::vector<FacilityId> out;
  for (const auto& f : facilities)
    if (f.category() == category) out.push_back(f.id());
  return out;
}

}  // namespace hospsim
