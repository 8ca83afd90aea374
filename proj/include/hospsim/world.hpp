#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hospsim {

using AgentId = std::int64_t;
using FacilityId = std::int32_t;
using CountyCode = std::int32_t;
using Day = std::int32_t;

inline constexpr FacilityId kCommunity = 0;
inline constexpr FacilityId kNoFacility = -1;

enum class AgeGroup : std::uint8_t { Under50 = 0, From50To64 = 1, Over65 = 2 };
inline constexpr std::size_t kAgeGroupCount = 3;
inline constexpr std::array<AgeGroup, kAgeGroupCount> kAgeGroups = {
    AgeGroup::Under50, AgeGroup::From50To64, AgeGroup::Over65};

/// Bins an age in years into <50, 50-64, >=65. Throws InputError on negative ages.
AgeGroup bin_age(int age_years);
std::string_view to_string(AgeGroup group);
AgeGroup parse_age_group(std::string_view text);
inline std::size_t index(AgeGroup g) { return static_cast<std::size_t>(g); }

enum class FacilityCategory : std::uint8_t {
  Community = 0,
  UNC = 1,
  LargeNonUNC = 2,
  SmallNonUNC = 3,
  LTACH = 4,
  NH = 5,
};
inline constexpr std::size_t kCategoryCount = 6;
inline constexpr std::array<FacilityCategory, kCategoryCount> kCategories = {
    FacilityCategory::Community, FacilityCategory::UNC,   FacilityCategory::LargeNonUNC,
    FacilityCategory::SmallNonUNC, FacilityCategory::LTACH, FacilityCategory::NH};
inline constexpr std::array<FacilityCategory, 3> kStachCategories = {
    FacilityCategory::UNC, FacilityCategory::LargeNonUNC, FacilityCategory::SmallNonUNC};

std::string_view to_string(FacilityCategory category);
FacilityCategory parse_category(std::string_view text);
inline std::size_t index(FacilityCategory c) { return static_cast<std::size_t>(c); }
inline bool is_stach(FacilityCategory c) {
  return c == FacilityCategory::UNC || c == FacilityCategory::LargeNonUNC ||
         c == FacilityCategory::SmallNonUNC;
}

// Codes 0-4 are used; code 5 is reserved and never assigned.
enum class CovidStatus : std::uint8_t {
  Susceptible = 0,
  MildAsymptomatic = 1,
  Severe = 2,
  Critical = 3,
  Recovered = 4,
};
std::string_view to_string(CovidStatus status);
inline bool is_infected(CovidStatus s) {
  return s == CovidStatus::MildAsymptomatic || s == CovidStatus::Severe ||
         s == CovidStatus::Critical;
}

enum class TestStatus : std::uint8_t { NotApplicable = 0, Tested = 1, Untested = 2 };

// What an agent asks a facility for.
enum class BedNeed : std::uint8_t { NonICU = 0, ICU = 1, ICUWithVentilator = 2 };
std::string_view to_string(BedNeed need);
inline bool is_icu(BedNeed n) { return n != BedNeed::NonICU; }

// The physical bed an occupant holds. Ventilator beds are a flagged subset of ICU beds.
enum class BedKind : std::uint8_t { NonICU = 0, ICU = 1, Ventilator = 2 };
inline bool is_icu(BedKind k) { return k != BedKind::NonICU; }

struct Readmission {
  Day day;
  FacilityId facility;
};

struct Agent {
  AgentId id = 0;
  int age_years = 0;
  AgeGroup age_group = AgeGroup::Under50;
  CountyCode county = 0;
  char sex = 'F';
  bool comorbidity = false;
  FacilityId location = kCommunity;
  bool alive = true;
  CovidStatus covid_status = CovidStatus::Susceptible;
  TestStatus test_status = TestStatus::NotApplicable;
  bool icu_flag = false;
  bool ventilator_flag = false;
  std::optional<Day> leave_day;
  std::optional<Day> covid_recovery_day;
  std::optional<FacilityId> previous_location;
  std::optional<Readmission> readmission;
  // Day the agent entered the model; recreated agents act from the following day.
  Day created_day = 0;
  // Day-0 or later infection day, if ever infected.
  std::optional<Day> infection_day;
};

struct BedSlot {
  BedKind kind = BedKind::NonICU;
  bool covid = false;
};

enum class AssignResult { Assigned, Full };

class Facility {
 public:
  Facility() = default;
  Facility(FacilityId id, std::string name, FacilityCategory category,
           std::optional<CountyCode> county, int non_icu_beds, int icu_beds, int ventilator_beds);

  static Facility community();

  FacilityId id() const { return id_; }
  const std::string& name() const { return name_; }
  FacilityCategory category() const { return category_; }
  const std::optional<CountyCode>& county() const { return county_; }
  int non_icu_beds() const { return non_icu_beds_; }
  int icu_beds() const { return icu_beds_; }
  int ventilator_beds() const { return ventilator_beds_; }
  int total_beds() const { return non_icu_beds_ + icu_beds_; }
  bool unbounded() const { return category_ == FacilityCategory::Community; }

  // Occupied beds of one physical kind; ICU beds without a ventilator and ventilator
  // beds are counted separately.
  int occupied(BedKind kind) const { return used_[static_cast<std::size_t>(kind)]; }
  int occupied_icu() const { return occupied(BedKind::ICU) + occupied(BedKind::Ventilator); }
  int covid_occupied(BedKind kind) const { return covid_used_[static_cast<std::size_t>(kind)]; }
  int occupant_count() const { return static_cast<int>(occupants_.size()); }

  // The bed kind a request would take, or nullopt when no matching bed is free.
  std::optional<BedKind> free_bed_for(BedNeed need) const;
  bool has_free(BedNeed need) const { return unbounded() || free_bed_for(need).has_value(); }

  AssignResult assign(AgentId agent, BedNeed need, bool covid = false);
  BedSlot release(AgentId agent);
  const BedSlot* find(AgentId agent) const;

  // Bed counts multiplied by scale and rounded; a nonzero count never drops below 1.
  void scale_beds(double scale);
  void set_beds(int non_icu, int icu, int ventilator);

 private:
  FacilityId id_ = kNoFacility;
  std::string name_;
  FacilityCategory category_ = FacilityCategory::Community;
  std::optional<CountyCode> county_;
  int non_icu_beds_ = 0;
  int icu_beds_ = 0;
  int ventilator_beds_ = 0;
  std::array<int, 3> used_{};
  std::array<int, 3> covid_used_{};
  std::unordered_map<AgentId, BedSlot> occupants_;
};

// Bed kind capacity check: occupied <= capacity for every kind.
bool within_capacity(const Facility& f);

enum class Stage : std::uint8_t {
  Init = 0,
  Life = 1,
  Recovery = 2,
  LosEnd = 3,
  Covid = 4,
  Community = 5,
  Readmission = 6,
  Recreate = 7,
};
std::string_view to_string(Stage stage);

enum class EventType : std::uint8_t {
  Admit,
  Release,
  Death,
  Recreate,
  Infection,
  Recovery,
  Seek,        // an agent starts looking for an STACH bed
  TurnedAway,  // every fallback exhausted
};
std::string_view to_string(EventType type);

enum class MoveReason : std::uint8_t {
  None,
  Seed,
  NewAdmission,
  Transfer,
  Readmission,
  NhStepDown,
  Discharge,
  Death,
  Recovery,
};
std::string_view to_string(MoveReason reason);

struct Event {
  Day day = 0;
  Stage stage = Stage::Init;
  EventType type = EventType::Admit;
  MoveReason reason = MoveReason::None;
  BedKind bed = BedKind::NonICU;
  BedNeed need = BedNeed::NonICU;
  bool covid = false;
  AgentId agent = 0;
  FacilityId facility = kCommunity;

  bool operator==(const Event&) const = default;
};

enum class TurnAwayStage : std::uint8_t {
  FirstChoice = 0,
  SecondChoice = 1,
  Catchment = 2,
  Radius200 = 3,
  CompletelyTurnedAway = 4,
};
std::string_view to_string(TurnAwayStage stage);

struct TurnAwayRecord {
  Day day = 0;
  AgentId agent = 0;
  CountyCode county = 0;
  FacilityId facility = kNoFacility;
  BedNeed need = BedNeed::NonICU;
  TurnAwayStage stage = TurnAwayStage::FirstChoice;
  bool covid = false;

  bool operator==(const TurnAwayRecord&) const = default;
};

// Agents, facilities and the run's append-only logs. Single writer.
class World {
 public:
  std::vector<Agent> agents;
  std::vector<Facility> facilities;
  Day day = 0;
  Stage stage = Stage::Init;
  std::vector<Event> events;
  std::vector<TurnAwayRecord> turn_aways;

  Facility& facility(FacilityId id);
  const Facility& facility(FacilityId id) const;
  Agent& agent(AgentId id);
  const Agent& agent(AgentId id) const;

  // Places a community agent in a bed. On Full nothing changes.
  AssignResult admit(AgentId agent, FacilityId facility, BedNeed need, bool covid,
                     MoveReason reason);
  // Frees the agent's bed and returns them to the community.
  BedSlot discharge(AgentId agent, MoveReason reason);

  void log(Event e);
  void log(EventType type, AgentId agent, FacilityId facility = kCommunity,
           MoveReason reason = MoveReason::None, bool covid = false,
           BedNeed need = BedNeed::NonICU, BedKind bed = BedKind::NonICU);

  std::size_t living_count() const;
  std::vector<FacilityId> facilities_of(FacilityCategory category) const;
};

}  // namespace hospsim
