#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hospsim/parameters.hpp"
#include "hospsim/rng.hpp"
#include "hospsim/world.hpp"

namespace hospsim {

namespace fs = std::filesystem;

inline constexpr CountyCode kMinCounty = 1;
inline constexpr CountyCode kMaxCounty = 100;
inline constexpr double kRowSumTolerance = 1e-6;

// ---------------------------------------------------------------------------
// Synthetic population

struct PopulationRow {
  CountyCode county = 0;
  char sex = 'F';
  int age_years = 0;

  bool operator==(const PopulationRow&) const = default;
};

struct PopulationTable {
  std::vector<PopulationRow> rows;
  std::size_t source_rows = 0;
  // Source row index of every appended duplicate, in append order.
  std::vector<std::size_t> duplicate_indices;
};

// Reads population.csv (county,sex,age) and tops it up to target_size by duplicating
// rows drawn uniformly with replacement. target_size 0 means "no expansion".
PopulationTable load_population(const fs::path& path, std::size_t target_size, Rng& rng);
PopulationTable expand_population(std::vector<PopulationRow> rows, std::size_t target_size,
                                  Rng& rng);

// ---------------------------------------------------------------------------
// Facilities and counties

// facilities.csv: facility_id,name,category,county,non_icu_beds,icu_beds,ventilator_beds.
// Ids must be dense; id 0 is the community and is inserted when absent.
std::vector<Facility> load_facilities(const fs::path& path);
std::map<CountyCode, std::int64_t> load_counties(const fs::path& path);

// ---------------------------------------------------------------------------
// Transitions

// Facility-type probabilities ordered UNC, LARGE, SMALL, LTACH, NH.
using FacilityTypeProbs = std::array<double, 5>;
// Destination-type probabilities indexed by FacilityCategory (community first).
using DestinationProbs = std::array<double, kCategoryCount>;

inline FacilityCategory facility_type_at(std::size_t i) {
  return static_cast<FacilityCategory>(i + 1);
}

struct CommunityTransitionRow {
  CountyCode county = 0;
  AgeGroup age_group = AgeGroup::Under50;
  double departure_probability = 0.0;
  FacilityTypeProbs facility_probs{};
};

// A location-transition row applies either to one STACH (facility set) or to every
// facility of a category (facility == kNoFacility).
struct LocationSource {
  FacilityCategory category = FacilityCategory::Community;
  FacilityId facility = kNoFacility;

  auto operator<=>(const LocationSource&) const = default;
};

struct LocationTransitionRow {
  CountyCode county = 0;
  AgeGroup age_group = AgeGroup::Under50;
  LocationSource source;
  DestinationProbs probs{};
};

class TransitionTables {
 public:
  void add(const CommunityTransitionRow& row);
  void add(const LocationTransitionRow& row);

  // Throws ConfigError when no row exists.
  const CommunityTransitionRow& community(CountyCode county, AgeGroup age) const;
  // STACHs use their own row when present, otherwise the category row.
  const LocationTransitionRow& location(CountyCode county, AgeGroup age,
                                        const Facility& source) const;

  const std::map<std::tuple<CountyCode, int>, CommunityTransitionRow>& community_rows() const {
    return community_;
  }
  const std::map<std::tuple<CountyCode, int, LocationSource>, LocationTransitionRow>&
  location_rows() const {
    return location_;
  }

 private:
  std::map<std::tuple<CountyCode, int>, CommunityTransitionRow> community_;
  std::map<std::tuple<CountyCode, int, LocationSource>, LocationTransitionRow> location_;
};

class DischargeTable {
 public:
  void add(FacilityId facility, CountyCode county, double count);
  // Removes counties contributing less than share of a facility's discharges.
  void drop_minor_counties(double share = 0.01);

  const std::map<CountyCode, double>& for_facility(FacilityId facility) const;
  bool contains(FacilityId facility, CountyCode county) const;
  const std::map<FacilityId, std::map<CountyCode, double>>& facilities() const {
    return by_facility_;
  }

 private:
  std::map<FacilityId, std::map<CountyCode, double>> by_facility_;
};

struct TransitionData {
  TransitionTables tables;
  DischargeTable discharges;
};

// community_transitions.csv: county,age_group,departure_probability,unc,large,small,ltach,nh
// location_transitions.csv:  county,age_group,source,community,unc,large,small,ltach,nh
//   (source is an STACH facility id or one of COMMUNITY, LTACH, NH)
// county_discharges.csv:     facility_id,county,discharges
// Rows must sum to 1 within kRowSumTolerance and are then renormalized exactly. When
// known_counties is given, rows naming any other county are rejected.
TransitionData load_transition_tables(const fs::path& community, const fs::path& location,
                                      const fs::path& discharges,
                                      const std::vector<Facility>& facilities,
                                      const std::set<CountyCode>* known_counties = nullptr);

// ---------------------------------------------------------------------------
// Distances

class DistanceIndex {
 public:
  using Entry = std::pair<FacilityId, double>;

  // Sorts ascending by miles, ties by facility id. Throws ValidationError on negative miles.
  void set(CountyCode county, std::vector<Entry> entries);

  // Facilities ordered nearest first; empty when the county is unknown.
  const std::vector<Entry>& sorted(CountyCode county) const;
  std::optional<double> distance(CountyCode county, FacilityId facility) const;
  std::vector<CountyCode> counties() const;

 private:
  std::map<CountyCode, std::vector<Entry>> sorted_;
  std::map<CountyCode, std::unordered_map<FacilityId, double>> lookup_;
};

// distances.json: {"<county>": {"<facility_id>": miles, ...}, ...}
DistanceIndex load_distances(const fs::path& path);
void write_distances(const fs::path& path, const DistanceIndex& index);

// ---------------------------------------------------------------------------
// Nursing-home length of stay

// Uniform draws from a multiset of day counts without materializing it.
class EmpiricalPool {
 public:
  EmpiricalPool() = default;
  // Throws ValidationError on negative counts or an empty pool.
  static EmpiricalPool from_counts(const std::map<int, std::int64_t>& counts);

  int sample(Rng& rng) const;
  std::vector<int> expanded() const;
  double mean() const;
  std::int64_t size() const { return cumulative_.empty() ? 0 : cumulative_.back(); }
  const std::vector<int>& values() const { return values_; }

 private:
  std::vector<int> values_;
  std::vector<std::int64_t> cumulative_;
};

struct NhLos {
  EmpiricalPool admission;
  std::optional<EmpiricalPool> remaining;

  // Day-0 NH residents draw from the remaining-days pool when one was supplied.
  const EmpiricalPool& initialization_pool() const { return remaining ? *remaining : admission; }
};

// nh_los.csv: los_days,count; nh_time_until_leaving.csv: days,count (optional).
NhLos load_nh_los(const fs::path& counts, const std::optional<fs::path>& remaining);

// ---------------------------------------------------------------------------
// Reported cases

struct CaseSeries {
  std::chrono::sys_days start{};
  std::size_t days = 0;
  std::map<CountyCode, std::vector<double>> daily;

  // Day 0 of the simulation.
  std::chrono::sys_days anchor() const {
    return start + std::chrono::days(static_cast<int>(days) - 1);
  }
  std::vector<double> county(CountyCode c) const;
  std::vector<double> statewide() const;
  double cumulative(CountyCode c) const;
  double cumulative() const;
};

std::chrono::sys_days parse_date(std::string_view text);
std::string format_date(std::chrono::sys_days d);

// cases.csv: date,county,new_cases. Missing days are zero; each county's dates must be
// strictly increasing.
CaseSeries load_case_series(const fs::path& path);

// ---------------------------------------------------------------------------
// Optional per-facility inputs

// los_gamma.csv: facility_id,shape,scale
std::map<FacilityId, GammaLos> load_los_gamma(const fs::path& path);

struct CensusRow {
  FacilityId facility = kNoFacility;
  int occupied_non_icu = 0;
  int occupied_icu = 0;
  int covid_non_icu = 0;
  int covid_icu = 0;
};
// hospital_census.csv: facility_id,occupied_non_icu,occupied_icu,covid_non_icu,covid_icu
std::map<FacilityId, CensusRow> load_hospital_census(const fs::path& path);

// ---------------------------------------------------------------------------
// Input bundle

struct BundleFiles {
  static constexpr const char* kFacilities = "facilities.csv";
  static constexpr const char* kCounties = "counties.csv";
  static constexpr const char* kPopulation = "population.csv";
  static constexpr const char* kCommunityTransitions = "community_transitions.csv";
  static constexpr const char* kLocationTransitions = "location_transitions.csv";
  static constexpr const char* kDischarges = "county_discharges.csv";
  static constexpr const char* kDistances = "distances.json";
  static constexpr const char* kNhLos = "nh_los.csv";
  static constexpr const char* kNhRemaining = "nh_time_until_leaving.csv";
  static constexpr const char* kLosGamma = "los_gamma.csv";
  static constexpr const char* kCases = "cases.csv";
  static constexpr const char* kCensus = "hospital_census.csv";
  static constexpr const char* kParams = "params.cfg";
};

struct Bundle {
  std::vector<Facility> facilities;
  std::map<CountyCode, std::int64_t> county_population;
  PopulationTable population;
  TransitionData transitions;
  DistanceIndex distances;
  NhLos nh_los;
  std::map<FacilityId, GammaLos> los_gamma;
  std::optional<CaseSeries> cases;
  std::map<FacilityId, CensusRow> census;
};

// Bundle-level parameter defaults (params.cfg), empty when the file is absent.
std::map<std::string, std::string> read_bundle_parameters(const fs::path& dir);

// Loads and cross-validates every file of a bundle directory. Bed counts are returned
// unscaled.
Bundle load_bundle(const fs::path& dir, const Parameters& params, Rng& rng);

// ---------------------------------------------------------------------------
// Synthetic bundle generation

struct SyntheticSpec {
  std::size_t n_agents = 100000;
  int n_counties = 10;
  int unc = 2;
  int large = 2;
  int small = 5;
  int ltach = 1;
  int nh = 10;
  std::uint64_t seed = 7;
  // Real-world population the agents stand in for; bed counts, county populations and
  // case counts are generated at this size.
  double reference_population = 10'500'000.0;
  std::string case_start = "2020-03-03";
  int case_days = 227;
};

// Writes every bundle file into dir (created if needed). Identical specs give
// byte-identical files.
void generate_synthetic_bundle(const SyntheticSpec& spec, const fs::path& dir);

}  // namespace hospsim
