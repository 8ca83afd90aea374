#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hospsim/covid.hpp"
#include "hospsim/world.hpp"

namespace hospsim {

// Index 0 is non-ICU, 1 is ICU (ventilator beds included).
using KindPair = std::array<long long, 2>;

struct DailyMetrics {
  Day day = 0;
  long long new_infections = 0;
  long long cumulative_infections = 0;
  KindPair seeking_all{};
  KindPair seeking_covid{};
  // STACH occupancy at the end of the day.
  KindPair census_covid{};
  KindPair census_non_covid{};
  long long census_covid_ventilator = 0;
  // Agents turned away by every STACH they tried.
  KindPair turned_away_all{};
  KindPair turned_away_covid{};
  // End-of-day census plus the day's complete turn-aways.
  KindPair demand_all{};
  KindPair demand_covid{};
  // Occupants by facility category; the community entry counts living community agents.
  std::array<long long, kCategoryCount> census_by_category{};
  long long deaths = 0;
  long long living = 0;
  long long awaiting_recreation = 0;

  bool operator==(const DailyMetrics&) const = default;
};

// Daily output categories from its events and the end-of-day world.
DailyMetrics record_day(const World& world, std::span<const Event> day_events,
                        long long previous_cumulative, long long awaiting_recreation);

struct RunResult {
  std::uint64_t seed = 0;
  int horizon = 0;
  bool covid = true;
  std::size_t initial_population = 0;
  // Category of each facility id.
  std::vector<FacilityCategory> categories;
  std::vector<DailyMetrics> days;
  std::vector<TurnAwayRecord> turn_aways;
  std::vector<Event> events;
  Day0Report day0;
  // Index d-1 holds day d.
  std::vector<CovidDayReport> covid_days;
  std::vector<std::string> warnings;
};

// Long-format report rows: (pattern, metric, key) -> value.
struct PatternReport {
  std::map<std::tuple<std::string, std::string, std::string>, double> values;

  double get(const std::string& pattern, const std::string& metric, const std::string& key) const;
  bool has_pattern(const std::string& pattern) const;
};

PatternReport pattern_report(const RunResult& result);

struct PatternDelta {
  std::string pattern, metric, key;
  double model = 0.0;
  std::optional<double> observed;
  std::optional<double> delta;
};

// Model rows side by side with an observed file of the same schema. Throws
// ValidationError on a malformed observed file.
std::vector<PatternDelta> compare_patterns(const PatternReport& model,
                                           const std::filesystem::path& observed);

void write_pattern_csv(const std::filesystem::path& path, const PatternReport& report);
PatternReport read_pattern_csv(const std::filesystem::path& path);
void write_pattern_comparison_csv(const std::filesystem::path& path,
                                  const std::vector<PatternDelta>& deltas);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<DailyMetrics>& days);
std::vector<DailyMetrics> read_metrics_csv(const std::filesystem::path& path);
void write_turnaways_csv(const std::filesystem::path& path,
                         const std::vector<TurnAwayRecord>& records);

// Writes metrics.csv, turnaways.csv, patterns.csv and manifest.txt into dir.
void export_run(const RunResult& result, const std::string& config_hash,
                const std::filesystem::path& dir);

}  // namespace hospsim
