#include "hospsim/metrics.hpp"

#include <fstream>
#include <sstream>

#include "hospsim/errors.hpp"
#include "hospsim/parameters.hpp"
#include "text.hpp"

namespace hospsim {

DailyMetrics record_day(const World& world, std::span<const Event> day_events,
                        long long previous_cumulative, long long awaiting_recreation) {
  DailyMetrics m;
  m.day = world.day;
  for (const auto& e : day_events) {
    const std::size_t k = is_icu(e.need) ? 1 : 0;
    switch (e.type) {
      case EventType::Infection:
        ++m.new_infections;
        break;
      case EventType::Seek:
        ++m.seeking_all[k];
        if (e.covid) ++m.seeking_covid[k];
        break;
      case EventType::TurnedAway:
        if (!is_stach(world.facility(e.facility).category())) break;
        ++m.turned_away_all[k];
        if (e.covid) ++m.turned_away_covid[k];
        break;
      case EventType::Death:
        ++m.deaths;
        break;
      default:
        break;
    }
  }
  m.cumulative_infections = previous_cumulative + m.new_infections;

  for (const auto& f : world.facilities) {
    if (f.category() != FacilityCategory::Community)
      m.census_by_category[index(f.category())] += f.occupant_count();
    if (!is_stach(f.category())) continue;
    const long long covid_non = f.covid_occupied(BedKind::NonICU);
    const long long covid_icu = f.covid_occupied(BedKind::ICU) + f.covid_occupied(BedKind::Ventilator);
    m.census_covid[0] += covid_non;
    m.census_covid[1] += covid_icu;
    m.census_non_covid[0] += f.occupied(BedKind::NonICU) - covid_non;
    m.census_non_covid[1] += f.occupied_icu() - covid_icu;
    m.census_covid_ventilator += f.covid_occupied(BedKind::Ventilator);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    m.demand_covid[k] = m.census_covid[k] + m.turned_away_covid[k];
    m.demand_all[k] = m.census_covid[k] + m.census_non_covid[k] + m.turned_away_all[k];
  }
  for (const auto& a : world.agents) {
    if (!a.alive) continue;
    ++m.living;
    if (a.location == kCommunity) ++m.census_by_category[index(FacilityCategory::Community)];
  }
  m.awaiting_recreation = awaiting_recreation;
  return m;
}

// ---------------------------------------------------------------------------

double PatternReport::get(const std::string& pattern, const std::string& metric,
                          const std::string& key) const {
  auto it = values.find({pattern, metric, key});
  if (it == values.end())
    throw LookupError("no pattern value " + pattern + "/" + metric + "/" + key);
  return it->second;
}

bool PatternReport::has_pattern(const std::string& pattern) const {
  for (const auto& [k, v] : values)
    if (std::get<0>(k) == pattern) return true;
  return false;
}

PatternReport pattern_report(const RunResult& result) {
  PatternReport r;
  auto category_of = [&](FacilityId id) -> std::string {
    if (id < 0 || static_cast<std::size_t>(id) >= result.categories.size())
      throw LookupError("unknown facility id " + std::to_string(id));
    return std::string(to_string(result.categories[static_cast<std::size_t>(id)]));
  };
  auto set = [&](const char* p, const char* m, const std::string& k, double v) {
    r.values[{p, m, k}] = v;
  };
  auto add = [&](const char* p, const char* m, const std::string& k, double v) {
    r.values[{p, m, k}] += v;
  };

  // P1 and P2 cover days 1..horizon; Day-0 seeding is not movement.
  for (auto c : kCategories) {
    const std::string k(to_string(c));
    set("P1", "deaths", k, 0);
    for (const char* m : {"admissions", "transfers", "discharges", "mean_census"}) set("P2", m, k, 0);
  }
  set("P1", "deaths", "ALL", 0);
  for (const char* m : {"admissions", "transfers", "discharges"}) set("P2", m, "ALL", 0);

  for (const auto& e : result.events) {
    if (e.day < 1) continue;
    if (e.type == EventType::Death) {
      add("P1", "deaths", category_of(e.facility), 1);
      add("P1", "deaths", "ALL", 1);
    } else if (e.type == EventType::Admit) {
      const bool transfer = e.reason == MoveReason::Transfer || e.reason == MoveReason::NhStepDown;
      const char* m = transfer ? "transfers" : "admissions";
      add("P2", m, category_of(e.facility), 1);
      add("P2", m, "ALL", 1);
    } else if (e.type == EventType::Release && e.reason != MoveReason::Death) {
      add("P2", "discharges", category_of(e.facility), 1);
      add("P2", "discharges", "ALL", 1);
    }
  }
  std::size_t n = 0;
  std::array<double, kCategoryCount> census{};
  for (const auto& d : result.days) {
    if (d.day < 1 && result.horizon > 0) continue;
    ++n;
    for (std::size_t c = 0; c < kCategoryCount; ++c)
      census[c] += static_cast<double>(d.census_by_category[c]);
  }
  for (std::size_t c = 0; c < kCategoryCount; ++c)
    set("P2", "mean_census", std::string(to_string(kCategories[c])),
        n ? census[c] / static_cast<double>(n) : 0.0);

  // P3: daily infections against the SEIR targets.
  double total_target = 0, total_infected = 0;
  for (std::size_t i = 0; i < result.covid_days.size(); ++i) {
    const auto& day = result.covid_days[i];
    for (const auto& [county, target] : day.target) {
      const std::string k = std::to_string(i + 1) + ":" + std::to_string(county);
      auto get = [&](const std::map<CountyCode, long long>& m) {
        auto it = m.find(county);
        return it == m.end() ? 0.0 : static_cast<double>(it->second);
      };
      set("P3", "target", k, static_cast<double>(target));
      set("P3", "eligible", k, get(day.eligible));
      set("P3", "infected", k, get(day.infected));
      total_target += static_cast<double>(target);
      total_infected += get(day.infected);
    }
  }
  set("P3", "target", "ALL", total_target);
  set("P3", "infected", "ALL", total_infected);

  // P4: hospitalizations per infection by test status.
  std::array<double, 2> inf{}, hosp{};
  for (const auto& day : result.covid_days)
    for (std::size_t t = 0; t < 2; ++t) {
      inf[t] += static_cast<double>(day.infections_by_test[t]);
      hosp[t] += static_cast<double>(day.hospital_bound_by_test[t]);
    }
  const char* names[2] = {"untested", "tested"};
  for (std::size_t t = 0; t < 2; ++t) {
    set("P4", "infections", names[t], inf[t]);
    set("P4", "hospitalizations", names[t], hosp[t]);
    set("P4", "hospitalization_share", names[t], inf[t] > 0 ? hosp[t] / inf[t] : 0.0);
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw InputError("error writing " + path.string());
}

const std::vector<std::string> kMetricColumns = {
    "day", "new_infections", "cumulative_infections",
    "seeking_all_non_icu", "seeking_all_icu", "seeking_covid_non_icu", "seeking_covid_icu",
    "census_covid_non_icu", "census_covid_icu", "census_non_covid_non_icu", "census_non_covid_icu",
    "census_covid_ventilator",
    "turned_away_all_non_icu", "turned_away_all_icu", "turned_away_covid_non_icu",
    "turned_away_covid_icu",
    "demand_all_non_icu", "demand_all_icu", "demand_covid_non_icu", "demand_covid_icu",
    "census_community", "census_unc", "census_large", "census_small", "census_ltach", "census_nh",
    "deaths", "living", "awaiting_recreation"};

std::vector<long long*> metric_fields(DailyMetrics& m) {
  static_assert(sizeof(Day) <= sizeof(long long));
  std::vector<long long*> f = {&m.new_infections, &m.cumulative_infections,
                               &m.seeking_all[0], &m.seeking_all[1],
                               &m.seeking_covid[0], &m.seeking_covid[1],
                               &m.census_covid[0], &m.census_covid[1],
                               &m.census_non_covid[0], &m.census_non_covid[1],
                               &m.census_covid_ventilator,
                               &m.turned_away_all[0], &m.turned_away_all[1],
                               &m.turned_away_covid[0], &m.turned_away_covid[1],
                               &m.demand_all[0], &m.demand_all[1],
                               &m.demand_covid[0], &m.demand_covid[1]};
  for (auto& c : m.census_by_category) f.push_back(&c);
  f.push_back(&m.deaths);
  f.push_back(&m.living);
  f.push_back(&m.awaiting_recreation);
  return f;
}

}  // namespace

void write_pattern_csv(const std::filesystem::path& path, const PatternReport& report) {
  auto out = open_out(path);
  out << "pattern,metric,key,value\n";
  for (const auto& [k, v] : report.values)
    out << std::get<0>(k) << "," << std::get<1>(k) << "," << detail::csv_escape(std::get<2>(k))
        << "," << format_double(v) << "\n";
  check_written(out, path);
}

PatternReport read_pattern_csv(const std::filesystem::path& path) {
  detail::CsvReader csv(path);
  const auto cp = csv.column("pattern"), cm = csv.column("metric"), ck = csv.column("key"),
             cv = csv.column("value");
  PatternReport r;
  std::vector<std::string> f;
  while (csv.read(f)) {
    std::tuple<std::string, std::string, std::string> key{std::string(detail::trim(f[cp])),
                                                          std::string(detail::trim(f[cm])),
                                                          std::string(detail::trim(f[ck]))};
    if (r.values.contains(key)) csv.fail("duplicate row");
    r.values[key] = csv.number(f, cv);
  }
  return r;
}

std::vector<PatternDelta> compare_patterns(const PatternReport& model,
                                           const std::filesystem::path& observed) {
  PatternReport obs;
  try {
    obs = read_pattern_csv(observed);
  } catch (const InputError& e) {
    throw ValidationError(std::string("malformed observed file: ") + e.what());
  }
  std::vector<PatternDelta> out;
  for (const auto& [k, v] : model.values) {
    PatternDelta d{std::get<0>(k), std::get<1>(k), std::get<2>(k), v, std::nullopt, std::nullopt};
    if (auto it = obs.values.find(k); it != obs.values.end()) {
      d.observed = it->second;
      d.delta = v - it->second;
    }
    out.push_back(std::move(d));
  }
  return out;
}

void write_pattern_comparison_csv(const std::filesystem::path& path,
                                  const std::vector<PatternDelta>& deltas) {
  auto out = open_out(path);
  out << "pattern,metric,key,model,observed,delta\n";
  for (const auto& d : deltas)
    out << d.pattern << "," << d.metric << "," << detail::csv_escape(d.key) << ","
        << format_double(d.model) << "," << (d.observed ? format_double(*d.observed) : "") << ","
        << (d.delta ? format_double(*d.delta) : "") << "\n";
  check_written(out, path);
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<DailyMetrics>& days) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < kMetricColumns.size(); ++i)
    out << (i ? "," : "") << kMetricColumns[i];
  out << "\n";
  for (auto d : days) {
    out << d.day;
    for (auto* v : metric_fields(d)) out << "," << *v;
    out << "\n";
  }
  check_written(out, path);
}

std::vector<DailyMetrics> read_metrics_csv(const std::filesystem::path& path) {
  detail::CsvReader csv(path);
  std::vector<std::size_t> cols;
  for (const auto& name : kMetricColumns) cols.push_back(csv.column(name));
  std::vector<DailyMetrics> out;
  std::vector<std::string> f;
  while (csv.read(f)) {
    DailyMetrics m;
    m.day = static_cast<Day>(csv.integer(f, cols[0]));
    auto fields = metric_fields(m);
    for (std::size_t i = 0; i < fields.size(); ++i) *fields[i] = csv.integer(f, cols[i + 1]);
    out.push_back(m);
  }
  return out;
}

void write_turnaways_csv(const std::filesystem::path& path,
                         const std::vector<TurnAwayRecord>& records) {
  auto out = open_out(path);
  out << "day,agent,county,facility,need,stage,covid\n";
  for (const auto& r : records)
    out << r.day << "," << r.agent << "," << r.county << "," << r.facility << ","
        << to_string(r.need) << "," << to_string(r.stage) << "," << (r.covid ? 1 : 0) << "\n";
  check_written(out, path);
}

void export_run(const RunResult& result, const std::string& config_hash,
                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
  write_metrics_csv(dir / "metrics.csv", result.days);
  write_turnaways_csv(dir / "turnaways.csv", result.turn_aways);
  write_pattern_csv(dir / "patterns.csv", pattern_report(result));
  auto path = dir / "manifest.txt";
  auto out = open_out(path);
  out << "seed=" << result.seed << "\n"
      << "config_hash=" << config_hash << "\n"
      << "horizon=" << result.horizon << "\n"
      << "covid=" << (result.covid ? "true" : "false") << "\n"
      << "initial_population=" << result.initial_population << "\n";
  check_written(out, path);
}

}  // namespace hospsim
