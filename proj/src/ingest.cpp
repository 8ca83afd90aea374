#include "hospsim/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hospsim/errors.hpp"
#include "json.hpp"
#include "text.hpp"

namespace hospsim {

using detail::CsvReader;

namespace {

void check_county(CountyCode c, const std::set<CountyCode>* known, const std::string& where) {
  if (c < kMinCounty || c > kMaxCounty)
    throw ValidationError(where + ": county " + std::to_string(c) + " outside 1-100");
  if (known && !known->contains(c))
    throw ValidationError(where + ": unknown county " + std::to_string(c));
}

// Validates a probability row and renormalizes it to sum to exactly 1.
template <std::size_t N>
void normalize_row(std::array<double, N>& row, const std::string& where) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0 && p <= 1.0 + kRowSumTolerance))
      throw ValidationError(where + ": probability " + format_double(p) + " outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance)
    throw ValidationError(where + ": probabilities sum to " + format_double(sum) +
                          ", expected 1");
  for (double& p : row) p /= sum;
}

std::string row_label(const CsvReader& r) { return r.path() + " row " + std::to_string(r.line()); }

}  // namespace

// ---------------------------------------------------------------------------

PopulationTable expand_population(std::vector<PopulationRow> rows, std::size_t target_size,
                                  Rng& rng) {
  PopulationTable table;
  table.source_rows = rows.size();
  if (target_size == 0) target_size = rows.size();
  if (target_size < rows.size())
    throw InputError("population target " + std::to_string(target_size) +
                     " is smaller than the source size " + std::to_string(rows.size()));
  if (target_size > rows.size() && rows.empty())
    throw InputError("cannot expand an empty population");
  table.rows = std::move(rows);
  const std::size_t extra = target_size - table.source_rows;
  table.rows.reserve(target_size);
  table.duplicate_indices.reserve(extra);
  for (std::size_t i = 0; i < extra; ++i) {
    std::size_t src = uniform_index(rng, table.source_rows);
    table.duplicate_indices.push_back(src);
    table.rows.push_back(table.rows[src]);
  }
  return table;
}

PopulationTable load_population(const fs::path& path, std::size_t target_size, Rng& rng) {
  CsvReader r(path);
  const auto c_county = r.column("county"), c_sex = r.column("sex"), c_age = r.column("age");
  std::vector<PopulationRow> rows;
  std::vector<std::string> f;
  while (r.read(f)) {
    PopulationRow row;
    row.county = static_cast<CountyCode>(r.integer(f, c_county));
    auto sex = detail::trim(f[c_sex]);
    row.sex = sex.empty() ? 'U' : static_cast<char>(std::toupper(sex.front()));
    auto age = r.integer(f, c_age);
    if (age < 0) r.fail("negative age");
    if (row.county < kMinCounty || row.county > kMaxCounty) r.fail("county outside 1-100");
    row.age_years = static_cast<int>(age);
    rows.push_back(row);
  }
  return expand_population(std::move(rows), target_size, rng);
}

// ---------------------------------------------------------------------------

std::vector<Facility> load_facilities(const fs::path& path) {
  CsvReader r(path);
  const auto c_id = r.column("facility_id"), c_name = r.column("name"),
             c_cat = r.column("category"), c_county = r.column("county"),
             c_non = r.column("non_icu_beds"), c_icu = r.column("icu_beds"),
             c_vent = r.column("ventilator_beds");
  std::map<FacilityId, Facility> by_id;
  std::vector<std::string> f;
  while (r.read(f)) {
    auto id = static_cast<FacilityId>(r.integer(f, c_id));
    FacilityCategory cat;
    try {
      cat = parse_category(detail::trim(f[c_cat]));
    } catch (const InputError& e) {
      r.fail(e.what());
    }
    std::optional<CountyCode> county;
    if (!detail::trim(f[c_county]).empty()) {
      county = static_cast<CountyCode>(r.integer(f, c_county));
      if (*county < kMinCounty || *county > kMaxCounty) r.fail("county outside 1-100");
    }
    if (is_stach(cat) && !county) r.fail("STACH facilities need a county");
    if (id == kCommunity && cat != FacilityCategory::Community)
      r.fail("facility id 0 is reserved for the community");
    if (by_id.contains(id)) r.fail("duplicate facility id " + std::to_string(id));
    try {
      by_id.emplace(id, Facility(id, std::string(detail::trim(f[c_name])), cat, county,
                                 static_cast<int>(r.integer(f, c_non)),
                                 static_cast<int>(r.integer(f, c_icu)),
                                 static_cast<int>(r.integer(f, c_vent))));
    } catch (const ValidationError& e) {
      r.fail(e.what());
    }
  }
  if (!by_id.contains(kCommunity)) by_id.emplace(kCommunity, Facility::community());
  std::vector<Facility> out;
  out.reserve(by_id.size());
  for (auto& [id, fac] : by_id) {
    if (static_cast<std::size_t>(id) != out.size())
      throw ValidationError(path.string() + ": facility ids must be dense 0..N-1, missing " +
                            std::to_string(out.size()));
    out.push_back(std::move(fac));
  }
  return out;
}

std::map<CountyCode, std::int64_t> load_counties(const fs::path& path) {
  CsvReader r(path);
  const auto c_county = r.column("county"), c_pop = r.column("population");
  std::map<CountyCode, std::int64_t> out;
  std::vector<std::string> f;
  while (r.read(f)) {
    auto c = static_cast<CountyCode>(r.integer(f, c_county));
    if (c < kMinCounty || c > kMaxCounty) r.fail("county outside 1-100");
    auto pop = r.integer(f, c_pop);
    if (pop <= 0) r.fail("county population must be positive");
    if (!out.emplace(c, pop).second) r.fail("duplicate county");
  }
  return out;
}

// ---------------------------------------------------------------------------

void TransitionTables::add(const CommunityTransitionRow& row) {
  community_[{row.county, static_cast<int>(index(row.age_group))}] = row;
}

void TransitionTables::add(const LocationTransitionRow& row) {
  location_[{row.county, static_cast<int>(index(row.age_group)), row.source}] = row;
}

const CommunityTransitionRow& TransitionTables::community(CountyCode county, AgeGroup age) const {
  auto it = community_.find({county, static_cast<int>(index(age))});
  if (it == community_.end())
    throw ConfigError("no community transition row for county " + std::to_string(county) +
                      ", age group " + std::string(to_string(age)));
  return it->second;
}

const LocationTransitionRow& TransitionTables::location(CountyCode county, AgeGroup age,
                                                        const Facility& source) const {
  const int a = static_cast<int>(index(age));
  if (is_stach(source.category())) {
    auto it = location_.find({county, a, LocationSource{source.category(), source.id()}});
    if (it != location_.end()) return it->second;
  }
  auto it = location_.find({county, a, LocationSource{source.category(), kNoFacility}});
  if (it == location_.end())
    throw ConfigError("no location transition row for county " + std::to_string(county) +
                      ", age group " + std::string(to_string(age)) + ", source " +
                      std::to_string(source.id()));
  return it->second;
}

void DischargeTable::add(FacilityId facility, CountyCode county, double count) {
  if (count < 0) throw ValidationError("negative discharge count");
  by_facility_[facility][county] += count;
}

void DischargeTable::drop_minor_counties(double share) {
  for (auto& [fac, counties] : by_facility_) {
    double total = 0.0;
    for (auto& [c, n] : counties) total += n;
    std::erase_if(counties, [&](const auto& kv) { return total <= 0 || kv.second < share * total; });
  }
  std::erase_if(by_facility_, [](const auto& kv) { return kv.second.empty(); });
}

const std::map<CountyCode, double>& DischargeTable::for_facility(FacilityId facility) const {
  static const std::map<CountyCode, double> empty;
  auto it = by_facility_.find(facility);
  return it == by_facility_.end() ? empty : it->second;
}

bool DischargeTable::contains(FacilityId facility, CountyCode county) const {
  auto it = by_facility_.find(facility);
  return it != by_facility_.end() && it->second.contains(county);
}

TransitionData load_transition_tables(const fs::path& community, const fs::path& location,
                                      const fs::path& discharges,
                                      const std::vector<Facility>& facilities,
                                      const std::set<CountyCode>* known_counties) {
  TransitionData data;
  std::vector<std::string> f;
  {
    CsvReader r(community);
    const auto c_county = r.column("county"), c_age = r.column("age_group"),
               c_dep = r.column("departure_probability");
    const std::array<std::size_t, 5> cols = {r.column("unc"), r.column("large"),
                                             r.column("small"), r.column("ltach"),
                                             r.column("nh")};
    while (r.read(f)) {
      CommunityTransitionRow row;
      row.county = static_cast<CountyCode>(r.integer(f, c_county));
      check_county(row.county, known_counties, row_label(r));
      try {
        row.age_group = parse_age_group(detail::trim(f[c_age]));
      } catch (const InputError& e) {
        r.fail(e.what());
      }
      row.departure_probability = r.number(f, c_dep);
      if (!(row.departure_probability >= 0 && row.departure_probability <= 1))
        throw ValidationError(row_label(r) + ": departure probability outside [0,1]");
      for (std::size_t i = 0; i < 5; ++i) row.facility_probs[i] = r.number(f, cols[i]);
      normalize_row(row.facility_probs, row_label(r));
      data.tables.add(row);
    }
  }
  {
    CsvReader r(location);
    const auto c_county = r.column("county"), c_age = r.column("age_group"),
               c_src = r.column("source");
    const std::array<std::size_t, 6> cols = {r.column("community"), r.column("unc"),
                                             r.column("large"),     r.column("small"),
                                             r.column("ltach"),     r.column("nh")};
    while (r.read(f)) {
      LocationTransitionRow row;
      row.county = static_cast<CountyCode>(r.integer(f, c_county));
      check_county(row.county, known_counties, row_label(r));
      try {
        row.age_group = parse_age_group(detail::trim(f[c_age]));
      } catch (const InputError& e) {
        r.fail(e.what());
      }
      auto src = detail::trim(f[c_src]);
      if (auto id = detail::parse_int(src)) {
        if (*id <= 0 || static_cast<std::size_t>(*id) >= facilities.size() ||
            !is_stach(facilities[static_cast<std::size_t>(*id)].category()))
          throw ValidationError(row_label(r) + ": source " + std::string(src) +
                                " is not an STACH facility id");
        row.source = {facilities[static_cast<std::size_t>(*id)].category(),
                      static_cast<FacilityId>(*id)};
      } else {
        try {
          row.source = {parse_category(src), kNoFacility};
        } catch (const InputError& e) {
          r.fail(e.what());
        }
      }
      for (std::size_t i = 0; i < 6; ++i) row.probs[i] = r.number(f, cols[i]);
      normalize_row(row.probs, row_label(r));
      data.tables.add(row);
    }
  }
  {
    CsvReader r(discharges);
    const auto c_fac = r.column("facility_id"), c_county = r.column("county"),
               c_n = r.column("discharges");
    while (r.read(f)) {
      auto fac = static_cast<FacilityId>(r.integer(f, c_fac));
      if (fac <= 0 || static_cast<std::size_t>(fac) >= facilities.size() ||
          !is_stach(facilities[static_cast<std::size_t>(fac)].category()))
        throw ValidationError(row_label(r) + ": facility " + std::to_string(fac) +
                              " is not an STACH");
      auto county = static_cast<CountyCode>(r.integer(f, c_county));
      check_county(county, known_counties, row_label(r));
      double n = r.number(f, c_n);
      if (n < 0) throw ValidationError(row_label(r) + ": negative discharge count");
      data.discharges.add(fac, county, n);
    }
    data.discharges.drop_minor_counties(0.01);
  }
  return data;
}

// ---------------------------------------------------------------------------

void DistanceIndex::set(CountyCode county, std::vector<Entry> entries) {
  auto& lookup = lookup_[county];
  lookup.clear();
  for (const auto& [fac, miles] : entries) {
    if (!(miles >= 0.0))
      throw ValidationError("negative distance for county " + std::to_string(county) +
                            ", facility " + std::to_string(fac));
    lookup[fac] = miles;
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  sorted_[county] = std::move(entries);
}

const std::vector<DistanceIndex::Entry>& DistanceIndex::sorted(CountyCode county) const {
  static const std::vector<Entry> empty;
  auto it = sorted_.find(county);
  return it == sorted_.end() ? empty : it->second;
}

std::optional<double> DistanceIndex::distance(CountyCode county, FacilityId facility) const {
  auto it = lookup_.find(county);
  if (it == lookup_.end()) return std::nullopt;
  auto jt = it->second.find(facility);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

std::vector<CountyCode> DistanceIndex::counties() const {
  std::vector<CountyCode> out;
  for (const auto& [c, _] : sorted_) out.push_back(c);
  return out;
}

DistanceIndex load_distances(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError(path.string() + ": expected a JSON object");
  DistanceIndex index;
  for (const auto& [county_key, facilities] : doc.items()) {
    auto county = detail::parse_int(county_key);
    if (!county) throw ValidationError(path.string() + ": bad county key '" + county_key + "'");
    if (!facilities.is_object())
      throw ValidationError(path.string() + ": county " + county_key + " is not an object");
    std::vector<DistanceIndex::Entry> entries;
    for (const auto& [fac_key, miles] : facilities.items()) {
      auto fac = detail::parse_int(fac_key);
      if (!fac || !miles.is_number())
        throw ValidationError(path.string() + ": bad entry '" + fac_key + "' for county " +
                              county_key);
      entries.emplace_back(static_cast<FacilityId>(*fac), miles.get<double>());
    }
    index.set(static_cast<CountyCode>(*county), std::move(entries));
  }
  return index;
}

void write_distances(const fs::path& path, const DistanceIndex& index) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "{\n";
  auto counties = index.counties();
  for (std::size_t i = 0; i < counties.size(); ++i) {
    out << "  \"" << counties[i] << "\": {";
    auto entries = index.sorted(counties[i]);
    std::sort(entries.begin(), entries.end());
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (j) out << ", ";
      out << "\"" << entries[j].first << "\": " << format_double(entries[j].second);
    }
    out << "}" << (i + 1 < counties.size() ? "," : "") << "\n";
  }
  out << "}\n";
}

// ---------------------------------------------------------------------------

EmpiricalPool EmpiricalPool::from_counts(const std::map<int, std::int64_t>& counts) {
  EmpiricalPool pool;
  std::int64_t total = 0;
  for (const auto& [value, n] : counts) {
    if (n < 0) throw ValidationError("negative LOS count for " + std::to_string(value) + " days");
    if (value < 0) throw ValidationError("negative LOS value");
    if (n == 0) continue;
    total += n;
    pool.values_.push_back(value);
    pool.cumulative_.push_back(total);
  }
  if (total == 0) throw ValidationError("empty LOS pool");
  return pool;
}

int EmpiricalPool::sample(Rng& rng) const {
  auto u = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(size())));
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return values_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::vector<int> EmpiricalPool::expanded() const {
  std::vector<int> out;
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out.insert(out.end(), static_cast<std::size_t>(cumulative_[i] - prev), values_[i]);
    prev = cumulative_[i];
  }
  return out;
}

double EmpiricalPool::mean() const {
  double sum = 0.0;
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    sum += static_cast<double>(values_[i]) * static_cast<double>(cumulative_[i] - prev);
    prev = cumulative_[i];
  }
  return sum / static_cast<double>(size());
}

namespace {

std::map<int, std::int64_t> read_counts(const fs::path& path, std::string_view value_col) {
  CsvReader r(path);
  const auto c_val = r.column(value_col), c_n = r.column("count");
  std::map<int, std::int64_t> counts;
  std::vector<std::string> f;
  while (r.read(f)) {
    auto v = r.integer(f, c_val);
    auto n = r.integer(f, c_n);
    if (v < 0) throw ValidationError(row_label(r) + ": negative day value");
    if (n < 0) throw ValidationError(row_label(r) + ": negative count");
    counts[static_cast<int>(v)] += n;
  }
  return counts;
}

}  // namespace

NhLos load_nh_los(const fs::path& counts, const std::optional<fs::path>& remaining) {
  NhLos los;
  try {
    los.admission = EmpiricalPool::from_counts(read_counts(counts, "los_days"));
    if (remaining) los.remaining = EmpiricalPool::from_counts(read_counts(*remaining, "days"));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("NH LOS: ") + e.what());
  }
  return los;
}

// ---------------------------------------------------------------------------

std::chrono::sys_days parse_date(std::string_view text) {
  text = detail::trim(text);
  auto parts = detail::split(text, '-');
  if (parts.size() != 3) throw InputError("bad date '" + std::string(text) + "'");
  auto y = detail::parse_int(parts[0]), m = detail::parse_int(parts[1]),
       d = detail::parse_int(parts[2]);
  if (!y || !m || !d) throw InputError("bad date '" + std::string(text) + "'");
  std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(*y)},
                                  std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) throw InputError("bad date '" + std::string(text) + "'");
  return std::chrono::sys_days{ymd};
}

std::string format_date(std::chrono::sys_days d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::vector<double> CaseSeries::county(CountyCode c) const {
  auto it = daily.find(c);
  return it == daily.end() ? std::vector<double>(days, 0.0) : it->second;
}

std::vector<double> CaseSeries::statewide() const {
  std::vector<double> out(days, 0.0);
  for (const auto& [c, v] : daily)
    for (std::size_t i = 0; i < days; ++i) out[i] += v[i];
  return out;
}

double CaseSeries::cumulative(CountyCode c) const {
  auto it = daily.find(c);
  if (it == daily.end()) return 0.0;
  return std::accumulate(it->second.begin(), it->second.end(), 0.0);
}

double CaseSeries::cumulative() const {
  double total = 0.0;
  for (const auto& [c, v] : daily) total += std::accumulate(v.begin(), v.end(), 0.0);
  return total;
}

CaseSeries load_case_series(const fs::path& path) {
  CsvReader r(path);
  const auto c_date = r.column("date"), c_county = r.column("county"),
             c_n = r.column("new_cases");
  struct Obs {
    std::chrono::sys_days date;
    CountyCode county;
    double cases;
  };
  std::vector<Obs> obs;
  std::map<CountyCode, std::chrono::sys_days> last_seen;
  std::vector<std::string> f;
  while (r.read(f)) {
    Obs o;
    try {
      o.date = parse_date(f[c_date]);
    } catch (const InputError& e) {
      r.fail(e.what());
    }
    o.county = static_cast<CountyCode>(r.integer(f, c_county));
    if (o.county < kMinCounty || o.county > kMaxCounty)
      throw ValidationError(row_label(r) + ": county outside 1-100");
    o.cases = r.number(f, c_n);
    if (o.cases < 0) throw ValidationError(row_label(r) + ": negative case count");
    auto [it, fresh] = last_seen.emplace(o.county, o.date);
    if (!fresh) {
      if (o.date <= it->second)
        throw ValidationError(row_label(r) + ": dates for county " + std::to_string(o.county) +
                              " are not increasing");
      it->second = o.date;
    }
    obs.push_back(o);
  }
  CaseSeries series;
  if (obs.empty()) return series;
  auto lo = obs.front().date, hi = obs.front().date;
  for (const auto& o : obs) {
    lo = std::min(lo, o.date);
    hi = std::max(hi, o.date);
  }
  series.start = lo;
  series.days = static_cast<std::size_t>((hi - lo).count()) + 1;
  for (const auto& o : obs) {
    auto& v = series.daily[o.county];
    if (v.empty()) v.assign(series.days, 0.0);
    v[static_cast<std::size_t>((o.date - lo).count())] = o.cases;
  }
  return series;
}

// ---------------------------------------------------------------------------

std::map<FacilityId, GammaLos> load_los_gamma(const fs::path& path) {
  CsvReader r(path);
  const auto c_fac = r.column("facility_id"), c_shape = r.column("shape"),
             c_scale = r.column("scale");
  std::map<FacilityId, GammaLos> out;
  std::vector<std::string> f;
  while (r.read(f)) {
    GammaLos g{r.number(f, c_shape), r.number(f, c_scale)};
    if (!(g.shape > 0 && g.scale > 0))
      throw ValidationError(row_label(r) + ": gamma shape and scale must be positive");
    out[static_cast<FacilityId>(r.integer(f, c_fac))] = g;
  }
  return out;
}

std::map<FacilityId, CensusRow> load_hospital_census(const fs::path& path) {
  CsvReader r(path);
  const auto c_fac = r.column("facility_id"), c_on = r.column("occupied_non_icu"),
             c_oi = r.column("occupied_icu"), c_cn = r.column("covid_non_icu"),
             c_ci = r.column("covid_icu");
  std::map<FacilityId, CensusRow> out;
  std::vector<std::string> f;
  while (r.read(f)) {
    CensusRow row;
    row.facility = static_cast<FacilityId>(r.integer(f, c_fac));
    row.occupied_non_icu = static_cast<int>(r.integer(f, c_on));
    row.occupied_icu = static_cast<int>(r.integer(f, c_oi));
    row.covid_non_icu = static_cast<int>(r.integer(f, c_cn));
    row.covid_icu = static_cast<int>(r.integer(f, c_ci));
    if (row.occupied_non_icu < 0 || row.occupied_icu < 0 || row.covid_non_icu < 0 ||
        row.covid_icu < 0)
      throw ValidationError(row_label(r) + ": negative census count");
    out[row.facility] = row;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> read_bundle_parameters(const fs::path& dir) {
  auto p = dir / BundleFiles::kParams;
  if (!fs::exists(p)) return {};
  return read_key_value_file(p);
}

Bundle load_bundle(const fs::path& dir, const Parameters& params, Rng& rng) {
  if (!fs::is_directory(dir)) throw InputError("bundle directory not found: " + dir.string());
  Bundle b;
  b.facilities = load_facilities(dir / BundleFiles::kFacilities);
  b.county_population = load_counties(dir / BundleFiles::kCounties);
  std::set<CountyCode> known;
  for (const auto& [c, _] : b.county_population) known.insert(c);
  for (const auto& f : b.facilities)
    if (f.county() && !known.contains(*f.county()))
      throw ValidationError("facility " + std::to_string(f.id()) + ": unknown county " +
                            std::to_string(*f.county()));

  b.population = load_population(dir / BundleFiles::kPopulation, params.population_target, rng);
  for (const auto& row : b.population.rows)
    if (!known.contains(row.county))
      throw ValidationError("population: unknown county " + std::to_string(row.county));

  b.transitions = load_transition_tables(dir / BundleFiles::kCommunityTransitions,
                                         dir / BundleFiles::kLocationTransitions,
                                         dir / BundleFiles::kDischarges, b.facilities, &known);
  b.distances = load_distances(dir / BundleFiles::kDistances);
  for (auto c : b.distances.counties())
    if (!known.contains(c))
      throw ValidationError("distances: unknown county " + std::to_string(c));

  auto remaining = dir / BundleFiles::kNhRemaining;
  b.nh_los = load_nh_los(dir / BundleFiles::kNhLos,
                         fs::exists(remaining) ? std::optional<fs::path>(remaining) : std::nullopt);
  if (auto p = dir / BundleFiles::kLosGamma; fs::exists(p)) b.los_gamma = load_los_gamma(p);
  if (auto p = dir / BundleFiles::kCases; fs::exists(p)) {
    b.cases = load_case_series(p);
    for (const auto& [c, _] : b.cases->daily)
      if (!known.contains(c))
        throw ValidationError("cases: unknown county " + std::to_string(c));
  }
  if (auto p = dir / BundleFiles::kCensus; fs::exists(p)) b.census = load_hospital_census(p);
  return b;
}

}  // namespace hospsim
