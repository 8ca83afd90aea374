#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hospsim/errors.hpp"
#include "hospsim/ingest.hpp"

namespace hospsim {

namespace {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct SynthFacility {
  FacilityId id = 0;
  std::string name;
  FacilityCategory category = FacilityCategory::Community;
  CountyCode county = 0;
  Point at;
  int non_icu = 0;
  int icu = 0;
  int vent = 0;
  int beds() const { return non_icu + icu; }
};

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

double miles(Point a, Point b) { return std::round(std::hypot(a.x - b.x, a.y - b.y) * 10.0) / 10.0; }

std::ofstream open(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

// Writes a probability row so it sums to exactly 1 after parsing: the last entry is the
// complement of the others.
std::string prob_row(std::vector<double> p) {
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  double head = 0.0;
  std::string out;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    head += p[i];
    out += format_double(p[i]) + ",";
  }
  out += format_double(std::max(0.0, 1.0 - head));
  return out;
}

}  // namespace

void generate_synthetic_bundle(const SyntheticSpec& spec, const fs::path& dir) {
  if (spec.n_agents < 1 || spec.n_counties < 1 || spec.n_counties > kMaxCounty)
    throw InputError("synthetic bundle needs at least one agent and 1-100 counties");
  if (spec.unc < 1 || spec.large < 1 || spec.small < 1 || spec.ltach < 1 || spec.nh < 1)
    throw InputError("synthetic bundle needs at least one facility of every category");
  if (!(spec.reference_population >= static_cast<double>(spec.n_agents)))
    throw InputError("reference population must be at least the agent count");
  fs::create_directories(dir);
  Rng rng = make_stream(spec.seed, "synthetic");

  // Counties on a 300 x 200 mile plane.
  const int nc = spec.n_counties;
  std::vector<Point> centroid(static_cast<std::size_t>(nc));
  std::vector<double> weight(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    centroid[static_cast<std::size_t>(c)] = {uniform(rng, 0, 300), uniform(rng, 0, 200)};
    weight[static_cast<std::size_t>(c)] = uniform(rng, 0.3, 1.7);
  }
  auto real_pop = apportion(static_cast<long long>(spec.reference_population), weight);
  auto agents_per_county = apportion(static_cast<long long>(spec.n_agents), weight);
  auto county_of = [](std::size_t i) { return static_cast<CountyCode>(i + 1); };

  // Facilities.
  std::vector<SynthFacility> fac;
  auto place = [&](FacilityCategory cat, int n, const std::string& label) {
    for (int i = 0; i < n; ++i) {
      SynthFacility f;
      f.id = static_cast<FacilityId>(fac.size() + 1);
      f.name = label + " " + std::to_string(i + 1);
      f.category = cat;
      auto ci = weighted_index(weight, rng);
      f.county = county_of(ci);
      f.at = {centroid[ci].x + uniform(rng, -10, 10), centroid[ci].y + uniform(rng, -10, 10)};
      fac.push_back(f);
    }
  };
  place(FacilityCategory::UNC, spec.unc, "UNC Medical Center");
  place(FacilityCategory::LargeNonUNC, spec.large, "Large Regional Hospital");
  place(FacilityCategory::SmallNonUNC, spec.small, "Community Hospital");
  place(FacilityCategory::LTACH, spec.ltach, "Long-Term Acute Care");
  place(FacilityCategory::NH, spec.nh, "Nursing Home");

  const double stach_total = 2.1e-3 * spec.reference_population;
  const double nh_total = 4.3e-3 * spec.reference_population;
  const double ltach_total = 0.1e-3 * spec.reference_population;
  std::vector<double> stach_w;
  for (auto& f : fac) {
    if (!is_stach(f.category)) continue;
    double base = f.category == FacilityCategory::UNC           ? 4.0
                  : f.category == FacilityCategory::LargeNonUNC ? 6.0
                                                                : 1.5;
    stach_w.push_back(base * uniform(rng, 0.8, 1.2));
  }
  double stach_wsum = std::accumulate(stach_w.begin(), stach_w.end(), 0.0);
  std::size_t si = 0;
  for (auto& f : fac) {
    int beds = 0;
    if (is_stach(f.category)) {
      beds = static_cast<int>(std::lround(stach_total * stach_w[si++] / stach_wsum));
      if (f.category == FacilityCategory::SmallNonUNC) beds = std::clamp(beds, 20, 399);
      if (f.category == FacilityCategory::LargeNonUNC) beds = std::max(beds, 400);
      if (f.category == FacilityCategory::UNC) beds = std::max(beds, 20);
      f.icu = static_cast<int>(std::lround(0.15 * beds));
      f.vent = static_cast<int>(std::lround(0.6 * f.icu));
      f.non_icu = beds - f.icu;
    } else if (f.category == FacilityCategory::NH) {
      f.non_icu = std::max(1, static_cast<int>(std::lround(nh_total / spec.nh * uniform(rng, 0.7, 1.3))));
    } else {
      f.non_icu = std::max(1, static_cast<int>(std::lround(ltach_total / spec.ltach * uniform(rng, 0.8, 1.2))));
    }
  }

  {
    auto out = open(dir / BundleFiles::kFacilities);
    out << "facility_id,name,category,county,non_icu_beds,icu_beds,ventilator_beds\n";
    out << "0,Community,COMMUNITY,,0,0,0\n";
    for (auto& f : fac)
      out << f.id << "," << f.name << "," << to_string(f.category) << "," << f.county << ","
          << f.non_icu << "," << f.icu << "," << f.vent << "\n";
  }
  {
    auto out = open(dir / BundleFiles::kCounties);
    out << "county,population\n";
    for (int c = 0; c < nc; ++c)
      out << county_of(static_cast<std::size_t>(c)) << "," << real_pop[static_cast<std::size_t>(c)] << "\n";
  }
  {
    // Age mix 63% under 50, 20% 50-64, 17% 65 and over.
    auto out = open(dir / BundleFiles::kPopulation);
    out << "county,sex,age\n";
    const std::array<double, 3> mix = {0.63, 0.20, 0.17};
    for (int c = 0; c < nc; ++c) {
      for (long long i = 0; i < agents_per_county[static_cast<std::size_t>(c)]; ++i) {
        auto g = weighted_index(mix, rng);
        int age = g == 0   ? static_cast<int>(uniform_index(rng, 50))
                  : g == 1 ? 50 + static_cast<int>(uniform_index(rng, 15))
                           : 65 + static_cast<int>(uniform_index(rng, 29));
        out << county_of(static_cast<std::size_t>(c)) << "," << (bernoulli(rng, 0.5) ? 'F' : 'M')
            << "," << age << "\n";
      }
    }
  }

  // Distances from every county centroid to every facility.
  std::vector<std::vector<double>> dist(static_cast<std::size_t>(nc), std::vector<double>(fac.size()));
  DistanceIndex index;
  for (int c = 0; c < nc; ++c) {
    std::vector<DistanceIndex::Entry> entries;
    for (std::size_t j = 0; j < fac.size(); ++j) {
      dist[static_cast<std::size_t>(c)][j] = miles(centroid[static_cast<std::size_t>(c)], fac[j].at);
      entries.emplace_back(fac[j].id, dist[static_cast<std::size_t>(c)][j]);
    }
    index.set(county_of(static_cast<std::size_t>(c)), std::move(entries));
  }
  write_distances(dir / BundleFiles::kDistances, index);

  {
    // Discharges fall off with distance; counties under 1% of a facility are left out.
    auto out = open(dir / BundleFiles::kDischarges);
    out << "facility_id,county,discharges\n";
    for (std::size_t j = 0; j < fac.size(); ++j) {
      const auto& f = fac[j];
      if (!is_stach(f.category)) continue;
      std::vector<long long> counts(static_cast<std::size_t>(nc));
      long long total = 0;
      for (int c = 0; c < nc; ++c) {
        double share = static_cast<double>(real_pop[static_cast<std::size_t>(c)]) / spec.reference_population;
        double n = 50.0 * f.beds() * share * std::exp(-dist[static_cast<std::size_t>(c)][j] / 50.0);
        if (county_of(static_cast<std::size_t>(c)) == f.county) n = std::max(n, 10.0 * f.beds() * share + 1.0);
        counts[static_cast<std::size_t>(c)] = std::llround(n);
        total += counts[static_cast<std::size_t>(c)];
      }
      for (int c = 0; c < nc; ++c) {
        auto n = counts[static_cast<std::size_t>(c)];
        if (n > 0 && static_cast<double>(n) >= 0.01 * static_cast<double>(total))
          out << f.id << "," << county_of(static_cast<std::size_t>(c)) << "," << n << "\n";
      }
    }
  }

  const std::array<std::string, 3> ages = {"<50", "50-64", "65+"};
  {
    auto out = open(dir / BundleFiles::kCommunityTransitions);
    out << "county,age_group,departure_probability,unc,large,small,ltach,nh\n";
    const std::array<double, 3> departure = {0.00015, 0.0004, 0.0012};
    for (int c = 0; c < nc; ++c)
      for (std::size_t a = 0; a < 3; ++a) {
        double nh = a == 2 ? 0.08 : 0.0;
        out << county_of(static_cast<std::size_t>(c)) << "," << ages[a] << ","
            << format_double(departure[a]) << "," << prob_row({0.25, 0.40, 0.25, 0.02, nh}) << "\n";
      }
  }
  {
    // STACH-to-STACH mass carries the transfer splits: UNC keeps 90% within UNC and
    // splits the rest evenly; non-UNC sends 3.22% to UNC and splits the remainder
    // 0.8/0.2 (from large) or 0.9/0.1 (from small).
    auto out = open(dir / BundleFiles::kLocationTransitions);
    out << "county,age_group,source,community,unc,large,small,ltach,nh\n";
    const double stach_mass = 0.08;
    for (int c = 0; c < nc; ++c)
      for (std::size_t a = 0; a < 3; ++a) {
        const bool old = a == 2;
        const auto county = county_of(static_cast<std::size_t>(c));
        for (const auto& f : fac) {
          if (!is_stach(f.category)) continue;
          double unc, large, small;
          if (f.category == FacilityCategory::UNC) {
            unc = 0.90 * stach_mass;
            large = small = 0.05 * stach_mass;
          } else {
            unc = 0.0322 * stach_mass;
            double rest = stach_mass - unc;
            double to_large = f.category == FacilityCategory::LargeNonUNC ? 0.8 : 0.9;
            large = to_large * rest;
            small = (1.0 - to_large) * rest;
          }
          out << county << "," << ages[a] << "," << f.id << ","
              << prob_row({old ? 0.84 : 0.90, unc, large, small, 0.02, old ? 0.06 : 0.0}) << "\n";
        }
        out << county << "," << ages[a] << ",LTACH,"
            << prob_row({0.60, 0.10, 0.15, 0.05, 0.0, old ? 0.10 : 0.0}) << "\n";
        out << county << "," << ages[a] << ",NH,"
            << prob_row({0.70, 0.08, 0.12, 0.08, 0.02, 0.0}) << "\n";
      }
  }

  {
    // NH stays mix short rehabilitation stays with long-term residence.
    std::map<int, std::int64_t> los;
    for (int d = 1; d <= 2000; ++d) {
      double density = 0.6 * std::exp(-d / 25.0) / 25.0 + 0.4 * std::exp(-d / 400.0) / 400.0;
      auto n = std::llround(1e5 * density);
      if (n > 0) los[d] = n;
    }
    auto out = open(dir / BundleFiles::kNhLos);
    out << "los_days,count\n";
    for (auto [d, n] : los) out << d << "," << n << "\n";
    // Residual stay of a resident met at a random time: P(remaining = r) ~ P(LOS >= r).
    auto rem = open(dir / BundleFiles::kNhRemaining);
    rem << "days,count\n";
    std::int64_t tail = 0;
    std::map<int, std::int64_t> remaining;
    for (auto it = los.rbegin(); it != los.rend(); ++it) {
      tail += it->second;
      remaining[it->first] = tail;
    }
    for (auto [d, n] : remaining) rem << d << "," << n << "\n";
  }
  {
    auto out = open(dir / BundleFiles::kLosGamma);
    out << "facility_id,shape,scale\n";
    for (const auto& f : fac) {
      if (is_stach(f.category)) out << f.id << ",2,2.5\n";
      if (f.category == FacilityCategory::LTACH) out << f.id << ",2,12.5\n";
    }
  }
  {
    // Two waves; the second is still growing on the last day. About 2% of the
    // population is reported over the series.
    auto out = open(dir / BundleFiles::kCases);
    out << "date,county,new_cases\n";
    const int days = spec.case_days;
    std::vector<double> curve(static_cast<std::size_t>(days));
    for (int t = 0; t < days; ++t) {
      auto gauss = [&](double mu, double sd) { return std::exp(-0.5 * std::pow((t - mu) / sd, 2)); };
      curve[static_cast<std::size_t>(t)] = 0.6 * gauss(0.55 * days, 0.12 * days) + gauss(1.1 * days, 0.2 * days);
    }
    double curve_sum = std::accumulate(curve.begin(), curve.end(), 0.0);
    const double reported_total = 0.02 * spec.reference_population;
    auto start = parse_date(spec.case_start);
    for (int c = 0; c < nc; ++c) {
      double share = static_cast<double>(real_pop[static_cast<std::size_t>(c)]) / spec.reference_population;
      for (int t = 0; t < days; ++t) {
        double mean = reported_total * share * curve[static_cast<std::size_t>(t)] / curve_sum;
        long long n = mean > 0 ? std::poisson_distribution<long long>(mean)(rng) : 0;
        out << format_date(start + std::chrono::days(t)) << "," << county_of(static_cast<std::size_t>(c))
            << "," << n << "\n";
      }
    }
  }
  {
    std::map<std::string, std::string> params;
    params["population_scale"] =
        format_double(static_cast<double>(spec.n_agents) / spec.reference_population);
    write_key_value_file(dir / BundleFiles::kParams, params);
  }
}

}  // namespace hospsim
