#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hospsim/ingest.hpp"
#include "hospsim/parameters.hpp"
#include "hospsim/rng.hpp"

namespace hospsim {

// Collects non-fatal numeric adjustments (clamps, substitutions) for the caller to report.
struct WarningLog {
  std::vector<std::string> messages;
  void warn(std::string message) { messages.push_back(std::move(message)); }
  bool empty() const { return messages.empty(); }
};

// Day-indexed compartment fractions for one county. The last index is Day 0.
struct SeirCountyState {
  CountyCode county = 0;
  std::int64_t population = 0;
  std::vector<double> S, E, I, R;
  double beta = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;

  std::size_t days() const { return S.size(); }
  double s() const { return S.back(); }
  double e() const { return E.back(); }
  double i() const { return I.back(); }
  double r() const { return R.back(); }
};

// Rebuilds S/E/I/R from reported cases. A county with no cases starts Day 0 with one
// infected person (I = 1/population) when seed_empty_county is set.
SeirCountyState reconstruct_history(const std::vector<double>& daily_cases, CountyCode county,
                                    std::int64_t population, const SeirParameters& params,
                                    bool seed_empty_county = true);

// Sets Day-0 S to percent_susceptible, moving the difference to or from R.
void rescale_susceptible(SeirCountyState& state, double percent_susceptible,
                         WarningLog* warnings = nullptr);

// Growth-rate estimate of R_e over the trailing window of 7-day-smoothed counts.
double estimate_state_re(const std::vector<double>& daily_cases, const SeirParameters& params,
                         WarningLog* warnings = nullptr);

double county_corrected_re(double input_re, double state_re, double county_re,
                           bool invert = false, WarningLog* warnings = nullptr);

double re_to_r0(double re, double susceptible_fraction);

struct CountyForecast {
  CountyCode county = 0;
  std::int64_t population = 0;
  // Index d-1 holds day d.
  std::vector<double> new_infections_total;
  std::vector<double> new_cases_reported;
  // Compartments after each day, index 0 = Day 0.
  std::vector<double> S, E, I, R;
  double re = 0.0;
  double r0 = 0.0;
  double beta = 0.0;
  // Day-0 share of ever-infected people still infectious, before rescaling.
  double active_share = 0.0;
};

// Forward-Euler daily steps from the Day-0 compartments.
CountyForecast forecast(const SeirCountyState& state, double r0, int days,
                        double case_multiplier);

struct Forecast {
  double input_re = 0.0;
  double state_re = 1.0;
  int days = 0;
  std::map<CountyCode, CountyForecast> counties;
  std::vector<std::string> warnings;
};

// Runs the whole county pipeline: reconstruction, rescaling, county-corrected R_e and the
// forecast. An all-zero statewide series gives an all-zero forecast.
Forecast forecast_state(const CaseSeries& cases,
                        const std::map<CountyCode, std::int64_t>& populations,
                        const SeirParameters& params, double input_re);

// Bounds of a named R_e band: low, mid or high.
std::array<double, 2> re_band(const SeirParameters& params, const std::string& name);
double sample_re(const std::array<double, 2>& band, Rng& rng);

// county,day,new_infections_total,new_cases_reported
void write_forecast_csv(const std::filesystem::path& path, const Forecast& forecast);
// Reads a forecast file; only the columns above are used.
Forecast read_forecast_csv(const std::filesystem::path& path);

// Converts real-valued daily counts to integers whose running totals stay within 0.5
// of the scaled real running totals.
std::vector<long long> integer_targets(const std::vector<double>& daily, double scale);

}  // namespace hospsim
