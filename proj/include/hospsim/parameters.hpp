#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hospsim/world.hpp"

namespace hospsim {

using AgeArray = std::array<double, kAgeGroupCount>;

// Probability of COVID-19 hospitalization indexed by (tested, comorbidity, age group).
struct HospProbTable {
  // cells[tested][comorbid][age]
  std::array<std::array<AgeArray, 2>, 2> cells{};

  double at(bool tested, bool comorbid, AgeGroup age) const {
    return cells[tested ? 1 : 0][comorbid ? 1 : 0][index(age)];
  }
  double& at(bool tested, bool comorbid, AgeGroup age) {
    return cells[tested ? 1 : 0][comorbid ? 1 : 0][index(age)];
  }

  // The 12 shipping defaults.
  static HospProbTable defaults();

  bool operator==(const HospProbTable&) const = default;
};

struct SeirParameters {
  double case_multiplier = 10.0;
  double percent_susceptible = 0.90;
  double length_of_infection = 6.0;
  double length_of_exposure = 5.0;
  // Bands the input R_e must fall in when sampled.
  std::vector<std::array<double, 2>> re_bands = {{1.0, 1.2}, {1.2, 1.4}, {1.4, 1.6}};
  int re_window_days = 14;
  int forecast_days = 30;
  // Uses county/state instead of the printed state/county ratio.
  bool invert_county_correction = false;
};

struct CovidParameters {
  double los_mean = 3.0;
  double los_std = 5.0;
  double los_min = 0.0;
  double los_max = 50.0;
  int infection_duration = 14;
  double ratio_to_hospital = 0.0;
  double p_tested = 0.1;
  double icu_with_ventilator_p = 0.75;
  double initial_case_multiplier = 10.0;
  double hospital_to_nh_non_icu = 0.1;
  double hospital_to_nh_icu = 0.2;
  double prop_hospitalized_to_icu = 0.25;
  AgeArray ages_get_covid = {0.396, 0.328, 0.276};
  HospProbTable hospitalization = HospProbTable::defaults();
  // Statewide Day-0 COVID census before population scaling.
  double day0_census_target = 1000.0;
  double day0_radius_miles = 60.0;
};

// Proportions of STACH-to-STACH moves by STACH type.
struct TransferSplits {
  double large_to_large = 0.8;
  double large_to_small = 0.2;
  double small_to_large = 0.9;
  double small_to_small = 0.1;
  double non_unc_to_unc = 0.0322;
  double unc_to_unc = 0.90;
};

struct IcuModel {
  double intercept = -2.0;
  AgeArray age = {0.0, 0.3, 0.5};
  double comorbidity = 0.5;
  double los = 0.05;
};

struct GammaLos {
  double shape = 2.0;
  double scale = 2.5;
};

struct Parameters {
  CovidParameters covid;
  SeirParameters seir;
  TransferSplits transfers;
  IcuModel icu;

  // Daily death probability by age group; multiplied by the facility-category multiplier.
  AgeArray death_probability = {2.7e-6, 2.0e-5, 1.1e-4};
  std::array<double, kCategoryCount> death_multiplier = {1.0, 12.0, 12.0, 12.0, 10.0, 3.0};
  AgeArray comorbidity_prevalence = {0.0, 0.30, 0.50};

  GammaLos stach_los;
  GammaLos ltach_los = {2.0, 12.5};

  double population_scale = 1.0;
  std::size_t population_target = 0;  // 0 keeps the source population size

  double nh_ltach_initial_fill = 0.70;
  double stach_non_icu_initial_fill = 0.65;
  double stach_icu_initial_fill = 0.54;
  AgeArray stach_seed_age_weights = {0.40, 0.20, 0.40};
  int remaining_los_cohort = 2000;

  double nh_return_probability = 0.8;
  // Relative importance of bed count and proximity in the large-STACH fallback draw.
  double large_fallback_bed_weight = 0.5;
  double large_fallback_distance_weight = 0.5;
  double transfer_radius_miles = 200.0;

  bool readmission_enabled = false;
  double readmission_probability = 0.10;
  int readmission_window_days = 30;

  int recreate_interval_days = 15;

  // Throws ConfigError naming the first out-of-range value.
  void validate() const;

  // Applies one key/value pair; throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  // Canonical key=value rendering, sorted by key.
  std::map<std::string, std::string> to_map() const;
};

// Reads "key = value" lines ('#' starts a comment). Throws ParseError.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);
void write_key_value_file(const std::filesystem::path& path,
                          const std::map<std::string, std::string>& values);

// Applies every key it recognizes to params and returns the ones it did not.
std::map<std::string, std::string> apply_parameters(
    Parameters& params, const std::map<std::string, std::string>& values);

std::string format_double(double v);

}  // namespace hospsim
