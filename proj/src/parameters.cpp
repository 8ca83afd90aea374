#include "hospsim/parameters.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

#include "hospsim/errors.hpp"
#include "text.hpp"

namespace hospsim {

HospProbTable HospProbTable::defaults() {
  HospProbTable t;
  // [tested][comorbid][age]
  t.cells[1][1] = {0.0, 0.4609, 0.411};
  t.cells[1][0] = {0.0367, 0.035, 0.1213};
  t.cells[0][1] = {0.0, 0.0651, 0.058};
  t.cells[0][0] = {0.0052, 0.0049, 0.0171};
  return t;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

using Field = std::variant<double*, int*, bool*, std::size_t*, AgeArray*>;

std::vector<std::pair<std::string, Field>> fields(Parameters& p) {
  std::vector<std::pair<std::string, Field>> f = {
      {"los_mean", &p.covid.los_mean},
      {"los_std", &p.covid.los_std},
      {"los_min", &p.covid.los_min},
      {"los_max", &p.covid.los_max},
      {"infection_duration", &p.covid.infection_duration},
      {"ratio_to_hospital", &p.covid.ratio_to_hospital},
      {"p_tested", &p.covid.p_tested},
      {"icu_with_ventilator_p", &p.covid.icu_with_ventilator_p},
      {"initial_case_multiplier", &p.covid.initial_case_multiplier},
      {"hospital_to_nh_non_icu", &p.covid.hospital_to_nh_non_icu},
      {"hospital_to_nh_icu", &p.covid.hospital_to_nh_icu},
      {"prop_hospitalized_to_icu", &p.covid.prop_hospitalized_to_icu},
      {"ages_get_covid", &p.covid.ages_get_covid},
      {"p_covidhospitalized_tested_concurrent", &p.covid.hospitalization.cells[1][1]},
      {"p_covidhospitalized_tested_notconcurrent", &p.covid.hospitalization.cells[1][0]},
      {"p_covidhospitalized_nottested_concurrent", &p.covid.hospitalization.cells[0][1]},
      {"p_covidhospitalized_nottested_notconcurrent", &p.covid.hospitalization.cells[0][0]},
      {"day0_census_target", &p.covid.day0_census_target},
      {"day0_radius_miles", &p.covid.day0_radius_miles},
      {"seir_case_multiplier", &p.seir.case_multiplier},
      {"seir_percent_susceptible", &p.seir.percent_susceptible},
      {"seir_length_of_infection", &p.seir.length_of_infection},
      {"seir_length_of_exposure", &p.seir.length_of_exposure},
      {"seir_re_window_days", &p.seir.re_window_days},
      {"seir_forecast_days", &p.seir.forecast_days},
      {"seir_invert_county_correction", &p.seir.invert_county_correction},
      {"large_to_large", &p.transfers.large_to_large},
      {"large_to_small", &p.transfers.large_to_small},
      {"small_to_large", &p.transfers.small_to_large},
      {"small_to_small", &p.transfers.small_to_small},
      {"non_unc_to_unc", &p.transfers.non_unc_to_unc},
      {"unc_to_unc", &p.transfers.unc_to_unc},
      {"icu_intercept", &p.icu.intercept},
      {"icu_age", &p.icu.age},
      {"icu_comorbidity", &p.icu.comorbidity},
      {"icu_los", &p.icu.los},
      {"death_probability", &p.death_probability},
      {"death_multiplier_community", &p.death_multiplier[0]},
      {"death_multiplier_unc", &p.death_multiplier[1]},
      {"death_multiplier_large", &p.death_multiplier[2]},
      {"death_multiplier_small", &p.death_multiplier[3]},
      {"death_multiplier_ltach", &p.death_multiplier[4]},
      {"death_multiplier_nh", &p.death_multiplier[5]},
      {"comorbidity_prevalence", &p.comorbidity_prevalence},
      {"stach_los_shape", &p.stach_los.shape},
      {"stach_los_scale", &p.stach_los.scale},
      {"ltach_los_shape", &p.ltach_los.shape},
      {"ltach_los_scale", &p.ltach_los.scale},
      {"population_scale", &p.population_scale},
      {"population_target", &p.population_target},
      {"nh_ltach_initial_fill", &p.nh_ltach_initial_fill},
      {"stach_non_icu_initial_fill", &p.stach_non_icu_initial_fill},
      {"stach_icu_initial_fill", &p.stach_icu_initial_fill},
      {"stach_seed_age_weights", &p.stach_seed_age_weights},
      {"remaining_los_cohort", &p.remaining_los_cohort},
      {"nh_return_probability", &p.nh_return_probability},
      {"large_fallback_bed_weight", &p.large_fallback_bed_weight},
      {"large_fallback_distance_weight", &p.large_fallback_distance_weight},
      {"transfer_radius_miles", &p.transfer_radius_miles},
      {"readmission_enabled", &p.readmission_enabled},
      {"readmission_probability", &p.readmission_probability},
      {"readmission_window_days", &p.readmission_window_days},
      {"recreate_interval_days", &p.recreate_interval_days},
  };
  return f;
}

double parse_double_or_throw(const std::string& key, std::string_view text) {
  auto v = detail::parse_double(text);
  if (!v) throw ConfigError("parameter " + key + ": not a number: '" + std::string(text) + "'");
  return *v;
}

std::string render(const Field& field) {
  return std::visit(
      [](auto* ptr) -> std::string {
        using T = std::remove_pointer_t<decltype(ptr)>;
        if constexpr (std::is_same_v<T, bool>) {
          return *ptr ? "true" : "false";
        } else if constexpr (std::is_same_v<T, AgeArray>) {
          return format_double((*ptr)[0]) + "," + format_double((*ptr)[1]) + "," +
                 format_double((*ptr)[2]);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(*ptr);
        } else {
          return std::to_string(*ptr);
        }
      },
      field);
}

void assign(const std::string& key, const Field& field, const std::string& value) {
  std::visit(
      [&](auto* ptr) {
        using T = std::remove_pointer_t<decltype(ptr)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1" || value == "yes")
            *ptr = true;
          else if (value == "false" || value == "0" || value == "no")
            *ptr = false;
          else
            throw ConfigError("parameter " + key + ": not a boolean: '" + value + "'");
        } else if constexpr (std::is_same_v<T, AgeArray>) {
          auto parts = detail::split(value, ',');
          if (parts.size() != kAgeGroupCount)
            throw ConfigError("parameter " + key + ": expected 3 comma-separated values");
          for (std::size_t i = 0; i < kAgeGroupCount; ++i)
            (*ptr)[i] = parse_double_or_throw(key, detail::trim(parts[i]));
        } else if constexpr (std::is_same_v<T, double>) {
          *ptr = parse_double_or_throw(key, value);
        } else {
          auto v = detail::parse_int(value);
          if (!v || (*v < 0 && std::is_same_v<T, std::size_t>))
            throw ConfigError("parameter " + key + ": not an integer: '" + value + "'");
          *ptr = static_cast<T>(*v);
        }
      },
      field);
}

void check_probability(const std::string& name, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError("parameter " + name + " must be a probability in [0,1], got " +
                      format_double(p));
}

}  // namespace

void Parameters::set(const std::string& key, const std::string& value) {
  for (auto& [name, field] : fields(*this)) {
    if (name == key) {
      assign(key, field, value);
      return;
    }
  }
  throw ConfigError("unknown parameter '" + key + "'");
}

std::map<std::string, std::string> Parameters::to_map() const {
  std::map<std::string, std::string> out;
  auto& self = const_cast<Parameters&>(*this);
  for (auto& [name, field] : fields(self)) out[name] = render(field);
  return out;
}

void Parameters::validate() const {
  const auto& c = covid;
  for (auto [name, p] : std::initializer_list<std::pair<const char*, double>>{
           {"ratio_to_hospital", c.ratio_to_hospital},
           {"p_tested", c.p_tested},
           {"icu_with_ventilator_p", c.icu_with_ventilator_p},
           {"hospital_to_nh_non_icu", c.hospital_to_nh_non_icu},
           {"hospital_to_nh_icu", c.hospital_to_nh_icu},
           {"prop_hospitalized_to_icu", c.prop_hospitalized_to_icu},
           {"seir_percent_susceptible", seir.percent_susceptible},
           {"large_to_large", transfers.large_to_large},
           {"large_to_small", transfers.large_to_small},
           {"small_to_large", transfers.small_to_large},
           {"small_to_small", transfers.small_to_small},
           {"non_unc_to_unc", transfers.non_unc_to_unc},
           {"unc_to_unc", transfers.unc_to_unc},
           {"nh_ltach_initial_fill", nh_ltach_initial_fill},
           {"stach_non_icu_initial_fill", stach_non_icu_initial_fill},
           {"stach_icu_initial_fill", stach_icu_initial_fill},
           {"nh_return_probability", nh_return_probability},
           {"readmission_probability", readmission_probability}}) {
    check_probability(name, p);
  }
  for (std::size_t g = 0; g < kAgeGroupCount; ++g) {
    check_probability("ages_get_covid", c.ages_get_covid[g]);
    check_probability("death_probability", death_probability[g]);
    check_probability("comorbidity_prevalence", comorbidity_prevalence[g]);
    check_probability("stach_seed_age_weights", stach_seed_age_weights[g]);
    for (int t = 0; t < 2; ++t)
      for (int m = 0; m < 2; ++m) check_probability("p_covidhospitalized", c.hospitalization.cells[t][m][g]);
  }
  for (double m : death_multiplier)
    if (m < 0.0) throw ConfigError("death multipliers must be non-negative");
  if (!(c.los_min <= c.los_mean && c.los_mean <= c.los_max))
    throw ConfigError("los_min <= los_mean <= los_max violated");
  if (!(c.los_std >= 0.0)) throw ConfigError("los_std must be non-negative");
  if (!(population_scale > 0.0 && population_scale <= 1.0))
    throw ConfigError("population_scale must be in (0,1], got " + format_double(population_scale));
  if (c.infection_duration < 1) throw ConfigError("infection_duration must be >= 1");
  if (!(seir.case_multiplier > 0.0)) throw ConfigError("seir_case_multiplier must be > 0");
  if (!(seir.length_of_infection > 0.0 && seir.length_of_exposure > 0.0))
    throw ConfigError("SEIR lengths must be > 0");
  for (auto g : {stach_los, ltach_los})
    if (!(g.shape > 0.0 && g.scale > 0.0)) throw ConfigError("gamma LOS shape/scale must be > 0");
  if (recreate_interval_days < 1) throw ConfigError("recreate_interval_days must be >= 1");
  if (readmission_window_days < 1) throw ConfigError("readmission_window_days must be >= 1");
  if (remaining_los_cohort < 1) throw ConfigError("remaining_los_cohort must be >= 1");
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto t = detail::trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(path.string(), lineno, "expected 'key = value'");
    auto key = std::string(detail::trim(t.substr(0, eq)));
    if (key.empty()) throw ParseError(path.string(), lineno, "empty key");
    out[key] = std::string(detail::trim(t.substr(eq + 1)));
  }
  return out;
}

void write_key_value_file(const std::filesystem::path& path,
                          const std::map<std::string, std::string>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& [k, v] : values) out << k << " = " << v << "\n";
}

std::map<std::string, std::string> apply_parameters(
    Parameters& params, const std::map<std::string, std::string>& values) {
  std::map<std::string, std::string> rest;
  const auto known = params.to_map();
  for (const auto& [k, v] : values) {
    if (known.contains(k))
      params.set(k, v);
    else
      rest.emplace(k, v);
  }
  return rest;
}

}  // namespace hospsim
