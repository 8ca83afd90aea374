#include "hospsim/seir.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hospsim/errors.hpp"
#include "text.hpp"

namespace hospsim {

SeirCountyState reconstruct_history(const std::vector<double>& daily_cases, CountyCode county,
                                    std::int64_t population, const SeirParameters& params,
                                    bool seed_empty_county) {
  if (population <= 0)
    throw InputError("county " + std::to_string(county) + ": population must be positive");
  if (daily_cases.empty())
    throw InputError("county " + std::to_string(county) + ": empty case series");
  const auto pop = static_cast<double>(population);
  const double gamma = 1.0 / params.length_of_infection;
  const auto le = static_cast<std::size_t>(std::max(1L, std::lround(params.length_of_exposure)));
  const std::size_t K = daily_cases.size();

  // New infections as population fractions, capped so nobody is infected twice.
  std::vector<double> n(K);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    double x = std::max(0.0, daily_cases[k]) * params.case_multiplier / pop;
    x = std::min(x, 1.0 - cumulative);
    n[k] = x;
    cumulative += x;
  }

  SeirCountyState st;
  st.county = county;
  st.population = population;
  st.gamma = gamma;
  st.sigma = 1.0 / params.length_of_exposure;
  st.S.resize(K);
  st.E.resize(K);
  st.I.resize(K);
  st.R.resize(K);

  for (std::size_t k = 0; k < K; ++k) {
    double prev_i = k ? st.I[k - 1] : 0.0;
    double prev_r = k ? st.R[k - 1] : 0.0;
    st.I[k] = prev_i - gamma * prev_i + n[k];
    st.R[k] = prev_r + gamma * prev_i;
  }

  if (cumulative == 0.0 && seed_empty_county) st.I[K - 1] = 1.0 / pop;

  // Exposed people on day j are the ones who become infectious over the next le days.
  // Beyond the series the recent mean daily count stands in for unknown days.
  double tail = 0.0;
  for (std::size_t k = K - std::min(K, le); k < K; ++k) tail += n[k];
  tail /= static_cast<double>(std::min(K, le));
  for (std::size_t j = 0; j < K; ++j) {
    double e = 0.0;
    for (std::size_t m = j + 1; m <= j + le; ++m) e += m < K ? n[m] : tail;
    st.E[j] = std::clamp(e, 0.0, std::max(0.0, 1.0 - st.I[j] - st.R[j]));
    st.S[j] = 1.0 - (st.E[j] + st.I[j] + st.R[j]);
    if (st.S[j] < 0.0) st.S[j] = 0.0;
  }
  return st;
}

void rescale_susceptible(SeirCountyState& state, double percent_susceptible,
                         WarningLog* warnings) {
  auto k = state.days() - 1;
  double r = state.R[k] + (state.S[k] - percent_susceptible);
  double s = percent_susceptible;
  if (r < 0.0) {
    if (warnings)
      warnings->warn("county " + std::to_string(state.county) +
                     ": recovered fraction would go negative when rescaling; clamped at 0");
    r = 0.0;
    s = 1.0 - state.E[k] - state.I[k];
  }
  state.S[k] = s;
  state.R[k] = r;
}

double estimate_state_re(const std::vector<double>& daily_cases, const SeirParameters& params,
                         WarningLog* warnings) {
  const auto window = static_cast<std::size_t>(params.re_window_days);
  if (window < 2) throw InputError("R_e window must be at least 2 days");
  if (daily_cases.size() < window)
    throw InputError("R_e estimation needs " + std::to_string(window) + " days of cases, got " +
                     std::to_string(daily_cases.size()));
  const std::size_t K = daily_cases.size();

  std::vector<double> xs, ys;
  for (std::size_t k = K - window; k < K; ++k) {
    std::size_t lo = k >= 6 ? k - 6 : 0;
    double sum = 0.0;
    for (std::size_t j = lo; j <= k; ++j) sum += daily_cases[j];
    double smooth = sum / static_cast<double>(k - lo + 1);
    if (smooth > 0.0) {
      xs.push_back(static_cast<double>(k));
      ys.push_back(std::log(smooth));
    }
  }
  if (xs.size() < 2) {
    if (warnings) warnings->warn("no cases in the R_e window; using R_e = 1");
    return 1.0;
  }
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  double r = sxy / sxx;
  double a = 1.0 + r * params.length_of_exposure;
  double b = 1.0 + r * params.length_of_infection;
  if (a <= 0.0 || b <= 0.0) {
    if (warnings) warnings->warn("case decline too steep for the growth-rate conversion");
    return std::numeric_limits<double>::min();
  }
  return a * b;
}

double county_corrected_re(double input_re, double state_re, double county_re, bool invert,
                           WarningLog* warnings) {
  if (!(input_re > 0.0) || !(state_re > 0.0))
    throw DomainError("R_e values must be positive");
  if (!(county_re > 0.0)) {
    if (warnings) warnings->warn("county R_e not positive; using the state R_e");
    county_re = state_re;
  }
  return invert ? input_re * county_re / state_re : input_re * state_re / county_re;
}

double re_to_r0(double re, double susceptible_fraction) {
  if (!(susceptible_fraction > 0.0 && susceptible_fraction <= 1.0))
    throw DomainError("susceptible fraction must be in (0,1], got " +
                      format_double(susceptible_fraction));
  return re / susceptible_fraction;
}

CountyForecast forecast(const SeirCountyState& state, double r0, int days,
                        double case_multiplier) {
  if (days < 0) throw InputError("forecast days must be non-negative");
  CountyForecast f;
  f.county = state.county;
  f.population = state.population;
  f.r0 = r0;
  f.beta = r0 * state.gamma;
  double s = state.s(), e = state.e(), i = state.i(), r = state.r();
  f.S = {s};
  f.E = {e};
  f.I = {i};
  f.R = {r};
  const auto pop = static_cast<double>(state.population);
  for (int d = 0; d < days; ++d) {
    double new_e = std::clamp(f.beta * s * i, 0.0, s);
    double to_i = std::min(state.sigma * e, e);
    double to_r = std::min(state.gamma * i, i);
    s -= new_e;
    e += new_e - to_i;
    i += to_i - to_r;
    r += to_r;
    s = std::max(s, 0.0);
    e = std::max(e, 0.0);
    i = std::max(i, 0.0);
    f.S.push_back(s);
    f.E.push_back(e);
    f.I.push_back(i);
    f.R.push_back(r);
    double total = to_i * pop;
    f.new_infections_total.push_back(total);
    f.new_cases_reported.push_back(total / case_multiplier);
  }
  return f;
}

Forecast forecast_state(const CaseSeries& cases,
                        const std::map<CountyCode, std::int64_t>& populations,
                        const SeirParameters& params, double input_re) {
  if (!(input_re > 0.0)) throw DomainError("input R_e must be positive");
  WarningLog log;
  Forecast out;
  out.input_re = input_re;
  out.days = params.forecast_days;

  auto statewide = cases.statewide();
  const bool any_cases =
      std::any_of(statewide.begin(), statewide.end(), [](double v) { return v > 0.0; });
  if (cases.days == 0) throw InputError("case series is empty");
  out.state_re = any_cases ? estimate_state_re(statewide, params, &log) : 1.0;

  for (const auto& [county, pop] : populations) {
    auto series = cases.county(county);
    auto st = reconstruct_history(series, county, pop, params, any_cases);
    double ir = st.i() + st.r();
    double active = ir > 0.0 ? st.i() / ir : 0.0;
    rescale_susceptible(st, params.percent_susceptible, &log);

    double re = input_re;
    if (any_cases) {
      WarningLog county_log;
      double county_re = estimate_state_re(series, params, &county_log);
      re = county_corrected_re(input_re, out.state_re, county_re, params.invert_county_correction,
                               &log);
    }
    double r0 = re_to_r0(re, st.s());
    auto f = forecast(st, r0, params.forecast_days, params.case_multiplier);
    f.re = re;
    f.active_share = active;
    out.counties.emplace(county, std::move(f));
  }
  out.warnings = std::move(log.messages);
  return out;
}

std::array<double, 2> re_band(const SeirParameters& params, const std::string& name) {
  std::size_t i = name == "low" ? 0 : name == "mid" ? 1 : name == "high" ? 2 : 99;
  if (i >= params.re_bands.size()) throw InputError("unknown R_e band '" + name + "'");
  return params.re_bands[i];
}

double sample_re(const std::array<double, 2>& band, Rng& rng) {
  return band[0] + (band[1] - band[0]) * uniform01(rng);
}

void write_forecast_csv(const std::filesystem::path& path, const Forecast& forecast) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "county,day,new_infections_total,new_cases_reported\n";
  for (const auto& [county, f] : forecast.counties)
    for (std::size_t d = 0; d < f.new_infections_total.size(); ++d)
      out << county << "," << d + 1 << "," << format_double(f.new_infections_total[d]) << ","
          << format_double(f.new_cases_reported[d]) << "\n";
}

Forecast read_forecast_csv(const std::filesystem::path& path) {
  detail::CsvReader r(path);
  const auto c_county = r.column("county"), c_day = r.column("day"),
             c_total = r.column("new_infections_total"), c_rep = r.column("new_cases_reported");
  Forecast out;
  std::vector<std::string> f;
  while (r.read(f)) {
    auto county = static_cast<CountyCode>(r.integer(f, c_county));
    auto day = r.integer(f, c_day);
    double total = r.number(f, c_total), reported = r.number(f, c_rep);
    if (day < 1) r.fail("forecast days start at 1");
    if (total < 0 || reported < 0) r.fail("negative forecast value");
    auto& cf = out.counties[county];
    cf.county = county;
    auto idx = static_cast<std::size_t>(day - 1);
    if (cf.new_infections_total.size() <= idx) {
      cf.new_infections_total.resize(idx + 1, 0.0);
      cf.new_cases_reported.resize(idx + 1, 0.0);
    }
    cf.new_infections_total[idx] = total;
    cf.new_cases_reported[idx] = reported;
    out.days = std::max(out.days, static_cast<int>(day));
  }
  for (auto& [c, cf] : out.counties) {
    cf.new_infections_total.resize(static_cast<std::size_t>(out.days), 0.0);
    cf.new_cases_reported.resize(static_cast<std::size_t>(out.days), 0.0);
  }
  return out;
}

std::vector<long long> integer_targets(const std::vector<double>& daily, double scale) {
  std::vector<long long> out;
  out.reserve(daily.size());
  double cum = 0.0;
  long long prev = 0;
  for (double v : daily) {
    cum += v * scale;
    long long now = std::llround(cum);
    out.push_back(std::max(0LL, now - prev));
    prev = std::max(prev, now);
  }
  return out;
}

}  // namespace hospsim
