#include "hospsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <thread>

#include "hospsim/errors.hpp"

namespace hospsim {

namespace {

std::uint64_t hash_file(const std::filesystem::path& p, std::uint64_t h) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return h;
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a(bytes, fnv1a(p.filename().string(), h));
}

std::string hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

}  // namespace

std::string config_fingerprint(const RunConfig& config, const std::filesystem::path& bundle_dir) {
  std::ostringstream out;
  for (const auto& [k, v] : config.params.to_map()) out << k << "=" << v << "\n";
  out << "horizon=" << config.horizon << "\n";
  out << "covid=" << (config.covid ? "true" : "false") << "\n";
  out << "input_re=" << format_double(config.input_re) << "\n";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  if (config.forecast_path) h = hash_file(*config.forecast_path, h);
  out << "forecast=" << hex(h) << "\n";
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(bundle_dir))
    for (const auto& e : std::filesystem::directory_iterator(bundle_dir))
      if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::uint64_t b = 0xcbf29ce484222325ULL;
  for (const auto& f : files) b = hash_file(f, b);
  out << "bundle=" << hex(b) << "\n";
  return out.str();
}

std::string config_hash(const RunConfig& config, const std::filesystem::path& bundle_dir) {
  return hex(fnv1a(config_fingerprint(config, bundle_dir)));
}

// ---------------------------------------------------------------------------

Simulation::Simulation(RunConfig config, Bundle bundle)
    : config_(std::move(config)), bundle_(std::move(bundle)), streams_(config_.seed) {
  config_.params.validate();
  if (config_.horizon < 0) throw ConfigError("horizon must be non-negative");
  death_rng_ = &streams_["death"];
  community_rng_ = &streams_["community"];
  routing_rng_ = &streams_["routing"];
  los_rng_ = &streams_["los"];
  covid_rng_ = &streams_["covid"];
  recovery_rng_ = &streams_["recovery"];
  readmission_rng_ = &streams_["readmission"];
  los_ = LosTable(bundle_.los_gamma, config_.params.stach_los, config_.params.ltach_los,
                  bundle_.nh_los);
}

int Simulation::remaining_los(const Facility& f, Rng& rng) {
  if (f.category() == FacilityCategory::NH && bundle_.nh_los.remaining)
    return std::max(1, bundle_.nh_los.remaining->sample(rng));
  std::string key;
  if (f.category() == FacilityCategory::NH) {
    key = "nh";
  } else {
    const auto& g = los_.gamma_for(f);
    key = "gamma:" + format_double(g.shape) + ":" + format_double(g.scale);
  }
  auto it = remaining_cache_.find(key);
  if (it == remaining_cache_.end()) {
    Rng sim_rng = make_stream(config_.seed, "remaining-los:" + key);
    auto draw = [&] { return sample_los(f, los_, sim_rng); };
    it = remaining_cache_.emplace(key, remaining_los_sampler(draw, config_.params.remaining_los_cohort)).first;
  }
  const auto& pool = it->second.pool;
  if (pool.empty()) return 1;
  return pool[uniform_index(rng, pool.size())];
}

BedNeed Simulation::non_covid_need(const Agent& a, int los, const Facility& f, Rng& rng) const {
  if (!is_stach(f.category())) return BedNeed::NonICU;
  return bernoulli(rng, icu_probability(a, los, config_.params.icu)) ? BedNeed::ICU : BedNeed::NonICU;
}

void Simulation::initialize() {
  if (initialized_) throw StateError("simulation already initialized");
  const auto& p = config_.params;
  Rng& init = streams_["init"];

  world_.day = 0;
  world_.stage = Stage::Init;
  world_.facilities = bundle_.facilities;
  for (auto& f : world_.facilities) f.scale_beds(p.population_scale);

  const auto& rows = bundle_.population.rows;
  world_.agents.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Agent a;
    a.id = static_cast<AgentId>(i);
    a.age_years = rows[i].age_years;
    a.age_group = bin_age(rows[i].age_years);
    a.county = rows[i].county;
    a.sex = rows[i].sex;
    a.comorbidity = a.age_group != AgeGroup::Under50 &&
                    bernoulli(init, p.comorbidity_prevalence[index(a.age_group)]);
    world_.agents.push_back(a);
  }
  result_.initial_population = world_.agents.size();
  for (const auto& f : world_.facilities) result_.categories.push_back(f.category());
  router_ = std::make_unique<Router>(world_, bundle_.transitions, bundle_.distances, config_.params);

  seed_facilities(init);
  if (config_.covid) seed_covid();
  initialized_ = true;
  record();
}

void Simulation::seed_facilities(Rng& rng) {
  const auto& p = config_.params;
  // Shuffled per (county, age group) pools of community agents; draws pop from the back.
  std::map<CountyCode, AgePools> pools;
  for (const auto& a : world_.agents) pools[a.county][index(a.age_group)].push_back(a.id);
  for (auto& [c, groups] : pools)
    for (auto& g : groups) shuffle(std::span(g), rng);

  auto place = [&](AgentId id, Facility& f, BedNeed need) {
    if (world_.admit(id, f.id(), need, false, MoveReason::Seed) != AssignResult::Assigned)
      throw InitializationError("facility " + std::to_string(f.id()) + " (" + f.name() +
                                ") has no free bed while seeding");
    world_.agent(id).leave_day = remaining_los(f, rng);
  };

  // NH and LTACH: counties weighted by inverse distance; NH residents are 65 and over.
  for (auto& f : world_.facilities) {
    if (f.category() != FacilityCategory::NH && f.category() != FacilityCategory::LTACH) continue;
    const bool nh = f.category() == FacilityCategory::NH;
    const auto target = std::lround(p.nh_ltach_initial_fill * f.non_icu_beds());
    for (long k = 0; k < target; ++k) {
      std::vector<CountyCode> counties;
      std::vector<double> w;
      for (auto& [c, groups] : pools) {
        bool any = nh ? !groups[2].empty()
                      : !(groups[0].empty() && groups[1].empty() && groups[2].empty());
        auto d = bundle_.distances.distance(c, f.id());
        if (!any || !d) continue;
        counties.push_back(c);
        w.push_back(1.0 / std::max(*d, 1.0));
      }
      if (counties.empty())
        throw InitializationError("not enough eligible agents to seed facility " +
                                  std::to_string(f.id()) + " (" + f.name() + ")");
      auto& groups = pools[counties[weighted_index(w, rng)]];
      std::size_t g = 2;
      if (!nh) {
        std::array<double, 3> sizes = {static_cast<double>(groups[0].size()),
                                       static_cast<double>(groups[1].size()),
                                       static_cast<double>(groups[2].size())};
        g = weighted_index(sizes, rng);
      }
      AgentId id = groups[g].back();
      groups[g].pop_back();
      place(id, f, BedNeed::NonICU);
    }
  }

  // STACHs: age group 40/20/40, then a county of the hospital's discharge table.
  for (auto& f : world_.facilities) {
    if (!is_stach(f.category())) continue;
    long non_icu = std::lround(p.stach_non_icu_initial_fill * f.non_icu_beds());
    long icu = std::lround(p.stach_icu_initial_fill * f.icu_beds());
    if (auto it = bundle_.census.find(f.id()); it != bundle_.census.end()) {
      const auto& row = it->second;
      non_icu = std::lround(std::max(0, row.occupied_non_icu - row.covid_non_icu) * p.population_scale);
      icu = std::lround(std::max(0, row.occupied_icu - row.covid_icu) * p.population_scale);
      non_icu = std::min<long>(non_icu, f.non_icu_beds());
      icu = std::min<long>(icu, f.icu_beds());
    }
    std::vector<CountyCode> source;
    for (const auto& [c, n] : bundle_.transitions.discharges.for_facility(f.id()))
      if (pools.contains(c)) source.push_back(c);
    if (source.empty())
      for (const auto& [c, groups] : pools) source.push_back(c);

    auto draw_agent = [&]() -> AgentId {
      std::array<double, 3> w{};
      for (std::size_t g = 0; g < 3; ++g) {
        bool any = std::any_of(source.begin(), source.end(),
                               [&](CountyCode c) { return !pools[c][g].empty(); });
        w[g] = any ? p.stach_seed_age_weights[g] : 0.0;
      }
      if (w[0] + w[1] + w[2] <= 0.0)
        throw InitializationError("not enough eligible agents to seed facility " +
                                  std::to_string(f.id()) + " (" + f.name() + ")");
      std::size_t g = weighted_index(w, rng);
      std::vector<CountyCode> with;
      for (auto c : source)
        if (!pools[c][g].empty()) with.push_back(c);
      auto& pool = pools[with[uniform_index(rng, with.size())]][g];
      AgentId id = pool.back();
      pool.pop_back();
      return id;
    };
    for (long k = 0; k < non_icu; ++k) place(draw_agent(), f, BedNeed::NonICU);
    for (long k = 0; k < icu; ++k) place(draw_agent(), f, BedNeed::ICU);
  }
}

void Simulation::seed_covid() {
  auto& p = config_.params;
  if (!bundle_.cases && !config_.forecast_path)
    throw InputError("a COVID run needs cases.csv in the bundle or a forecast file");
  p.seir.forecast_days = std::max(p.seir.forecast_days, config_.horizon);

  AgeArray pop{};
  for (const auto& a : world_.agents) pop[index(a.age_group)] += 1.0;
  for (auto& x : pop) x /= static_cast<double>(std::max<std::size_t>(1, world_.agents.size()));
  infection_weights_ = infection_age_weights(p.covid.ages_get_covid, pop);

  Forecast fc;
  if (bundle_.cases) {
    fc = forecast_state(*bundle_.cases, bundle_.county_population, p.seir, config_.input_re);
    result_.warnings = fc.warnings;
  }
  if (config_.forecast_path) {
    auto external = read_forecast_csv(*config_.forecast_path);
    for (auto& [c, f] : fc.counties) {
      f.new_infections_total.clear();
      f.new_cases_reported.clear();
    }
    for (auto& [c, f] : external.counties) {
      fc.counties[c].new_infections_total = f.new_infections_total;
      fc.counties[c].new_cases_reported = f.new_cases_reported;
    }
  }
  for (const auto& [c, f] : fc.counties)
    targets_[c] = integer_targets(f.new_infections_total, p.population_scale);

  if (bundle_.cases) {
    std::map<CountyCode, double> active;
    for (const auto& [c, f] : fc.counties) active[c] = f.active_share;
    result_.day0 = day0_covid_init(world_, *router_, *bundle_.cases, active, bundle_.census,
                                   p.population_scale, infection_weights_, p.covid, *covid_rng_);
  }
}

std::vector<AgentId> Simulation::life_substep() {
  world_.stage = Stage::Life;
  const auto& p = config_.params;
  std::vector<AgentId> living;
  living.reserve(world_.agents.size());
  for (const auto& a : world_.agents)
    if (a.alive) living.push_back(a.id);
  shuffle(std::span(living), *death_rng_);

  std::vector<AgentId> died;
  for (auto id : living) {
    Agent& a = world_.agent(id);
    const auto cat = world_.facility(a.location).category();
    double prob = p.death_probability[index(a.age_group)] * p.death_multiplier[index(cat)];
    if (!bernoulli(*death_rng_, prob)) continue;
    const FacilityId where = a.location;
    if (where != kCommunity) world_.discharge(id, MoveReason::Death);
    a.alive = false;
    a.readmission.reset();
    a.covid_recovery_day.reset();
    world_.log(EventType::Death, id, where, MoveReason::Death);
    dead_.push_back(id);
    died.push_back(id);
  }
  return died;
}

std::vector<AgentId> Simulation::recreate_agents() {
  std::vector<AgentId> created;
  const int interval = config_.params.recreate_interval_days;
  if (world_.day <= 0 || world_.day % interval != 0) return created;
  world_.stage = Stage::Recreate;
  for (auto dead_id : dead_) {
    const Agent src = world_.agent(dead_id);
    Agent a;
    a.id = static_cast<AgentId>(world_.agents.size());
    a.age_years = src.age_years;
    a.age_group = src.age_group;
    a.county = src.county;
    a.sex = src.sex;
    a.comorbidity = src.comorbidity;
    a.created_day = world_.day;
    world_.agents.push_back(a);
    world_.log(EventType::Recreate, a.id, kCommunity, MoveReason::None);
    created.push_back(a.id);
  }
  dead_.clear();
  return created;
}

void Simulation::los_end_stage() {
  world_.stage = Stage::LosEnd;
  const Day day = world_.day;
  std::vector<AgentId> due;
  for (const auto& a : world_.agents)
    if (a.alive && a.location != kCommunity && a.leave_day && *a.leave_day <= day)
      due.push_back(a.id);
  shuffle(std::span(due), *routing_rng_);

  for (auto id : due) {
    Agent& a = world_.agent(id);
    const Facility& current = world_.facility(a.location);
    FacilityId dest = kCommunity;
    const bool from_nh = a.previous_location && *a.previous_location > 0 &&
                         world_.facility(*a.previous_location).category() == FacilityCategory::NH;
    if (is_stach(current.category()) && from_nh && a.age_group == AgeGroup::Over65) {
      dest = router_->choose_specific_facility(a, FacilityCategory::NH, *routing_rng_,
                                               RouteContext::NhReturn);
    } else {
      auto type = router_->choose_transfer_type(a, current, *routing_rng_);
      if (type != FacilityCategory::Community && router_->can_route(a, type))
        dest = router_->choose_specific_facility(a, type, *routing_rng_, RouteContext::Transfer);
    }
    if (dest == kCommunity) {
      const bool from_stach = is_stach(current.category());
      const FacilityId source = current.id();
      world_.discharge(id, MoveReason::Discharge);
      if (from_stach)
        a.readmission = schedule_readmission(a, source, day, config_.params, *readmission_rng_);
      continue;
    }
    const Facility& target = world_.facility(dest);
    int los = sample_los(target, los_, *los_rng_);
    BedNeed need = non_covid_need(a, los, target, *los_rng_);
    if (attempt_transfer(world_, id, dest, need).admitted) a.leave_day = day + los;
  }
}

void Simulation::community_stage() {
  world_.stage = Stage::Community;
  const Day day = world_.day;
  auto departures = select_community_departures(world_, *router_, day, *community_rng_);
  for (auto [id, type] : departures) {
    Agent& a = world_.agent(id);
    if (!a.alive || a.location != kCommunity || !router_->can_route(a, type)) continue;
    FacilityId first =
        router_->choose_specific_facility(a, type, *routing_rng_, RouteContext::NewAdmission);
    const Facility& f = world_.facility(first);
    int los = sample_los(f, los_, *los_rng_);
    BedNeed need = non_covid_need(a, los, f, *los_rng_);
    auto res = attempt_admission(world_, *router_, id, need, first, false,
                                 MoveReason::NewAdmission, *routing_rng_);
    if (res.admitted) a.leave_day = day + los;
  }
}

void Simulation::readmission_stage() {
  world_.stage = Stage::Readmission;
  const Day day = world_.day;
  std::vector<AgentId> due;
  for (auto& a : world_.agents) {
    if (!a.readmission) continue;
    if (!a.alive || a.readmission->day < day) {
      a.readmission.reset();
      continue;
    }
    if (a.readmission->day == day && a.location == kCommunity) due.push_back(a.id);
  }
  shuffle(std::span(due), *readmission_rng_);
  for (auto id : due) {
    Agent& a = world_.agent(id);
    FacilityId fac = a.readmission->facility;
    a.readmission.reset();
    const Facility& f = world_.facility(fac);
    int los = sample_los(f, los_, *los_rng_);
    BedNeed need = non_covid_need(a, los, f, *los_rng_);
    auto res = attempt_admission(world_, *router_, id, need, fac, false, MoveReason::Readmission,
                                 *readmission_rng_);
    if (res.admitted) a.leave_day = day + los;
  }
}

void Simulation::location_substep() {
  const auto& p = config_.params;
  if (config_.covid) {
    world_.stage = Stage::Recovery;
    process_recoveries(world_, *router_, p.covid, *recovery_rng_);
  }
  los_end_stage();
  if (config_.covid) {
    world_.stage = Stage::Covid;
    std::map<CountyCode, long long> today;
    const auto k = static_cast<std::size_t>(world_.day - 1);
    for (const auto& [c, t] : targets_) today[c] = k < t.size() ? t[k] : 0;
    result_.covid_days.push_back(
        covid_update(world_, *router_, today, infection_weights_, p.covid, *covid_rng_));
  }
  community_stage();
  readmission_stage();
}

void Simulation::record() {
  std::span<const Event> day_events(world_.events.data() + day_events_begin_,
                                    world_.events.size() - day_events_begin_);
  long long prev = result_.days.empty() ? 0 : result_.days.back().cumulative_infections;
  result_.days.push_back(
      record_day(world_, day_events, prev, static_cast<long long>(dead_.size())));
  day_events_begin_ = world_.events.size();
}

void Simulation::step() {
  if (!initialized_) throw StateError("simulation not initialized");
  ++world_.day;
  life_substep();
  recreate_agents();
  location_substep();
  record();
}

RunResult Simulation::run() {
  if (!initialized_) initialize();
  while (world_.day < config_.horizon) step();
  result_.seed = config_.seed;
  result_.horizon = config_.horizon;
  result_.covid = config_.covid;
  result_.turn_aways = world_.turn_aways;
  if (config_.keep_events) result_.events = world_.events;
  return result_;
}

// ---------------------------------------------------------------------------

Parameters bundle_parameters(const std::filesystem::path& dir) {
  Parameters p;
  auto unknown = apply_parameters(p, read_bundle_parameters(dir));
  if (!unknown.empty())
    throw ConfigError((dir / BundleFiles::kParams).string() + ": unknown key '" +
                      unknown.begin()->first + "'");
  return p;
}

Bundle load_run_bundle(const std::filesystem::path& dir, const RunConfig& config) {
  Rng rng = make_stream(config.seed, "population");
  return load_bundle(dir, config.params, rng);
}

RunResult run(const RunConfig& config, const std::filesystem::path& bundle_dir) {
  Bundle b = load_run_bundle(bundle_dir, config);
  Simulation sim(config, std::move(b));
  return sim.run();
}

std::vector<RunResult> run_replicates(const RunConfig& config,
                                      const std::filesystem::path& bundle_dir, int replicates,
                                      int threads) {
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  std::vector<RunResult> out(static_cast<std::size_t>(replicates));
  std::vector<std::exception_ptr> errors(out.size());
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, replicates);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < replicates;) {
      try {
        RunConfig c = config;
        c.seed = config.seed + static_cast<std::uint64_t>(i);
        out[static_cast<std::size_t>(i)] = run(c, bundle_dir);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace hospsim
