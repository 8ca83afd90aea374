#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hospsim/covid.hpp"
#include "hospsim/ingest.hpp"
#include "hospsim/metrics.hpp"
#include "hospsim/movement.hpp"
#include "hospsim/parameters.hpp"
#include "hospsim/rng.hpp"
#include "hospsim/seir.hpp"
#include "hospsim/world.hpp"

namespace hospsim {

struct RunConfig {
  Parameters params;
  std::uint64_t seed = 1;
  int horizon = 30;
  bool covid = true;
  // Input R_e for the SEIR forecast.
  double input_re = 1.2;
  // Replaces the internal SEIR forecast when set.
  std::optional<std::filesystem::path> forecast_path;
  bool keep_events = true;
};

// Canonical text of everything that shapes a run except the seed.
std::string config_fingerprint(const RunConfig& config, const std::filesystem::path& bundle_dir);
std::string config_hash(const RunConfig& config, const std::filesystem::path& bundle_dir);

struct RemainingLos {
  std::vector<int> pool;
  int sim_days = 0;
};

// Day-0 remaining stays: a cohort of LOS draws is advanced day by day for
// ceil(95th percentile) days, each finished stay replaced by a fresh draw. The pool is
// every value left after each day's decrement.
template <class Draw>
RemainingLos remaining_los_sampler(Draw&& draw, int cohort);

class Simulation {
 public:
  Simulation(RunConfig config, Bundle bundle);

  // Creates agents, seeds facilities and Day-0 COVID. Throws InitializationError.
  void initialize();
  // Runs day world.day + 1.
  void step();
  RunResult run();

  World& world() { return world_; }
  const World& world() const { return world_; }
  const Router& router() const { return *router_; }
  const RunConfig& config() const { return config_; }
  const Bundle& bundle() const { return bundle_; }
  const LosTable& los() const { return los_; }
  const Day0Report& day0() const { return result_.day0; }
  const std::map<CountyCode, std::vector<long long>>& infection_targets() const {
    return targets_;
  }
  const std::vector<AgentId>& awaiting_recreation() const { return dead_; }
  const RunResult& result() const { return result_; }

  std::vector<AgentId> life_substep();
  std::vector<AgentId> recreate_agents();
  void location_substep();

 private:
  void seed_facilities(Rng& rng);
  void seed_covid();
  int remaining_los(const Facility& f, Rng& rng);
  BedNeed non_covid_need(const Agent& a, int los, const Facility& f, Rng& rng) const;
  void los_end_stage();
  void community_stage();
  void readmission_stage();
  void record();

  RunConfig config_;
  Bundle bundle_;
  World world_;
  LosTable los_;
  std::unique_ptr<Router> router_;
  RngStreams streams_;
  Rng* death_rng_;
  Rng* community_rng_;
  Rng* routing_rng_;
  Rng* los_rng_;
  Rng* covid_rng_;
  Rng* recovery_rng_;
  Rng* readmission_rng_;
  std::map<std::string, RemainingLos> remaining_cache_;
  std::map<CountyCode, std::vector<long long>> targets_;
  AgeArray infection_weights_{};
  std::vector<AgentId> dead_;
  std::size_t day_events_begin_ = 0;
  RunResult result_;
  bool initialized_ = false;
};

// Default parameters overlaid with the bundle's params.cfg. Throws ConfigError on
// unknown keys.
Parameters bundle_parameters(const std::filesystem::path& dir);

// Loads the bundle; population expansion draws from a stream of the run seed.
Bundle load_run_bundle(const std::filesystem::path& dir, const RunConfig& config);
// Loads the bundle and runs it with config.params as given.
RunResult run(const RunConfig& config, const std::filesystem::path& bundle_dir);

// Independent runs with seeds seed, seed+1, ... executed on worker threads.
std::vector<RunResult> run_replicates(const RunConfig& config,
                                      const std::filesystem::path& bundle_dir, int replicates,
                                      int threads = 0);

// ---------------------------------------------------------------------------

template <class Draw>
RemainingLos remaining_los_sampler(Draw&& draw, int cohort) {
  RemainingLos out;
  if (cohort < 1) return out;
  std::vector<int> values(static_cast<std::size_t>(cohort));
  for (auto& v : values) v = std::max(1, draw());
  std::vector<int> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(cohort))) - 1;
  out.sim_days = sorted[std::min(rank, sorted.size() - 1)];
  out.pool.reserve(values.size() * static_cast<std::size_t>(out.sim_days));
  for (int d = 0; d < out.sim_days; ++d) {
    for (auto& v : values) {
      if (--v <= 0) v = std::max(1, draw());
      out.pool.push_back(v);
    }
  }
  return out;
}

}  // namespace hospsim
