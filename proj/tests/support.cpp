#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hospsim::test {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hospsim-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

fs::path synthetic_bundle(const std::string& name, const SyntheticSpec& spec) {
  static std::map<std::string, fs::path> cache;
  if (auto it = cache.find(name); it != cache.end()) return it->second;
  auto dir = scratch_dir("bundle-" + name);
  generate_synthetic_bundle(spec, dir);
  cache[name] = dir;
  return dir;
}

SyntheticSpec small_spec(std::size_t agents) {
  SyntheticSpec s;
  s.n_agents = agents;
  s.n_counties = 4;
  s.unc = 1;
  s.large = 1;
  s.small = 2;
  s.ltach = 1;
  s.nh = 3;
  // Bed counts are generated for this many people, so agents / reference sets the scale.
  s.reference_population = static_cast<double>(agents) * 10.0;
  s.case_days = 120;
  return s;
}

fs::path tiny_bundle(const std::string& name, const TinyOptions& o) {
  auto dir = scratch_dir("tiny-" + name);
  std::ostringstream f;
  f << "facility_id,name,category,county,non_icu_beds,icu_beds,ventilator_beds\n"
    << "0,Community,COMMUNITY,,0,0,0\n"
    << "1,Uni,UNC,1," << o.stach_non_icu << "," << o.stach_icu << "," << o.stach_vent << "\n"
    << "2,Big,LARGE,1," << o.stach_non_icu << "," << o.stach_icu << "," << o.stach_vent << "\n"
    << "3,Little,SMALL,2," << o.stach_non_icu << "," << o.stach_icu << "," << o.stach_vent << "\n"
    << "4,Longterm,LTACH,2," << o.ltach_beds << ",0,0\n"
    << "5,Home A,NH,1," << o.nh_beds << ",0,0\n"
    << "6,Home B,NH,2," << o.nh_beds << ",0,0\n";
  write_file(dir / BundleFiles::kFacilities, f.str());
  write_file(dir / BundleFiles::kCounties, "county,population\n1,60000\n2,40000\n");

  std::ostringstream pop;
  pop << "county,sex,age\n";
  const int ages[3] = {30, 57, 75};
  for (int i = 0; i < o.agents; ++i)
    pop << (i % 5 < 3 ? 1 : 2) << "," << (i % 2 ? 'M' : 'F') << "," << ages[i % 3] << "\n";
  write_file(dir / BundleFiles::kPopulation, pop.str());

  const char* groups[3] = {"<50", "50-64", "65+"};
  std::ostringstream ct, lt;
  ct << "county,age_group,departure_probability,unc,large,small,ltach,nh\n";
  lt << "county,age_group,source,community,unc,large,small,ltach,nh\n";
  for (int c = 1; c <= 2; ++c)
    for (int g = 0; g < 3; ++g) {
      ct << c << "," << groups[g] << "," << format_double(o.departure) << ","
         << (g == 2 ? "0.3,0.3,0.3,0.05,0.05" : "0.3,0.3,0.35,0.05,0") << "\n";
      for (int s = 1; s <= 3; ++s)
        lt << c << "," << groups[g] << "," << s << ","
           << (g == 2 ? "0.8,0.05,0.05,0.05,0.03,0.02" : "0.8,0.05,0.05,0.07,0.03,0") << "\n";
      lt << c << "," << groups[g] << ",LTACH,0.9,0.04,0.03,0.03,0,0\n";
      lt << c << "," << groups[g] << ",NH,0.9,0.04,0.03,0.03,0,0\n";
    }
  write_file(dir / BundleFiles::kCommunityTransitions, ct.str());
  write_file(dir / BundleFiles::kLocationTransitions, lt.str());
  write_file(dir / BundleFiles::kDischarges,
             "facility_id,county,discharges\n1,1,100\n1,2,50\n2,1,80\n3,2,60\n");
  write_file(dir / BundleFiles::kDistances,
             "{\"1\": {\"1\": 5, \"2\": 10, \"3\": 40, \"4\": 45, \"5\": 3, \"6\": 50},\n"
             " \"2\": {\"1\": 40, \"2\": 45, \"3\": 5, \"4\": 4, \"5\": 50, \"6\": 6}}\n");
  std::ostringstream nh;
  nh << "los_days,count\n";
  for (int d = 1; d <= 60; ++d) nh << d << ",1\n";
  write_file(dir / BundleFiles::kNhLos, nh.str());
  write_file(dir / BundleFiles::kParams,
             "population_scale = " + format_double(o.population_scale) + "\n");
  if (o.cases) {
    std::ostringstream cs;
    cs << "date,county,new_cases\n";
    auto start = parse_date("2020-06-01");
    for (int d = 0; d < o.case_days; ++d)
      for (int c = 1; c <= 2; ++c)
        cs << format_date(start + std::chrono::days(d)) << "," << c << ","
           << format_double(o.daily_cases) << "\n";
    write_file(dir / BundleFiles::kCases, cs.str());
  }
  return dir;
}

Bundle load(const fs::path& dir, std::uint64_t seed) {
  RunConfig c;
  c.params = bundle_parameters(dir);
  c.seed = seed;
  return load_run_bundle(dir, c);
}

CliResult run_cli(const std::string& args, const std::string& env) {
  static int counter = 0;
  auto dir = fs::temp_directory_path() / ("hospsim-test-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto out = dir / ("cli-" + std::to_string(counter) + ".out");
  auto err = dir / ("cli-" + std::to_string(counter) + ".err");
  ++counter;
  std::string cmd = env + (env.empty() ? "" : " ") + "'" + HOSPSIM_CLI_PATH + "' " + args + " >'" +
                    out.string() + "' 2>'" + err.string() + "'";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

}  // namespace hospsim::test
