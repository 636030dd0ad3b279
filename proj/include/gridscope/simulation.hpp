#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "gridscope/datacat.hpp"
#include "gridscope/infosvc.hpp"
#include "gridscope/metasched.hpp"
#include "gridscope/monitor.hpp"
#include "gridscope/obs_sched.hpp"
#include "gridscope/resources.hpp"
#include "gridscope/vom.hpp"

namespace gridscope {

inline const Instant kDefaultSimStart = Instant::from_civil(2008, 1, 1);

struct SimulationOptions {
  std::uint64_t seed = 0;
  Instant start = kDefaultSimStart;
  double failure_probability = 0.0;
};

// Every module wired together around one clock and one information store.
// Jobs are dispatched whenever simulated time stops at an event.
class Simulation {
 public:
  explicit Simulation(const Registry& registry, SimulationOptions options = {});
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  Registry& registry() { return registry_; }
  SimClock& clock() { return clock_; }
  infosvc::InfoStore& store() { return store_; }
  metasched::Metascheduler& scheduler() { return scheduler_; }
  vom::VORegistry& vo() { return vo_; }
  datacat::Catalog& catalog() { return catalog_; }
  const SimulationOptions& options() const { return options_; }
  Instant now() const { return clock_.now(); }

  // Fires due events up to t, dispatching pending jobs after each stop.
  void advance_to(Instant t);
  std::size_t dispatch();

  std::string submit_job(const JobSpec& spec);

  // Assigns the next "obs-NNNNNN" id when the request has none, stores the
  // request metadata and returns the id.
  std::string submit_request(obs::ObservationRequest& req);
  // Builds the schedule and records one usage record per segment.
  obs::NetworkSchedule schedule_request(obs::ObservationRequest& req,
                                        Seconds step = obs::kDefaultStep);

  // Persistent state directory for the CLI: registry.json, store.nq,
  // jobs.jsonl, vo.json, catalog.jsonl and sim.json (clock, pointer, options).
  void save(const std::filesystem::path& dir) const;
  static std::unique_ptr<Simulation> load(const std::filesystem::path& dir);

 private:
  SimulationOptions options_;
  infosvc::InfoStore store_;
  Registry registry_;
  SimClock clock_;
  metasched::Metascheduler scheduler_;
  vom::VORegistry vo_;
  datacat::Catalog catalog_;
  std::uint64_t next_request_ = 1;
};

// Artifact file name -> content.
using Artifacts = std::map<std::string, std::string>;

// Runs a scenario document. Relative file references (registry, requests)
// resolve against base_dir. Throws ParseError for malformed scenarios.
Artifacts run_scenario(const nlohmann::json& scenario, const std::filesystem::path& base_dir);
Artifacts run_scenario_file(const std::filesystem::path& path);
void write_artifacts(const Artifacts& artifacts, const std::filesystem::path& out_dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
nlohmann::json parse_json_text(const std::string& text, const std::string& what);

}  // namespace gridscope
