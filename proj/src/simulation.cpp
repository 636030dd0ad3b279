#include "gridscope/simulation.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "gridscope/audit.hpp"
#include "gridscope/error.hpp"
#include "gridscope/text.hpp"

namespace gridscope {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot read '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write '" + path.string() + "'");
  }
  out << content;
}

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

namespace {

Registry wired_copy(const Registry& source, infosvc::InfoStore& store) {
  Registry reg;
  reg.attach_store(&store);
  for (const Telescope* t : source.telescopes()) {
    reg.register_telescope(*t);
  }
  for (const ComputeResource* c : source.computes()) {
    reg.register_compute(*c);
  }
  reg.weather() = source.weather();
  return reg;
}

}  // namespace

Simulation::Simulation(const Registry& registry, SimulationOptions options)
    : options_(options),
      registry_(wired_copy(registry, store_)),
      clock_(options.start),
      scheduler_(registry_, clock_, store_,
                 metasched::Options{options.failure_probability, options.seed}) {}

std::size_t Simulation::dispatch() {
  return scheduler_.dispatch(std::numeric_limits<std::size_t>::max()).size();
}

void Simulation::advance_to(Instant t) {
  clock_.run_due();
  dispatch();
  while (auto next = clock_.next_event_time()) {
    if (*next > t) {
      break;
    }
    if (*next > clock_.now()) {
      clock_.advance_to(*next);
    } else {
      clock_.run_due();
    }
    dispatch();
  }
  clock_.advance_to(t);
}

std::string Simulation::submit_job(const JobSpec& spec) {
  std::string id = scheduler_.submit(spec);
  dispatch();
  return id;
}

std::string Simulation::submit_request(obs::ObservationRequest& req) {
  if (req.id.empty()) {
    req.id = padded_id("obs-", next_request_++, 6);
  }
  obs::record_request(store_, req);
  return req.id;
}

obs::NetworkSchedule Simulation::schedule_request(obs::ObservationRequest& req, Seconds step) {
  submit_request(req);
  obs::NetworkSchedule schedule = obs::build_schedule(registry_, req, step);
  for (const obs::ScheduleSegment& seg : schedule.segments) {
    const Telescope& tel = registry_.telescope(seg.telescope_id);
    infosvc::record_usage(store_, {req.user, tel.name, tel.location, seg.start, seg.end,
                                   req.priority});
  }
  return schedule;
}

void Simulation::save(const fs::path& dir) const {
  fs::create_directories(dir);
  write_text_file(dir / "registry.json", registry_.to_json().dump(2) + "\n");
  std::ostringstream nq;
  store_.save(nq);
  write_text_file(dir / "store.nq", nq.str());
  write_text_file(dir / "jobs.jsonl", scheduler_.status_listing());
  write_text_file(dir / "vo.json", vo_.to_json().dump(2) + "\n");
  write_text_file(dir / "catalog.jsonl", catalog_.to_jsonl());
  const ordered_json meta{{"start", options_.start.iso()},
                          {"now", clock_.now().iso()},
                          {"seed", options_.seed},
                          {"failure_probability", options_.failure_probability},
                          {"rr_pointer", scheduler_.rr_pointer()},
                          {"next_request", next_request_}};
  write_text_file(dir / "sim.json", meta.dump(2) + "\n");
}

std::unique_ptr<Simulation> Simulation::load(const fs::path& dir) {
  auto file = [&](const char* name) { return dir / name; };
  Registry registry;
  if (fs::exists(file("registry.json"))) {
    registry = Registry::from_json(parse_json_text(read_text_file(file("registry.json")), "registry"));
  }
  SimulationOptions options;
  Instant now = options.start;
  std::size_t rr_pointer = 0;
  std::uint64_t next_request = 1;
  if (fs::exists(file("sim.json"))) {
    const json meta = parse_json_text(read_text_file(file("sim.json")), "sim state");
    try {
      options.start = Instant::parse(meta.at("start").get<std::string>());
      now = Instant::parse(meta.at("now").get<std::string>());
      options.seed = meta.at("seed").get<std::uint64_t>();
      options.failure_probability = meta.at("failure_probability").get<double>();
      rr_pointer = meta.at("rr_pointer").get<std::size_t>();
      next_request = meta.at("next_request").get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("sim state: ") + e.what());
    }
  }
  auto sim = std::make_unique<Simulation>(registry, options);
  sim->clock_.advance_to(now);
  sim->next_request_ = next_request;
  if (fs::exists(file("store.nq"))) {
    std::istringstream in(read_text_file(file("store.nq")));
    sim->store_.load(in);
  }
  if (fs::exists(file("jobs.jsonl"))) {
    sim->scheduler_.restore(read_text_file(file("jobs.jsonl")), rr_pointer);
  }
  if (fs::exists(file("vo.json"))) {
    sim->vo_ = vom::VORegistry::from_json(parse_json_text(read_text_file(file("vo.json")), "VO state"));
  }
  if (fs::exists(file("catalog.jsonl"))) {
    sim->catalog_ = datacat::Catalog::from_jsonl(read_text_file(file("catalog.jsonl")));
  }
  return sim;
}

// ---------------------------------------------------------------------------
// Scenarios

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) {
    throw ParseError(where + " must be a JSON object");
  }
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

Instant get_instant(const json& obj, const char* key, const std::string& where) {
  return Instant::parse(get<std::string>(obj, key, where));
}

class ScenarioRunner {
 public:
  ScenarioRunner(const json& scenario, fs::path base_dir) : base_dir_(std::move(base_dir)) {
    check_keys(scenario,
               {"registry", "seed", "start", "end", "failure_probability", "actions"},
               "scenario");
    SimulationOptions options;
    options.seed = get_or<std::uint64_t>(scenario, "seed", 0, "scenario");
    options.start = scenario.contains("start") ? get_instant(scenario, "start", "scenario")
                                               : kDefaultSimStart;
    options.failure_probability = get_or<double>(scenario, "failure_probability", 0.0, "scenario");
    if (options.failure_probability < 0.0 || options.failure_probability > 1.0) {
      throw ParseError("scenario: failure_probability must lie in [0, 1]");
    }

    Registry registry = load_registry(scenario);
    if (scenario.contains("seed")) {
      WeatherModel reseeded(options.seed, registry.weather().weights());
      for (const WeatherOverride& o : registry.weather().overrides()) {
        reseeded.add_override(o);
      }
      registry.weather() = std::move(reseeded);
    }
    sim_ = std::make_unique<Simulation>(registry, options);

    actions_ = scenario.value("actions", json::array());
    if (!actions_.is_array()) {
      throw ParseError("scenario: actions must be a list");
    }
    Instant last = options.start;
    for (const json& a : actions_) {
      if (!a.is_object()) {
        throw ParseError("scenario: every action must be an object");
      }
      const Instant at = a.contains("at") ? get_instant(a, "at", "action") : last;
      if (at < last) {
        throw ParseError("scenario: actions are not in timestamp order at " + at.iso());
      }
      last = at;
    }
    end_ = scenario.contains("end") ? get_instant(scenario, "end", "scenario")
                                    : std::max(last, options.start + Seconds{86400});
    if (end_ < last || end_ <= options.start) {
      throw ParseError("scenario: end must follow the start and every action");
    }
  }

  Artifacts run() {
    for (const json& a : actions_) {
      const Instant at = a.contains("at") ? get_instant(a, "at", "action") : sim_->now();
      sim_->advance_to(at);
      perform(a);
      sim_->dispatch();
    }
    sim_->advance_to(end_);
    finish();
    return std::move(artifacts_);
  }

 private:
  Registry load_registry(const json& scenario) {
    if (!scenario.contains("registry")) {
      return Registry{};
    }
    const json& ref = scenario.at("registry");
    if (ref.is_string()) {
      const fs::path path = base_dir_ / ref.get<std::string>();
      return Registry::from_json(parse_json_text(read_text_file(path), path.string()));
    }
    return Registry::from_json(ref);
  }

  std::string resolve_document(const json& ref) {
    if (ref.is_object()) {
      return ref.dump();
    }
    if (!ref.is_string()) {
      throw ParseError("request must be an object, inline XML or a file name");
    }
    const std::string text = ref.get<std::string>();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '<' || text[first] == '{')) {
      return text;
    }
    return read_text_file(base_dir_ / text);
  }

  JobSpec job_spec(const json& doc) {
    return metasched::job_spec_from_json(doc);
  }

  std::string lfid_of(const json& a, const std::string& where) {
    if (a.contains("lfid")) {
      return get<std::string>(a, "lfid", where);
    }
    return sim_->catalog().by_vpath(get<std::string>(a, "vpath", where)).lfid;
  }

  void perform(const json& a) {
    const std::string op = get<std::string>(a, "do", "action");
    const std::string where = "action " + op;
    if (op == "submit_job") {
      check_keys(a, {"at", "do", "job"}, where);
      sim_->submit_job(job_spec(a.at("job")));
    } else if (op == "keep_filled") {
      check_keys(a, {"at", "do", "target", "template", "every_s", "until"}, where);
      const auto target = get<std::size_t>(a, "target", where);
      const JobSpec tmpl = job_spec(a.at("template"));
      tmpl.validate();
      const Seconds every{get_or<std::int64_t>(a, "every_s", 3600, where)};
      const Instant until = a.contains("until") ? get_instant(a, "until", where) : end_;
      if (every <= Seconds{0}) {
        throw ParseError(where + ": every_s must be positive");
      }
      arm_keep_filled(sim_->now(), target, tmpl, every, until, periodic_++);
    } else if (op == "cancel_job") {
      check_keys(a, {"at", "do", "job_id"}, where);
      sim_->scheduler().cancel(get<std::string>(a, "job_id", where));
    } else if (op == "set_status") {
      check_keys(a, {"at", "do", "resource", "status"}, where);
      const std::string id = get<std::string>(a, "resource", where);
      const ResourceStatus status = parse_resource_status(get<std::string>(a, "status", where));
      if (sim_->registry().has_telescope(id)) {
        sim_->registry().set_telescope_status(id, status);
      } else {
        sim_->registry().set_compute_status(id, status);
      }
    } else if (op == "observe") {
      check_keys(a, {"at", "do", "request", "step_s"}, where);
      obs::ObservationRequest req = obs::parse_request(resolve_document(a.at("request")));
      const Seconds step{get_or<std::int64_t>(a, "step_s", obs::kDefaultStep.count(), where)};
      const obs::NetworkSchedule schedule = sim_->schedule_request(req, step);
      artifacts_["schedule-" + req.id + ".json"] = obs::schedule_to_json(schedule).dump(2) + "\n";
    } else if (op == "register_member") {
      check_keys(a, {"at", "do", "dn", "vo", "institution"}, where);
      sim_->vo().register_member(get<std::string>(a, "dn", where), get<std::string>(a, "vo", where),
                                 get_or<std::string>(a, "institution", "", where));
    } else if (op == "approve_member" || op == "suspend_member") {
      check_keys(a, {"at", "do", "dn", "vo"}, where);
      const std::string dn = get<std::string>(a, "dn", where);
      const std::string vo = get<std::string>(a, "vo", where);
      op == "approve_member" ? sim_->vo().approve(dn, vo) : sim_->vo().suspend(dn, vo);
    } else if (op == "remap_dn") {
      check_keys(a, {"at", "do", "old_dn", "new_dn"}, where);
      sim_->vo().remap_dn(get<std::string>(a, "old_dn", where), get<std::string>(a, "new_dn", where));
    } else if (op == "sync_gridmap") {
      check_keys(a, {"at", "do", "policy"}, where);
      const vom::ResourceMapPolicy policy = vom::policy_from_json(a.at("policy"));
      artifacts_["gridmap-" + policy.resource_id + ".txt"] =
          vom::render_gridmap(sim_->vo().sync_gridmap(policy));
    } else if (op == "register_file") {
      check_keys(a, {"at", "do", "vpath", "owner", "se", "path"}, where);
      sim_->catalog().register_file(get<std::string>(a, "vpath", where),
                                    get<std::string>(a, "owner", where),
                                    {get<std::string>(a, "se", where), get<std::string>(a, "path", where)},
                                    sim_->now());
    } else if (op == "add_replica") {
      check_keys(a, {"at", "do", "vpath", "lfid", "se", "path"}, where);
      sim_->catalog().add_replica(lfid_of(a, where), {get<std::string>(a, "se", where),
                                                      get<std::string>(a, "path", where)});
    } else if (op == "annotate") {
      check_keys(a, {"at", "do", "vpath", "lfid", "key", "value"}, where);
      sim_->catalog().annotate(lfid_of(a, where), get<std::string>(a, "key", where),
                               get<std::string>(a, "value", where));
    } else if (op == "export_timeline") {
      check_keys(a, {"at", "do", "name", "window_start", "window_end", "public", "scale_px_per_min"},
                 where);
      const Instant ws = a.contains("window_start") ? get_instant(a, "window_start", where)
                                                    : sim_->options().start;
      const Instant we = a.contains("window_end") ? get_instant(a, "window_end", where) : sim_->now();
      export_timeline(get_or<std::string>(a, "name", "timeline", where), ws, we,
                      get_or<bool>(a, "public", false, where),
                      get_or<double>(a, "scale_px_per_min", monitor::kDefaultScalePxPerMin, where));
    } else if (op == "export_map") {
      check_keys(a, {"at", "do", "name"}, where);
      artifacts_[get_or<std::string>(a, "name", "map", where) + ".json"] =
          monitor::export_map(sim_->registry(), sim_->now()).dump(2) + "\n";
    } else {
      throw ParseError("unknown scenario action '" + op + "'");
    }
  }

  void arm_keep_filled(Instant at, std::size_t target, JobSpec tmpl, Seconds every, Instant until,
                       std::size_t index) {
    if (at > until) {
      return;
    }
    sim_->clock().schedule(at, "~keep_filled-" + std::to_string(index),
                           [=, this](Instant now) {
                             sim_->scheduler().keep_filled(target, tmpl);
                             sim_->dispatch();
                             arm_keep_filled(now + every, target, tmpl, every, until, index);
                           });
  }

  void export_timeline(const std::string& name, Instant ws, Instant we, bool published,
                       double scale) {
    const monitor::Timeline tl = monitor::build_timeline(
        sim_->store(), ws, we,
        published ? monitor::Visibility::published : monitor::Visibility::internal, scale);
    artifacts_[name + ".svg"] = monitor::render_timeline_svg(tl);
    artifacts_[name + ".json"] = monitor::timeline_to_json(tl).dump(2) + "\n";
  }

  void finish() {
    if (!artifacts_.contains("timeline.svg")) {
      export_timeline("timeline", sim_->options().start, end_, false,
                      monitor::kDefaultScalePxPerMin);
    }
    if (!artifacts_.contains("map.json")) {
      artifacts_["map.json"] = monitor::export_map(sim_->registry(), end_).dump(2) + "\n";
    }
    std::ostringstream nq;
    sim_->store().save(nq);
    artifacts_["store.nq"] = nq.str();
    artifacts_["jobs.jsonl"] = sim_->scheduler().status_listing();
    artifacts_["catalog.jsonl"] = sim_->catalog().to_jsonl();
    artifacts_["vo.json"] = sim_->vo().to_json().dump(2) + "\n";
  }

  fs::path base_dir_;
  std::unique_ptr<Simulation> sim_;
  json actions_;
  Instant end_;
  std::size_t periodic_ = 0;
  Artifacts artifacts_;
};

}  // namespace

Artifacts run_scenario(const json& scenario, const fs::path& base_dir) {
  return ScenarioRunner(scenario, base_dir).run();
}

Artifacts run_scenario_file(const fs::path& path) {
  const json scenario = parse_json_text(read_text_file(path), path.string());
  return run_scenario(scenario, path.parent_path());
}

void write_artifacts(const Artifacts& artifacts, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  for (const auto& [name, content] : artifacts) {
    write_text_file(out_dir / name, content);
  }
}

}  // namespace gridscope
