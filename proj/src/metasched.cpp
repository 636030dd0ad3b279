#include "gridscope/metasched.hpp"

#include <algorithm>
#include <sstream>

#include "gridscope/audit.hpp"
#include "gridscope/error.hpp"
#include "gridscope/text.hpp"

namespace gridscope::metasched {

using nlohmann::json;
using nlohmann::ordered_json;

Metascheduler::Metascheduler(Registry& registry, SimClock& clock, infosvc::InfoStore& store,
                             Options options)
    : registry_(registry), clock_(clock), store_(store), options_(options) {
  if (!(options.failure_probability >= 0.0 && options.failure_probability <= 1.0)) {
    throw ValidationError("failure probability must lie in [0, 1]");
  }
}

Job& Metascheduler::job_mut(const std::string& id) {
  auto it = jobs_.find(id);
  if (it == jobs_.end()) {
    throw NotFoundError("unknown job '" + id + "'");
  }
  return it->second;
}

const Job& Metascheduler::job(const std::string& id) const {
  auto it = jobs_.find(id);
  if (it == jobs_.end()) {
    throw NotFoundError("unknown job '" + id + "'");
  }
  return it->second;
}

std::vector<const Job*> Metascheduler::jobs() const {
  std::vector<const Job*> out;
  out.reserve(order_.size());
  for (const std::string& id : order_) {
    out.push_back(&jobs_.at(id));
  }
  return out;
}

std::size_t Metascheduler::count_in(JobState state) const {
  auto it = counts_.find(state);
  return it == counts_.end() ? 0 : it->second;
}

void Metascheduler::transition(Job& job, JobState to) {
  if (!is_legal_transition(job.state, to)) {
    throw StateError("job " + job.id + ": illegal transition " + std::string(to_string(job.state)) +
                     " -> " + std::string(to_string(to)));
  }
  --counts_[job.state];
  ++counts_[to];
  if (job.state == JobState::pending) {
    pending_.erase(job.id);
  }
  job.state = to;
  if (is_terminal(to)) {
    job.end_t = clock_.now();
  }
  infosvc::record_job_audit(store_, job);
  infosvc::record_job_transition(store_, job, clock_.now());
}

std::string Metascheduler::submit(JobSpec spec) {
  spec.validate();
  Job job;
  job.id = padded_id("job-", next_id_++, 6);
  job.spec = std::move(spec);
  job.submit_t = clock_.now();
  const std::string id = job.id;
  auto [it, _] = jobs_.emplace(id, std::move(job));
  order_.push_back(id);
  pending_.insert(id);
  ++counts_[JobState::pending];
  infosvc::record_job_audit(store_, it->second);
  infosvc::record_job_transition(store_, it->second, clock_.now());
  return id;
}

std::vector<std::string> Metascheduler::match_hosts(const Job& job) const {
  std::vector<std::string> out;
  for (const ComputeResource* host : registry_.computes()) {
    if (host->status != ResourceStatus::online || host->lrm != job.spec.lrm ||
        host->free_slots < 1) {
      continue;
    }
    const bool accepted = std::all_of(predicates_.begin(), predicates_.end(),
                                      [&](const HostPredicate& p) { return p(job, *host); });
    if (accepted) {
      out.push_back(host->id);
    }
  }
  return out;
}

bool Metascheduler::draws_failure(const std::string& job_id) const {
  if (options_.failure_probability <= 0.0) {
    return false;
  }
  return unit_interval(mix64(fnv1a(job_id) ^ mix64(options_.seed))) <
         options_.failure_probability;
}

void Metascheduler::arm_completion(const Job& job) {
  const Instant due = std::max(*job.start_t + job.spec.runtime, clock_.now());
  clock_.schedule(due, job.id, [this, id = job.id](Instant) {
    if (jobs_.at(id).state == JobState::active) {
      complete(id, draws_failure(id) ? Outcome::failed : Outcome::done);
    }
  });
}

void Metascheduler::start(Job& job, const std::string& host) {
  registry_.take_slot(host);
  job.resource_id = host;
  job.start_t = clock_.now();
  transition(job, JobState::active);
  arm_completion(job);
}

std::vector<std::pair<std::string, std::string>> Metascheduler::dispatch(std::size_t max_jobs) {
  if (max_jobs < 1) {
    throw ValidationError("dispatch needs max_jobs >= 1");
  }
  std::vector<std::pair<std::string, std::string>> placed;
  const std::vector<std::string> waiting(pending_.begin(), pending_.end());
  for (const std::string& id : waiting) {
    if (placed.size() >= max_jobs) {
      break;
    }
    Job& job = jobs_.at(id);
    const std::vector<std::string> hosts = match_hosts(job);
    if (hosts.empty()) {
      continue;
    }
    std::string host;
    if (job.spec.target) {
      if (std::find(hosts.begin(), hosts.end(), *job.spec.target) == hosts.end()) {
        continue;
      }
      host = *job.spec.target;
    } else {
      if (rr_pointer_ >= hosts.size()) {
        rr_pointer_ %= hosts.size();
      }
      host = hosts[rr_pointer_];
      rr_pointer_ = (rr_pointer_ + 1) % hosts.size();
    }
    start(job, host);
    placed.emplace_back(id, host);
  }
  return placed;
}

void Metascheduler::complete(const std::string& job_id, Outcome outcome) {
  Job& job = job_mut(job_id);
  if (job.state != JobState::active) {
    throw StateError("job " + job_id + " is not active");
  }
  transition(job, outcome == Outcome::done ? JobState::done : JobState::failed);
  registry_.give_slot(*job.resource_id);
}

void Metascheduler::cancel(const std::string& job_id) {
  Job& job = job_mut(job_id);
  const bool was_active = job.state == JobState::active;
  transition(job, JobState::canceled);
  if (was_active) {
    registry_.give_slot(*job.resource_id);
  }
}

std::size_t Metascheduler::keep_filled(std::size_t target_pending, const JobSpec& job_template) {
  job_template.validate();
  const std::size_t current = pending_or_active();
  const std::size_t missing = target_pending > current ? target_pending - current : 0;
  for (std::size_t i = 0; i < missing; ++i) {
    submit(job_template);
  }
  return missing;
}

std::string Metascheduler::status_listing() const {
  std::string out;
  for (const std::string& id : order_) {
    out += job_to_json(jobs_.at(id)).dump();
    out += '\n';
  }
  return out;
}

void Metascheduler::restore(const std::string& listing, std::size_t rr_pointer) {
  jobs_.clear();
  order_.clear();
  pending_.clear();
  counts_.clear();
  next_id_ = 1;
  std::istringstream in(listing);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("job listing: ") + e.what());
    }
    Job job = job_from_json(doc);
    const std::string digits = job.id.substr(job.id.find('-') + 1);
    next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(digits) + 1);
    order_.push_back(job.id);
    auto [it, inserted] = jobs_.emplace(job.id, std::move(job));
    if (!inserted) {
      throw ParseError("job listing: duplicate job id " + it->first);
    }
    ++counts_[it->second.state];
    if (it->second.state == JobState::pending) {
      pending_.insert(it->first);
    }
    if (it->second.state == JobState::active) {
      arm_completion(it->second);
    }
  }
  rr_pointer_ = rr_pointer;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

ordered_json optional_instant(const std::optional<Instant>& t) {
  return t ? ordered_json(t->iso()) : ordered_json(nullptr);
}

std::optional<Instant> read_instant(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) {
    return std::nullopt;
  }
  return Instant::parse(doc.at(key).get<std::string>());
}

}  // namespace

ordered_json job_spec_to_json(const JobSpec& spec) {
  ordered_json doc{{"owner", spec.owner},
                   {"executable", spec.executable},
                   {"args", spec.args},
                   {"lrm", to_string(spec.lrm)},
                   {"runtime_s", spec.runtime.count()}};
  if (spec.target) {
    doc["target"] = *spec.target;
  }
  return doc;
}

JobSpec job_spec_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ParseError("job spec must be a JSON object");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "owner" && key != "executable" && key != "args" && key != "lrm" &&
        key != "runtime_s" && key != "target") {
      throw ParseError("job spec: unknown key '" + key + "'");
    }
  }
  JobSpec spec;
  try {
    spec.owner = doc.at("owner").get<std::string>();
    spec.executable = doc.at("executable").get<std::string>();
    spec.args = doc.value("args", std::vector<std::string>{});
    spec.lrm = parse_lrm(doc.value("lrm", std::string("fork")));
    spec.runtime = Seconds{doc.at("runtime_s").get<long long>()};
    if (doc.contains("target") && !doc.at("target").is_null()) {
      spec.target = doc.at("target").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("job spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

ordered_json job_to_json(const Job& job) {
  return {{"id", job.id},
          {"owner", job.spec.owner},
          {"executable", job.spec.executable},
          {"args", job.spec.args},
          {"lrm", to_string(job.spec.lrm)},
          {"runtime_s", job.spec.runtime.count()},
          {"target", job.spec.target ? ordered_json(*job.spec.target) : ordered_json(nullptr)},
          {"state", to_string(job.state)},
          {"submit_t", optional_instant(job.submit_t)},
          {"start_t", optional_instant(job.start_t)},
          {"end_t", optional_instant(job.end_t)},
          {"resource_id",
           job.resource_id ? ordered_json(*job.resource_id) : ordered_json(nullptr)}};
}

Job job_from_json(const json& doc) {
  Job job;
  try {
    job.id = doc.at("id").get<std::string>();
    json spec = json::object();
    for (const char* key : {"owner", "executable", "args", "lrm", "runtime_s", "target"}) {
      if (doc.contains(key)) {
        spec[key] = doc.at(key);
      }
    }
    job.spec = job_spec_from_json(spec);
    job.state = parse_job_state(doc.at("state").get<std::string>());
    job.submit_t = read_instant(doc, "submit_t");
    job.start_t = read_instant(doc, "start_t");
    job.end_t = read_instant(doc, "end_t");
    if (doc.contains("resource_id") && !doc.at("resource_id").is_null()) {
      job.resource_id = doc.at("resource_id").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("job record: ") + e.what());
  }
  if (job.id.find('-') == std::string::npos) {
    throw ParseError("job record: malformed id '" + job.id + "'");
  }
  return job;
}

}  // namespace gridscope::metasched
