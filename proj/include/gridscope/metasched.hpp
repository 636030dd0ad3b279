#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscope/infosvc.hpp"
#include "gridscope/job.hpp"
#include "gridscope/resources.hpp"

namespace gridscope::metasched {

// Extra matchmaking criterion; all registered predicates must accept a host.
using HostPredicate = std::function<bool(const Job&, const ComputeResource&)>;

enum class Outcome { done, failed };

struct Options {
  // Chance that a job ends in "failed" instead of "done" when its declared
  // runtime elapses. Decided deterministically from (seed, job id).
  double failure_probability = 0.0;
  std::uint64_t seed = 0;
};

// Two-step submission: jobs are first queued here (pending), then dispatch()
// matches them to an execution host with a persistent round-robin pointer and
// starts them. Completions are driven by the simulation clock.
class Metascheduler {
 public:
  Metascheduler(Registry& registry, SimClock& clock, infosvc::InfoStore& store,
                Options options = {});

  Metascheduler(const Metascheduler&) = delete;
  Metascheduler& operator=(const Metascheduler&) = delete;

  std::string submit(JobSpec spec);

  // Online hosts with the job's LRM, a free slot and every extra predicate
  // satisfied, ordered by id.
  std::vector<std::string> match_hosts(const Job& job) const;
  void add_predicate(HostPredicate predicate) { predicates_.push_back(std::move(predicate)); }

  // Places up to max_jobs pending jobs, oldest first. Jobs without an
  // eligible host are skipped and stay pending.
  std::vector<std::pair<std::string, std::string>> dispatch(std::size_t max_jobs);

  void complete(const std::string& job_id, Outcome outcome);
  void cancel(const std::string& job_id);

  // Tops the pending+active count up to target by submitting clones of the
  // template. Returns how many were submitted.
  std::size_t keep_filled(std::size_t target_pending, const JobSpec& job_template);

  const Job& job(const std::string& id) const;
  // In submission order.
  std::vector<const Job*> jobs() const;
  std::size_t count_in(JobState state) const;
  std::size_t pending_or_active() const {
    return count_in(JobState::pending) + count_in(JobState::active);
  }
  std::size_t rr_pointer() const { return rr_pointer_; }

  // One JSON object per line, keys in a fixed order.
  std::string status_listing() const;

  // Restores jobs from a status listing (used by the CLI between
  // invocations). Active jobs get their completion event re-armed.
  void restore(const std::string& listing, std::size_t rr_pointer);

 private:
  Job& job_mut(const std::string& id);
  void transition(Job& job, JobState to);
  void start(Job& job, const std::string& host);
  void arm_completion(const Job& job);
  bool draws_failure(const std::string& job_id) const;

  Registry& registry_;
  SimClock& clock_;
  infosvc::InfoStore& store_;
  Options options_;
  std::vector<HostPredicate> predicates_;
  std::map<std::string, Job> jobs_;
  std::vector<std::string> order_;
  // Shorter ids first, so "job-NNNNNN" keeps submission order past six digits.
  struct SubmissionOrder {
    bool operator()(const std::string& a, const std::string& b) const {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    }
  };
  std::set<std::string, SubmissionOrder> pending_;
  std::map<JobState, std::size_t> counts_;
  std::uint64_t next_id_ = 1;
  std::size_t rr_pointer_ = 0;
};

nlohmann::ordered_json job_to_json(const Job& job);
Job job_from_json(const nlohmann::json& doc);
// CLI job spec: owner, executable, args, lrm, runtime_s, optional target.
JobSpec job_spec_from_json(const nlohmann::json& doc);
nlohmann::ordered_json job_spec_to_json(const JobSpec& spec);

}  // namespace gridscope::metasched
