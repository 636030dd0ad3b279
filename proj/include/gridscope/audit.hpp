#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridscope/ephemeris.hpp"
#include "gridscope/infosvc.hpp"
#include "gridscope/job.hpp"

// Writers and readers for the activity-state part of the information
// service: job audit records and observation usage records.
namespace gridscope::infosvc {

// Replaces the job's context ("urn:job:<id>") with one triple per present
// field among owner, executable, state, submitted, started, ended, resource.
std::string record_job_audit(InfoStore& store, const Job& job);

// Appends one transition triple to "urn:audit:<id>". The literal has the form
// "<seq>|<instant>|<state>" with a zero-padded sequence number.
void record_job_transition(InfoStore& store, const Job& job, Instant at);

// Job view rebuilt purely from the store.
struct JobRecord {
  std::string id;
  std::string owner;
  std::string executable;
  JobState state = JobState::pending;
  std::optional<Instant> submit_t;
  std::optional<Instant> start_t;
  std::optional<Instant> end_t;
  std::optional<std::string> resource_id;
};

// Every job context in the store, ordered by job id.
std::vector<JobRecord> read_job_records(const InfoStore& store);

// Final state obtained by replaying the job's transition log.
std::optional<JobState> replay_job_state(const InfoStore& store, const std::string& job_id);
std::size_t transition_count(const InfoStore& store, const std::string& job_id);

struct UsageRecord {
  std::string user;
  std::string telescope_name;
  ephemeris::GeoLocation location;
  Instant start;
  Instant end;
  int priority = 0;
};

// One context per observation ("urn:usage:<telescope>/<start>"), six triples.
std::string record_usage(InfoStore& store, const UsageRecord& rec);
std::vector<UsageRecord> read_usage_records(const InfoStore& store);

// Percent-encodes everything outside [A-Za-z0-9._~-] so the result can be
// embedded in an IRI.
std::string iri_escape(std::string_view text);

}  // namespace gridscope::infosvc
