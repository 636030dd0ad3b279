#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridscope/instant.hpp"

namespace gridscope {

enum class Lrm { fork, batch };

enum class JobState { pending, active, done, failed, canceled };

std::string_view to_string(Lrm lrm);
std::string_view to_string(JobState state);
Lrm parse_lrm(std::string_view text);
JobState parse_job_state(std::string_view text);

// Legal edges: pending->active, pending->canceled, active->{done, failed, canceled}.
bool is_legal_transition(JobState from, JobState to);
bool is_terminal(JobState state);

struct JobSpec {
  std::string owner;
  std::string executable;
  std::vector<std::string> args;
  Lrm lrm = Lrm::fork;
  Seconds runtime{0};
  // Bypasses round robin (not eligibility) when set.
  std::optional<std::string> target;

  void validate() const;
};

struct Job {
  std::string id;
  JobSpec spec;
  JobState state = JobState::pending;
  std::optional<Instant> submit_t;
  std::optional<Instant> start_t;
  std::optional<Instant> end_t;
  std::optional<std::string> resource_id;
};

}  // namespace gridscope
