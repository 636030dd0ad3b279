#include "gridscope/job.hpp"

#include "gridscope/error.hpp"

namespace gridscope {

std::string_view to_string(Lrm lrm) { return lrm == Lrm::fork ? "fork" : "batch"; }

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::pending:
      return "pending";
    case JobState::active:
      return "active";
    case JobState::done:
      return "done";
    case JobState::failed:
      return "failed";
    case JobState::canceled:
      return "canceled";
  }
  return "pending";
}

Lrm parse_lrm(std::string_view text) {
  if (text == "fork") {
    return Lrm::fork;
  }
  if (text == "batch") {
    return Lrm::batch;
  }
  throw ValidationError("unknown LRM '" + std::string(text) + "' (expected fork or batch)");
}

JobState parse_job_state(std::string_view text) {
  for (JobState s : {JobState::pending, JobState::active, JobState::done, JobState::failed,
                     JobState::canceled}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  throw ValidationError("unknown job state '" + std::string(text) + "'");
}

bool is_legal_transition(JobState from, JobState to) {
  switch (from) {
    case JobState::pending:
      return to == JobState::active || to == JobState::canceled;
    case JobState::active:
      return to == JobState::done || to == JobState::failed || to == JobState::canceled;
    default:
      return false;
  }
}

bool is_terminal(JobState state) {
  return state == JobState::done || state == JobState::failed || state == JobState::canceled;
}

void JobSpec::validate() const {
  if (owner.empty()) {
    throw ValidationError("job owner must not be empty");
  }
  if (executable.empty()) {
    throw ValidationError("job executable must not be empty");
  }
  if (runtime <= Seconds{0}) {
    throw ValidationError("declared runtime must be positive");
  }
  if (target && target->empty()) {
    throw ValidationError("job target must not be empty when given");
  }
}

}  // namespace gridscope
