#include "gridscope/obs_sched.hpp"

#include <algorithm>
#include <map>

#include "gridscope/error.hpp"
#include "gridscope/text.hpp"
#include "gridscope/vocab.hpp"

namespace gridscope::obs {

namespace {

struct Candidate {
  double altitude;
  const std::string* id;
};

// Highest altitude first, smallest id on ties.
bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.altitude != b.altitude) {
    return a.altitude > b.altitude;
  }
  return *a.id < *b.id;
}

std::vector<Candidate> ranked(const Registry& registry, const ObservationRequest& req, Instant t,
                              const BrokerOptions& options) {
  std::vector<Candidate> out;
  for (const Telescope* tel : registry.telescopes()) {
    if (auto alt = feasible_altitude(registry, *tel, req, t, options)) {
      out.push_back({*alt, &tel->id});
    }
  }
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

double altitude_of(const Telescope& tel, const ObservationRequest& req, Instant t) {
  return ephemeris::alt_az(req.target, tel.location, t).altitude;
}

}  // namespace

Seconds NetworkSchedule::scheduled_time() const {
  Seconds total{0};
  for (const ScheduleSegment& s : segments) {
    total += s.end - s.start;
  }
  return total;
}

std::optional<double> feasible_altitude(const Registry& registry, const Telescope& tel,
                                        const ObservationRequest& req, Instant t,
                                        const BrokerOptions& options) {
  if (tel.status != ResourceStatus::online) {
    return std::nullopt;
  }
  if (!std::includes(tel.filters.begin(), tel.filters.end(), req.required_filters.begin(),
                     req.required_filters.end())) {
    return std::nullopt;
  }
  if (registry.weather_at(tel.id, t) == Weather::closed) {
    return std::nullopt;
  }
  if (!ephemeris::is_dark(tel.location, t, options.dark_threshold)) {
    return std::nullopt;
  }
  const double alt = altitude_of(tel, req, t);
  if (alt < tel.min_altitude) {
    return std::nullopt;
  }
  return alt;
}

std::vector<std::string> broker_match(const Registry& registry, const ObservationRequest& req,
                                      Instant t, const BrokerOptions& options) {
  std::vector<std::string> out;
  for (const Candidate& c : ranked(registry, req, t, options)) {
    out.push_back(*c.id);
  }
  return out;
}

std::set<std::string> feasible_set(const Registry& registry, const ObservationRequest& req,
                                   Instant t, const BrokerOptions& options) {
  std::set<std::string> out;
  for (const Telescope* tel : registry.telescopes()) {
    if (feasible_altitude(registry, *tel, req, t, options)) {
      out.insert(tel->id);
    }
  }
  return out;
}

NetworkSchedule build_schedule(const Registry& registry, const ObservationRequest& req,
                               Seconds step, const BrokerOptions& options) {
  req.validate();
  if (step < Seconds{1}) {
    throw ValidationError("schedule step must be at least 1 s");
  }
  if (step > req.duration) {
    throw ValidationError("schedule step must not exceed the requested duration");
  }

  // Grid instants g_0..g_K; interval k is [g_k, g_{k+1}) and takes the
  // assignment made at g_k.
  std::vector<Instant> grid;
  for (Instant t = req.window_start; t < req.window_end; t += step) {
    grid.push_back(t);
    if (req.window_end - t <= step) {
      break;
    }
  }
  grid.push_back(req.window_end);

  std::vector<const std::string*> assigned(grid.size() - 1, nullptr);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const auto candidates = ranked(registry, req, grid[k], options);
    if (!candidates.empty()) {
      assigned[k] = candidates.front().id;
    }
  }

  struct Run {
    const std::string* id;
    std::size_t first;
    std::size_t last;
    Instant start;
    Instant end;
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k < assigned.size(); ++k) {
    if (assigned[k] == nullptr) {
      continue;
    }
    if (!runs.empty() && runs.back().last + 1 == k && *runs.back().id == *assigned[k]) {
      runs.back().last = k;
      runs.back().end = grid[k + 1];
    } else {
      runs.push_back({assigned[k], k, k, grid[k], grid[k + 1]});
    }
  }

  // Move each touching A->B handover onto the crossing of their altitude
  // curves inside the step, provided both telescopes are feasible there.
  for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
    Run& a = runs[r];
    Run& b = runs[r + 1];
    if (a.last + 1 != b.first) {
      continue;
    }
    const Telescope& ta = registry.telescope(*a.id);
    const Telescope& tb = registry.telescope(*b.id);
    const Instant lo = grid[a.last];
    const Instant hi = grid[b.first];
    const ephemeris::AltitudeCurve ca{{lo, altitude_of(ta, req, lo), 0.0},
                                      {hi, altitude_of(ta, req, hi), 0.0}};
    const ephemeris::AltitudeCurve cb{{lo, altitude_of(tb, req, lo), 0.0},
                                      {hi, altitude_of(tb, req, hi), 0.0}};
    const auto crossings = ephemeris::curve_intersections(ca, cb);
    if (crossings.empty()) {
      continue;
    }
    const Instant at = crossings.front();
    if (feasible_altitude(registry, ta, req, at, options) &&
        feasible_altitude(registry, tb, req, at, options)) {
      a.end = at;
      b.start = at;
    }
  }

  // A run that ends because its telescope lost the target keeps its grid end
  // only if the telescope can still observe there; otherwise it ends at the
  // last feasible second inside the final step.
  for (Run& run : runs) {
    if (run.end != grid[run.last + 1]) {
      continue;
    }
    const Telescope& tel = registry.telescope(*run.id);
    if (feasible_altitude(registry, tel, req, run.end, options)) {
      continue;
    }
    Instant good = grid[run.last];
    Instant bad = run.end;
    while (bad - good > Seconds{1}) {
      const Instant mid = good + (bad - good) / 2;
      (feasible_altitude(registry, tel, req, mid, options) ? good : bad) = mid;
    }
    run.end = good;
  }

  NetworkSchedule schedule;
  schedule.request_id = req.id;
  for (const Run& run : runs) {
    if (run.end <= run.start) {
      continue;
    }
    if (!schedule.segments.empty() && schedule.segments.back().telescope_id == *run.id &&
        schedule.segments.back().end == run.start) {
      schedule.segments.back().end = run.end;
      continue;
    }
    schedule.segments.push_back({*run.id, run.start, run.end, 0.0, 0.0});
  }

  // Earliest time first until the duration is met.
  Seconds total{0};
  std::size_t keep = 0;
  for (; keep < schedule.segments.size() && total < req.duration; ++keep) {
    ScheduleSegment& seg = schedule.segments[keep];
    const Seconds remaining = req.duration - total;
    if (seg.end - seg.start > remaining) {
      seg.end = seg.start + remaining;
    }
    total += seg.end - seg.start;
  }
  schedule.segments.resize(keep);

  for (ScheduleSegment& seg : schedule.segments) {
    const Telescope& tel = registry.telescope(seg.telescope_id);
    seg.start_altitude = altitude_of(tel, req, seg.start);
    seg.end_altitude = altitude_of(tel, req, seg.end);
  }
  schedule.coverage = static_cast<double>(total.count()) / static_cast<double>(req.duration.count());
  return schedule;
}

nlohmann::ordered_json schedule_to_json(const NetworkSchedule& schedule) {
  nlohmann::ordered_json segments = nlohmann::ordered_json::array();
  for (const ScheduleSegment& s : schedule.segments) {
    segments.push_back({{"telescope", s.telescope_id},
                        {"start", s.start.iso()},
                        {"end", s.end.iso()},
                        {"start_alt_deg", s.start_altitude},
                        {"end_alt_deg", s.end_altitude}});
  }
  return {{"request", schedule.request_id},
          {"segments", std::move(segments)},
          {"coverage", schedule.coverage}};
}

std::string record_request(infosvc::InfoStore& store, const ObservationRequest& req) {
  using infosvc::Term;
  req.validate();
  const std::string context = vocab::request_context(req.id);
  const Term subject = Term::iri(context);
  auto lit = [&](std::string_view predicate, std::string value) {
    return infosvc::Triple{subject, Term::iri(std::string(predicate)), Term::literal(std::move(value))};
  };
  std::vector<infosvc::Triple> triples{
      lit(vocab::kUser, req.user),
      lit(vocab::kTargetName, req.target_name),
      lit(vocab::kRightAscension, format_double(req.target.ra())),
      lit(vocab::kDeclination, format_double(req.target.dec())),
      lit(vocab::kStart, req.window_start.iso()),
      lit(vocab::kEnd, req.window_end.iso()),
      lit(vocab::kPriority, std::to_string(req.priority)),
  };
  for (const std::string& f : req.required_filters) {
    triples.push_back(lit(vocab::kRequestedFilter, f));
  }
  store.put_graph(context, triples);
  return context;
}

}  // namespace gridscope::obs
