#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscope/ephemeris.hpp"
#include "gridscope/infosvc.hpp"
#include "gridscope/instant.hpp"
#include "gridscope/resources.hpp"

namespace gridscope::obs {

struct ObservationRequest {
  std::string id;
  std::string user;
  std::string target_name;
  ephemeris::EquatorialCoord target{0.0, 0.0};
  std::set<std::string> required_filters;
  Instant window_start;
  Instant window_end;
  Seconds duration{0};
  int priority = 0;

  void validate() const;
  bool operator==(const ObservationRequest&) const = default;
};

// RTML-subset XML:
//   RTML > Request > { Target name=".." > Coordinates > { RightAscension, Declination },
//                      Filter+, Duration, Window start=".." end="..", Priority? }
// The optional user is carried as a "user" attribute on Request.
ObservationRequest parse_request_xml(std::string_view xml);
// JSON mirror with keys user, target_name, ra_deg, dec_deg, filters,
// duration_s, window_start, window_end, priority.
ObservationRequest parse_request_json(const nlohmann::json& doc);
// Dispatches on the first non-blank character ('<' for XML, '{' for JSON).
ObservationRequest parse_request(std::string_view document);

std::string request_to_xml(const ObservationRequest& req);
nlohmann::ordered_json request_to_json(const ObservationRequest& req);

struct BrokerOptions {
  double dark_threshold = ephemeris::kDefaultDarkThreshold;
};

// Target altitude if the telescope can observe the request at t, i.e. it is
// online, carries every required filter, is not weathered out, is dark and
// sees the target above its minimum altitude.
std::optional<double> feasible_altitude(const Registry& registry, const Telescope& telescope,
                                        const ObservationRequest& req, Instant t,
                                        const BrokerOptions& options = {});

// Feasible telescopes ranked by target altitude (descending), then id.
std::vector<std::string> broker_match(const Registry& registry, const ObservationRequest& req,
                                      Instant t, const BrokerOptions& options = {});
std::set<std::string> feasible_set(const Registry& registry, const ObservationRequest& req,
                                   Instant t, const BrokerOptions& options = {});

struct ScheduleSegment {
  std::string telescope_id;
  Instant start;
  Instant end;
  double start_altitude = 0.0;
  double end_altitude = 0.0;

  bool operator==(const ScheduleSegment&) const = default;
};

struct NetworkSchedule {
  std::string request_id;
  std::vector<ScheduleSegment> segments;
  double coverage = 0.0;

  Seconds scheduled_time() const;
  bool operator==(const NetworkSchedule&) const = default;
};

inline constexpr Seconds kDefaultStep{60};

// Altitude-optimised handover schedule: the highest feasible telescope at
// every grid instant, with telescope changes moved onto the altitude-curve
// crossing inside the step when one exists. Earliest feasible time is used
// first until the requested duration is reached.
NetworkSchedule build_schedule(const Registry& registry, const ObservationRequest& req,
                               Seconds step = kDefaultStep, const BrokerOptions& options = {});

nlohmann::ordered_json schedule_to_json(const NetworkSchedule& schedule);

// Application metadata for a request, stored in "urn:request:<id>".
std::string record_request(infosvc::InfoStore& store, const ObservationRequest& req);

}  // namespace gridscope::obs
