#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscope/infosvc.hpp"
#include "gridscope/instant.hpp"
#include "gridscope/job.hpp"
#include "gridscope/resources.hpp"

namespace gridscope::monitor {

enum class Visibility { internal, published };

inline constexpr double kDefaultScalePxPerMin = 1.0;

// Fixed palette: pending gray, active blue, done green, failed red, canceled orange.
std::string_view state_color(JobState state);

struct TimelineBand {
  std::string job_id;
  Instant start;
  Instant end;
  JobState state = JobState::pending;
  std::string label;
  double x = 0.0;      // pixels from the window start
  double width = 0.0;  // pixels; zero-length bands are drawn 1 px wide
};

struct Timeline {
  Instant window_start;
  Instant window_end;
  double scale_px_per_min = kDefaultScalePxPerMin;
  std::vector<TimelineBand> bands;
};

// One band per job whose [start or submit, end or window end] overlaps the
// window. Published timelines drop owner and executable from the labels and
// nothing else.
Timeline build_timeline(const infosvc::InfoStore& store, Instant window_start, Instant window_end,
                        Visibility visibility = Visibility::internal,
                        double scale_px_per_min = kDefaultScalePxPerMin);

double band_width(Seconds duration, double scale_px_per_min);

std::string render_timeline_svg(const Timeline& timeline);
nlohmann::ordered_json timeline_to_json(const Timeline& timeline);

inline constexpr double kTerminatorStepDeg = 1.0;

// Latitude on the day/night terminator at the given longitude for time t.
double terminator_latitude(Instant t, double lon_deg);

// Telescope Map / Resource Map document: "entries" for every telescope and
// every located compute host, the day/night "terminator" sampled at 1 degree
// of longitude, and the "subsolar" point.
nlohmann::ordered_json export_map(const Registry& registry, Instant t);

}  // namespace gridscope::monitor
