#include "gridscope/monitor.hpp"

#include <cmath>
#include <numbers>

#include "gridscope/audit.hpp"
#include "gridscope/ephemeris.hpp"
#include "gridscope/error.hpp"
#include "gridscope/text.hpp"

namespace gridscope::monitor {

using nlohmann::ordered_json;

namespace {

constexpr double kHeaderHeight = 24.0;
constexpr double kRowHeight = 16.0;
constexpr double kBarHeight = 12.0;

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string band_label(const infosvc::JobRecord& job, Visibility visibility) {
  std::string label = job.id + " " + std::string(to_string(job.state));
  if (visibility == Visibility::internal) {
    label += " " + job.owner + " " + job.executable;
  }
  return label;
}

}  // namespace

std::string_view state_color(JobState state) {
  switch (state) {
    case JobState::pending:
      return "gray";
    case JobState::active:
      return "blue";
    case JobState::done:
      return "green";
    case JobState::failed:
      return "red";
    case JobState::canceled:
      return "orange";
  }
  return "gray";
}

double band_width(Seconds duration, double scale_px_per_min) {
  if (duration <= Seconds{0}) {
    return 1.0;
  }
  return static_cast<double>(duration.count()) * scale_px_per_min / 60.0;
}

Timeline build_timeline(const infosvc::InfoStore& store, Instant window_start, Instant window_end,
                        Visibility visibility, double scale_px_per_min) {
  if (window_end <= window_start) {
    throw ValidationError("timeline window is empty");
  }
  if (!(scale_px_per_min > 0.0)) {
    throw ValidationError("timeline scale must be positive");
  }
  Timeline timeline{window_start, window_end, scale_px_per_min, {}};
  for (const infosvc::JobRecord& job : infosvc::read_job_records(store)) {
    const std::optional<Instant> begin = job.start_t ? job.start_t : job.submit_t;
    if (!begin) {
      continue;
    }
    const Instant end = job.end_t.value_or(std::max(window_end, *begin));
    if (*begin > window_end || end < window_start) {
      continue;
    }
    TimelineBand band;
    band.job_id = job.id;
    band.start = *begin;
    band.end = end;
    band.state = job.state;
    band.label = band_label(job, visibility);
    band.x = static_cast<double>((*begin - window_start).count()) * scale_px_per_min / 60.0;
    band.width = band_width(end - *begin, scale_px_per_min);
    timeline.bands.push_back(std::move(band));
  }
  return timeline;
}

std::string render_timeline_svg(const Timeline& tl) {
  const double width = band_width(tl.window_end - tl.window_start, tl.scale_px_per_min);
  const double height = kHeaderHeight + kRowHeight * static_cast<double>(tl.bands.size());
  const std::string scale = format_double(tl.scale_px_per_min);
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         format_double(width) + "\" height=\"" + format_double(height) +
         "\" data-scale-px-per-min=\"" + scale + "\" data-window-start=\"" +
         tl.window_start.iso() + "\" data-window-end=\"" + tl.window_end.iso() + "\">\n";
  svg += "<desc>scale_px_per_min=" + scale + " window=" + tl.window_start.iso() + "/" +
         tl.window_end.iso() + "</desc>\n";
  for (std::size_t i = 0; i < tl.bands.size(); ++i) {
    const TimelineBand& b = tl.bands[i];
    const double y = kHeaderHeight + kRowHeight * static_cast<double>(i);
    svg += "<g id=\"" + xml_escape(b.job_id) + "\">";
    svg += "<rect x=\"" + format_double(b.x) + "\" y=\"" + format_double(y) + "\" width=\"" +
           format_double(b.width) + "\" height=\"" + format_double(kBarHeight) + "\" fill=\"" +
           std::string(state_color(b.state)) + "\"/>";
    svg += "<text x=\"" + format_double(std::max(b.x, 0.0) + 2.0) + "\" y=\"" +
           format_double(y + kBarHeight - 2.0) + "\" font-size=\"10\">" + xml_escape(b.label) +
           "</text>";
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

ordered_json timeline_to_json(const Timeline& tl) {
  ordered_json bands = ordered_json::array();
  for (const TimelineBand& b : tl.bands) {
    bands.push_back({{"job", b.job_id},
                     {"start", b.start.iso()},
                     {"end", b.end.iso()},
                     {"state", to_string(b.state)},
                     {"color", state_color(b.state)},
                     {"label", b.label},
                     {"x", b.x},
                     {"width", b.width}});
  }
  return {{"window_start", tl.window_start.iso()},
          {"window_end", tl.window_end.iso()},
          {"scale_px_per_min", tl.scale_px_per_min},
          {"bands", std::move(bands)}};
}

double terminator_latitude(Instant t, double lon_deg) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const ephemeris::GeoLocation sub = ephemeris::subsolar_point(t);
  const double hour_angle = (lon_deg - sub.lon()) * kDeg;
  const double dec = sub.lat() * kDeg;
  // Solve sin(lat) sin(dec) + cos(lat) cos(dec) cos(H) = 0 for lat.
  if (std::sin(dec) == 0.0) {
    const double c = std::cos(hour_angle);
    return c > 0.0 ? -90.0 : (c < 0.0 ? 90.0 : 0.0);
  }
  return std::atan(-std::cos(hour_angle) * std::cos(dec) / std::sin(dec)) / kDeg;
}

ordered_json export_map(const Registry& registry, Instant t) {
  ordered_json entries = ordered_json::array();
  for (const Telescope* tel : registry.telescopes()) {
    entries.push_back(
        {{"kind", "telescope"},
         {"id", tel->id},
         {"lat", tel->location.lat()},
         {"lon", tel->location.lon()},
         {"properties",
          {{"name", tel->name},
           {"filters", tel->filters},
           {"aperture", tel->aperture},
           {"status", to_string(tel->status)},
           {"weather", to_string(registry.weather_at(tel->id, t))},
           {"dark", ephemeris::is_dark(tel->location, t, ephemeris::kTerminatorThreshold)}}}});
  }
  for (const ComputeResource* host : registry.computes()) {
    if (!host->location) {
      continue;
    }
    entries.push_back({{"kind", "compute"},
                       {"id", host->id},
                       {"lat", host->location->lat()},
                       {"lon", host->location->lon()},
                       {"properties",
                        {{"contact", host->contact},
                         {"lrm", to_string(host->lrm)},
                         {"status", to_string(host->status)},
                         {"slots", host->slots},
                         {"load", host->slots - host->free_slots}}}});
  }
  ordered_json terminator = ordered_json::array();
  const int samples = static_cast<int>(360.0 / kTerminatorStepDeg);
  for (int i = 0; i <= samples; ++i) {
    const double lon = -180.0 + kTerminatorStepDeg * i;
    terminator.push_back({{"lat", terminator_latitude(t, lon)}, {"lon", lon}});
  }
  const ephemeris::GeoLocation sub = ephemeris::subsolar_point(t);
  return {{"t", t.iso()},
          {"entries", std::move(entries)},
          {"terminator", std::move(terminator)},
          {"subsolar", {{"lat", sub.lat()}, {"lon", sub.lon()}}}};
}

}  // namespace gridscope::monitor
