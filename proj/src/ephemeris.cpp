#include "gridscope/ephemeris.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridscope/error.hpp"

namespace gridscope::ephemeris {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// 2000-01-01T12:00:00Z as unix seconds.
constexpr std::int64_t kJ2000Unix = 946728000;

double sind(double deg) { return std::sin(deg * kDegToRad); }
double cosd(double deg) { return std::cos(deg * kDegToRad); }

// Days since J2000, computed from the integer second count to keep precision.
double days_since_j2000(Instant t) {
  return static_cast<double>(t.unix_seconds() - kJ2000Unix) / 86400.0;
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

EquatorialCoord::EquatorialCoord(double ra_deg, double dec_deg) {
  if (!std::isfinite(ra_deg) || !std::isfinite(dec_deg)) {
    throw ValidationError("equatorial coordinate must be finite");
  }
  if (dec_deg < -90.0 || dec_deg > 90.0) {
    throw ValidationError("declination out of range [-90, 90]");
  }
  ra_ = normalize_degrees(ra_deg);
  dec_ = dec_deg;
}

GeoLocation::GeoLocation(double lat_deg, double lon_deg, double elevation_m)
    : lat_(lat_deg), lon_(lon_deg), elevation_(elevation_m) {
  if (!std::isfinite(lat_deg) || lat_deg < -90.0 || lat_deg > 90.0) {
    throw ValidationError("latitude out of range [-90, 90]");
  }
  if (!std::isfinite(lon_deg) || lon_deg < -180.0 || lon_deg > 180.0) {
    throw ValidationError("longitude out of range [-180, 180]");
  }
  if (!std::isfinite(elevation_m) || elevation_m < -430.0) {
    throw ValidationError("elevation below -430 m");
  }
}

double normalize_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) {
    r += 360.0;
  }
  return r >= 360.0 ? 0.0 : r;
}

double julian_date(Instant t) { return 2440587.5 + static_cast<double>(t.unix_seconds()) / 86400.0; }

double greenwich_sidereal_time(Instant t) {
  const double d = days_since_j2000(t);
  const double centuries = d / 36525.0;
  const double gmst = 280.46061837 + 360.98564736629 * d +
                      centuries * centuries * (0.000387933 - centuries / 38710000.0);
  return normalize_degrees(gmst);
}

double local_sidereal_time(Instant t, const GeoLocation& loc) {
  return normalize_degrees(greenwich_sidereal_time(t) + loc.lon());
}

Horizontal horizontal_from_hour_angle(double hour_angle_deg, double dec_deg, double lat_deg) {
  // Unit vector in the local (north, east, up) frame.
  const double north =
      sind(dec_deg) * cosd(lat_deg) - cosd(dec_deg) * cosd(hour_angle_deg) * sind(lat_deg);
  const double east = -cosd(dec_deg) * sind(hour_angle_deg);
  const double up =
      sind(dec_deg) * sind(lat_deg) + cosd(dec_deg) * cosd(hour_angle_deg) * cosd(lat_deg);
  const double horizontal = std::hypot(north, east);
  const double altitude = std::clamp(std::atan2(up, horizontal) * kRadToDeg, -90.0, 90.0);
  const double azimuth = horizontal == 0.0 ? 0.0 : normalize_degrees(std::atan2(east, north) * kRadToDeg);
  return {altitude, azimuth};
}

Horizontal alt_az(const EquatorialCoord& target, const GeoLocation& loc, Instant t) {
  const double hour_angle = local_sidereal_time(t, loc) - target.ra();
  return horizontal_from_hour_angle(hour_angle, target.dec(), loc.lat());
}

EquatorialCoord sun_position(Instant t) {
  const double n = days_since_j2000(t);
  const double mean_longitude = normalize_degrees(280.460 + 0.9856474 * n);
  const double mean_anomaly = normalize_degrees(357.528 + 0.9856003 * n);
  const double ecliptic_longitude =
      mean_longitude + 1.915 * sind(mean_anomaly) + 0.020 * sind(2.0 * mean_anomaly);
  const double obliquity = 23.439 - 0.0000004 * n;
  const double ra =
      std::atan2(cosd(obliquity) * sind(ecliptic_longitude), cosd(ecliptic_longitude)) * kRadToDeg;
  const double dec = std::asin(std::clamp(sind(obliquity) * sind(ecliptic_longitude), -1.0, 1.0)) *
                     kRadToDeg;
  return {ra, dec};
}

GeoLocation subsolar_point(Instant t) {
  const EquatorialCoord sun = sun_position(t);
  double lon = normalize_degrees(sun.ra() - greenwich_sidereal_time(t));
  if (lon > 180.0) {
    lon -= 360.0;
  }
  return {sun.dec(), lon};
}

double sun_altitude(const GeoLocation& loc, Instant t) {
  return alt_az(sun_position(t), loc, t).altitude;
}

bool is_dark(const GeoLocation& loc, Instant t, double threshold_deg) {
  if (!(threshold_deg >= -18.0 && threshold_deg <= 0.0)) {
    throw ValidationError("darkness threshold must lie in [-18, 0]");
  }
  return sun_altitude(loc, t) < threshold_deg;
}

AltitudeCurve altitude_curve(const EquatorialCoord& target, const GeoLocation& loc, Instant start,
                             Instant end, Seconds step) {
  if (end < start) {
    throw ValidationError("altitude curve window is empty (end before start)");
  }
  if (step < Seconds{1}) {
    throw ValidationError("altitude curve step must be at least 1 s");
  }
  AltitudeCurve curve;
  curve.reserve(static_cast<std::size_t>((end - start) / step) + 2);
  for (Instant t = start; t <= end; t += step) {
    const Horizontal h = alt_az(target, loc, t);
    curve.push_back({t, h.altitude, h.azimuth});
    if (end - t < step) {
      break;
    }
  }
  if (curve.back().t != end) {
    const Horizontal h = alt_az(target, loc, end);
    curve.push_back({end, h.altitude, h.azimuth});
  }
  return curve;
}

std::vector<Instant> curve_intersections(const AltitudeCurve& a, const AltitudeCurve& b) {
  if (a.size() != b.size()) {
    throw ValidationError("curves sampled on different grids");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].t != b[i].t) {
      throw ValidationError("curves sampled on different grids");
    }
  }

  std::vector<Instant> out;
  int prev_sign = 0;
  std::size_t prev_index = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i].altitude - b[i].altitude;
    const int s = sign(diff);
    if (s == 0) {
      continue;
    }
    if (prev_sign != 0 && s != prev_sign) {
      if (prev_index + 1 == i) {
        const double prev_diff = a[prev_index].altitude - b[prev_index].altitude;
        const double fraction = prev_diff / (prev_diff - diff);
        const auto span = static_cast<double>((a[i].t - a[prev_index].t).count());
        out.push_back(a[prev_index].t + Seconds{std::llround(span * fraction)});
      } else {
        // Crossing through a run of exactly-equal samples: report where it starts.
        out.push_back(a[prev_index + 1].t);
      }
    }
    prev_sign = s;
    prev_index = i;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace gridscope::ephemeris
