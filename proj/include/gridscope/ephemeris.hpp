#pragma once

#include <vector>

#include "gridscope/instant.hpp"

// Low-precision positional astronomy: enough to rank telescopes by target
// altitude and to draw a day/night terminator. Geometric positions only; no
// refraction, precession, nutation or parallax.
namespace gridscope::ephemeris {

inline constexpr double kDefaultDarkThreshold = -12.0;  // nautical twilight
inline constexpr double kTerminatorThreshold = 0.0;

// Right ascension and declination in degrees. RA is wrapped into [0, 360);
// a declination outside [-90, 90] is rejected rather than clamped.
class EquatorialCoord {
 public:
  EquatorialCoord(double ra_deg, double dec_deg);

  double ra() const { return ra_; }
  double dec() const { return dec_; }

  bool operator==(const EquatorialCoord&) const = default;

 private:
  double ra_;
  double dec_;
};

// Observer position; longitude is east-positive.
class GeoLocation {
 public:
  GeoLocation(double lat_deg, double lon_deg, double elevation_m = 0.0);

  double lat() const { return lat_; }
  double lon() const { return lon_; }
  double elevation() const { return elevation_; }

  bool operator==(const GeoLocation&) const = default;

 private:
  double lat_;
  double lon_;
  double elevation_;
};

struct Horizontal {
  double altitude;  // degrees, [-90, 90]
  double azimuth;   // degrees, [0, 360), north = 0, east = 90
};

struct AltitudeSample {
  Instant t;
  double altitude;
  double azimuth;
};

using AltitudeCurve = std::vector<AltitudeSample>;

// Wraps an angle into [0, 360).
double normalize_degrees(double deg);

double julian_date(Instant t);

// Greenwich mean sidereal time in degrees, [0, 360).
double greenwich_sidereal_time(Instant t);
double local_sidereal_time(Instant t, const GeoLocation& loc);

// Horizontal coordinates for a given hour angle; the building block of alt_az,
// exposed so that analytic cases (culmination, antipode) can be checked
// without going through sidereal time.
Horizontal horizontal_from_hour_angle(double hour_angle_deg, double dec_deg, double lat_deg);

Horizontal alt_az(const EquatorialCoord& target, const GeoLocation& loc, Instant t);

EquatorialCoord sun_position(Instant t);

// The point on Earth where the sun is at the zenith at t.
GeoLocation subsolar_point(Instant t);

double sun_altitude(const GeoLocation& loc, Instant t);

// True iff the sun's altitude at loc is below threshold_deg (which must lie in [-18, 0]).
bool is_dark(const GeoLocation& loc, Instant t, double threshold_deg = kDefaultDarkThreshold);

// Samples at start, start + step, ... and a final sample at end when end is
// not already on the grid. A zero-length window yields a single sample.
AltitudeCurve altitude_curve(const EquatorialCoord& target, const GeoLocation& loc, Instant start,
                             Instant end, Seconds step);

// Instants where the sign of (a - b) flips between consecutive samples, found
// by linear interpolation and rounded to the nearest second. Touching without
// crossing is not reported. Both curves must share the same time grid.
std::vector<Instant> curve_intersections(const AltitudeCurve& a, const AltitudeCurve& b);

}  // namespace gridscope::ephemeris
