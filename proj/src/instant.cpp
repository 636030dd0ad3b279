#include "gridscope/instant.hpp"

#include <charconv>
#include <cstdio>

#include "gridscope/error.hpp"

namespace gridscope {

using namespace std::chrono;

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t min_seconds() {
  return sys_days{year{Instant::kMinYear} / January / 1}.time_since_epoch().count() *
         kSecondsPerDay;
}

std::int64_t max_seconds() {
  return (sys_days{year{Instant::kMaxYear + 1} / January / 1}.time_since_epoch().count()) *
             kSecondsPerDay -
         1;
}

int parse_field(std::string_view text, std::size_t pos, std::size_t len, std::string_view iso) {
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw ParseError("malformed timestamp: '" + std::string(iso) + "'");
  }
  return value;
}

}  // namespace

Instant Instant::from_unix(std::int64_t s) {
  if (s < min_seconds() || s > max_seconds()) {
    throw ValidationError("instant outside supported years " + std::to_string(kMinYear) + ".." +
                          std::to_string(kMaxYear));
  }
  return Instant{s};
}

Instant Instant::from_civil(int y, unsigned mo, unsigned d, int h, int mi, int s) {
  year_month_day ymd{std::chrono::year{y}, month{mo}, day{d}};
  if (!ymd.ok()) {
    throw ValidationError("invalid calendar date");
  }
  if (y < kMinYear || y > kMaxYear) {
    throw ValidationError("year " + std::to_string(y) + " outside supported range");
  }
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) {
    throw ValidationError("invalid time of day");
  }
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return from_unix(days * kSecondsPerDay + h * 3600 + mi * 60 + s);
}

Instant Instant::parse(std::string_view iso) {
  // 2008-06-21T00:00:00Z
  if (iso.size() != 20 || iso[4] != '-' || iso[7] != '-' || iso[10] != 'T' || iso[13] != ':' ||
      iso[16] != ':' || iso[19] != 'Z') {
    throw ParseError("malformed timestamp: '" + std::string(iso) + "'");
  }
  const int y = parse_field(iso, 0, 4, iso);
  const int mo = parse_field(iso, 5, 2, iso);
  const int d = parse_field(iso, 8, 2, iso);
  const int h = parse_field(iso, 11, 2, iso);
  const int mi = parse_field(iso, 14, 2, iso);
  const int s = parse_field(iso, 17, 2, iso);
  if (mo < 1 || d < 1) {
    throw ParseError("invalid calendar date in '" + std::string(iso) + "'");
  }
  try {
    return from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
  } catch (const ValidationError& e) {
    throw ParseError(std::string(e.what()) + " in '" + std::string(iso) + "'");
  }
}

int Instant::year() const {
  const auto days = floor<std::chrono::days>(sys_seconds{seconds{seconds_}});
  return static_cast<int>(year_month_day{days}.year());
}

std::string Instant::iso() const {
  const sys_seconds tp{seconds{seconds_}};
  const auto days = floor<std::chrono::days>(tp);
  const year_month_day ymd{days};
  const hh_mm_ss hms{tp - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

}  // namespace gridscope
