#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace gridscope {

using Seconds = std::chrono::seconds;

// A UTC instant with one-second resolution, restricted to years 1900..2100.
// Leap seconds are ignored: every day has exactly 86400 seconds.
class Instant {
 public:
  static constexpr int kMinYear = 1900;
  static constexpr int kMaxYear = 2100;

  // 1970-01-01T00:00:00Z, only useful as a placeholder before assignment.
  Instant() = default;

  static Instant from_civil(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                            int second = 0);
  static Instant from_unix(std::int64_t seconds);
  // Accepts "YYYY-MM-DDTHH:MM:SSZ" (the trailing Z is required).
  static Instant parse(std::string_view iso);

  std::int64_t unix_seconds() const { return seconds_; }
  int year() const;
  std::string iso() const;

  Instant operator+(Seconds dt) const { return from_unix(seconds_ + dt.count()); }
  Instant operator-(Seconds dt) const { return from_unix(seconds_ - dt.count()); }
  Seconds operator-(Instant other) const { return Seconds{seconds_ - other.seconds_}; }
  Instant& operator+=(Seconds dt) { return *this = *this + dt; }

  auto operator<=>(const Instant&) const = default;

 private:
  explicit Instant(std::int64_t s) : seconds_(s) {}
  std::int64_t seconds_ = 0;
};

}  // namespace gridscope
