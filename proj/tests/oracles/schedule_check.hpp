#pragma once

// Structural checks for a network schedule: per-grid-instant argmax and
// handover placement against a 1 s crossing search.

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "gridscope/obs_sched.hpp"
#include "oracles/sky_oracle.hpp"

namespace oracle {

using gridscope::Instant;
using gridscope::Registry;
using gridscope::Seconds;
using gridscope::obs::NetworkSchedule;
using gridscope::obs::ObservationRequest;

// Best feasible telescope at t by a plain linear scan (highest altitude,
// smallest id on ties), or nullopt when none is feasible.
inline std::optional<std::string> argmax_at(const Registry& reg, const ObservationRequest& req,
                                            Instant t) {
  std::optional<std::string> best;
  double best_alt = -1000.0;
  for (const auto* tel : reg.telescopes()) {
    const auto alt = gridscope::obs::feasible_altitude(reg, *tel, req, t);
    if (alt && (*alt > best_alt || (*alt == best_alt && tel->id < *best))) {
      best = tel->id;
      best_alt = *alt;
    }
  }
  return best;
}

inline const std::string* assigned_at(const NetworkSchedule& s, Instant t) {
  for (const auto& seg : s.segments) {
    if (seg.start <= t && t < seg.end) {
      return &seg.telescope_id;
    }
  }
  return nullptr;
}

// Grid instants (window start + k * step, excluding the window end) whose
// assignment differs from the argmax. Only valid when the requested duration
// covers the window, so that no feasible time is dropped by truncation.
inline std::vector<std::string> argmax_violations(const Registry& reg, const ObservationRequest& req,
                                                  const NetworkSchedule& s, Seconds step) {
  std::vector<std::string> out;
  for (Instant t = req.window_start; t < req.window_end; t += step) {
    const auto best = argmax_at(reg, req, t);
    const std::string* got = assigned_at(s, t);
    const std::string got_s = got ? *got : "-";
    const std::string want_s = best ? *best : "-";
    if (got_s != want_s) {
      out.push_back(t.iso() + ": assigned " + got_s + ", argmax " + want_s);
    }
  }
  return out;
}

struct Handover {
  std::string from;
  std::string to;
  Instant at;
};

inline std::vector<Handover> handovers(const NetworkSchedule& s) {
  std::vector<Handover> out;
  for (std::size_t i = 0; i + 1 < s.segments.size(); ++i) {
    const auto& a = s.segments[i];
    const auto& b = s.segments[i + 1];
    if (a.end == b.start && a.telescope_id != b.telescope_id) {
      out.push_back({a.telescope_id, b.telescope_id, a.end});
    }
  }
  return out;
}

// Distance in seconds from the handover to the nearest 1 s crossing of the
// two telescopes' altitude curves, searched within +-limit seconds.
inline std::optional<std::int64_t> crossing_distance(const Registry& reg,
                                                     const ObservationRequest& req,
                                                     const Handover& h, std::int64_t limit) {
  const auto& a = reg.telescope(h.from).location;
  const auto& b = reg.telescope(h.to).location;
  const double ra = req.target.ra();
  const double dec = req.target.dec();
  const std::int64_t t = h.at.unix_seconds();
  const auto crossings = dense_crossings(
      [&](std::int64_t s) {
        return alt_az(ra, dec, a.lat(), a.lon(), s).alt - alt_az(ra, dec, b.lat(), b.lon(), s).alt;
      },
      t - limit, t + limit);
  std::optional<std::int64_t> best;
  for (std::int64_t c : crossings) {
    // A crossing between c and c + 1 is at most one second from either end.
    const std::int64_t d = std::min(std::llabs(c - t), std::llabs(c + 1 - t));
    if (!best || d < *best) {
      best = d;
    }
  }
  return best;
}

}  // namespace oracle
