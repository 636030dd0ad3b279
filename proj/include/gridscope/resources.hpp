#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscope/ephemeris.hpp"
#include "gridscope/instant.hpp"
#include "gridscope/job.hpp"

namespace gridscope {

namespace infosvc {
class InfoStore;
}

enum class ResourceStatus { online, offline };
enum class Weather { clear, cloudy, closed };

std::string_view to_string(ResourceStatus status);
std::string_view to_string(Weather weather);
ResourceStatus parse_resource_status(std::string_view text);
Weather parse_weather(std::string_view text);

struct Telescope {
  std::string id;
  std::string name;
  ephemeris::GeoLocation location{0.0, 0.0};
  std::set<std::string> filters;
  double aperture = 1.0;      // meters
  double min_altitude = 0.0;  // degrees, [0, 90)
  ResourceStatus status = ResourceStatus::online;

  void validate() const;
};

struct ComputeResource {
  std::string id;
  std::string contact;
  Lrm lrm = Lrm::fork;
  int slots = 1;
  int free_slots = 1;
  ResourceStatus status = ResourceStatus::online;
  // Only used to place the host on the resource map.
  std::optional<ephemeris::GeoLocation> location;

  void validate() const;
};

struct WeatherWeights {
  double clear = 0.6;
  double cloudy = 0.3;
  double closed = 0.1;
};

// Scripted condition for [start, end); wins over the generator.
struct WeatherOverride {
  std::string telescope_id;
  Instant start;
  Instant end;
  Weather condition = Weather::clear;
};

// Deterministic per-hour weather: a pure function of (seed, telescope id,
// hour bucket) unless an override covers the instant.
class WeatherModel {
 public:
  WeatherModel() = default;
  WeatherModel(std::uint64_t seed, WeatherWeights weights = {});

  Weather at(std::string_view telescope_id, Instant t) const;

  std::uint64_t seed() const { return seed_; }
  const WeatherWeights& weights() const { return weights_; }
  const std::vector<WeatherOverride>& overrides() const { return overrides_; }
  void add_override(WeatherOverride o);

 private:
  std::uint64_t seed_ = 0;
  WeatherWeights weights_;
  std::vector<WeatherOverride> overrides_;
};

// Telescopes, compute hosts and the weather feed. Registrations are mirrored
// into the information service as resource metadata when a store is attached.
class Registry {
 public:
  Registry() = default;

  void attach_store(infosvc::InfoStore* store) { store_ = store; }

  const std::string& register_telescope(Telescope t);
  const std::string& register_compute(ComputeResource c);
  void remove_telescope(const std::string& id);

  const Telescope& telescope(const std::string& id) const;
  const ComputeResource& compute(const std::string& id) const;
  bool has_telescope(const std::string& id) const { return telescopes_.contains(id); }
  bool has_compute(const std::string& id) const { return computes_.contains(id); }

  // Ordered by id.
  std::vector<const Telescope*> telescopes() const;
  std::vector<const ComputeResource*> computes() const;

  void set_telescope_status(const std::string& id, ResourceStatus status);
  void set_compute_status(const std::string& id, ResourceStatus status);
  // Slot bookkeeping for the metascheduler; keeps free_slots in [0, slots].
  void take_slot(const std::string& compute_id);
  void give_slot(const std::string& compute_id);

  Weather weather_at(const std::string& telescope_id, Instant t) const;
  WeatherModel& weather() { return weather_; }
  const WeatherModel& weather() const { return weather_; }

  // Document with keys "telescopes", "compute", "weather_seed",
  // "weather_overrides" (and optionally "weather_weights").
  static Registry from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;

 private:
  void publish_telescope(const Telescope& t) const;
  void publish_compute(const ComputeResource& c) const;

  std::map<std::string, Telescope> telescopes_;
  std::map<std::string, ComputeResource> computes_;
  WeatherModel weather_;
  infosvc::InfoStore* store_ = nullptr;
};

// Simulated time with a discrete event queue. Events due within an advance
// fire in (timestamp, entity id, insertion) order and see now() equal to
// their own timestamp while running.
class SimClock {
 public:
  using Action = std::function<void(Instant)>;

  explicit SimClock(Instant start = Instant::from_civil(2008, 1, 1)) : now_(start) {}

  Instant now() const { return now_; }

  void schedule(Instant at, std::string entity_id, Action action);
  // Advances by dt > 0, firing every event with timestamp <= now + dt.
  Instant advance(Seconds dt);
  // Advances to t when t is in the future; no-op otherwise.
  Instant advance_to(Instant t);
  // Fires events already due (timestamp <= now) without moving time.
  void run_due();
  std::size_t pending_events() const { return queue_.size(); }
  std::optional<Instant> next_event_time() const;

 private:
  struct Key {
    Instant at;
    std::string entity;
    std::uint64_t seq;
    auto operator<=>(const Key&) const = default;
  };

  Instant now_;
  std::uint64_t seq_ = 0;
  std::map<Key, Action> queue_;
};

}  // namespace gridscope
