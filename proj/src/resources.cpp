#include "gridscope/resources.hpp"

#include <cmath>

#include "gridscope/error.hpp"
#include "gridscope/infosvc.hpp"
#include "gridscope/text.hpp"
#include "gridscope/vocab.hpp"

namespace gridscope {

using nlohmann::json;

std::string_view to_string(ResourceStatus status) {
  return status == ResourceStatus::online ? "online" : "offline";
}

std::string_view to_string(Weather weather) {
  switch (weather) {
    case Weather::clear:
      return "clear";
    case Weather::cloudy:
      return "cloudy";
    case Weather::closed:
      return "closed";
  }
  return "clear";
}

ResourceStatus parse_resource_status(std::string_view text) {
  if (text == "online") {
    return ResourceStatus::online;
  }
  if (text == "offline") {
    return ResourceStatus::offline;
  }
  throw ValidationError("unknown resource status '" + std::string(text) + "'");
}

Weather parse_weather(std::string_view text) {
  for (Weather w : {Weather::clear, Weather::cloudy, Weather::closed}) {
    if (to_string(w) == text) {
      return w;
    }
  }
  throw ValidationError("unknown weather condition '" + std::string(text) + "'");
}

void Telescope::validate() const {
  if (id.empty()) {
    throw ValidationError("telescope id must not be empty");
  }
  if (filters.empty()) {
    throw ValidationError("telescope " + id + " needs at least one filter");
  }
  if (!(aperture > 0.0)) {
    throw ValidationError("telescope " + id + " aperture must be positive");
  }
  if (!(min_altitude >= 0.0 && min_altitude < 90.0)) {
    throw ValidationError("telescope " + id + " min_altitude must lie in [0, 90)");
  }
}

void ComputeResource::validate() const {
  if (id.empty()) {
    throw ValidationError("compute resource id must not be empty");
  }
  if (contact.empty()) {
    throw ValidationError("compute resource " + id + " needs a contact host");
  }
  if (slots < 1) {
    throw ValidationError("compute resource " + id + " needs at least one slot");
  }
  if (free_slots < 0 || free_slots > slots) {
    throw ValidationError("compute resource " + id + " free_slots must lie in [0, slots]");
  }
}

// ---------------------------------------------------------------------------
// Weather

WeatherModel::WeatherModel(std::uint64_t seed, WeatherWeights weights)
    : seed_(seed), weights_(weights) {
  const double total = weights.clear + weights.cloudy + weights.closed;
  if (weights.clear < 0 || weights.cloudy < 0 || weights.closed < 0 || !(total > 0.0)) {
    throw ValidationError("weather weights must be non-negative with a positive sum");
  }
}

void WeatherModel::add_override(WeatherOverride o) {
  if (o.end <= o.start) {
    throw ValidationError("weather override for " + o.telescope_id + " has an empty interval");
  }
  overrides_.push_back(std::move(o));
}

Weather WeatherModel::at(std::string_view telescope_id, Instant t) const {
  for (auto it = overrides_.rbegin(); it != overrides_.rend(); ++it) {
    if (it->telescope_id == telescope_id && it->start <= t && t < it->end) {
      return it->condition;
    }
  }
  const std::int64_t seconds = t.unix_seconds();
  const std::int64_t hour = seconds >= 0 ? seconds / 3600 : (seconds - 3599) / 3600;
  std::uint64_t word = mix64(fnv1a(telescope_id) ^ seed_);
  word = mix64(word ^ static_cast<std::uint64_t>(hour));
  const double total = weights_.clear + weights_.cloudy + weights_.closed;
  const double u = unit_interval(word) * total;
  if (u < weights_.clear) {
    return Weather::clear;
  }
  if (u < weights_.clear + weights_.cloudy) {
    return Weather::cloudy;
  }
  return Weather::closed;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

infosvc::Triple fact(const std::string& subject, std::string_view predicate,
                     infosvc::Term object) {
  return {infosvc::Term::iri(subject), infosvc::Term::iri(std::string(predicate)),
          std::move(object)};
}

infosvc::Term lit(std::string v) { return infosvc::Term::literal(std::move(v)); }

}  // namespace

void Registry::publish_telescope(const Telescope& t) const {
  if (store_ == nullptr) {
    return;
  }
  const std::string s = vocab::resource_context(t.id);
  std::vector<infosvc::Triple> triples{
      fact(s, vocab::kType, infosvc::Term::iri(std::string(vocab::kTelescope))),
      fact(s, vocab::kName, lit(t.name)),
      fact(s, vocab::kLatitude, lit(format_double(t.location.lat()))),
      fact(s, vocab::kLongitude, lit(format_double(t.location.lon()))),
      fact(s, vocab::kElevation, lit(format_double(t.location.elevation()))),
      fact(s, vocab::kAperture, lit(format_double(t.aperture))),
      fact(s, vocab::kMinAltitude, lit(format_double(t.min_altitude))),
      fact(s, vocab::kStatus, lit(std::string(to_string(t.status)))),
  };
  for (const std::string& f : t.filters) {
    triples.push_back(fact(s, vocab::kFilter, lit(f)));
  }
  store_->put_graph(s, triples);
}

void Registry::publish_compute(const ComputeResource& c) const {
  if (store_ == nullptr) {
    return;
  }
  const std::string s = vocab::resource_context(c.id);
  const std::vector<infosvc::Triple> triples{
      fact(s, vocab::kType, infosvc::Term::iri(std::string(vocab::kComputeResource))),
      fact(s, vocab::kContact, lit(c.contact)),
      fact(s, vocab::kLrm, lit(std::string(to_string(c.lrm)))),
      fact(s, vocab::kSlots, lit(std::to_string(c.slots))),
      fact(s, vocab::kStatus, lit(std::string(to_string(c.status)))),
  };
  store_->put_graph(s, triples);
}

const std::string& Registry::register_telescope(Telescope t) {
  t.validate();
  if (telescopes_.contains(t.id) || computes_.contains(t.id)) {
    throw ConflictError("resource id '" + t.id + "' already registered");
  }
  auto [it, _] = telescopes_.emplace(t.id, std::move(t));
  publish_telescope(it->second);
  return it->first;
}

const std::string& Registry::register_compute(ComputeResource c) {
  c.validate();
  if (telescopes_.contains(c.id) || computes_.contains(c.id)) {
    throw ConflictError("resource id '" + c.id + "' already registered");
  }
  auto [it, _] = computes_.emplace(c.id, std::move(c));
  publish_compute(it->second);
  return it->first;
}

void Registry::remove_telescope(const std::string& id) {
  if (telescopes_.erase(id) == 0) {
    throw NotFoundError("unknown telescope '" + id + "'");
  }
  if (store_ != nullptr) {
    store_->delete_graph(vocab::resource_context(id));
  }
}

const Telescope& Registry::telescope(const std::string& id) const {
  auto it = telescopes_.find(id);
  if (it == telescopes_.end()) {
    throw NotFoundError("unknown telescope '" + id + "'");
  }
  return it->second;
}

const ComputeResource& Registry::compute(const std::string& id) const {
  auto it = computes_.find(id);
  if (it == computes_.end()) {
    throw NotFoundError("unknown compute resource '" + id + "'");
  }
  return it->second;
}

std::vector<const Telescope*> Registry::telescopes() const {
  std::vector<const Telescope*> out;
  for (const auto& [_, t] : telescopes_) {
    out.push_back(&t);
  }
  return out;
}

std::vector<const ComputeResource*> Registry::computes() const {
  std::vector<const ComputeResource*> out;
  for (const auto& [_, c] : computes_) {
    out.push_back(&c);
  }
  return out;
}

void Registry::set_telescope_status(const std::string& id, ResourceStatus status) {
  telescope(id);
  Telescope& t = telescopes_.at(id);
  t.status = status;
  publish_telescope(t);
}

void Registry::set_compute_status(const std::string& id, ResourceStatus status) {
  compute(id);
  ComputeResource& c = computes_.at(id);
  c.status = status;
  publish_compute(c);
}

void Registry::take_slot(const std::string& compute_id) {
  compute(compute_id);
  ComputeResource& c = computes_.at(compute_id);
  if (c.free_slots == 0) {
    throw StateError("compute resource " + compute_id + " has no free slot");
  }
  --c.free_slots;
}

void Registry::give_slot(const std::string& compute_id) {
  compute(compute_id);
  ComputeResource& c = computes_.at(compute_id);
  if (c.free_slots == c.slots) {
    throw StateError("compute resource " + compute_id + " has no busy slot to release");
  }
  ++c.free_slots;
}

Weather Registry::weather_at(const std::string& telescope_id, Instant t) const {
  telescope(telescope_id);
  return weather_.at(telescope_id, t);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T>
T required(const json& obj, const char* key, std::string_view where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string(where) + ": missing key '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string(where) + ": key '" + key + "' has the wrong type");
  }
}

template <typename T>
T optional_or(const json& obj, const char* key, T fallback, std::string_view where) {
  if (!obj.contains(key)) {
    return fallback;
  }
  return required<T>(obj, key, where);
}

}  // namespace

Registry Registry::from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ParseError("registry document must be a JSON object");
  }
  Registry reg;
  WeatherWeights weights;
  if (doc.contains("weather_weights")) {
    const json& w = doc.at("weather_weights");
    weights.clear = required<double>(w, "clear", "weather_weights");
    weights.cloudy = required<double>(w, "cloudy", "weather_weights");
    weights.closed = required<double>(w, "closed", "weather_weights");
  }
  reg.weather_ = WeatherModel(optional_or<std::uint64_t>(doc, "weather_seed", 0, "registry"), weights);

  for (const json& t : doc.value("telescopes", json::array())) {
    Telescope tel;
    tel.id = required<std::string>(t, "id", "telescope");
    tel.name = optional_or<std::string>(t, "name", tel.id, "telescope");
    const json& loc = t.contains("location") ? t.at("location") : json::object();
    tel.location = ephemeris::GeoLocation(required<double>(loc, "lat", "telescope.location"),
                                          required<double>(loc, "lon", "telescope.location"),
                                          optional_or<double>(loc, "elevation", 0.0, "telescope.location"));
    for (const std::string& f : required<std::vector<std::string>>(t, "filters", "telescope")) {
      tel.filters.insert(f);
    }
    tel.aperture = required<double>(t, "aperture", "telescope");
    tel.min_altitude = optional_or<double>(t, "min_altitude", 0.0, "telescope");
    tel.status = parse_resource_status(optional_or<std::string>(t, "status", "online", "telescope"));
    reg.register_telescope(std::move(tel));
  }
  for (const json& c : doc.value("compute", json::array())) {
    ComputeResource res;
    res.id = required<std::string>(c, "id", "compute");
    res.contact = required<std::string>(c, "contact", "compute");
    res.lrm = parse_lrm(required<std::string>(c, "lrm", "compute"));
    res.slots = required<int>(c, "slots", "compute");
    res.free_slots = optional_or<int>(c, "free_slots", res.slots, "compute");
    res.status = parse_resource_status(optional_or<std::string>(c, "status", "online", "compute"));
    if (c.contains("location")) {
      const json& loc = c.at("location");
      res.location = ephemeris::GeoLocation(
          required<double>(loc, "lat", "compute.location"),
          required<double>(loc, "lon", "compute.location"),
          optional_or<double>(loc, "elevation", 0.0, "compute.location"));
    }
    reg.register_compute(std::move(res));
  }
  for (const json& o : doc.value("weather_overrides", json::array())) {
    WeatherOverride ov;
    ov.telescope_id = required<std::string>(o, "telescope_id", "weather_override");
    if (!reg.has_telescope(ov.telescope_id)) {
      throw ValidationError("weather override for unknown telescope '" + ov.telescope_id + "'");
    }
    ov.start = Instant::parse(required<std::string>(o, "start", "weather_override"));
    ov.end = Instant::parse(required<std::string>(o, "end", "weather_override"));
    ov.condition = parse_weather(required<std::string>(o, "condition", "weather_override"));
    reg.weather_.add_override(std::move(ov));
  }
  return reg;
}

nlohmann::ordered_json Registry::to_json() const {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["telescopes"] = ojson::array();
  for (const auto& [_, t] : telescopes_) {
    doc["telescopes"].push_back(ojson{
        {"id", t.id},
        {"name", t.name},
        {"location",
         {{"lat", t.location.lat()}, {"lon", t.location.lon()}, {"elevation", t.location.elevation()}}},
        {"filters", t.filters},
        {"aperture", t.aperture},
        {"min_altitude", t.min_altitude},
        {"status", to_string(t.status)},
    });
  }
  doc["compute"] = ojson::array();
  for (const auto& [_, c] : computes_) {
    ojson entry{
        {"id", c.id},
        {"contact", c.contact},
        {"lrm", to_string(c.lrm)},
        {"slots", c.slots},
        {"free_slots", c.free_slots},
        {"status", to_string(c.status)},
    };
    if (c.location) {
      entry["location"] = ojson{{"lat", c.location->lat()},
                                {"lon", c.location->lon()},
                                {"elevation", c.location->elevation()}};
    }
    doc["compute"].push_back(std::move(entry));
  }
  doc["weather_seed"] = weather_.seed();
  doc["weather_weights"] = ojson{{"clear", weather_.weights().clear},
                                 {"cloudy", weather_.weights().cloudy},
                                 {"closed", weather_.weights().closed}};
  doc["weather_overrides"] = ojson::array();
  for (const WeatherOverride& o : weather_.overrides()) {
    doc["weather_overrides"].push_back(ojson{{"telescope_id", o.telescope_id},
                                             {"start", o.start.iso()},
                                             {"end", o.end.iso()},
                                             {"condition", to_string(o.condition)}});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Clock

void SimClock::schedule(Instant at, std::string entity_id, Action action) {
  if (at < now_) {
    throw ValidationError("cannot schedule an event in the past");
  }
  queue_.emplace(Key{at, std::move(entity_id), seq_++}, std::move(action));
}

Instant SimClock::advance(Seconds dt) {
  if (dt <= Seconds{0}) {
    throw ValidationError("clock advance must be positive");
  }
  const Instant target = now_ + dt;
  while (!queue_.empty() && queue_.begin()->first.at <= target) {
    auto node = queue_.extract(queue_.begin());
    now_ = node.key().at;
    node.mapped()(now_);
  }
  now_ = target;
  return now_;
}

Instant SimClock::advance_to(Instant t) {
  if (t > now_) {
    advance(t - now_);
  }
  return now_;
}

void SimClock::run_due() {
  while (!queue_.empty() && queue_.begin()->first.at <= now_) {
    auto node = queue_.extract(queue_.begin());
    node.mapped()(now_);
  }
}

std::optional<Instant> SimClock::next_event_time() const {
  if (queue_.empty()) {
    return std::nullopt;
  }
  return queue_.begin()->first.at;
}

}  // namespace gridscope
