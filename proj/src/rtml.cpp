// RTML-subset request documents and their JSON mirror.

#include <cctype>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "gridscope/error.hpp"
#include "gridscope/obs_sched.hpp"
#include "gridscope/text.hpp"

namespace gridscope::obs {

namespace pt = boost::property_tree;
using nlohmann::json;

void ObservationRequest::validate() const {
  if (target_name.empty()) {
    throw ValidationError("request needs a target name");
  }
  if (required_filters.empty()) {
    throw ValidationError("request needs at least one filter");
  }
  if (duration <= Seconds{0}) {
    throw ValidationError("request duration must be positive");
  }
  if (window_end < window_start) {
    throw ValidationError("request window ends before it starts");
  }
  if (duration > window_end - window_start) {
    throw ValidationError("request duration exceeds its window");
  }
  if (priority < 0) {
    throw ValidationError("request priority must be non-negative");
  }
}

namespace {

double parse_number(const std::string& text, std::string_view what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string(what) + ": not a number: '" + text + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used])) != 0) {
    ++used;
  }
  if (used != text.size()) {
    throw ParseError(std::string(what) + ": not a number: '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& text, std::string_view what) {
  const double v = parse_number(text, what);
  if (v != static_cast<double>(static_cast<long long>(v))) {
    throw ParseError(std::string(what) + ": expected an integer, got '" + text + "'");
  }
  return static_cast<long long>(v);
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Rejects any child element (or attribute) not in the allowed set.
void check_children(const pt::ptree& node, std::string_view where,
                    const std::set<std::string>& elements,
                    const std::set<std::string>& attributes = {}) {
  for (const auto& [name, child] : node) {
    if (name == "<xmlcomment>") {
      continue;
    }
    if (name == "<xmlattr>") {
      for (const auto& [attr, _] : child) {
        if (!attributes.contains(attr)) {
          throw ParseError(std::string(where) + ": unknown attribute '" + attr + "'");
        }
      }
      continue;
    }
    if (!elements.contains(name)) {
      throw ParseError(std::string(where) + ": unknown element '" + name + "'");
    }
  }
}

const pt::ptree& exactly_one(const pt::ptree& node, const std::string& name, std::string_view where) {
  const std::size_t n = node.count(name);
  if (n == 0) {
    throw ParseError(std::string(where) + ": missing element '" + name + "'");
  }
  if (n > 1) {
    throw ParseError(std::string(where) + ": element '" + name + "' given more than once");
  }
  return node.find(name)->second;
}

std::optional<std::string> attribute(const pt::ptree& node, const std::string& name) {
  if (auto v = node.get_optional<std::string>("<xmlattr>." + name)) {
    return *v;
  }
  return std::nullopt;
}

void check_units(const pt::ptree& node, std::string_view where, std::string_view expected) {
  if (auto units = attribute(node, "units"); units && *units != expected) {
    throw ParseError(std::string(where) + ": units must be '" + std::string(expected) + "'");
  }
}

// Coordinate range problems are reported as validation errors, not parse errors.
ephemeris::EquatorialCoord make_target(double ra, double dec) {
  if (ra < 0.0 || ra >= 360.0) {
    throw ValidationError("right ascension out of range [0, 360): " + format_double(ra));
  }
  return {ra, dec};
}

}  // namespace

ObservationRequest parse_request_xml(std::string_view xml) {
  pt::ptree doc;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("malformed request XML: ") + e.message());
  }
  check_children(doc, "document", {"RTML"});
  const pt::ptree& rtml = exactly_one(doc, "RTML", "document");
  check_children(rtml, "RTML", {"Request"}, {"version"});
  const pt::ptree& request = exactly_one(rtml, "Request", "RTML");
  check_children(request, "Request", {"Target", "Filter", "Duration", "Window", "Priority"},
                 {"user"});

  const pt::ptree& target = exactly_one(request, "Target", "Request");
  check_children(target, "Target", {"Coordinates"}, {"name"});
  const pt::ptree& coords = exactly_one(target, "Coordinates", "Target");
  check_children(coords, "Coordinates", {"RightAscension", "Declination"});
  const pt::ptree& ra = exactly_one(coords, "RightAscension", "Coordinates");
  const pt::ptree& dec = exactly_one(coords, "Declination", "Coordinates");
  check_children(ra, "RightAscension", {}, {"units"});
  check_children(dec, "Declination", {}, {"units"});
  check_units(ra, "RightAscension", "degrees");
  check_units(dec, "Declination", "degrees");

  const pt::ptree& duration = exactly_one(request, "Duration", "Request");
  check_children(duration, "Duration", {}, {"units"});
  check_units(duration, "Duration", "seconds");
  const pt::ptree& window = exactly_one(request, "Window", "Request");
  check_children(window, "Window", {}, {"start", "end"});

  ObservationRequest req;
  req.user = attribute(request, "user").value_or("");
  const auto name = attribute(target, "name");
  if (!name || name->empty()) {
    throw ParseError("Target: missing attribute 'name'");
  }
  req.target_name = *name;
  req.target = make_target(parse_number(trimmed(ra.data()), "RightAscension"),
                           parse_number(trimmed(dec.data()), "Declination"));
  for (const auto& [child_name, child] : request) {
    if (child_name == "Filter") {
      check_children(child, "Filter", {});
      const std::string band = trimmed(child.data());
      if (band.empty()) {
        throw ParseError("Filter: empty filter name");
      }
      req.required_filters.insert(band);
    }
  }
  if (req.required_filters.empty()) {
    throw ParseError("Request: missing element 'Filter'");
  }
  req.duration = Seconds{parse_integer(trimmed(duration.data()), "Duration")};
  const auto start = attribute(window, "start");
  const auto end = attribute(window, "end");
  if (!start || !end) {
    throw ParseError("Window: attributes 'start' and 'end' are required");
  }
  req.window_start = Instant::parse(*start);
  req.window_end = Instant::parse(*end);
  if (request.count("Priority") > 0) {
    const pt::ptree& priority = exactly_one(request, "Priority", "Request");
    check_children(priority, "Priority", {});
    req.priority = static_cast<int>(parse_integer(trimmed(priority.data()), "Priority"));
  }
  req.validate();
  return req;
}

ObservationRequest parse_request_json(const json& doc) {
  static const std::set<std::string> kKeys{"user",     "target_name",  "ra_deg",
                                           "dec_deg",  "filters",      "duration_s",
                                           "window_start", "window_end", "priority"};
  if (!doc.is_object()) {
    throw ParseError("request JSON must be an object");
  }
  for (const auto& [key, _] : doc.items()) {
    if (!kKeys.contains(key)) {
      throw ParseError("request JSON: unknown key '" + key + "'");
    }
  }
  auto need = [&](const char* key) -> const json& {
    if (!doc.contains(key)) {
      throw ParseError(std::string("request JSON: missing key '") + key + "'");
    }
    return doc.at(key);
  };
  ObservationRequest req;
  try {
    req.user = doc.value("user", "");
    req.target_name = need("target_name").get<std::string>();
    req.target = make_target(need("ra_deg").get<double>(), need("dec_deg").get<double>());
    for (const json& f : need("filters")) {
      req.required_filters.insert(f.get<std::string>());
    }
    const json& duration = need("duration_s");
    if (!duration.is_number_integer()) {
      throw ParseError("request JSON: duration_s must be an integer");
    }
    req.duration = Seconds{duration.get<long long>()};
    req.window_start = Instant::parse(need("window_start").get<std::string>());
    req.window_end = Instant::parse(need("window_end").get<std::string>());
    req.priority = doc.value("priority", 0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("request JSON: ") + e.what());
  }
  req.validate();
  return req;
}

ObservationRequest parse_request(std::string_view document) {
  const auto first = document.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    throw ParseError("empty request document");
  }
  if (document[first] == '<') {
    return parse_request_xml(document);
  }
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed request JSON: ") + e.what());
  }
  return parse_request_json(doc);
}

std::string request_to_xml(const ObservationRequest& req) {
  pt::ptree root;
  pt::ptree& request = root.add("RTML.Request", "");
  if (!req.user.empty()) {
    request.put("<xmlattr>.user", req.user);
  }
  pt::ptree& target = request.add("Target", "");
  target.put("<xmlattr>.name", req.target_name);
  target.add("Coordinates.RightAscension", format_double(req.target.ra()))
      .put("<xmlattr>.units", "degrees");
  target.add("Coordinates.Declination", format_double(req.target.dec()))
      .put("<xmlattr>.units", "degrees");
  for (const std::string& f : req.required_filters) {
    request.add("Filter", f);
  }
  request.add("Duration", std::to_string(req.duration.count())).put("<xmlattr>.units", "seconds");
  pt::ptree& window = request.add("Window", "");
  window.put("<xmlattr>.start", req.window_start.iso());
  window.put("<xmlattr>.end", req.window_end.iso());
  request.add("Priority", std::to_string(req.priority));
  std::ostringstream out;
  pt::write_xml(out, root, pt::xml_writer_make_settings<std::string>(' ', 2));
  return out.str();
}

nlohmann::ordered_json request_to_json(const ObservationRequest& req) {
  return {
      {"user", req.user},
      {"target_name", req.target_name},
      {"ra_deg", req.target.ra()},
      {"dec_deg", req.target.dec()},
      {"filters", req.required_filters},
      {"duration_s", req.duration.count()},
      {"window_start", req.window_start.iso()},
      {"window_end", req.window_end.iso()},
      {"priority", req.priority},
  };
}

}  // namespace gridscope::obs
