#include "gridscope/datacat.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridscope/error.hpp"
#include "gridscope/text.hpp"

namespace gridscope::datacat {

using nlohmann::json;
using nlohmann::ordered_json;

void validate_vpath(const std::string& vpath) {
  if (vpath.size() < 2 || vpath.front() != '/' || vpath.back() == '/') {
    throw ValidationError("virtual path must be absolute without a trailing slash: '" + vpath + "'");
  }
  std::size_t pos = 1;
  while (pos <= vpath.size()) {
    const std::size_t next = std::min(vpath.find('/', pos), vpath.size());
    const std::string_view segment(vpath.data() + pos, next - pos);
    if (segment.empty() || segment == "." || segment == "..") {
      throw ValidationError("virtual path has an invalid segment: '" + vpath + "'");
    }
    pos = next + 1;
  }
}

namespace {

void validate_replica(const Replica& r) {
  if (r.storage_element.empty() || r.path.empty()) {
    throw ValidationError("replica needs a storage element and a physical path");
  }
}

}  // namespace

LogicalFile& Catalog::mut(const std::string& lfid) {
  auto it = files_.find(lfid);
  if (it == files_.end()) {
    throw NotFoundError("unknown logical file '" + lfid + "'");
  }
  return it->second;
}

const LogicalFile& Catalog::by_lfid(const std::string& lfid) const {
  auto it = files_.find(lfid);
  if (it == files_.end()) {
    throw NotFoundError("unknown logical file '" + lfid + "'");
  }
  return it->second;
}

const LogicalFile* Catalog::find_vpath(const std::string& vpath) const {
  auto it = vpath_index_.find(vpath);
  return it == vpath_index_.end() ? nullptr : &files_.at(it->second);
}

const LogicalFile& Catalog::by_vpath(const std::string& vpath) const {
  if (const LogicalFile* f = find_vpath(vpath)) {
    return *f;
  }
  throw NotFoundError("no logical file at '" + vpath + "'");
}

const LogicalFile& Catalog::register_file(const std::string& vpath, const std::string& owner,
                                          Replica first_replica, Instant now) {
  validate_vpath(vpath);
  if (owner.empty()) {
    throw ValidationError("file owner is mandatory");
  }
  validate_replica(first_replica);
  if (vpath_index_.contains(vpath)) {
    throw ConflictError("virtual path already registered: '" + vpath + "'");
  }
  // A file may not sit where a directory is implied, nor under another file.
  const std::string as_dir = vpath + "/";
  if (auto it = vpath_index_.lower_bound(as_dir);
      it != vpath_index_.end() && it->first.starts_with(as_dir)) {
    throw ConflictError("'" + vpath + "' is a directory");
  }
  for (std::size_t slash = vpath.find('/', 1); slash != std::string::npos;
       slash = vpath.find('/', slash + 1)) {
    if (vpath_index_.contains(vpath.substr(0, slash))) {
      throw ConflictError("'" + vpath.substr(0, slash) + "' is a file, not a directory");
    }
  }

  LogicalFile file;
  file.lfid = padded_id("lf-", next_++, 6);
  file.vpath = vpath;
  file.owner = owner;
  file.created = now;
  file.replicas.push_back(std::move(first_replica));
  vpath_index_.emplace(vpath, file.lfid);
  auto [it, _] = files_.emplace(file.lfid, std::move(file));
  return it->second;
}

std::size_t Catalog::add_replica(const std::string& lfid, Replica replica) {
  validate_replica(replica);
  LogicalFile& f = mut(lfid);
  if (std::find(f.replicas.begin(), f.replicas.end(), replica) != f.replicas.end()) {
    throw ConflictError("replica already registered for " + lfid);
  }
  f.replicas.push_back(std::move(replica));
  return f.replicas.size();
}

std::size_t Catalog::remove_replica(const std::string& lfid, const Replica& replica) {
  LogicalFile& f = mut(lfid);
  auto it = std::find(f.replicas.begin(), f.replicas.end(), replica);
  if (it == f.replicas.end()) {
    throw NotFoundError("no such replica for " + lfid);
  }
  if (f.replicas.size() == 1) {
    throw StateError("cannot remove the last replica of " + lfid);
  }
  f.replicas.erase(it);
  return f.replicas.size();
}

void Catalog::remove_file(const std::string& lfid) {
  const LogicalFile& f = by_lfid(lfid);
  vpath_index_.erase(f.vpath);
  files_.erase(lfid);
}

void Catalog::annotate(const std::string& lfid, const std::string& key, const std::string& value) {
  if (key.empty()) {
    throw ValidationError("property key must not be empty");
  }
  mut(lfid).properties[key] = value;
}

std::vector<const LogicalFile*> Catalog::find_by_property(const std::string& key,
                                                          const std::string& value) const {
  std::vector<const LogicalFile*> out;
  for (const auto& [vpath, lfid] : vpath_index_) {  // already in vpath order
    const LogicalFile& f = files_.at(lfid);
    if (auto it = f.properties.find(key); it != f.properties.end() && it->second == value) {
      out.push_back(&f);
    }
  }
  return out;
}

std::vector<std::string> Catalog::list_dir(const std::string& directory) const {
  std::string prefix = directory;
  if (prefix.empty() || prefix.back() != '/') {
    prefix += '/';
  }
  std::set<std::string> children;
  for (auto it = vpath_index_.lower_bound(prefix);
       it != vpath_index_.end() && it->first.starts_with(prefix); ++it) {
    const std::string rest = it->first.substr(prefix.size());
    const std::size_t slash = rest.find('/');
    children.insert(slash == std::string::npos ? rest : rest.substr(0, slash + 1));
  }
  return {children.begin(), children.end()};
}

std::string Catalog::to_jsonl() const {
  std::string out;
  for (const auto& [lfid, f] : files_) {
    ordered_json replicas = ordered_json::array();
    for (const Replica& r : f.replicas) {
      replicas.push_back({{"se", r.storage_element}, {"path", r.path}});
    }
    ordered_json props = ordered_json::object();
    for (const auto& [k, v] : f.properties) {
      props[k] = v;
    }
    const ordered_json line{{"lfid", f.lfid},
                            {"vpath", f.vpath},
                            {"owner", f.owner},
                            {"created", f.created.iso()},
                            {"replicas", std::move(replicas)},
                            {"properties", std::move(props)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

Catalog Catalog::from_jsonl(const std::string& text) {
  Catalog cat;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    LogicalFile f;
    try {
      const json doc = json::parse(line);
      f.lfid = doc.at("lfid").get<std::string>();
      f.vpath = doc.at("vpath").get<std::string>();
      f.owner = doc.at("owner").get<std::string>();
      f.created = Instant::parse(doc.at("created").get<std::string>());
      for (const json& r : doc.at("replicas")) {
        f.replicas.push_back({r.at("se").get<std::string>(), r.at("path").get<std::string>()});
      }
      f.properties = doc.value("properties", std::map<std::string, std::string>{});
    } catch (const json::exception& e) {
      throw ParseError(std::string("catalog line: ") + e.what());
    }
    validate_vpath(f.vpath);
    if (f.owner.empty() || f.replicas.empty() || !f.lfid.starts_with("lf-")) {
      throw ParseError("catalog line for '" + f.vpath + "' lacks mandatory fields");
    }
    if (cat.files_.contains(f.lfid) || cat.vpath_index_.contains(f.vpath)) {
      throw ParseError("catalog has duplicate entries for '" + f.vpath + "'");
    }
    cat.next_ = std::max<std::uint64_t>(cat.next_, std::stoull(f.lfid.substr(3)) + 1);
    cat.vpath_index_.emplace(f.vpath, f.lfid);
    cat.files_.emplace(f.lfid, std::move(f));
  }
  return cat;
}

}  // namespace gridscope::datacat
