#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridscope/instant.hpp"

namespace gridscope::datacat {

struct Replica {
  std::string storage_element;
  std::string path;

  auto operator<=>(const Replica&) const = default;
};

struct LogicalFile {
  std::string lfid;
  std::string vpath;
  std::string owner;
  Instant created;
  std::vector<Replica> replicas;
  std::map<std::string, std::string> properties;

  bool operator==(const LogicalFile&) const = default;
};

// Logical file catalog. Every record has an owner, a creation timestamp and
// at least one replica; the catalog maintains them, callers cannot clear them.
// Directories are implied by path prefixes.
class Catalog {
 public:
  const LogicalFile& register_file(const std::string& vpath, const std::string& owner,
                                   Replica first_replica, Instant now);
  std::size_t add_replica(const std::string& lfid, Replica replica);
  std::size_t remove_replica(const std::string& lfid, const Replica& replica);
  void remove_file(const std::string& lfid);

  void annotate(const std::string& lfid, const std::string& key, const std::string& value);
  // Matching records, ordered by vpath.
  std::vector<const LogicalFile*> find_by_property(const std::string& key,
                                                   const std::string& value) const;

  // Immediate children of a directory: file names and "name/" for implied
  // subdirectories, sorted and without duplicates.
  std::vector<std::string> list_dir(const std::string& directory) const;

  const LogicalFile& by_lfid(const std::string& lfid) const;
  const LogicalFile& by_vpath(const std::string& vpath) const;
  const LogicalFile* find_vpath(const std::string& vpath) const;
  std::size_t size() const { return files_.size(); }

  // One JSON object per line in lfid order; keys in a fixed order.
  std::string to_jsonl() const;
  static Catalog from_jsonl(const std::string& text);

 private:
  LogicalFile& mut(const std::string& lfid);

  std::map<std::string, LogicalFile> files_;         // lfid -> record
  std::map<std::string, std::string> vpath_index_;  // vpath -> lfid
  std::uint64_t next_ = 1;
};

// Canonical form check: absolute, no empty, "." or ".." segments, no trailing slash.
void validate_vpath(const std::string& vpath);

}  // namespace gridscope::datacat
