#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace gridscope::vom {

enum class MemberStatus { candidate, approved, suspended };

std::string_view to_string(MemberStatus status);

struct VOMember {
  std::string dn;
  std::string vo;
  MemberStatus status = MemberStatus::candidate;
  std::string institution;
};

struct ResourceMapPolicy {
  std::string resource_id;
  std::set<std::string> allowed_vos;
  std::set<std::string> whitelist_dns;
  std::set<std::string> blacklist_dns;
  std::string account_prefix;

  void validate() const;
};

ResourceMapPolicy policy_from_json(const nlohmann::json& doc);
nlohmann::ordered_json policy_to_json(const ResourceMapPolicy& policy);

struct GridmapEntry {
  std::string dn;
  std::string account;

  bool operator==(const GridmapEntry&) const = default;
};

inline constexpr int kAccountDigits = 4;

// Membership registry plus the per-resource account assignment history.
// Accounts are prefix + zero-padded ordinal, handed out in first-inclusion
// order and never reused, so a DN keeps its account across syncs (and across
// runs, once the history is saved).
class VORegistry {
 public:
  const VOMember& register_member(const std::string& dn, const std::string& vo,
                                  const std::string& institution);
  const VOMember& approve(const std::string& dn, const std::string& vo);
  const VOMember& suspend(const std::string& dn, const std::string& vo);

  const VOMember& member(const std::string& dn, const std::string& vo) const;
  // Ordered by (dn, vo).
  std::vector<const VOMember*> members() const;

  // Entries sorted by account ordinal. Blacklisted DNs never appear;
  // whitelisted DNs appear even without membership.
  std::vector<GridmapEntry> sync_gridmap(const ResourceMapPolicy& policy);

  // Moves memberships and every account held by old_dn to new_dn. old_dn is
  // retired and can never receive that account again.
  void remap_dn(const std::string& old_dn, const std::string& new_dn);

  // Members and account history as a JSON document.
  nlohmann::ordered_json to_json() const;
  static VORegistry from_json(const nlohmann::json& doc);

 private:
  struct AccountLog {
    std::uint64_t next_ordinal = 1;
    std::map<std::string, std::uint64_t> by_dn;
    // Retired DNs mapped to the DN that inherited their account.
    std::map<std::string, std::string> retired;
  };

  std::map<std::pair<std::string, std::string>, VOMember> members_;
  std::map<std::string, AccountLog> accounts_;  // by resource id
};

// `"<dn>" <account>` per line.
std::string render_gridmap(const std::vector<GridmapEntry>& entries);

}  // namespace gridscope::vom
