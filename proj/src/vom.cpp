#include "gridscope/vom.hpp"

#include <algorithm>

#include "gridscope/error.hpp"
#include "gridscope/text.hpp"

namespace gridscope::vom {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(MemberStatus status) {
  switch (status) {
    case MemberStatus::candidate:
      return "candidate";
    case MemberStatus::approved:
      return "approved";
    case MemberStatus::suspended:
      return "suspended";
  }
  return "candidate";
}

namespace {

MemberStatus parse_member_status(std::string_view text) {
  for (MemberStatus s : {MemberStatus::candidate, MemberStatus::approved, MemberStatus::suspended}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  throw ParseError("unknown member status '" + std::string(text) + "'");
}

}  // namespace

void ResourceMapPolicy::validate() const {
  if (resource_id.empty()) {
    throw ValidationError("policy needs a resource id");
  }
  if (account_prefix.empty()) {
    throw ValidationError("policy account prefix must not be empty");
  }
}

ResourceMapPolicy policy_from_json(const json& doc) {
  ResourceMapPolicy p;
  try {
    p.resource_id = doc.at("resource_id").get<std::string>();
    p.allowed_vos = doc.value("allowed_vos", std::set<std::string>{});
    p.whitelist_dns = doc.value("whitelist_dns", std::set<std::string>{});
    p.blacklist_dns = doc.value("blacklist_dns", std::set<std::string>{});
    p.account_prefix = doc.at("account_prefix").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("policy: ") + e.what());
  }
  p.validate();
  return p;
}

ordered_json policy_to_json(const ResourceMapPolicy& p) {
  return {{"resource_id", p.resource_id},
          {"allowed_vos", p.allowed_vos},
          {"whitelist_dns", p.whitelist_dns},
          {"blacklist_dns", p.blacklist_dns},
          {"account_prefix", p.account_prefix}};
}

const VOMember& VORegistry::register_member(const std::string& dn, const std::string& vo,
                                            const std::string& institution) {
  if (dn.empty() || vo.empty()) {
    throw ValidationError("membership needs a DN and a VO");
  }
  auto [it, inserted] =
      members_.try_emplace({dn, vo}, VOMember{dn, vo, MemberStatus::candidate, institution});
  if (!inserted) {
    throw ConflictError("'" + dn + "' is already registered with VO " + vo);
  }
  return it->second;
}

const VOMember& VORegistry::member(const std::string& dn, const std::string& vo) const {
  auto it = members_.find({dn, vo});
  if (it == members_.end()) {
    throw NotFoundError("'" + dn + "' is not registered with VO " + vo);
  }
  return it->second;
}

const VOMember& VORegistry::approve(const std::string& dn, const std::string& vo) {
  member(dn, vo);
  VOMember& m = members_.at({dn, vo});
  m.status = MemberStatus::approved;
  return m;
}

const VOMember& VORegistry::suspend(const std::string& dn, const std::string& vo) {
  member(dn, vo);
  VOMember& m = members_.at({dn, vo});
  m.status = MemberStatus::suspended;
  return m;
}

std::vector<const VOMember*> VORegistry::members() const {
  std::vector<const VOMember*> out;
  for (const auto& [_, m] : members_) {
    out.push_back(&m);
  }
  return out;
}

std::vector<GridmapEntry> VORegistry::sync_gridmap(const ResourceMapPolicy& policy) {
  policy.validate();
  std::set<std::string> included;
  for (const auto& [key, m] : members_) {
    if (m.status == MemberStatus::approved && policy.allowed_vos.contains(m.vo)) {
      included.insert(m.dn);
    }
  }
  included.insert(policy.whitelist_dns.begin(), policy.whitelist_dns.end());
  for (const std::string& dn : policy.blacklist_dns) {
    included.erase(dn);
  }

  AccountLog& log = accounts_[policy.resource_id];
  for (const std::string& dn : included) {  // std::set: new DNs get ordinals in DN order
    if (!log.by_dn.contains(dn)) {
      log.by_dn.emplace(dn, log.next_ordinal++);
    }
  }

  std::vector<std::pair<std::uint64_t, std::string>> ordered;
  for (const std::string& dn : included) {
    ordered.emplace_back(log.by_dn.at(dn), dn);
  }
  std::sort(ordered.begin(), ordered.end());
  std::vector<GridmapEntry> out;
  for (const auto& [ordinal, dn] : ordered) {
    out.push_back({dn, padded_id(policy.account_prefix, ordinal, kAccountDigits)});
  }
  return out;
}

void VORegistry::remap_dn(const std::string& old_dn, const std::string& new_dn) {
  if (old_dn == new_dn) {
    throw ValidationError("old and new DN are identical");
  }
  bool old_known = false;
  for (const auto& [_, log] : accounts_) {
    old_known = old_known || log.by_dn.contains(old_dn);
    if (log.by_dn.contains(new_dn)) {
      throw ConflictError("'" + new_dn + "' already holds an account");
    }
  }
  if (!old_known) {
    throw NotFoundError("'" + old_dn + "' has no account to remap");
  }
  for (const auto& [key, m] : members_) {
    if (key.first == old_dn && members_.contains({new_dn, key.second})) {
      throw ConflictError("'" + new_dn + "' is already registered with VO " + key.second);
    }
  }

  for (auto& [_, log] : accounts_) {
    if (auto node = log.by_dn.extract(old_dn)) {
      node.key() = new_dn;
      log.by_dn.insert(std::move(node));
      log.retired[old_dn] = new_dn;
    }
  }
  std::vector<VOMember> moved;
  for (auto it = members_.begin(); it != members_.end();) {
    if (it->first.first == old_dn) {
      moved.push_back(it->second);
      it = members_.erase(it);
    } else {
      ++it;
    }
  }
  for (VOMember& m : moved) {
    m.dn = new_dn;
    members_.emplace(std::make_pair(new_dn, m.vo), std::move(m));
  }
}

ordered_json VORegistry::to_json() const {
  ordered_json members = ordered_json::array();
  for (const auto& [_, m] : members_) {
    members.push_back({{"dn", m.dn},
                       {"vo", m.vo},
                       {"status", to_string(m.status)},
                       {"institution", m.institution}});
  }
  ordered_json accounts = ordered_json::object();
  for (const auto& [resource, log] : accounts_) {
    ordered_json by_dn = ordered_json::object();
    for (const auto& [dn, ordinal] : log.by_dn) {
      by_dn[dn] = ordinal;
    }
    accounts[resource] = {{"next_ordinal", log.next_ordinal},
                          {"assigned", std::move(by_dn)},
                          {"retired", log.retired}};
  }
  return {{"members", std::move(members)}, {"accounts", std::move(accounts)}};
}

VORegistry VORegistry::from_json(const json& doc) {
  VORegistry reg;
  try {
    for (const json& m : doc.value("members", json::array())) {
      const VOMember& added = reg.register_member(m.at("dn").get<std::string>(),
                                                  m.at("vo").get<std::string>(),
                                                  m.value("institution", std::string{}));
      reg.members_.at({added.dn, added.vo}).status =
          parse_member_status(m.value("status", std::string("candidate")));
    }
    const json accounts = doc.value("accounts", json::object());
    for (const auto& [resource, entry] : accounts.items()) {
      AccountLog log;
      log.next_ordinal = entry.at("next_ordinal").get<std::uint64_t>();
      for (const auto& [dn, ordinal] : entry.at("assigned").items()) {
        log.by_dn.emplace(dn, ordinal.get<std::uint64_t>());
        if (ordinal.get<std::uint64_t>() >= log.next_ordinal) {
          throw ParseError("account history for " + resource + " is inconsistent");
        }
      }
      log.retired = entry.value("retired", std::map<std::string, std::string>{});
      reg.accounts_.emplace(resource, std::move(log));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("VO registry: ") + e.what());
  }
  return reg;
}

std::string render_gridmap(const std::vector<GridmapEntry>& entries) {
  std::string out;
  for (const GridmapEntry& e : entries) {
    out += '"';
    for (char c : e.dn) {
      if (c == '"' || c == '\\') {
        out += '\\';
      }
      out += c;
    }
    out += "\" " + e.account + "\n";
  }
  return out;
}

}  // namespace gridscope::vom
