#include <gtest/gtest.h>

#include <random>

#include "gridscope/error.hpp"
#include "gridscope/vom.hpp"

using namespace gridscope;
using namespace gridscope::vom;

namespace {

const std::string kAlice = "/C=DE/O=GermanGrid/OU=AIP/CN=Alice Example";
const std::string kBob = "/C=DE/O=GermanGrid/OU=LRZ/CN=Bob Example";
const std::string kCarol = "/C=DE/O=GermanGrid/OU=ZIB/CN=Carol Example";

ResourceMapPolicy policy() {
  ResourceMapPolicy p;
  p.resource_id = "host-lrz";
  p.allowed_vos = {"astro"};
  p.account_prefix = "agd";
  return p;
}

VORegistry approved(std::initializer_list<std::string> dns) {
  VORegistry vo;
  for (const auto& dn : dns) {
    vo.register_member(dn, "astro", "AIP");
    vo.approve(dn, "astro");
  }
  return vo;
}

}  // namespace

TEST(Members, Lifecycle) {
  VORegistry vo;
  EXPECT_EQ(vo.register_member(kAlice, "astro", "AIP").status, MemberStatus::candidate);
  EXPECT_THROW(vo.register_member(kAlice, "astro", "AIP"), ConflictError);
  EXPECT_EQ(vo.approve(kAlice, "astro").status, MemberStatus::approved);
  EXPECT_EQ(vo.suspend(kAlice, "astro").status, MemberStatus::suspended);
  EXPECT_THROW(vo.approve(kBob, "astro"), NotFoundError);
  EXPECT_THROW(vo.register_member("", "astro", ""), ValidationError);
}

TEST(Gridmap, OnlyApprovedMembersOfAllowedVos) {
  VORegistry vo = approved({kAlice});
  vo.register_member(kBob, "astro", "LRZ");
  vo.register_member(kCarol, "bio", "ZIB");
  vo.approve(kCarol, "bio");
  const auto entries = vo.sync_gridmap(policy());
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0], (GridmapEntry{kAlice, "agd0001"}));
  EXPECT_EQ(render_gridmap(entries), "\"" + kAlice + "\" agd0001\n");
}

TEST(Gridmap, BlacklistWinsOverWhitelistAndMembership) {
  VORegistry vo = approved({kAlice, kBob});
  ResourceMapPolicy p = policy();
  p.whitelist_dns = {kBob, kCarol};
  p.blacklist_dns = {kBob};
  const auto entries = vo.sync_gridmap(p);
  for (const auto& e : entries) {
    EXPECT_NE(e.dn, kBob);
  }
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[1].dn, kCarol);
}

TEST(Gridmap, AccountsStableAcrossSyncs) {
  VORegistry vo = approved({kBob});
  EXPECT_EQ(vo.sync_gridmap(policy())[0].account, "agd0001");
  vo.register_member(kAlice, "astro", "AIP");
  vo.approve(kAlice, "astro");
  const auto second = vo.sync_gridmap(policy());
  ASSERT_EQ(second.size(), 2u);
  EXPECT_EQ(second[0], (GridmapEntry{kBob, "agd0001"}));
  EXPECT_EQ(second[1], (GridmapEntry{kAlice, "agd0002"}));
  vo.suspend(kBob, "astro");
  EXPECT_EQ(vo.sync_gridmap(policy()), std::vector<GridmapEntry>{(GridmapEntry{kAlice, "agd0002"})});
  vo.approve(kBob, "astro");
  EXPECT_EQ(vo.sync_gridmap(policy()), second);
}

TEST(Gridmap, RepeatedSyncIsByteIdentical) {
  VORegistry vo = approved({kAlice, kBob, kCarol});
  const std::string first = render_gridmap(vo.sync_gridmap(policy()));
  EXPECT_EQ(render_gridmap(vo.sync_gridmap(policy())), first);
  const VORegistry back = VORegistry::from_json(vo.to_json());
  VORegistry copy = back;
  EXPECT_EQ(render_gridmap(copy.sync_gridmap(policy())), first);
}

TEST(Gridmap, InvalidPolicy) {
  VORegistry vo;
  ResourceMapPolicy p = policy();
  p.account_prefix.clear();
  EXPECT_THROW(vo.sync_gridmap(p), ValidationError);
  EXPECT_THROW(policy_from_json(nlohmann::json::array()), ParseError);
  EXPECT_EQ(policy_from_json(policy_to_json(policy())).resource_id, "host-lrz");
}

TEST(Remap, MovesAccountAndMembership) {
  VORegistry vo = approved({kAlice, kBob});
  const auto before = vo.sync_gridmap(policy());
  const std::string renewed = kAlice + " 2009";
  vo.remap_dn(kAlice, renewed);
  EXPECT_THROW(vo.member(kAlice, "astro"), NotFoundError);
  EXPECT_EQ(vo.member(renewed, "astro").status, MemberStatus::approved);
  const auto after = vo.sync_gridmap(policy());
  ASSERT_EQ(after.size(), 2u);
  EXPECT_EQ(after[0], (GridmapEntry{renewed, "agd0001"}));
  EXPECT_EQ(after[1], before[1]);
  vo.register_member(kAlice, "astro", "AIP");
  vo.approve(kAlice, "astro");
  const auto again = vo.sync_gridmap(policy());
  ASSERT_EQ(again.size(), 3u);
  EXPECT_EQ(again[2], (GridmapEntry{kAlice, "agd0003"}));
}

TEST(Remap, Errors) {
  VORegistry vo = approved({kAlice, kBob});
  vo.sync_gridmap(policy());
  EXPECT_THROW(vo.remap_dn(kAlice, kAlice), ValidationError);
  EXPECT_THROW(vo.remap_dn(kCarol, "x"), NotFoundError);
  EXPECT_THROW(vo.remap_dn(kAlice, kBob), ConflictError);
}

TEST(Property, GridmapInvariants) {
  std::mt19937_64 rng(77);
  std::vector<std::string> dns;
  for (int i = 0; i < 12; ++i) {
    dns.push_back("/O=Grid/CN=user" + std::to_string(i));
  }
  for (int trial = 0; trial < 200; ++trial) {
    VORegistry vo;
    for (const auto& dn : dns) {
      const auto r = rng() % 4;
      if (r == 0) {
        continue;
      }
      const std::string name = rng() % 3 ? "astro" : "bio";
      vo.register_member(dn, name, "x");
      if (r >= 2) {
        vo.approve(dn, name);
      }
    }
    ResourceMapPolicy p = policy();
    for (const auto& dn : dns) {
      if (rng() % 6 == 0) p.whitelist_dns.insert(dn);
      if (rng() % 6 == 0) p.blacklist_dns.insert(dn);
    }
    const auto first = vo.sync_gridmap(p);
    std::set<std::string> seen_dn;
    std::set<std::string> seen_account;
    for (const auto& e : first) {
      EXPECT_FALSE(p.blacklist_dns.contains(e.dn));
      EXPECT_TRUE(seen_dn.insert(e.dn).second);
      EXPECT_TRUE(seen_account.insert(e.account).second);
      const bool member_ok = [&] {
        for (const VOMember* m : vo.members()) {
          if (m->dn == e.dn && m->status == MemberStatus::approved && p.allowed_vos.contains(m->vo)) {
            return true;
          }
        }
        return false;
      }();
      EXPECT_TRUE(member_ok || p.whitelist_dns.contains(e.dn));
    }
    for (const auto& dn : p.whitelist_dns) {
      EXPECT_EQ(seen_dn.contains(dn), !p.blacklist_dns.contains(dn));
    }
    EXPECT_EQ(vo.sync_gridmap(p), first);
  }
}
