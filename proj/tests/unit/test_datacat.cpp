#include <gtest/gtest.h>

#include <random>

#include "gridscope/datacat.hpp"
#include "gridscope/error.hpp"

using namespace gridscope;
using namespace gridscope::datacat;

namespace {

const Instant kT0 = Instant::parse("2008-05-28T12:00:00Z");

Replica se(const std::string& host, const std::string& path) { return {host, path}; }

}  // namespace

TEST(Catalog, RegisterAndLookup) {
  Catalog cat;
  const LogicalFile& f = cat.register_file("/astro/gl586a/night1.fits", "astro01",
                                           se("se.aip.de", "/data/n1.fits"), kT0);
  EXPECT_EQ(f.lfid, "lf-000001");
  EXPECT_EQ(f.owner, "astro01");
  EXPECT_EQ(f.created, kT0);
  EXPECT_EQ(f.replicas.size(), 1u);
  EXPECT_EQ(cat.by_vpath("/astro/gl586a/night1.fits").lfid, "lf-000001");
  EXPECT_EQ(cat.find_vpath("/nope"), nullptr);
  EXPECT_THROW(cat.by_lfid("lf-999999"), NotFoundError);
  EXPECT_THROW(cat.by_vpath("/nope"), NotFoundError);
}

TEST(Catalog, MandatoryFields) {
  Catalog cat;
  EXPECT_THROW(cat.register_file("/a", "", se("se", "/p"), kT0), ValidationError);
  EXPECT_THROW(cat.register_file("/a", "u", se("", "/p"), kT0), ValidationError);
  EXPECT_THROW(cat.register_file("/a", "u", se("se", ""), kT0), ValidationError);
  EXPECT_EQ(cat.size(), 0u);
}

TEST(Catalog, PathValidation) {
  for (const char* bad : {"", "a/b", "/a/", "/a//b", "/a/./b", "/a/../b", "/"}) {
    EXPECT_THROW(validate_vpath(bad), ValidationError) << bad;
  }
  EXPECT_NO_THROW(validate_vpath("/a/b.c"));
}

TEST(Catalog, PathConflicts) {
  Catalog cat;
  cat.register_file("/astro/a.fits", "u", se("se", "/1"), kT0);
  EXPECT_THROW(cat.register_file("/astro/a.fits", "u", se("se", "/2"), kT0), ConflictError);
  EXPECT_THROW(cat.register_file("/astro", "u", se("se", "/3"), kT0), ConflictError);
  EXPECT_THROW(cat.register_file("/astro/a.fits/x", "u", se("se", "/4"), kT0), ConflictError);
}

TEST(Catalog, Replicas) {
  Catalog cat;
  const std::string id = cat.register_file("/a", "u", se("se1", "/p"), kT0).lfid;
  EXPECT_EQ(cat.add_replica(id, se("se2", "/p")), 2u);
  EXPECT_THROW(cat.add_replica(id, se("se2", "/p")), ConflictError);
  EXPECT_EQ(cat.remove_replica(id, se("se1", "/p")), 1u);
  EXPECT_THROW(cat.remove_replica(id, se("se2", "/p")), StateError);
  EXPECT_THROW(cat.remove_replica(id, se("se9", "/p")), NotFoundError);
  EXPECT_EQ(cat.by_lfid(id).replicas.size(), 1u);
}

TEST(Catalog, PropertiesAndFind) {
  Catalog cat;
  const std::string b = cat.register_file("/obs/b", "u", se("se", "/b"), kT0).lfid;
  const std::string a = cat.register_file("/obs/a", "u", se("se", "/a"), kT0).lfid;
  cat.register_file("/obs/c", "u", se("se", "/c"), kT0);
  cat.annotate(b, "target", "Gl586A");
  cat.annotate(a, "target", "Gl586A");
  EXPECT_THROW(cat.annotate(a, "", "x"), ValidationError);
  const auto hits = cat.find_by_property("target", "Gl586A");
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0]->vpath, "/obs/a");
  EXPECT_EQ(hits[1]->vpath, "/obs/b");
  EXPECT_TRUE(cat.find_by_property("target", "M31").empty());
}

TEST(Catalog, ListDirectory) {
  Catalog cat;
  cat.register_file("/astro/x/1", "u", se("se", "/1"), kT0);
  cat.register_file("/astro/x/2", "u", se("se", "/2"), kT0);
  cat.register_file("/astro/y", "u", se("se", "/3"), kT0);
  cat.register_file("/bio/z", "u", se("se", "/4"), kT0);
  EXPECT_EQ(cat.list_dir("/"), (std::vector<std::string>{"astro/", "bio/"}));
  EXPECT_EQ(cat.list_dir("/astro"), (std::vector<std::string>{"x/", "y"}));
  EXPECT_EQ(cat.list_dir("/astro/x"), (std::vector<std::string>{"1", "2"}));
  EXPECT_TRUE(cat.list_dir("/none").empty());
}

TEST(Catalog, RemoveFile) {
  Catalog cat;
  const std::string id = cat.register_file("/a/b", "u", se("se", "/1"), kT0).lfid;
  cat.remove_file(id);
  EXPECT_EQ(cat.size(), 0u);
  EXPECT_THROW(cat.remove_file(id), NotFoundError);
  EXPECT_EQ(cat.register_file("/a/b", "u", se("se", "/1"), kT0).lfid, "lf-000002");
}

TEST(Catalog, JsonlRoundTrip) {
  Catalog cat;
  const std::string id = cat.register_file("/a/b", "u", se("se", "/1"), kT0).lfid;
  cat.add_replica(id, se("se2", "/2"));
  cat.annotate(id, "k", "v");
  cat.register_file("/a/c", "w", se("se", "/3"), kT0 + Seconds{5});
  const std::string text = cat.to_jsonl();
  EXPECT_EQ(text.substr(0, 26), R"({"lfid":"lf-000001","vpath)");
  const Catalog back = Catalog::from_jsonl(text);
  EXPECT_EQ(back.to_jsonl(), text);
  EXPECT_EQ(back.by_lfid(id), cat.by_lfid(id));
  EXPECT_THROW(Catalog::from_jsonl("{oops"), ParseError);
  EXPECT_THROW(Catalog::from_jsonl(R"({"lfid":"lf-000001","vpath":"/a","owner":"u","created":"2008-01-01T00:00:00Z","replicas":[],"properties":{}})"),
               ParseError);
}

TEST(Property, RecordsKeepMandatoryFields) {
  std::mt19937_64 rng(3);
  Catalog cat;
  std::vector<std::string> ids;
  for (int step = 0; step < 2000; ++step) {
    const auto op = rng() % 5;
    try {
      if (op == 0 || ids.empty()) {
        const std::string vpath = "/d" + std::to_string(rng() % 5) + "/f" + std::to_string(rng() % 40);
        ids.push_back(cat.register_file(vpath, "u", se("se" + std::to_string(rng() % 3), vpath), kT0).lfid);
      } else {
        const std::string& id = ids[rng() % ids.size()];
        const Replica r = se("se" + std::to_string(rng() % 3), "/p" + std::to_string(rng() % 2));
        if (op == 1) {
          cat.add_replica(id, r);
        } else if (op == 2) {
          cat.remove_replica(id, r);
        } else if (op == 3) {
          cat.annotate(id, "k" + std::to_string(rng() % 3), "v");
        } else {
          cat.remove_file(id);
        }
      }
    } catch (const Error&) {
    }
  }
  const Catalog back = Catalog::from_jsonl(cat.to_jsonl());
  EXPECT_EQ(back.size(), cat.size());
  for (const auto& id : ids) {
    try {
      const LogicalFile& f = cat.by_lfid(id);
      EXPECT_FALSE(f.owner.empty());
      EXPECT_GE(f.replicas.size(), 1u);
      EXPECT_EQ(cat.by_vpath(f.vpath).lfid, id);
    } catch (const NotFoundError&) {
    }
  }
}
