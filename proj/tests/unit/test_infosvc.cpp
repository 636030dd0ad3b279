#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <sstream>
#include <thread>

#include "gridscope/error.hpp"
#include "gridscope/infosvc.hpp"
#include "oracles/bgp_oracle.hpp"

using namespace gridscope;
using namespace gridscope::infosvc;

namespace {

Triple tr(const std::string& s, const std::string& p, Term o) {
  return {Term::iri(s), Term::iri(p), std::move(o)};
}

TriplePattern pat(Term s, Term p, Term o) { return {std::move(s), std::move(p), std::move(o)}; }

std::vector<Triple> union_of(const InfoStore& store) {
  std::vector<Triple> out;
  for (const std::string& c : store.contexts()) {
    for (Triple& t : store.graph(c)) {
      out.push_back(std::move(t));
    }
  }
  return out;
}

void fill_example(InfoStore& store) {
  const std::vector<Triple> g{tr("urn:j1", "urn:hasState", Term::literal("done")),
                              tr("urn:j1", "urn:ownedBy", Term::literal("alice")),
                              tr("urn:j2", "urn:hasState", Term::literal("failed"))};
  store.put_graph("urn:ctx:jobs", g);
}

}  // namespace

TEST(Term, Validation) {
  EXPECT_THROW(Term::iri(""), ValidationError);
  EXPECT_THROW(Term::iri("has space"), ValidationError);
  EXPECT_THROW(Term::iri("a<b"), ValidationError);
  EXPECT_THROW(Term::variable("x"), ValidationError);
  EXPECT_THROW(Term::variable("?"), ValidationError);
  EXPECT_NO_THROW(Term::variable("?job_1"));
  EXPECT_NO_THROW(Term::literal(""));
}

TEST(Store, SetSemanticsOnPut) {
  InfoStore store;
  const std::vector<Triple> g{tr("urn:a", "urn:p", Term::literal("1")),
                              tr("urn:a", "urn:p", Term::literal("1")),
                              tr("urn:a", "urn:p", Term::literal("2"))};
  EXPECT_EQ(store.put_graph("urn:c", g), 2u);
  EXPECT_EQ(store.size(), 2u);
}

TEST(Store, PutReplacesContext) {
  InfoStore store;
  store.put_graph("urn:c", std::vector{tr("urn:a", "urn:p", Term::literal("old"))});
  store.put_graph("urn:c", std::vector{tr("urn:a", "urn:p", Term::literal("new"))});
  const auto g = store.graph("urn:c");
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].object.value(), "new");
}

TEST(Store, RejectsInvalidData) {
  InfoStore store;
  EXPECT_THROW(store.put_graph("urn:c", std::vector{tr("urn:a", "urn:p", Term::variable("?x"))}),
               ValidationError);
  EXPECT_THROW(store.put_graph("", std::vector{tr("urn:a", "urn:p", Term::literal("x"))}),
               ValidationError);
  EXPECT_THROW(store.put_graph("urn:c", std::vector{Triple{Term::literal("a"), Term::iri("urn:p"),
                                                           Term::literal("x")}}),
               ValidationError);
}

TEST(Store, PutThenExactPatternGivesOneSolution) {
  InfoStore store;
  fill_example(store);
  const std::vector q{pat(Term::iri("urn:j1"), Term::iri("urn:hasState"), Term::literal("done"))};
  const auto result = store.query(q);
  ASSERT_EQ(result.size(), 1u);
  EXPECT_TRUE(result[0].empty());
}

TEST(Query, EmptyStore) {
  InfoStore store;
  const std::vector q{pat(Term::variable("?s"), Term::variable("?p"), Term::variable("?o"))};
  EXPECT_TRUE(store.query(q).empty());
  EXPECT_THROW(store.query(std::vector<TriplePattern>{}), ValidationError);
}

TEST(Query, SinglePattern) {
  InfoStore store;
  fill_example(store);
  const std::vector q{pat(Term::variable("?j"), Term::iri("urn:hasState"), Term::literal("done"))};
  const auto result = store.query(q);
  ASSERT_EQ(result.size(), 1u);
  EXPECT_EQ(result[0].at("?j"), Term::iri("urn:j1"));
}

TEST(Query, TwoPatternJoin) {
  InfoStore store;
  fill_example(store);
  const std::vector q{pat(Term::variable("?j"), Term::iri("urn:hasState"), Term::literal("done")),
                      pat(Term::variable("?j"), Term::iri("urn:ownedBy"), Term::variable("?u"))};
  const auto result = store.query(q);
  ASSERT_EQ(result.size(), 1u);
  EXPECT_EQ(result[0].at("?j"), Term::iri("urn:j1"));
  EXPECT_EQ(result[0].at("?u"), Term::literal("alice"));
  EXPECT_EQ(result, oracle::brute_force_join(union_of(store), q));
}

TEST(Query, RepeatedVariableInOnePattern) {
  InfoStore store;
  store.put_graph("urn:c", std::vector{tr("urn:a", "urn:a", Term::iri("urn:a")),
                                       tr("urn:a", "urn:b", Term::iri("urn:a"))});
  const std::vector q{pat(Term::variable("?x"), Term::variable("?x"), Term::variable("?y"))};
  const auto result = store.query(q);
  ASSERT_EQ(result.size(), 1u);
  EXPECT_EQ(result[0].at("?y"), Term::iri("urn:a"));
}

TEST(Query, SpansContexts) {
  InfoStore store;
  store.put_graph("urn:c1", std::vector{tr("urn:j", "urn:state", Term::literal("done"))});
  store.put_graph("urn:c2", std::vector{tr("urn:j", "urn:owner", Term::literal("bob"))});
  const std::vector q{pat(Term::variable("?j"), Term::iri("urn:state"), Term::variable("?s")),
                      pat(Term::variable("?j"), Term::iri("urn:owner"), Term::variable("?o"))};
  EXPECT_EQ(store.query(q).size(), 1u);
}

TEST(Delete, CountsAndIsolation) {
  InfoStore store;
  const auto shared = tr("urn:a", "urn:p", Term::literal("x"));
  store.put_graph("urn:c1", std::vector{shared, tr("urn:a", "urn:q", Term::literal("y"))});
  store.put_graph("urn:c2", std::vector{shared});
  EXPECT_EQ(store.delete_graph("urn:c1"), 2u);
  EXPECT_EQ(store.delete_graph("urn:c1"), 0u);
  EXPECT_FALSE(store.has_context("urn:c1"));
  // The triple survives through the other context.
  const std::vector q{pat(Term::iri("urn:a"), Term::variable("?p"), Term::variable("?o"))};
  const auto result = store.query(q);
  ASSERT_EQ(result.size(), 1u);
  EXPECT_EQ(result[0].at("?p"), Term::iri("urn:p"));
}

TEST(Store, PutIsIdempotent) {
  InfoStore a;
  InfoStore b;
  const std::vector g{tr("urn:a", "urn:p", Term::literal("1")), tr("urn:b", "urn:p", Term::iri("urn:a"))};
  a.put_graph("urn:c", g);
  b.put_graph("urn:c", g);
  b.put_graph("urn:c", g);
  std::ostringstream sa;
  std::ostringstream sb;
  a.save(sa);
  b.save(sb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.size(), b.size());
}

TEST(NQuads, RoundTripWithEscapes) {
  InfoStore store;
  store.put_graph("urn:c", std::vector{tr("urn:a", "urn:p", Term::literal("quote \" back \\ nl\n tab\t")),
                                       tr("urn:a", "urn:q", Term::iri("http://x.example/y#z"))});
  std::ostringstream out;
  store.save(out);
  InfoStore copy;
  std::istringstream in(out.str());
  copy.load(in);
  std::ostringstream again;
  copy.save(again);
  EXPECT_EQ(out.str(), again.str());
  EXPECT_EQ(copy.graph("urn:c"), store.graph("urn:c"));
}

TEST(NQuads, ParseErrors) {
  EXPECT_THROW(parse_nquads("<urn:a> <urn:p> \"x\" <urn:c>\n"), ParseError);
  EXPECT_THROW(parse_nquads("<urn:a> <urn:p> \"x <urn:c> .\n"), ParseError);
  EXPECT_THROW(parse_nquads("<urn:a> <urn:p> ?x <urn:c> .\n"), ParseError);
  EXPECT_EQ(parse_nquads("# comment\n\n<urn:a> <urn:p> \"x\" <urn:c> .\n").size(), 1u);
}

TEST(Patterns, ParseText) {
  const auto p = parse_patterns("?j <urn:hasState> \"done\" .\n# c\n?j <urn:ownedBy> ?u .\n");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_TRUE(p[0].subject.is_variable());
  EXPECT_EQ(p[1].object, Term::variable("?u"));
  EXPECT_THROW(parse_patterns(""), ParseError);
  EXPECT_THROW(parse_patterns("?j <urn:p>\n"), ParseError);
}

TEST(Persistence, QueriesAgreeAfterReload) {
  std::mt19937_64 rng(77);
  InfoStore store;
  for (int c = 0; c < 10; ++c) {
    std::vector<Triple> g;
    for (int i = 0; i < 20; ++i) {
      g.push_back(tr("urn:s" + std::to_string(rng() % 7), "urn:p" + std::to_string(rng() % 3),
                     rng() % 2 ? Term::iri("urn:s" + std::to_string(rng() % 7))
                               : Term::literal(std::to_string(rng() % 5))));
    }
    store.put_graph("urn:c" + std::to_string(c), g);
  }
  std::stringstream buf;
  store.save(buf);
  InfoStore copy;
  copy.load(buf);
  const std::vector q{pat(Term::variable("?a"), Term::variable("?p"), Term::variable("?b")),
                      pat(Term::variable("?b"), Term::iri("urn:p1"), Term::variable("?c"))};
  EXPECT_EQ(store.query(q), copy.query(q));
  EXPECT_EQ(store.contexts(), copy.contexts());
}

TEST(Property, RandomStoresMatchBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    InfoStore store;
    const int contexts = 1 + static_cast<int>(rng() % 4);
    for (int c = 0; c < contexts; ++c) {
      std::vector<Triple> g;
      const int n = static_cast<int>(rng() % 40);
      for (int i = 0; i < n; ++i) {
        g.push_back(tr("urn:n" + std::to_string(rng() % 6), "urn:p" + std::to_string(rng() % 3),
                       rng() % 3 ? Term::iri("urn:n" + std::to_string(rng() % 6))
                                 : Term::literal("urn:n" + std::to_string(rng() % 6))));
      }
      store.put_graph("urn:g" + std::to_string(c), g);
    }
    auto term = [&]() {
      switch (rng() % 3) {
        case 0:
          return Term::variable("?v" + std::to_string(rng() % 3));
        case 1:
          return Term::iri("urn:n" + std::to_string(rng() % 6));
        default:
          return Term::variable("?w");
      }
    };
    std::vector<TriplePattern> q;
    const int np = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < np; ++i) {
      q.push_back(pat(term(),
                      rng() % 2 ? Term::iri("urn:p" + std::to_string(rng() % 3))
                                : Term::variable("?p" + std::to_string(rng() % 2)),
                      term()));
    }
    ASSERT_EQ(store.query(q), oracle::brute_force_join(union_of(store), q)) << "trial " << trial;
  }
}

TEST(Concurrency, ReadersSeeWholeContexts) {
  InfoStore store;
  auto generation = [](int gen) {
    std::vector<Triple> g;
    for (int i = 0; i < 50; ++i) {
      g.push_back(tr("urn:item" + std::to_string(i), "urn:gen", Term::literal(std::to_string(gen))));
    }
    return g;
  };
  store.put_graph("urn:c", generation(0));
  std::atomic<int> torn{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 4; ++r) {
    readers.emplace_back([&] {
      const std::vector q{pat(Term::variable("?s"), Term::iri("urn:gen"), Term::variable("?g"))};
      for (int i = 0; i < 400; ++i) {
        const auto result = store.query(q);
        std::set<std::string> gens;
        for (const auto& s : result) {
          gens.insert(s.at("?g").value());
        }
        if (result.size() != 50 || gens.size() != 1) {
          ++torn;
        }
        std::this_thread::yield();
      }
    });
  }
  for (int gen = 1; gen <= 300; ++gen) {
    store.put_graph("urn:c", generation(gen));
  }
  for (auto& t : readers) {
    t.join();
  }
  EXPECT_EQ(torn.load(), 0);
}
