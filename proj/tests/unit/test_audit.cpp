#include <gtest/gtest.h>

#include "gridscope/audit.hpp"
#include "gridscope/error.hpp"
#include "gridscope/vocab.hpp"

using namespace gridscope;
using namespace gridscope::infosvc;

namespace {

Job make_job(JobState state) {
  Job j;
  j.id = "job-000001";
  j.spec.owner = "alice";
  j.spec.executable = "/bin/reduce";
  j.spec.runtime = Seconds{60};
  j.state = state;
  return j;
}

}  // namespace

TEST(JobAudit, FieldCounts) {
  InfoStore store;
  Job j = make_job(JobState::pending);
  const std::string ctx = record_job_audit(store, j);
  EXPECT_EQ(ctx, "urn:job:job-000001");
  EXPECT_EQ(store.graph(ctx).size(), 3u);

  const Instant t0 = Instant::from_civil(2008, 1, 1);
  j.submit_t = t0;
  record_job_audit(store, j);
  EXPECT_EQ(store.graph(ctx).size(), 4u);

  j.state = JobState::done;
  j.start_t = t0 + Seconds{10};
  j.end_t = t0 + Seconds{70};
  j.resource_id = "host-a";
  record_job_audit(store, j);
  EXPECT_EQ(store.graph(ctx).size(), 7u);
}

TEST(JobAudit, ReadBackMatchesJob) {
  InfoStore store;
  Job j = make_job(JobState::done);
  const Instant t0 = Instant::from_civil(2008, 1, 1);
  j.submit_t = t0;
  j.start_t = t0 + Seconds{10};
  j.end_t = t0 + Seconds{70};
  j.resource_id = "host-a";
  record_job_audit(store, j);
  const auto records = read_job_records(store);
  ASSERT_EQ(records.size(), 1u);
  const JobRecord& r = records[0];
  EXPECT_EQ(r.id, j.id);
  EXPECT_EQ(r.owner, "alice");
  EXPECT_EQ(r.executable, "/bin/reduce");
  EXPECT_EQ(r.state, JobState::done);
  EXPECT_EQ(r.submit_t, j.submit_t);
  EXPECT_EQ(r.start_t, j.start_t);
  EXPECT_EQ(r.end_t, j.end_t);
  EXPECT_EQ(r.resource_id, j.resource_id);
}

TEST(JobAudit, TransitionLogReplays) {
  InfoStore store;
  Job j = make_job(JobState::pending);
  const Instant t0 = Instant::from_civil(2008, 1, 1);
  record_job_transition(store, j, t0);
  j.state = JobState::active;
  record_job_transition(store, j, t0 + Seconds{5});
  j.state = JobState::failed;
  record_job_transition(store, j, t0 + Seconds{65});
  EXPECT_EQ(transition_count(store, j.id), 3u);
  EXPECT_EQ(replay_job_state(store, j.id), JobState::failed);
  EXPECT_EQ(replay_job_state(store, "job-999999"), std::nullopt);
}

TEST(Usage, SixTriplesAndRoundTrip) {
  InfoStore store;
  UsageRecord rec{"astro01", "South Africa 1.2m", ephemeris::GeoLocation(-29.3, 20.8),
                  Instant::parse("2008-05-28T17:21:44Z"), Instant::parse("2008-05-29T00:00:00Z"), 3};
  const std::string ctx = record_usage(store, rec);
  EXPECT_EQ(store.graph(ctx).size(), 6u);
  const auto back = read_usage_records(store);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].user, rec.user);
  EXPECT_EQ(back[0].telescope_name, rec.telescope_name);
  EXPECT_EQ(back[0].start, rec.start);
  EXPECT_EQ(back[0].end, rec.end);
  EXPECT_EQ(back[0].priority, 3);
  EXPECT_NEAR(back[0].location.lat(), -29.3, 1e-9);
}

TEST(Usage, QueryByTelescopeNameGivesWindow) {
  InfoStore store;
  record_usage(store, {"u", "tel one", ephemeris::GeoLocation(0, 0),
                       Instant::parse("2008-01-01T01:00:00Z"), Instant::parse("2008-01-01T02:00:00Z"), 0});
  record_usage(store, {"u", "tel two", ephemeris::GeoLocation(0, 0),
                       Instant::parse("2008-01-01T03:00:00Z"), Instant::parse("2008-01-01T04:00:00Z"), 0});
  const std::vector<TriplePattern> q{
      {Term::variable("?o"), Term::iri(std::string(vocab::kTelescopeName)), Term::literal("tel two")},
      {Term::variable("?o"), Term::iri(std::string(vocab::kStart)), Term::variable("?start")},
      {Term::variable("?o"), Term::iri(std::string(vocab::kEnd)), Term::variable("?end")}};
  const auto result = store.query(q);
  ASSERT_EQ(result.size(), 1u);
  EXPECT_EQ(result[0].at("?start").value(), "2008-01-01T03:00:00Z");
  EXPECT_EQ(result[0].at("?end").value(), "2008-01-01T04:00:00Z");
}

TEST(Usage, RejectsReversedWindow) {
  InfoStore store;
  EXPECT_THROW(record_usage(store, {"u", "t", ephemeris::GeoLocation(0, 0),
                                    Instant::parse("2008-01-01T02:00:00Z"),
                                    Instant::parse("2008-01-01T01:00:00Z"), 0}),
               ValidationError);
}

TEST(IriEscape, PercentEncodes) {
  EXPECT_EQ(iri_escape("a b/c"), "a%20b%2Fc");
  EXPECT_EQ(iri_escape("Az09._~-"), "Az09._~-");
}
