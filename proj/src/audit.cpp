#include "gridscope/audit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "gridscope/error.hpp"
#include "gridscope/text.hpp"
#include "gridscope/vocab.hpp"

namespace gridscope::infosvc {

namespace {

Triple make(const std::string& subject, std::string_view predicate, Term object) {
  return {Term::iri(subject), Term::iri(std::string(predicate)), std::move(object)};
}

Term lit(std::string value) { return Term::literal(std::move(value)); }

TriplePattern pattern(Term s, std::string_view p, Term o) {
  return {std::move(s), Term::iri(std::string(p)), std::move(o)};
}

std::optional<std::string> single_value(const std::vector<Triple>& triples,
                                        std::string_view predicate) {
  for (const Triple& t : triples) {
    if (t.predicate.value() == predicate) {
      return t.object.value();
    }
  }
  return std::nullopt;
}

constexpr std::string_view kJobPrefix = "urn:job:";

}  // namespace

std::string iri_escape(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) != 0 || c == '.' || c == '_' || c == '~' || c == '-') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string record_job_audit(InfoStore& store, const Job& job) {
  const std::string subject = vocab::job_iri(job.id);
  std::vector<Triple> triples{
      make(subject, vocab::kOwner, lit(job.spec.owner)),
      make(subject, vocab::kExecutable, lit(job.spec.executable)),
      make(subject, vocab::kState, lit(std::string(to_string(job.state)))),
  };
  if (job.submit_t) {
    triples.push_back(make(subject, vocab::kSubmitted, lit(job.submit_t->iso())));
  }
  if (job.start_t) {
    triples.push_back(make(subject, vocab::kStarted, lit(job.start_t->iso())));
  }
  if (job.end_t) {
    triples.push_back(make(subject, vocab::kEnded, lit(job.end_t->iso())));
  }
  if (job.resource_id) {
    triples.push_back(
        make(subject, vocab::kResource, Term::iri(vocab::resource_context(*job.resource_id))));
  }
  store.put_graph(subject, triples);
  return subject;
}

void record_job_transition(InfoStore& store, const Job& job, Instant at) {
  const std::string context = vocab::job_audit_context(job.id);
  std::vector<Triple> log = store.graph(context);
  const std::string entry = padded_id("", log.size() + 1, 4) + "|" + at.iso() + "|" +
                            std::string(to_string(job.state));
  log.push_back(make(vocab::job_iri(job.id), vocab::kTransition, lit(entry)));
  store.put_graph(context, log);
}

std::optional<JobState> replay_job_state(const InfoStore& store, const std::string& job_id) {
  std::vector<Triple> log = store.graph(vocab::job_audit_context(job_id));
  if (log.empty()) {
    return std::nullopt;
  }
  // Zero-padded sequence numbers sort lexicographically.
  std::vector<std::string> entries;
  for (const Triple& t : log) {
    entries.push_back(t.object.value());
  }
  std::sort(entries.begin(), entries.end());
  std::optional<JobState> state;
  for (const std::string& e : entries) {
    const JobState next = parse_job_state(e.substr(e.rfind('|') + 1));
    if (state && !is_legal_transition(*state, next)) {
      throw StateError("audit log for " + job_id + " contains an illegal transition");
    }
    state = next;
  }
  return state;
}

std::size_t transition_count(const InfoStore& store, const std::string& job_id) {
  return store.graph(vocab::job_audit_context(job_id)).size();
}

std::vector<JobRecord> read_job_records(const InfoStore& store) {
  const std::vector<TriplePattern> by_state{
      pattern(Term::variable("?job"), vocab::kState, Term::variable("?state"))};
  std::vector<JobRecord> out;
  for (const Solution& s : store.query(by_state)) {
    const std::string& subject = s.at("?job").value();
    if (!subject.starts_with(kJobPrefix)) {
      continue;
    }
    const std::vector<TriplePattern> fields{
        {Term::iri(subject), Term::variable("?p"), Term::variable("?o")}};
    std::vector<Triple> triples;
    for (const Solution& f : store.query(fields)) {
      triples.push_back({Term::iri(subject), f.at("?p"), f.at("?o")});
    }
    JobRecord rec;
    rec.id = subject.substr(kJobPrefix.size());
    rec.owner = single_value(triples, vocab::kOwner).value_or("");
    rec.executable = single_value(triples, vocab::kExecutable).value_or("");
    rec.state = parse_job_state(s.at("?state").value());
    if (auto v = single_value(triples, vocab::kSubmitted)) {
      rec.submit_t = Instant::parse(*v);
    }
    if (auto v = single_value(triples, vocab::kStarted)) {
      rec.start_t = Instant::parse(*v);
    }
    if (auto v = single_value(triples, vocab::kEnded)) {
      rec.end_t = Instant::parse(*v);
    }
    if (auto v = single_value(triples, vocab::kResource)) {
      rec.resource_id = v->substr(std::string_view("urn:resource:").size());
    }
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(),
            [](const JobRecord& a, const JobRecord& b) { return a.id < b.id; });
  return out;
}

std::string record_usage(InfoStore& store, const UsageRecord& rec) {
  if (rec.end < rec.start) {
    throw ValidationError("usage record ends before it starts");
  }
  if (rec.telescope_name.empty()) {
    throw ValidationError("usage record needs a telescope name");
  }
  const std::string context =
      "urn:usage:" + iri_escape(rec.telescope_name) + "/" + iri_escape(rec.start.iso());
  const std::vector<Triple> triples{
      make(context, vocab::kUser, lit(rec.user)),
      make(context, vocab::kTelescopeName, lit(rec.telescope_name)),
      make(context, vocab::kLocation,
           lit(format_fixed(rec.location.lat(), 4) + "," + format_fixed(rec.location.lon(), 4))),
      make(context, vocab::kStart, lit(rec.start.iso())),
      make(context, vocab::kEnd, lit(rec.end.iso())),
      make(context, vocab::kPriority, lit(std::to_string(rec.priority))),
  };
  store.put_graph(context, triples);
  return context;
}

std::vector<UsageRecord> read_usage_records(const InfoStore& store) {
  const std::vector<TriplePattern> patterns{
      pattern(Term::variable("?obs"), vocab::kUser, Term::variable("?user")),
      pattern(Term::variable("?obs"), vocab::kTelescopeName, Term::variable("?telescope")),
      pattern(Term::variable("?obs"), vocab::kLocation, Term::variable("?location")),
      pattern(Term::variable("?obs"), vocab::kStart, Term::variable("?start")),
      pattern(Term::variable("?obs"), vocab::kEnd, Term::variable("?end")),
      pattern(Term::variable("?obs"), vocab::kPriority, Term::variable("?priority")),
  };
  std::vector<UsageRecord> out;
  for (const Solution& s : store.query(patterns)) {
    const std::string& loc = s.at("?location").value();
    const std::size_t comma = loc.find(',');
    if (comma == std::string::npos) {
      throw ParseError("malformed usage location '" + loc + "'");
    }
    int priority = 0;
    const std::string& p = s.at("?priority").value();
    std::from_chars(p.data(), p.data() + p.size(), priority);
    out.push_back({s.at("?user").value(), s.at("?telescope").value(),
                   ephemeris::GeoLocation(std::stod(loc.substr(0, comma)),
                                          std::stod(loc.substr(comma + 1))),
                   Instant::parse(s.at("?start").value()), Instant::parse(s.at("?end").value()),
                   priority});
  }
  return out;
}

}  // namespace gridscope::infosvc
