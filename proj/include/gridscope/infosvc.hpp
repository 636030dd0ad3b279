#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gridscope::infosvc {

enum class TermKind { iri, literal, variable };

std::string_view to_string(TermKind kind);

class Term {
 public:
  static Term iri(std::string value);
  static Term literal(std::string value);
  // name must start with '?' followed by [A-Za-z0-9_]+.
  static Term variable(std::string name);

  TermKind kind() const { return kind_; }
  const std::string& value() const { return value_; }
  bool is_variable() const { return kind_ == TermKind::variable; }

  auto operator<=>(const Term&) const = default;

 private:
  Term(TermKind kind, std::string value) : kind_(kind), value_(std::move(value)) {}
  TermKind kind_ = TermKind::iri;
  std::string value_;
};

// Order used for query results: bound value first, kind second.
std::strong_ordering compare_values(const Term& a, const Term& b);

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  auto operator<=>(const Triple&) const = default;
};

// Same shape as Triple, but any position may hold a variable.
struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;
};

struct Quad {
  Triple triple;
  std::string context;
};

// Variable name (including the leading '?') to bound term.
using Solution = std::map<std::string, Term>;

// Lexicographic comparison of two solutions over the same variable set, using
// compare_values on each binding in variable-name order.
bool solution_less(const Solution& a, const Solution& b);

// Validates a triple for storage: IRI subject/predicate, no variables.
void validate_stored(const Triple& t);

// A set of named graphs. Queries run over the union of every graph. Each
// mutation swaps a whole context under an exclusive lock, so a concurrent
// reader sees a context either entirely before or entirely after a put.
class InfoStore {
 public:
  InfoStore() = default;
  InfoStore(const InfoStore&) = delete;
  InfoStore& operator=(const InfoStore&) = delete;

  // Replaces the context's content; duplicates collapse. Returns the number of
  // distinct triples now held by the context.
  std::size_t put_graph(const std::string& context, std::span<const Triple> triples);
  std::size_t delete_graph(const std::string& context);
  void clear();

  // Conjunctive basic-graph-pattern match. Solutions are duplicate-free and
  // sorted with solution_less.
  std::vector<Solution> query(std::span<const TriplePattern> patterns) const;

  std::vector<Triple> graph(const std::string& context) const;
  std::vector<std::string> contexts() const;
  bool has_context(const std::string& context) const;
  // Distinct triples across all contexts.
  std::size_t size() const;

  std::vector<Quad> quads() const;
  // Replaces the whole store with the quads read from the stream.
  void load(std::istream& in);
  void save(std::ostream& out) const;

 private:
  using TripleIndex = std::map<Term, std::set<const Triple*>>;

  void retain(const Triple& t);
  void release(const Triple& t);

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::set<Triple>> graphs_;
  // Union of all graphs with a per-triple count of owning contexts.
  std::map<Triple, std::size_t> union_;
  TripleIndex by_subject_;
  TripleIndex by_predicate_;
  TripleIndex by_object_;
};

// N-Quads style text: one `<s> <p> <o|"literal"> <context> .` per line.
std::string write_nquads(std::span<const Quad> quads);
std::vector<Quad> parse_nquads(std::string_view text);

// Pattern text: one `term term term .` per line; variables are written `?name`.
std::vector<TriplePattern> parse_patterns(std::string_view text);
std::string write_term(const Term& term);

}  // namespace gridscope::infosvc
