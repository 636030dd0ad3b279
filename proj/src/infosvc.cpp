#include "gridscope/infosvc.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <iterator>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

#include "gridscope/error.hpp"

namespace gridscope::infosvc {

std::string_view to_string(TermKind kind) {
  switch (kind) {
    case TermKind::iri:
      return "iri";
    case TermKind::literal:
      return "literal";
    case TermKind::variable:
      return "variable";
  }
  return "iri";
}

Term Term::iri(std::string value) {
  if (value.empty()) {
    throw ValidationError("IRI must not be empty");
  }
  if (value.find_first_of("<>\" \t\r\n") != std::string::npos) {
    throw ValidationError("IRI contains a forbidden character: " + value);
  }
  return {TermKind::iri, std::move(value)};
}

Term Term::literal(std::string value) { return {TermKind::literal, std::move(value)}; }

Term Term::variable(std::string name) {
  const bool ok = name.size() >= 2 && name.front() == '?' &&
                  std::all_of(name.begin() + 1, name.end(), [](unsigned char c) {
                    return std::isalnum(c) != 0 || c == '_';
                  });
  if (!ok) {
    throw ValidationError("variable must look like ?name: '" + name + "'");
  }
  return {TermKind::variable, std::move(name)};
}

std::strong_ordering compare_values(const Term& a, const Term& b) {
  if (auto c = a.value() <=> b.value(); c != 0) {
    return c;
  }
  return a.kind() <=> b.kind();
}

bool solution_less(const Solution& a, const Solution& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (auto c = ia->first <=> ib->first; c != 0) {
      return c < 0;
    }
    if (auto c = compare_values(ia->second, ib->second); c != 0) {
      return c < 0;
    }
  }
  return ia == a.end() && ib != b.end();
}

void validate_stored(const Triple& t) {
  if (t.subject.is_variable() || t.predicate.is_variable() || t.object.is_variable()) {
    throw ValidationError("stored triples must not contain variables");
  }
  if (t.subject.kind() != TermKind::iri || t.predicate.kind() != TermKind::iri) {
    throw ValidationError("subject and predicate must be IRIs");
  }
}

// ---------------------------------------------------------------------------
// Store

void InfoStore::retain(const Triple& t) {
  auto [it, inserted] = union_.try_emplace(t, 0);
  ++it->second;
  if (inserted) {
    const Triple* p = &it->first;
    by_subject_[p->subject].insert(p);
    by_predicate_[p->predicate].insert(p);
    by_object_[p->object].insert(p);
  }
}

void InfoStore::release(const Triple& t) {
  auto it = union_.find(t);
  if (it == union_.end() || --it->second > 0) {
    return;
  }
  const Triple* p = &it->first;
  auto drop = [p](TripleIndex& index, const Term& key) {
    auto i = index.find(key);
    if (i != index.end() && i->second.erase(p) > 0 && i->second.empty()) {
      index.erase(i);
    }
  };
  drop(by_subject_, p->subject);
  drop(by_predicate_, p->predicate);
  drop(by_object_, p->object);
  union_.erase(it);
}

std::size_t InfoStore::put_graph(const std::string& context, std::span<const Triple> triples) {
  if (context.empty()) {
    throw ValidationError("context IRI must not be empty");
  }
  Term::iri(context);
  std::set<Triple> incoming;
  for (const Triple& t : triples) {
    validate_stored(t);
    incoming.insert(t);
  }
  const std::size_t count = incoming.size();

  std::unique_lock lock(mutex_);
  if (auto old = graphs_.find(context); old != graphs_.end()) {
    for (const Triple& t : old->second) {
      release(t);
    }
    graphs_.erase(old);
  }
  for (const Triple& t : incoming) {
    retain(t);
  }
  graphs_.emplace(context, std::move(incoming));
  return count;
}

std::size_t InfoStore::delete_graph(const std::string& context) {
  std::unique_lock lock(mutex_);
  auto it = graphs_.find(context);
  if (it == graphs_.end()) {
    return 0;
  }
  const std::size_t count = it->second.size();
  for (const Triple& t : it->second) {
    release(t);
  }
  graphs_.erase(it);
  return count;
}

void InfoStore::clear() {
  std::unique_lock lock(mutex_);
  graphs_.clear();
  by_subject_.clear();
  by_predicate_.clear();
  by_object_.clear();
  union_.clear();
}

std::vector<Triple> InfoStore::graph(const std::string& context) const {
  std::shared_lock lock(mutex_);
  auto it = graphs_.find(context);
  if (it == graphs_.end()) {
    return {};
  }
  return {it->second.begin(), it->second.end()};
}

std::vector<std::string> InfoStore::contexts() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  out.reserve(graphs_.size());
  for (const auto& [name, _] : graphs_) {
    out.push_back(name);
  }
  return out;
}

bool InfoStore::has_context(const std::string& context) const {
  std::shared_lock lock(mutex_);
  return graphs_.contains(context);
}

std::size_t InfoStore::size() const {
  std::shared_lock lock(mutex_);
  return union_.size();
}

std::vector<Quad> InfoStore::quads() const {
  std::shared_lock lock(mutex_);
  std::vector<Quad> out;
  for (const auto& [context, triples] : graphs_) {
    for (const Triple& t : triples) {
      out.push_back({t, context});
    }
  }
  return out;
}

void InfoStore::save(std::ostream& out) const { out << write_nquads(quads()); }

void InfoStore::load(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::map<std::string, std::vector<Triple>> grouped;
  for (Quad& q : parse_nquads(text)) {
    grouped[q.context].push_back(std::move(q.triple));
  }
  clear();
  for (const auto& [context, triples] : grouped) {
    put_graph(context, triples);
  }
}

// ---------------------------------------------------------------------------
// Query

namespace {

class Matcher {
 public:
  Matcher(std::span<const TriplePattern> patterns, const std::map<Triple, std::size_t>& all,
          const std::map<Term, std::set<const Triple*>>& by_s,
          const std::map<Term, std::set<const Triple*>>& by_p,
          const std::map<Term, std::set<const Triple*>>& by_o)
      : patterns_(patterns), all_(all), by_s_(by_s), by_p_(by_p), by_o_(by_o),
        done_(patterns.size(), false) {}

  std::vector<Solution> run() {
    std::set<Solution, decltype(&solution_less)> found(&solution_less);
    Solution binding;
    search(binding, 0, found);
    return {found.begin(), found.end()};
  }

 private:
  // The term a pattern position resolves to under the current binding, or
  // nullopt if it is a still-unbound variable.
  static std::optional<Term> resolve(const Term& t, const Solution& binding) {
    if (!t.is_variable()) {
      return t;
    }
    if (auto it = binding.find(t.value()); it != binding.end()) {
      return it->second;
    }
    return std::nullopt;
  }

  static int bound_positions(const TriplePattern& p, const Solution& binding) {
    return resolve(p.subject, binding).has_value() + resolve(p.predicate, binding).has_value() +
           resolve(p.object, binding).has_value();
  }

  static bool unify(const Term& pattern, const Term& value, Solution& binding,
                    std::vector<std::string>& added) {
    if (!pattern.is_variable()) {
      return pattern == value;
    }
    auto [it, inserted] = binding.try_emplace(pattern.value(), value);
    if (inserted) {
      added.push_back(pattern.value());
      return true;
    }
    return it->second == value;
  }

  template <typename Fn>
  void for_each_candidate(const TriplePattern& p, const Solution& binding, Fn&& fn) const {
    const std::map<Term, std::set<const Triple*>>* best = nullptr;
    std::optional<Term> key;
    std::size_t best_count = all_.size() + 1;
    auto consider = [&](const Term& t, const std::map<Term, std::set<const Triple*>>& index) {
      if (auto r = resolve(t, binding)) {
        const auto hit = index.find(*r);
        const std::size_t n = hit == index.end() ? 0 : hit->second.size();
        if (n < best_count) {
          best_count = n;
          best = &index;
          key = std::move(r);
        }
      }
    };
    consider(p.subject, by_s_);
    consider(p.predicate, by_p_);
    consider(p.object, by_o_);
    if (best != nullptr) {
      if (auto hit = best->find(*key); hit != best->end()) {
        for (const Triple* t : hit->second) {
          fn(*t);
        }
      }
    } else {
      for (const auto& [t, _] : all_) {
        fn(t);
      }
    }
  }

  void search(Solution& binding, std::size_t depth,
              std::set<Solution, decltype(&solution_less)>& found) {
    if (depth == patterns_.size()) {
      found.insert(binding);
      return;
    }
    // Most-constrained pattern next; lowest index on ties.
    std::size_t pick = patterns_.size();
    int pick_bound = -1;
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      if (done_[i]) {
        continue;
      }
      const int b = bound_positions(patterns_[i], binding);
      if (b > pick_bound) {
        pick = i;
        pick_bound = b;
      }
    }
    const TriplePattern& p = patterns_[pick];
    done_[pick] = true;
    for_each_candidate(p, binding, [&](const Triple& t) {
      std::vector<std::string> added;
      if (unify(p.subject, t.subject, binding, added) &&
          unify(p.predicate, t.predicate, binding, added) &&
          unify(p.object, t.object, binding, added)) {
        search(binding, depth + 1, found);
      }
      for (const std::string& name : added) {
        binding.erase(name);
      }
    });
    done_[pick] = false;
  }

  std::span<const TriplePattern> patterns_;
  const std::map<Triple, std::size_t>& all_;
  const std::map<Term, std::set<const Triple*>>& by_s_;
  const std::map<Term, std::set<const Triple*>>& by_p_;
  const std::map<Term, std::set<const Triple*>>& by_o_;
  std::vector<bool> done_;
};

}  // namespace

std::vector<Solution> InfoStore::query(std::span<const TriplePattern> patterns) const {
  if (patterns.empty()) {
    throw ValidationError("query needs at least one triple pattern");
  }
  std::shared_lock lock(mutex_);
  return Matcher(patterns, union_, by_subject_, by_predicate_, by_object_).run();
}

// ---------------------------------------------------------------------------
// Text formats

std::string write_term(const Term& term) {
  switch (term.kind()) {
    case TermKind::iri:
      return "<" + term.value() + ">";
    case TermKind::variable:
      return term.value();
    case TermKind::literal:
      break;
  }
  std::string out = "\"";
  for (char c : term.value()) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '"':
        out += "\\\"";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
  return out;
}

std::string write_nquads(std::span<const Quad> quads) {
  std::string out;
  for (const Quad& q : quads) {
    out += write_term(q.triple.subject);
    out += ' ';
    out += write_term(q.triple.predicate);
    out += ' ';
    out += write_term(q.triple.object);
    out += " <";
    out += q.context;
    out += "> .\n";
  }
  return out;
}

namespace {

class LineLexer {
 public:
  LineLexer(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  bool at_end() {
    skip_space();
    return pos_ >= line_.size();
  }

  Term next_term() {
    skip_space();
    if (pos_ >= line_.size()) {
      fail("unexpected end of line");
    }
    const char c = line_[pos_];
    if (c == '<') {
      const std::size_t close = line_.find('>', pos_ + 1);
      if (close == std::string_view::npos) {
        fail("unterminated IRI");
      }
      std::string value(line_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      try {
        return Term::iri(std::move(value));
      } catch (const ValidationError& e) {
        fail(e.what());
      }
    }
    if (c == '"') {
      return Term::literal(read_literal());
    }
    if (c == '?') {
      const std::size_t start = pos_;
      ++pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) != 0 || line_[pos_] == '_')) {
        ++pos_;
      }
      try {
        return Term::variable(std::string(line_.substr(start, pos_ - start)));
      } catch (const ValidationError& e) {
        fail(e.what());
      }
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void expect_dot() {
    skip_space();
    if (pos_ >= line_.size() || line_[pos_] != '.') {
      fail("expected '.'");
    }
    ++pos_;
    if (!at_end()) {
      fail("trailing characters after '.'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  void skip_space() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) {
      ++pos_;
    }
  }

  std::string read_literal() {
    std::string value;
    ++pos_;  // opening quote
    while (pos_ < line_.size()) {
      const char c = line_[pos_++];
      if (c == '"') {
        return value;
      }
      if (c != '\\') {
        value += c;
        continue;
      }
      if (pos_ >= line_.size()) {
        break;
      }
      switch (line_[pos_++]) {
        case '\\':
          value += '\\';
          break;
        case '"':
          value += '"';
          break;
        case 'n':
          value += '\n';
          break;
        case 'r':
          value += '\r';
          break;
        case 't':
          value += '\t';
          break;
        default:
          fail("unknown escape in literal");
      }
    }
    fail("unterminated literal");
  }

  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') {
      continue;
    }
    fn(line, line_no);
  }
}

}  // namespace

std::vector<Quad> parse_nquads(std::string_view text) {
  std::vector<Quad> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    LineLexer lex(line, line_no);
    Triple t{lex.next_term(), lex.next_term(), lex.next_term()};
    const Term context = lex.next_term();
    lex.expect_dot();
    if (context.kind() != TermKind::iri) {
      lex.fail("context must be an IRI");
    }
    try {
      validate_stored(t);
    } catch (const ValidationError& e) {
      lex.fail(e.what());
    }
    out.push_back({std::move(t), context.value()});
  });
  return out;
}

std::vector<TriplePattern> parse_patterns(std::string_view text) {
  std::vector<TriplePattern> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    LineLexer lex(line, line_no);
    TriplePattern p{lex.next_term(), lex.next_term(), lex.next_term()};
    lex.expect_dot();
    out.push_back(std::move(p));
  });
  if (out.empty()) {
    throw ParseError("no triple patterns given");
  }
  return out;
}

}  // namespace gridscope::infosvc
