#include "deltanet/term.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <utility>
#include <vector>

namespace deltanet {

struct Term::Node {
  Node(Kind k, std::string n, Term l, Term r, std::size_t s)
      : kind(k), name(std::move(n)), left(std::move(l)), right(std::move(r)), size(s) {}

  Kind kind;
  std::string name;
  // Abs: left = body. App: left = fun, right = arg.
  Term left;
  Term right;
  std::size_t size;
};

Term Term::var(std::string name) {
  return Term(std::make_shared<const Node>(Kind::Var, std::move(name), Term(nullptr),
                                           Term(nullptr), 1));
}

Term Term::abs(std::string binder, Term body) {
  const std::size_t s = 1 + body.size();
  return Term(std::make_shared<const Node>(Kind::Abs, std::move(binder), std::move(body),
                                           Term(nullptr), s));
}

Term Term::app(Term fun, Term arg) {
  const std::size_t s = 1 + fun.size() + arg.size();
  return Term(
      std::make_shared<const Node>(Kind::App, std::string(), std::move(fun), std::move(arg), s));
}

Term::Kind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
const Term& Term::body() const { return node_->left; }
const Term& Term::fun() const { return node_->left; }
const Term& Term::arg() const { return node_->right; }
std::size_t Term::size() const { return node_->size; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case Term::Kind::Var:
      return a.name() == b.name();
    case Term::Kind::Abs:
      return a.name() == b.name() && a.body() == b.body();
    case Term::Kind::App:
      return a.fun() == b.fun() && a.arg() == b.arg();
  }
  return false;
}

std::string_view calculus_name(Calculus c) {
  switch (c) {
    case Calculus::L: return "L";
    case Calculus::A: return "A";
    case Calculus::I: return "I";
    case Calculus::K: return "K";
  }
  return "?";
}

Calculus parse_calculus(std::string_view text) {
  if (text.size() == 1) {
    switch (std::toupper(static_cast<unsigned char>(text[0]))) {
      case 'L': return Calculus::L;
      case 'A': return Calculus::A;
      case 'I': return Calculus::I;
      case 'K': return Calculus::K;
      default: break;
    }
  }
  throw std::invalid_argument("unknown calculus '" + std::string(text) + "'");
}

bool calculus_leq(Calculus lower, Calculus upper) {
  if (lower == upper || lower == Calculus::L || upper == Calculus::K) return true;
  return false;
}

SyntaxError::SyntaxError(std::size_t offset, const std::string& what)
    : std::runtime_error("syntax error at byte " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Term parse() {
    skip_ws();
    if (at_end()) throw SyntaxError(pos_, "empty input");
    Term t = term();
    skip_ws();
    if (!at_end()) throw SyntaxError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
    return t;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  // Consumes a binder sigil if one starts at the cursor.
  bool lambda_sigil() {
    if (at_end()) return false;
    if (text_[pos_] == '\\') {
      ++pos_;
      return true;
    }
    if (text_.substr(pos_, 2) == "\xCE\xBB") {
      pos_ += 2;
      return true;
    }
    return false;
  }

  bool starts_atom() const {
    return !at_end() && (text_[pos_] == '(' || is_ident_char(text_[pos_]));
  }

  std::string ident() {
    const std::size_t start = pos_;
    while (!at_end() && is_ident_char(text_[pos_])) ++pos_;
    if (start == pos_) {
      throw SyntaxError(pos_, at_end() ? std::string("expected identifier, found end of input")
                                       : "expected identifier");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Term term() {
    skip_ws();
    if (lambda_sigil()) return lambda();
    return application();
  }

  Term lambda() {
    std::vector<std::string> binders;
    skip_ws();
    binders.push_back(ident());
    skip_ws();
    while (!at_end() && text_[pos_] != '.') {
      binders.push_back(ident());
      skip_ws();
    }
    if (at_end()) throw SyntaxError(pos_, "expected '.' after binders");
    ++pos_;
    skip_ws();
    if (at_end()) throw SyntaxError(pos_, "missing abstraction body");
    Term body = term();
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = Term::abs(*it, body);
    return body;
  }

  Term application() {
    skip_ws();
    if (!starts_atom()) {
      if (at_end()) throw SyntaxError(pos_, "unexpected end of input");
      throw SyntaxError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    Term acc = atom();
    for (;;) {
      skip_ws();
      if (starts_atom()) {
        acc = Term::app(acc, atom());
        continue;
      }
      // A trailing abstraction is the last argument: "f λx.x".
      const std::size_t save = pos_;
      if (lambda_sigil()) {
        acc = Term::app(acc, lambda());
        continue;
      }
      pos_ = save;
      return acc;
    }
  }

  Term atom() {
    if (text_[pos_] == '(') {
      const std::size_t open = pos_;
      ++pos_;
      Term inner = term();
      skip_ws();
      if (at_end() || text_[pos_] != ')') {
        throw SyntaxError(pos_, "expected ')' to close '(' at byte " + std::to_string(open));
      }
      ++pos_;
      return inner;
    }
    return Term::var(ident());
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_into(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out += t.name();
      return;
    case Term::Kind::Abs:
      out += "\xCE\xBB";
      out += t.name();
      out += '.';
      print_into(t.body(), out);
      return;
    case Term::Kind::App: {
      const Term& f = t.fun();
      if (f.is_abs()) {
        out += '(';
        print_into(f, out);
        out += ')';
      } else {
        print_into(f, out);
      }
      out += ' ';
      const Term& a = t.arg();
      if (a.is_var()) {
        out += a.name();
      } else {
        out += '(';
        print_into(a, out);
        out += ')';
      }
      return;
    }
  }
}

void collect_free(const Term& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      if (std::find(bound.begin(), bound.end(), t.name()) == bound.end()) out.insert(t.name());
      return;
    case Term::Kind::Abs:
      bound.push_back(t.name());
      collect_free(t.body(), bound, out);
      bound.pop_back();
      return;
    case Term::Kind::App:
      collect_free(t.fun(), bound, out);
      collect_free(t.arg(), bound, out);
      return;
  }
}

bool occurs_free(const Term& t, const std::string& name) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return t.name() == name;
    case Term::Kind::Abs:
      return t.name() != name && occurs_free(t.body(), name);
    case Term::Kind::App:
      return occurs_free(t.fun(), name) || occurs_free(t.arg(), name);
  }
  return false;
}

void collect_all_names(const Term& t, std::set<std::string>& out) {
  out.insert(t.name());
  if (t.is_abs()) collect_all_names(t.body(), out);
  if (t.is_app()) {
    collect_all_names(t.fun(), out);
    collect_all_names(t.arg(), out);
  }
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string stem = base;
  while (stem.size() > 1 && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  for (std::size_t k = 1;; ++k) {
    std::string candidate = stem + std::to_string(k);
    if (!avoid.contains(candidate)) return candidate;
  }
}

Term subst(const Term& t, const std::string& name, const Term& value,
           const std::set<std::string>& value_fv) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return t.name() == name ? value : t;
    case Term::Kind::App: {
      Term f = subst(t.fun(), name, value, value_fv);
      Term a = subst(t.arg(), name, value, value_fv);
      return Term::app(std::move(f), std::move(a));
    }
    case Term::Kind::Abs: {
      if (t.name() == name || !occurs_free(t.body(), name)) return t;
      if (!value_fv.contains(t.name())) {
        return Term::abs(t.name(), subst(t.body(), name, value, value_fv));
      }
      std::set<std::string> avoid = value_fv;
      collect_all_names(t.body(), avoid);
      avoid.insert(name);
      const std::string renamed = fresh_name(t.name(), avoid);
      const Term body = subst(t.body(), t.name(), Term::var(renamed), {renamed});
      return Term::abs(renamed, subst(body, name, value, value_fv));
    }
  }
  return t;
}

struct Scope {
  const std::string* a;
  const std::string* b;
};

bool alpha_eq_in(const Term& a, const Term& b, std::vector<Scope>& env) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        const bool ha = *it->a == a.name();
        const bool hb = *it->b == b.name();
        if (ha || hb) return ha && hb;
      }
      return a.name() == b.name();
    }
    case Term::Kind::Abs: {
      env.push_back({&a.name(), &b.name()});
      const bool eq = alpha_eq_in(a.body(), b.body(), env);
      env.pop_back();
      return eq;
    }
    case Term::Kind::App:
      return alpha_eq_in(a.fun(), b.fun(), env) && alpha_eq_in(a.arg(), b.arg(), env);
  }
  return false;
}

struct Occurrences {
  const std::string* name;
  std::size_t count;
};

void count_bound(const Term& t, std::vector<Occurrences>& scope, bool& erasure, bool& sharing) {
  switch (t.kind()) {
    case Term::Kind::Var:
      for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
        if (*it->name == t.name()) {
          ++it->count;
          break;
        }
      }
      return;
    case Term::Kind::Abs:
      scope.push_back({&t.name(), 0});
      count_bound(t.body(), scope, erasure, sharing);
      if (scope.back().count == 0) erasure = true;
      if (scope.back().count > 1) sharing = true;
      scope.pop_back();
      return;
    case Term::Kind::App:
      count_bound(t.fun(), scope, erasure, sharing);
      count_bound(t.arg(), scope, erasure, sharing);
      return;
  }
}

}  // namespace

Term parse_term(std::string_view text) { return Parser(text).parse(); }

std::string print_term(const Term& t) {
  std::string out;
  print_into(t, out);
  return out;
}

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(t, bound, out);
  return out;
}

bool alpha_eq(const Term& a, const Term& b) {
  std::vector<Scope> env;
  return alpha_eq_in(a, b, env);
}

Calculus classify(const Term& t) {
  std::vector<Occurrences> scope;
  bool erasure = false;
  bool sharing = false;
  count_bound(t, scope, erasure, sharing);
  if (erasure && sharing) return Calculus::K;
  if (erasure) return Calculus::A;
  if (sharing) return Calculus::I;
  return Calculus::L;
}

Term substitute(const Term& t, const std::string& name, const Term& value) {
  return subst(t, name, value, free_vars(value));
}

bool oracle_step(const Term& t, Term& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return false;
    case Term::Kind::Abs: {
      Term body = t.body();
      if (!oracle_step(t.body(), body)) return false;
      out = Term::abs(t.name(), std::move(body));
      return true;
    }
    case Term::Kind::App: {
      const Term& f = t.fun();
      if (f.is_abs()) {
        out = substitute(f.body(), f.name(), t.arg());
        return true;
      }
      Term next = f;
      if (oracle_step(f, next)) {
        out = Term::app(std::move(next), t.arg());
        return true;
      }
      next = t.arg();
      if (oracle_step(t.arg(), next)) {
        out = Term::app(f, std::move(next));
        return true;
      }
      return false;
    }
  }
  return false;
}

OracleResult oracle_normalize(const Term& t, std::uint64_t fuel) {
  if (fuel == 0) throw std::invalid_argument("oracle_normalize: fuel must be positive");
  Term current = t;
  std::uint64_t steps = 0;
  for (;;) {
    Term next = current;
    if (!oracle_step(current, next)) return NormalForm{current, steps};
    if (steps == fuel) return FuelExhausted{current, steps};
    current = std::move(next);
    ++steps;
  }
}

}  // namespace deltanet
