#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace deltanet {

/// Immutable λ-term with named binders. Copies share structure.
class Term {
 public:
  enum class Kind : std::uint8_t { Var, Abs, App };

  static Term var(std::string name);
  static Term abs(std::string binder, Term body);
  static Term app(Term fun, Term arg);

  Kind kind() const;
  bool is_var() const { return kind() == Kind::Var; }
  bool is_abs() const { return kind() == Kind::Abs; }
  bool is_app() const { return kind() == Kind::App; }

  /// Variable name for Var, binder name for Abs.
  const std::string& name() const;
  const Term& body() const;
  const Term& fun() const;
  const Term& arg() const;

  /// Number of constructors (variables, abstractions and applications).
  std::size_t size() const;

  /// Structural equality, binder names included.
  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

enum class Calculus : std::uint8_t { L, A, I, K };

std::string_view calculus_name(Calculus c);
/// Accepts "L", "A", "I", "K" (case-insensitive).
Calculus parse_calculus(std::string_view text);
/// The calculus lattice: L below A and I, both below K.
bool calculus_leq(Calculus lower, Calculus upper);

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t offset, const std::string& what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Grammar:
///   term := lam | app
///   lam  := ("λ" | "\") ident+ "." term
///   app  := atom+            (left associative)
///   atom := ident | "(" term ")"
/// Abstraction bodies extend as far right as possible. Multi-binder sugar
/// desugars to nested abstractions.
Term parse_term(std::string_view text);

/// Prints with minimal parentheses and one "λ" per binder.
std::string print_term(const Term& t);

std::set<std::string> free_vars(const Term& t);

/// Equality up to consistent renaming of bound variables.
bool alpha_eq(const Term& a, const Term& b);

/// Least calculus containing t, judged on bound-variable occurrence counts.
Calculus classify(const Term& t);

/// Capture-avoiding substitution t[name := value].
Term substitute(const Term& t, const std::string& name, const Term& value);

struct NormalForm {
  Term result;
  std::uint64_t beta_steps;
};

struct FuelExhausted {
  Term partial;
  std::uint64_t beta_steps;
};

using OracleResult = std::variant<NormalForm, FuelExhausted>;

/// Leftmost-outermost β-reduction for at most `fuel` steps.
OracleResult oracle_normalize(const Term& t, std::uint64_t fuel);

/// Performs one leftmost-outermost β-step, if any redex exists.
bool oracle_step(const Term& t, Term& out);

}  // namespace deltanet
