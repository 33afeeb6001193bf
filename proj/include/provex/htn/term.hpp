#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace provex::htn {

// A constant or a variable; variables are written with a leading '?'.
struct Term {
  std::string text;

  bool is_variable() const { return !text.empty() && text.front() == '?'; }
  auto operator<=>(const Term&) const = default;
};

struct Literal {
  std::string predicate;
  std::vector<Term> args;
  bool negated = false;

  bool is_ground() const;
  Literal positive() const;
  void collect_variables(std::set<std::string>& out) const;
  // "pred(a,b)"; negated literals render as "not(pred(a,b))".
  std::string to_string() const;

  auto operator<=>(const Literal&) const = default;
};

// Accepts "pred(a,?x)", "pred", "not(pred(a))", "not pred(a)" and "!pred(a)".
// Throws Error(Parse).
Literal parse_literal(std::string_view text);

// Variable -> term. Chains of variable-to-variable bindings are followed by
// resolve().
class Substitution {
 public:
  Term resolve(const Term& term) const;
  Literal apply(const Literal& literal) const;
  void bind(const std::string& variable, Term value) { map_[variable] = std::move(value); }
  bool contains(const std::string& variable) const { return map_.contains(variable); }
  // Ground values for the given variables; unbound ones are omitted.
  std::map<std::string, std::string> restrict_to(const std::set<std::string>& variables) const;

 private:
  std::map<std::string, Term> map_;
};

// Extends `subst` so that a and b become equal. Polarity is ignored.
bool unify(const Literal& a, const Literal& b, Substitution& subst);

}  // namespace provex::htn
