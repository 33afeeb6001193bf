#include "provex/htn/term.hpp"

#include <algorithm>
#include <cctype>

#include "provex/error.hpp"

namespace provex::htn {

namespace {

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  return text;
}

bool valid_symbol(std::string_view symbol) {
  if (symbol.empty()) return false;
  return std::all_of(symbol.begin(), symbol.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '?' ||
           c == '.' || c == ':' || c == '#';
  });
}

[[noreturn]] void fail(std::string_view text, std::string_view why) {
  throw Error(ErrorCode::Parse, "bad literal \"" + std::string(text) + "\": " + std::string(why));
}

}  // namespace

bool Literal::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

Literal Literal::positive() const {
  Literal copy = *this;
  copy.negated = false;
  return copy;
}

void Literal::collect_variables(std::set<std::string>& out) const {
  for (const auto& arg : args)
    if (arg.is_variable()) out.insert(arg.text);
}

std::string Literal::to_string() const {
  std::string out = predicate;
  if (!args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ',';
      out += args[i].text;
    }
    out += ')';
  }
  return negated ? "not(" + out + ")" : out;
}

Literal parse_literal(std::string_view original) {
  std::string_view text = trim(original);
  bool negated = false;
  if (text.starts_with('!')) {
    negated = true;
    text = trim(text.substr(1));
  } else if (text.starts_with("not(") && text.ends_with(')')) {
    negated = true;
    text = trim(text.substr(4, text.size() - 5));
  } else if (text.starts_with("not ")) {
    negated = true;
    text = trim(text.substr(4));
  }

  Literal literal;
  literal.negated = negated;
  auto open = text.find('(');
  if (open == std::string_view::npos) {
    literal.predicate = std::string(text);
  } else {
    if (!text.ends_with(')')) fail(original, "missing closing parenthesis");
    literal.predicate = std::string(trim(text.substr(0, open)));
    std::string_view inner = text.substr(open + 1, text.size() - open - 2);
    if (inner.find_first_of("()") != std::string_view::npos) fail(original, "nested terms are not supported");
    if (!trim(inner).empty()) {
      std::size_t start = 0;
      while (true) {
        auto comma = inner.find(',', start);
        auto piece = trim(inner.substr(start, comma == std::string_view::npos ? comma : comma - start));
        if (!valid_symbol(piece)) fail(original, "bad argument");
        literal.args.push_back(Term{std::string(piece)});
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
    }
  }
  if (!valid_symbol(literal.predicate) || literal.predicate.front() == '?')
    fail(original, "bad predicate name");
  return literal;
}

Term Substitution::resolve(const Term& term) const {
  Term current = term;
  // Bindings are acyclic by construction (unify never binds a variable to itself).
  while (current.is_variable()) {
    auto it = map_.find(current.text);
    if (it == map_.end()) break;
    current = it->second;
  }
  return current;
}

Literal Substitution::apply(const Literal& literal) const {
  Literal out = literal;
  for (auto& arg : out.args) arg = resolve(arg);
  return out;
}

std::map<std::string, std::string> Substitution::restrict_to(const std::set<std::string>& variables) const {
  std::map<std::string, std::string> out;
  for (const auto& variable : variables) {
    Term value = resolve(Term{variable});
    if (!value.is_variable()) out.emplace(variable, value.text);
  }
  return out;
}

bool unify(const Literal& a, const Literal& b, Substitution& subst) {
  if (a.predicate != b.predicate || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    Term left = subst.resolve(a.args[i]);
    Term right = subst.resolve(b.args[i]);
    if (left == right) continue;
    if (left.is_variable())
      subst.bind(left.text, right);
    else if (right.is_variable())
      subst.bind(right.text, left);
    else
      return false;
  }
  return true;
}

}  // namespace provex::htn
