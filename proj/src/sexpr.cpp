#include "cse/sexpr.hpp"

#include <cctype>

namespace cse {
namespace {

void skip_ws(const std::string& s, size_t& i) {
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    } else if (s[i] == ';') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else {
      break;
    }
  }
}

SExpr parse_one(const std::string& s, size_t& i) {
  skip_ws(s, i);
  if (i >= s.size()) throw SExprError("unexpected end of input");
  if (s[i] == '(') {
    ++i;
    SExpr e;
    e.is_atom = false;
    for (;;) {
      skip_ws(s, i);
      if (i >= s.size()) throw SExprError("unterminated list");
      if (s[i] == ')') {
        ++i;
        return e;
      }
      e.list.push_back(parse_one(s, i));
    }
  }
  if (s[i] == ')') throw SExprError("unexpected ')'");
  SExpr e;
  if (s[i] == '"' || s[i] == '|') {
    char quote = s[i];
    size_t j = i + 1;
    while (j < s.size() && s[j] != quote) ++j;
    if (j >= s.size()) throw SExprError("unterminated quoted atom");
    e.atom = s.substr(i, j - i + 1);
    i = j + 1;
    return e;
  }
  size_t j = i;
  while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' &&
         s[j] != ')')
    ++j;
  e.atom = s.substr(i, j - i);
  i = j;
  return e;
}

}  // namespace

std::vector<SExpr> parse_sexprs(const std::string& text) {
  std::vector<SExpr> out;
  size_t i = 0;
  for (;;) {
    skip_ws(text, i);
    if (i >= text.size()) break;
    out.push_back(parse_one(text, i));
  }
  return out;
}

std::string sexpr_to_string(const SExpr& e) {
  if (e.is_atom) return e.atom;
  std::string out = "(";
  for (size_t i = 0; i < e.list.size(); ++i) {
    if (i) out += " ";
    out += sexpr_to_string(e.list[i]);
  }
  out += ")";
  return out;
}

}  // namespace cse
