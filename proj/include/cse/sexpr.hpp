#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cse {

// Minimal s-expression reader, enough for solver responses and for checking
// emitted SMT-LIB scripts in tests.
struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> list;

  const SExpr& operator[](size_t i) const { return list.at(i); }
  size_t size() const { return list.size(); }
};

struct SExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<SExpr> parse_sexprs(const std::string& text);
std::string sexpr_to_string(const SExpr& e);

}  // namespace cse
