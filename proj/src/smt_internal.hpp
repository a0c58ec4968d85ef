#pragma once

#include <string>

#include "cse/solver.hpp"

namespace cse::smt {

std::string sanitize(const std::string& name);
std::string symbol_name(const SymbolTable& st, int var, const std::string& prefix);
std::string param_name(int id, const std::string& prefix);
std::string render_formula(const ExprPtr& e, const SymbolTable& st,
                           const std::string& prefix);
std::string declarations(const SatQuery& q, const std::string& prefix);

}  // namespace cse::smt
