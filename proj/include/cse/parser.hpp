#pragma once

#include <stdexcept>
#include <string>

#include "cse/program.hpp"

namespace cse {

enum class ParseErrorKind : uint8_t { Syntax, Name, Type };

struct ParseError : std::runtime_error {
  ParseError(ParseErrorKind k, int line, int col, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        kind(k),
        line(line),
        col(col) {}
  ParseErrorKind kind;
  int line;
  int col;
};

// Parses the textual surface form into a Program. Throws ParseError with
// line/column on malformed syntax, duplicate/unknown names or ill-typed
// actions. Structural Def-style constraints (guard pairs, entry/exit degree
// rules) are the validator's job.
Program parse_program(const std::string& text);

}  // namespace cse
