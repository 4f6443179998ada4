#pragma once

#include <stdexcept>
#include <string>

namespace szymrel {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised by the matrix text parsers; positions are 1-based.
struct ParseError : std::runtime_error {
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line(line),
        column(column) {}

  int line;
  int column;
};

// The queried class lies outside the range a catalog was built for.
struct CatalogNotCovered : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The catalog file is malformed or fails an integrity check.
struct CatalogCorrupt : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace szymrel
