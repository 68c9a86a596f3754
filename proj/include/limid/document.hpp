#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "limid/model.hpp"

namespace limid {

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

// Text format, one statement per keyword:
//
//   node <label> chance|decision <card> [states <label>...]
//   node <label> value
//   arc <from> -> <to>
//   decision_order <d1> <d2> ...
//   cpt <node> [| <parent>...] { <numbers> }
//   utility <node> [| <parent>...] { <numbers> }
//
// '#' starts a comment. Table values are row-major over the parent list as
// written (the node's own states run fastest in cpt blocks); parsing reorders
// them into the canonical layout. Parses and validates; throws ParseError or
// ValidationError.
Limid parse_document(std::string_view text);

// Parse without the final validation pass (used to report violations).
Limid parse_document_unchecked(std::string_view text);

// Canonical emission: nodes in id order, arcs sorted, tables over sorted
// parents. parse(emit(m)) reproduces m exactly.
std::string emit_document(const Limid& model);

// Strategy documents hold one block per decision:
//
//   policy <decision> [| <parent>...] { <numbers> }
//
// Parsing needs the model for node identities and shapes.
Strategy parse_strategy(std::string_view text, const Limid& model);
std::string emit_strategy(const Strategy& strategy, const Limid& model);

// Shortest decimal form that parses back to exactly the same double.
std::string format_number(double v);

}  // namespace limid
