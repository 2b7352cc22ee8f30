#pragma once

// Small expression language for multipliers and generators in configs:
//
//   expr      := term (('+' | '-') term)*
//   term      := unary (('*' | '/') unary)*
//   unary     := ('-' | '+') unary | primary
//   primary   := number | 'pi' | 'e' | 'i' | 't'
//              | ('sin' | 'cos' | 'exp' | 'abs') '(' expr ')'
//              | 'piecewise' '(' piece (';' piece)* ')'
//              | '(' expr ')'
//   piece     := '[' signed ',' signed ']' ':' expr
//
// piecewise evaluates the first piece whose closed interval holds t and is 0
// elsewhere.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "framelab/domain.hpp"
#include "framelab/errors.hpp"

namespace framelab::expr {

struct Node;

struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<Node> body;  // exactly one element

  bool operator==(const Piece&) const = default;
};

struct Node {
  enum class Kind { Number, Constant, Var, Neg, Add, Sub, Mul, Div, Call, Piecewise };

  Kind kind = Kind::Number;
  double number = 0.0;
  /// Constant: pi, e, i. Call: sin, cos, exp, abs.
  std::string name;
  std::vector<Node> args;
  std::vector<Piece> pieces;

  bool operator==(const Node&) const = default;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : InputError("syntax error at byte " + std::to_string(offset) + ": " + msg), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

Node parse(std::string_view src);

/// Fully parenthesized source text; parse(print(n)) == n.
std::string print(const Node& n);

cplx evaluate(const Node& n, double t);

SampledFunction evaluate_on(const Node& n, const GridPtr& grid);

}  // namespace framelab::expr
