#include "framelab/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace framelab::expr {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Node run() {
    skip();
    if (pos_ == s_.size()) throw ParseError("empty expression", pos_);
    Node n = expression();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return n;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      const std::string got = pos_ < s_.size() ? std::string("'") + s_[pos_] + "'" : "end of input";
      throw ParseError(std::string("expected '") + c + "', found " + got, pos_);
    }
  }

  static Node binary(Node::Kind k, Node a, Node b) {
    Node n;
    n.kind = k;
    n.args.push_back(std::move(a));
    n.args.push_back(std::move(b));
    return n;
  }

  Node expression() {
    Node lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Node::Kind::Add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = binary(Node::Kind::Sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  Node term() {
    Node lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Node::Kind::Mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = binary(Node::Kind::Div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  Node unary() {
    if (accept('-')) {
      Node n;
      n.kind = Node::Kind::Neg;
      n.args.push_back(unary());
      return n;
    }
    if (accept('+')) return unary();
    return primary();
  }

  double number() {
    skip();
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) throw ParseError("expected a number", pos_);
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  double signed_number() {
    skip();
    if (accept('-')) return -number();
    accept('+');
    return number();
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Node primary() {
    skip();
    if (pos_ == s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      Node n;
      n.number = number();
      return n;
    }
    if (accept('(')) {
      Node n = expression();
      expect(')');
      return n;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) throw ParseError(std::string("unexpected '") + c + "'", pos_);
    const std::size_t at = pos_;
    const std::string id = identifier();
    Node n;
    if (id == "t") {
      n.kind = Node::Kind::Var;
    } else if (id == "pi" || id == "e" || id == "i") {
      n.kind = Node::Kind::Constant;
      n.name = id;
    } else if (id == "sin" || id == "cos" || id == "exp" || id == "abs") {
      n.kind = Node::Kind::Call;
      n.name = id;
      expect('(');
      n.args.push_back(expression());
      expect(')');
    } else if (id == "piecewise") {
      n.kind = Node::Kind::Piecewise;
      expect('(');
      do {
        Piece p;
        expect('[');
        p.lo = signed_number();
        expect(',');
        p.hi = signed_number();
        expect(']');
        expect(':');
        if (!(p.lo <= p.hi)) throw ParseError("piece interval has lo > hi", at);
        p.body.push_back(expression());
        n.pieces.push_back(std::move(p));
      } while (accept(';'));
      expect(')');
    } else {
      throw ParseError("unknown identifier '" + id + "'", at);
    }
    return n;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

const char* op_symbol(Node::Kind k) {
  switch (k) {
    case Node::Kind::Add: return " + ";
    case Node::Kind::Sub: return " - ";
    case Node::Kind::Mul: return " * ";
    case Node::Kind::Div: return " / ";
    default: return "?";
  }
}

}  // namespace

Node parse(std::string_view src) { return Parser(src).run(); }

std::string print(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Number: {
      // Negative literals only arise from hand-built trees.
      const std::string s = format_number(n.number);
      return n.number < 0.0 ? "(" + s + ")" : s;
    }
    case Node::Kind::Constant: return n.name;
    case Node::Kind::Var: return "t";
    case Node::Kind::Neg: return "(-" + print(n.args[0]) + ")";
    case Node::Kind::Add:
    case Node::Kind::Sub:
    case Node::Kind::Mul:
    case Node::Kind::Div: return "(" + print(n.args[0]) + op_symbol(n.kind) + print(n.args[1]) + ")";
    case Node::Kind::Call: return n.name + "(" + print(n.args[0]) + ")";
    case Node::Kind::Piecewise: {
      std::string s = "piecewise(";
      for (std::size_t k = 0; k < n.pieces.size(); ++k) {
        const auto& p = n.pieces[k];
        if (k > 0) s += "; ";
        s += "[" + format_number(p.lo) + ", " + format_number(p.hi) + "]: " + print(p.body[0]);
      }
      return s + ")";
    }
  }
  return "";
}

cplx evaluate(const Node& n, double t) {
  switch (n.kind) {
    case Node::Kind::Number: return n.number;
    case Node::Kind::Constant:
      if (n.name == "pi") return std::numbers::pi;
      if (n.name == "e") return std::numbers::e;
      return cplx(0.0, 1.0);
    case Node::Kind::Var: return t;
    case Node::Kind::Neg: return -evaluate(n.args[0], t);
    case Node::Kind::Add: return evaluate(n.args[0], t) + evaluate(n.args[1], t);
    case Node::Kind::Sub: return evaluate(n.args[0], t) - evaluate(n.args[1], t);
    case Node::Kind::Mul: return evaluate(n.args[0], t) * evaluate(n.args[1], t);
    case Node::Kind::Div: {
      const cplx d = evaluate(n.args[1], t);
      if (std::abs(d) <= 1e-300) {
        throw NumericalError("expression: division by " + format_number(std::abs(d)) + " at t = " + format_number(t));
      }
      return evaluate(n.args[0], t) / d;
    }
    case Node::Kind::Call: {
      const cplx a = evaluate(n.args[0], t);
      if (n.name == "sin") return std::sin(a);
      if (n.name == "cos") return std::cos(a);
      if (n.name == "exp") return std::exp(a);
      return std::abs(a);
    }
    case Node::Kind::Piecewise:
      for (const auto& p : n.pieces) {
        if (t >= p.lo && t <= p.hi) return evaluate(p.body[0], t);
      }
      return 0.0;
  }
  return 0.0;
}

SampledFunction evaluate_on(const Node& n, const GridPtr& grid) {
  return sample(grid, [&](double t) { return evaluate(n, t); });
}

}  // namespace framelab::expr
