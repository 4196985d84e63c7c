// Copyright 2026 The coalition-attrib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Expression DSL for black-box models over named features.
//
// Grammar (whitespace-insensitive, lowest precedence first):
//
//   model      := comparison
//   comparison := additive [ ( ">" | ">=" | "<" | "<=" | "==" ) additive ]
//   additive   := term { ( "+" | "-" ) term }
//   term       := unary { ( "*" | "/" ) unary }
//   unary      := "-" unary | power
//   power      := primary [ "^" [ "-" ] integer ]
//   primary    := number | feature | "(" comparison ")"
//               | "indicator" "(" comparison ")"
//               | ( "min" | "max" ) "(" additive "," additive ")"
//
// A comparison is boolean and may only appear as the argument of
// indicator(...); every other position is numeric.

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/schema.hpp"

namespace coalition_attrib {

enum class BinaryOp { kAdd, kSub, kMul, kDiv };
enum class CompareOp { kGt, kGe, kLt, kLe, kEq };
enum class ExtremumOp { kMin, kMax };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Constant {
  double value = 0.0;
};
struct FeatureRef {
  std::string name;
  std::size_t index = 0;
};
struct Negate {
  NodePtr operand;
};
struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Compare {
  CompareOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Indicator {
  NodePtr condition;
};
struct Extremum {
  ExtremumOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Power {
  NodePtr base;
  int exponent = 1;
};

struct Node {
  std::variant<Constant, FeatureRef, Negate, Binary, Compare, Indicator,
               Extremum, Power>
      kind;
};

namespace detail {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <class T>
NodePtr make_node(T value) {
  return std::make_shared<const Node>(Node{std::move(value)});
}

}  // namespace detail

// Node constructors for building models programmatically.
inline NodePtr constant(double v) { return detail::make_node(Constant{v}); }
inline NodePtr feature(const FeatureSchema& schema, std::string_view name) {
  return detail::make_node(FeatureRef{std::string(name), schema.index_of(name)});
}
inline NodePtr negate(NodePtr a) { return detail::make_node(Negate{std::move(a)}); }
inline NodePtr binary(BinaryOp op, NodePtr a, NodePtr b) {
  return detail::make_node(Binary{op, std::move(a), std::move(b)});
}
inline NodePtr compare(CompareOp op, NodePtr a, NodePtr b) {
  return detail::make_node(Compare{op, std::move(a), std::move(b)});
}
inline NodePtr indicator(NodePtr cond) {
  return detail::make_node(Indicator{std::move(cond)});
}
inline NodePtr extremum(ExtremumOp op, NodePtr a, NodePtr b) {
  return detail::make_node(Extremum{op, std::move(a), std::move(b)});
}
inline NodePtr power(NodePtr base, int exponent) {
  return detail::make_node(Power{std::move(base), exponent});
}

// Immutable model AST bound to the schema it was parsed against.
class ModelExpr {
 public:
  ModelExpr(NodePtr root, std::size_t feature_count)
      : root_(std::move(root)), feature_count_(feature_count) {}

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  std::size_t feature_count() const { return feature_count_; }

 private:
  NodePtr root_;
  std::size_t feature_count_;
};

inline bool is_boolean(const Node& n) {
  return std::holds_alternative<Compare>(n.kind);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline double int_power(double base, int exponent) {
  if (exponent < 0) {
    if (base == 0.0) throw DivisionByZero();
    return 1.0 / int_power(base, -exponent);
  }
  double result = 1.0;
  double b = base;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0) {
    if (e & 1u) result *= b;
    e >>= 1u;
    if (e != 0) b *= b;
  }
  return result;
}

inline bool compare_values(CompareOp op, double a, double b) {
  switch (op) {
    case CompareOp::kGt: return a > b;
    case CompareOp::kGe: return a >= b;
    case CompareOp::kLt: return a < b;
    case CompareOp::kLe: return a <= b;
    case CompareOp::kEq: return a == b;
  }
  return false;
}

inline double eval_node(const Node& n, std::span<const double> x) {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.value; },
          [&](const FeatureRef& f) { return x[f.index]; },
          [&](const Negate& u) { return -eval_node(*u.operand, x); },
          [&](const Binary& b) {
            const double l = eval_node(*b.lhs, x);
            const double r = eval_node(*b.rhs, x);
            switch (b.op) {
              case BinaryOp::kAdd: return l + r;
              case BinaryOp::kSub: return l - r;
              case BinaryOp::kMul: return l * r;
              case BinaryOp::kDiv:
                if (r == 0.0) throw DivisionByZero();
                return l / r;
            }
            return 0.0;
          },
          [&](const Compare& c) {
            return compare_values(c.op, eval_node(*c.lhs, x),
                                  eval_node(*c.rhs, x))
                       ? 1.0
                       : 0.0;
          },
          [&](const Indicator& i) {
            return eval_node(*i.condition, x) != 0.0 ? 1.0 : 0.0;
          },
          [&](const Extremum& e) {
            const double l = eval_node(*e.lhs, x);
            const double r = eval_node(*e.rhs, x);
            return e.op == ExtremumOp::kMin ? (r < l ? r : l)
                                            : (r > l ? r : l);
          },
          [&](const Power& p) {
            return int_power(eval_node(*p.base, x), p.exponent);
          },
      },
      n.kind);
}

}  // namespace detail

// Unchecked hot-path evaluation; `x` must hold one value per schema feature.
inline double eval_model(const ModelExpr& expr, std::span<const double> x) {
  return detail::eval_node(expr.root(), x);
}

inline double eval_model(const ModelExpr& expr, const FeatureSchema& schema,
                         const Instance& x) {
  check_instance(schema, x);
  return eval_model(expr, x.view());
}

// ---------------------------------------------------------------------------
// Structure queries

namespace detail {

template <class Fn>
void for_each_child(const Node& n, Fn&& fn) {
  std::visit(Overloaded{
                 [](const Constant&) {},
                 [](const FeatureRef&) {},
                 [&](const Negate& u) { fn(*u.operand); },
                 [&](const Binary& b) { fn(*b.lhs); fn(*b.rhs); },
                 [&](const Compare& c) { fn(*c.lhs); fn(*c.rhs); },
                 [&](const Indicator& i) { fn(*i.condition); },
                 [&](const Extremum& e) { fn(*e.lhs); fn(*e.rhs); },
                 [&](const Power& p) { fn(*p.base); },
             },
             n.kind);
}

inline void collect_indices(const Node& n, std::vector<bool>& out) {
  if (const auto* f = std::get_if<FeatureRef>(&n.kind)) out[f->index] = true;
  for_each_child(n, [&](const Node& c) { collect_indices(c, out); });
}

}  // namespace detail

inline std::set<std::string> referenced_features(const ModelExpr& expr) {
  std::set<std::string> out;
  std::function<void(const Node&)> walk = [&](const Node& n) {
    if (const auto* f = std::get_if<FeatureRef>(&n.kind)) out.insert(f->name);
    detail::for_each_child(n, walk);
  };
  walk(expr.root());
  return out;
}

// Mask over feature indices: true where the feature appears in the model.
inline std::vector<bool> referenced_mask(const ModelExpr& expr) {
  std::vector<bool> out(expr.feature_count(), false);
  detail::collect_indices(expr.root(), out);
  return out;
}

inline bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind.index() != b.kind.index()) return false;
  return std::visit(
      detail::Overloaded{
          [&](const Constant& c) {
            return std::get<Constant>(b.kind).value == c.value;
          },
          [&](const FeatureRef& f) {
            const auto& g = std::get<FeatureRef>(b.kind);
            return f.index == g.index && f.name == g.name;
          },
          [&](const Negate& u) {
            return structurally_equal(*u.operand,
                                      *std::get<Negate>(b.kind).operand);
          },
          [&](const Binary& x) {
            const auto& y = std::get<Binary>(b.kind);
            return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
          },
          [&](const Compare& x) {
            const auto& y = std::get<Compare>(b.kind);
            return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
          },
          [&](const Indicator& i) {
            return structurally_equal(*i.condition,
                                      *std::get<Indicator>(b.kind).condition);
          },
          [&](const Extremum& x) {
            const auto& y = std::get<Extremum>(b.kind);
            return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
          },
          [&](const Power& p) {
            const auto& q = std::get<Power>(b.kind);
            return p.exponent == q.exponent &&
                   structurally_equal(*p.base, *q.base);
          },
      },
      a.kind);
}

// ---------------------------------------------------------------------------
// Printing. Emits the minimal parenthesization that re-parses to the same
// tree. Parsed trees never hold negative constants (unary minus is a Negate
// node), so printing is exact on anything the parser produces.

namespace detail {

enum Precedence : int {
  kPrecCompare = 1,
  kPrecAdditive = 2,
  kPrecTerm = 3,
  kPrecUnary = 4,
  kPrecPower = 5,
  kPrecPrimary = 6,
};

inline int precedence(const Node& n) {
  return std::visit(
      Overloaded{
          [](const Constant& c) {
            return std::signbit(c.value) ? int{kPrecUnary} : int{kPrecPrimary};
          },
          [](const FeatureRef&) { return int{kPrecPrimary}; },
          [](const Negate&) { return int{kPrecUnary}; },
          [](const Binary& b) {
            return b.op == BinaryOp::kAdd || b.op == BinaryOp::kSub
                       ? int{kPrecAdditive}
                       : int{kPrecTerm};
          },
          [](const Compare&) { return int{kPrecCompare}; },
          [](const Indicator&) { return int{kPrecPrimary}; },
          [](const Extremum&) { return int{kPrecPrimary}; },
          [](const Power&) { return int{kPrecPower}; },
      },
      n.kind);
}

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline const char* op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return " + ";
    case BinaryOp::kSub: return " - ";
    case BinaryOp::kMul: return " * ";
    case BinaryOp::kDiv: return " / ";
  }
  return "?";
}

inline const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::kGt: return " > ";
    case CompareOp::kGe: return " >= ";
    case CompareOp::kLt: return " < ";
    case CompareOp::kLe: return " <= ";
    case CompareOp::kEq: return " == ";
  }
  return "?";
}

inline void print_node(const Node& n, std::string& out);

inline void print_at(const Node& n, int min_prec, std::string& out) {
  if (precedence(n) < min_prec) {
    out += '(';
    print_node(n, out);
    out += ')';
  } else {
    print_node(n, out);
  }
}

inline void print_node(const Node& n, std::string& out) {
  std::visit(
      Overloaded{
          [&](const Constant& c) { out += format_number(c.value); },
          [&](const FeatureRef& f) { out += f.name; },
          [&](const Negate& u) {
            out += '-';
            print_at(*u.operand, kPrecUnary, out);
          },
          [&](const Binary& b) {
            const int p = precedence(n);
            print_at(*b.lhs, p, out);
            out += op_text(b.op);
            print_at(*b.rhs, p + 1, out);
          },
          [&](const Compare& c) {
            print_at(*c.lhs, kPrecAdditive, out);
            out += op_text(c.op);
            print_at(*c.rhs, kPrecAdditive, out);
          },
          [&](const Indicator& i) {
            out += "indicator(";
            print_node(*i.condition, out);
            out += ')';
          },
          [&](const Extremum& e) {
            out += e.op == ExtremumOp::kMin ? "min(" : "max(";
            print_node(*e.lhs, out);
            out += ", ";
            print_node(*e.rhs, out);
            out += ')';
          },
          [&](const Power& p) {
            print_at(*p.base, kPrecPrimary, out);
            out += '^';
            out += std::to_string(p.exponent);
          },
      },
      n.kind);
}

}  // namespace detail

inline std::string to_string(const Node& n) {
  std::string out;
  detail::print_node(n, out);
  return out;
}

inline std::string to_string(const ModelExpr& expr) {
  return to_string(expr.root());
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

enum class TokenType {
  kNumber,
  kIdent,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kCaret,
  kLParen,
  kRParen,
  kComma,
  kGt,
  kGe,
  kLt,
  kLe,
  kEqEq,
  kEnd,
};

struct Token {
  TokenType type;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
};

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      while (i < src.size() && (is_digit(src[i]) || src[i] == '.')) ++i;
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && is_digit(src[j])) {
          i = j;
          while (i < src.size() && is_digit(src[i])) ++i;
        }
      }
      double value = 0.0;
      auto res = std::from_chars(src.data() + start, src.data() + i, value);
      if (res.ec != std::errc() || res.ptr != src.data() + i) {
        throw SyntaxError(start, {"number"}, "malformed number literal");
      }
      out.push_back({TokenType::kNumber, start, src.substr(start, i - start), value});
      continue;
    }
    if (is_ident_start(c)) {
      while (i < src.size() && is_ident_char(src[i])) ++i;
      out.push_back({TokenType::kIdent, start, src.substr(start, i - start)});
      continue;
    }
    auto single = [&](TokenType t) {
      out.push_back({t, start, src.substr(start, 1)});
      ++i;
    };
    auto two = [&](TokenType t) {
      out.push_back({t, start, src.substr(start, 2)});
      i += 2;
    };
    const char next = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (c) {
      case '+': single(TokenType::kPlus); break;
      case '-': single(TokenType::kMinus); break;
      case '*': single(TokenType::kStar); break;
      case '/': single(TokenType::kSlash); break;
      case '^': single(TokenType::kCaret); break;
      case '(': single(TokenType::kLParen); break;
      case ')': single(TokenType::kRParen); break;
      case ',': single(TokenType::kComma); break;
      case '>': next == '=' ? two(TokenType::kGe) : single(TokenType::kGt); break;
      case '<': next == '=' ? two(TokenType::kLe) : single(TokenType::kLt); break;
      case '=':
        if (next == '=') {
          two(TokenType::kEqEq);
          break;
        }
        throw SyntaxError(start, {"'=='"}, "unexpected '='");
      default:
        throw SyntaxError(start, {}, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({TokenType::kEnd, src.size(), {}});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, const FeatureSchema& schema)
      : tokens_(tokenize(src)), schema_(schema) {}

  NodePtr parse() {
    NodePtr root = comparison();
    if (peek().type != TokenType::kEnd) {
      throw SyntaxError(peek().pos, {"operator", "end of input"},
                        "unexpected '" + std::string(peek().text) + "'");
    }
    require_numeric(*root, 0);
    return root;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  void expect(TokenType t, const char* what) {
    if (peek().type != t) {
      throw SyntaxError(peek().pos, {what}, describe(peek()));
    }
    ++pos_;
  }

  static std::string describe(const Token& t) {
    if (t.type == TokenType::kEnd) return "unexpected end of input";
    return "unexpected '" + std::string(t.text) + "'";
  }

  static void require_numeric(const Node& n, std::size_t pos) {
    if (is_boolean(n)) {
      throw SyntaxError(pos, {"numeric expression"},
                        "a comparison is only allowed inside indicator(...)");
    }
  }

  bool references_categorical(const Node& n) const {
    if (const auto* f = std::get_if<FeatureRef>(&n.kind)) {
      return schema_[f->index].kind == FeatureKind::kCategorical;
    }
    bool found = false;
    for_each_child(n, [&](const Node& c) { found = found || references_categorical(c); });
    return found;
  }

  NodePtr comparison() {
    const std::size_t lpos = peek().pos;
    NodePtr lhs = additive();
    std::optional<CompareOp> op;
    switch (peek().type) {
      case TokenType::kGt: op = CompareOp::kGt; break;
      case TokenType::kGe: op = CompareOp::kGe; break;
      case TokenType::kLt: op = CompareOp::kLt; break;
      case TokenType::kLe: op = CompareOp::kLe; break;
      case TokenType::kEqEq: op = CompareOp::kEq; break;
      default: return lhs;
    }
    take();
    lhs = numeric(std::move(lhs), lpos);
    const std::size_t rpos = peek().pos;
    NodePtr rhs = numeric(additive(), rpos);
    if (references_categorical(*lhs) || references_categorical(*rhs)) {
      throw SyntaxError(lpos, {"continuous or binary operand"},
                        "comparison on a categorical feature");
    }
    if (peek().type == TokenType::kGt || peek().type == TokenType::kGe ||
        peek().type == TokenType::kLt || peek().type == TokenType::kLe ||
        peek().type == TokenType::kEqEq) {
      throw SyntaxError(peek().pos, {"')'", "end of input"},
                        "comparisons do not chain");
    }
    return compare(*op, std::move(lhs), std::move(rhs));
  }

  NodePtr numeric(NodePtr n, std::size_t pos) {
    require_numeric(*n, pos);
    return n;
  }

  NodePtr additive() {
    std::size_t lpos = peek().pos;
    NodePtr lhs = term();
    while (peek().type == TokenType::kPlus || peek().type == TokenType::kMinus) {
      const BinaryOp op =
          take().type == TokenType::kPlus ? BinaryOp::kAdd : BinaryOp::kSub;
      lhs = numeric(std::move(lhs), lpos);
      const std::size_t rpos = peek().pos;
      lhs = binary(op, std::move(lhs), numeric(term(), rpos));
    }
    return lhs;
  }

  NodePtr term() {
    std::size_t lpos = peek().pos;
    NodePtr lhs = unary();
    while (peek().type == TokenType::kStar || peek().type == TokenType::kSlash) {
      const BinaryOp op =
          take().type == TokenType::kStar ? BinaryOp::kMul : BinaryOp::kDiv;
      lhs = numeric(std::move(lhs), lpos);
      const std::size_t rpos = peek().pos;
      lhs = binary(op, std::move(lhs), numeric(unary(), rpos));
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().type == TokenType::kMinus) {
      take();
      const std::size_t pos = peek().pos;
      return negate(numeric(unary(), pos));
    }
    return power_expr();
  }

  NodePtr power_expr() {
    const std::size_t bpos = peek().pos;
    NodePtr base = primary();
    if (peek().type != TokenType::kCaret) return base;
    base = numeric(std::move(base), bpos);
    take();
    bool negative = false;
    if (peek().type == TokenType::kMinus) {
      take();
      negative = true;
    }
    const Token& t = peek();
    if (t.type != TokenType::kNumber) {
      throw SyntaxError(t.pos, {"integer exponent"}, describe(t));
    }
    int exponent = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), exponent);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
      throw SyntaxError(t.pos, {"integer exponent"},
                        "exponent '" + std::string(t.text) + "' is not an integer");
    }
    take();
    return power(std::move(base), negative ? -exponent : exponent);
  }

  NodePtr primary() {
    const Token& t = peek();
    switch (t.type) {
      case TokenType::kNumber:
        take();
        return constant(t.number);
      case TokenType::kLParen: {
        take();
        NodePtr inner = comparison();
        expect(TokenType::kRParen, "')'");
        return inner;
      }
      case TokenType::kIdent: {
        const bool call = tokens_[pos_ + 1].type == TokenType::kLParen;
        if (call && t.text == "indicator") {
          take();
          take();
          const std::size_t arg_pos = peek().pos;
          NodePtr cond = comparison();
          if (!is_boolean(*cond)) {
            throw SyntaxError(arg_pos, {"comparison"},
                              "indicator(...) takes a comparison");
          }
          expect(TokenType::kRParen, "')'");
          return indicator(std::move(cond));
        }
        if (call && (t.text == "min" || t.text == "max")) {
          const ExtremumOp op = t.text == "min" ? ExtremumOp::kMin : ExtremumOp::kMax;
          take();
          take();
          const std::size_t apos = peek().pos;
          NodePtr a = numeric(additive(), apos);
          expect(TokenType::kComma, "','");
          const std::size_t bpos = peek().pos;
          NodePtr b = numeric(additive(), bpos);
          expect(TokenType::kRParen, "')'");
          return extremum(op, std::move(a), std::move(b));
        }
        take();
        auto idx = schema_.find(t.text);
        if (!idx) throw UnknownFeature(std::string(t.text));
        return detail::make_node(FeatureRef{std::string(t.text), *idx});
      }
      default:
        throw SyntaxError(t.pos,
                          {"number", "feature name", "'('", "'-'",
                           "indicator(", "min(", "max("},
                          describe(t));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const FeatureSchema& schema_;
};

}  // namespace detail

inline ModelExpr parse_model(std::string_view source, const FeatureSchema& schema) {
  bool blank = true;
  for (char c : source) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') blank = false;
  }
  if (blank) {
    throw SyntaxError(0, {"expression"}, "model source is empty");
  }
  detail::Parser parser(source, schema);
  return ModelExpr(parser.parse(), schema.size());
}

}  // namespace coalition_attrib
