#pragma once

// Expression language for frame-constant 2-form entries and the JSON
// curvature file built on it.
//
//   expr    := term (('+' | '-') term)*
//   term    := '-' term | product
//   product := wedge ('*' wedge)*
//   wedge   := atom ('^' atom)*
//   atom    := number | 'i' | 'e' digits | '(' expr ')'
//
// '^' is the wedge product and binds tightest. '*' also evaluates as a wedge
// (scalars and forms commute with it where it matters). Numbers are lexed by
// longest match, so "2e1" is the number 20; write "2*e1" for a multiple of e1.

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinindex/algebra.hpp"
#include "spinindex/char_classes.hpp"

namespace spinindex {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, Span span)
      : std::runtime_error(what + " at bytes " + std::to_string(span.begin) + ".." +
                           std::to_string(span.end)),
        span_(span) {}
  Span span() const { return span_; }

 private:
  Span span_;
};

enum class TokenKind { number, imag_unit, generator, plus, minus, star, caret, lparen, rparen, end };

struct Token {
  TokenKind kind;
  Span span;
  double number = 0.0;
  int index = 0;
};

/// Generators must satisfy 1 ≤ k ≤ dim.
std::vector<Token> tokenize(std::string_view text, int dim);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { scalar, gen, add, sub, mul, wedge, neg };
  Kind kind;
  Complex value{};
  int index = 0;
  ExprPtr lhs;
  ExprPtr rhs;

  static ExprPtr scalar(Complex c);
  static ExprPtr gen(int k);
  static ExprPtr binary(Kind k, ExprPtr l, ExprPtr r);
  static ExprPtr neg(ExprPtr e);
};

/// Nesting deeper than this is rejected rather than recursed into.
inline constexpr int max_nesting = 256;

ExprPtr parse(const std::vector<Token>& tokens);
ExprPtr parse(std::string_view text, int dim);

MultiVector eval(const Expr& e, const AlgebraContext& ctx);

/// Minimal-parenthesis rendering. For trees produced by parse (non-negative
/// real scalars and i as leaves), parse(to_string(t)) is structurally t.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Canonical expression: "(re + im*i)*e1^e2 + ...", terms by grade then mask,
/// coefficients with 17 significant digits. Parses back to the same element.
std::string format_multivector(const MultiVector& m);

class CurvatureFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON container:
///   {"name": str, "n": int, "normalization": num?, "riemann": [[entry]]?,
///    "twist": [[entry]]?}
/// where an entry is an expression string or a number.
struct CurvatureFile {
  std::string name;
  int n = 0;
  std::optional<double> normalization;
  std::optional<std::vector<std::vector<std::string>>> riemann;
  std::optional<std::vector<std::vector<std::string>>> twist;
};

CurvatureFile parse_curvature_file(std::string_view json_text);
CurvatureFile read_curvature_file(const std::string& path);

struct Curvature {
  AlgebraContext context;
  std::optional<FormMatrix> riemann;
  std::optional<FormMatrix> twist;
};

/// Evaluates and validates every entry; errors name the matrix and position.
Curvature load_curvature(const CurvatureFile& file);

}  // namespace spinindex
