#include "spinindex/form_dsl.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spinindex {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::size_t scan_digits(std::string_view s, std::size_t pos) {
  while (pos < s.size() && is_digit(s[pos])) ++pos;
  return pos;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, int dim) {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    auto single = [&](TokenKind k) {
      out.push_back({k, {start, start + 1}});
      ++pos;
    };
    switch (c) {
      case '+': single(TokenKind::plus); continue;
      case '-': single(TokenKind::minus); continue;
      case '*': single(TokenKind::star); continue;
      case '^': single(TokenKind::caret); continue;
      case '(': single(TokenKind::lparen); continue;
      case ')': single(TokenKind::rparen); continue;
      case 'i': single(TokenKind::imag_unit); continue;
      default: break;
    }
    if (is_digit(c) || (c == '.' && pos + 1 < text.size() && is_digit(text[pos + 1]))) {
      pos = scan_digits(text, pos);
      if (pos < text.size() && text[pos] == '.') pos = scan_digits(text, pos + 1);
      if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        std::size_t exp = pos + 1;
        if (exp < text.size() && (text[exp] == '+' || text[exp] == '-')) ++exp;
        if (exp < text.size() && is_digit(text[exp])) pos = scan_digits(text, exp);
      }
      const std::string literal(text.substr(start, pos - start));
      errno = 0;
      const double v = std::strtod(literal.c_str(), nullptr);
      if (errno == ERANGE || !std::isfinite(v)) {
        throw ParseError("number '" + literal + "' out of range", {start, pos});
      }
      out.push_back({TokenKind::number, {start, pos}, v});
      continue;
    }
    if (c == 'e') {
      pos = scan_digits(text, pos + 1);
      if (pos == start + 1) throw ParseError("generator 'e' needs an index", {start, pos});
      const std::string_view digits = text.substr(start + 1, pos - start - 1);
      long k = 0;
      for (char d : digits) {
        k = k * 10 + (d - '0');
        if (k > max_dim) break;
      }
      if (k < 1 || k > dim) {
        throw ParseError("generator e" + std::string(digits) + " outside e1..e" +
                             std::to_string(dim),
                         {start, pos});
      }
      out.push_back({TokenKind::generator, {start, pos}, 0.0, int(k)});
      continue;
    }
    // Report whole UTF-8 sequences.
    std::size_t len = 1;
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0xF0) len = 4;
    else if (u >= 0xE0) len = 3;
    else if (u >= 0xC0) len = 2;
    len = std::min(len, text.size() - pos);
    throw ParseError("unexpected character '" + std::string(text.substr(pos, len)) + "'",
                     {pos, pos + len});
  }
  out.push_back({TokenKind::end, {text.size(), text.size()}});
  return out;
}

ExprPtr Expr::scalar(Complex c) {
  return std::make_shared<const Expr>(Expr{Kind::scalar, c, 0, nullptr, nullptr});
}

ExprPtr Expr::gen(int k) {
  return std::make_shared<const Expr>(Expr{Kind::gen, {}, k, nullptr, nullptr});
}

ExprPtr Expr::binary(Kind k, ExprPtr l, ExprPtr r) {
  if (!l || !r) throw std::invalid_argument("binary node needs two children");
  return std::make_shared<const Expr>(Expr{k, {}, 0, std::move(l), std::move(r)});
}

ExprPtr Expr::neg(ExprPtr e) {
  if (!e) throw std::invalid_argument("negation needs a child");
  return std::make_shared<const Expr>(Expr{Kind::neg, {}, 0, std::move(e), nullptr});
}

namespace {

const char* describe(TokenKind k) {
  switch (k) {
    case TokenKind::number: return "number";
    case TokenKind::imag_unit: return "'i'";
    case TokenKind::generator: return "generator";
    case TokenKind::plus: return "'+'";
    case TokenKind::minus: return "'-'";
    case TokenKind::star: return "'*'";
    case TokenKind::caret: return "'^'";
    case TokenKind::lparen: return "'('";
    case TokenKind::rparen: return "')'";
    default: return "end of input";
  }
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& t) : toks_(t) {
    if (toks_.empty() || toks_.back().kind != TokenKind::end) {
      throw std::invalid_argument("token list must end with an end token");
    }
  }

  ExprPtr run() {
    ExprPtr e = expr();
    if (peek().kind != TokenKind::end) {
      if (peek().kind == TokenKind::rparen) throw ParseError("unbalanced ')'", peek().span);
      throw ParseError(std::string("unexpected ") + describe(peek().kind), peek().span);
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  struct DepthGuard {
    DepthGuard(int& d, const Token& at) : d_(d) {
      if (++d_ > max_nesting) throw ParseError("expression nested too deeply", at.span);
    }
    ~DepthGuard() { --d_; }
    int& d_;
  };

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (peek().kind == TokenKind::plus || peek().kind == TokenKind::minus) {
      const auto k = take().kind == TokenKind::plus ? Expr::Kind::add : Expr::Kind::sub;
      lhs = Expr::binary(k, lhs, term());
    }
    return lhs;
  }

  ExprPtr term() {
    DepthGuard guard(depth_, peek());
    if (peek().kind == TokenKind::minus) {
      take();
      return Expr::neg(term());
    }
    return product();
  }

  ExprPtr product() {
    ExprPtr lhs = wedge();
    while (peek().kind == TokenKind::star) {
      take();
      lhs = Expr::binary(Expr::Kind::mul, lhs, wedge());
    }
    return lhs;
  }

  ExprPtr wedge() {
    ExprPtr lhs = atom();
    while (peek().kind == TokenKind::caret) {
      take();
      lhs = Expr::binary(Expr::Kind::wedge, lhs, atom());
    }
    return lhs;
  }

  ExprPtr atom() {
    const Token& t = take();
    switch (t.kind) {
      case TokenKind::number: return Expr::scalar(t.number);
      case TokenKind::imag_unit: return Expr::scalar(Complex(0.0, 1.0));
      case TokenKind::generator: return Expr::gen(t.index);
      case TokenKind::lparen: {
        DepthGuard guard(depth_, t);
        ExprPtr e = expr();
        if (peek().kind != TokenKind::rparen) {
          throw ParseError(std::string("expected ')' to close '(' at byte ") +
                               std::to_string(t.span.begin) + ", found " + describe(peek().kind),
                           peek().span);
        }
        take();
        return e;
      }
      case TokenKind::end: throw ParseError("unexpected end of input", t.span);
      default: throw ParseError(std::string("unexpected ") + describe(t.kind), t.span);
    }
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

ExprPtr parse(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

ExprPtr parse(std::string_view text, int dim) { return parse(tokenize(text, dim)); }

MultiVector eval(const Expr& e, const AlgebraContext& ctx) {
  switch (e.kind) {
    case Expr::Kind::scalar: return MultiVector::scalar(ctx, e.value);
    case Expr::Kind::gen: return MultiVector::generator(ctx, e.index);
    case Expr::Kind::add: return eval(*e.lhs, ctx) + eval(*e.rhs, ctx);
    case Expr::Kind::sub: return eval(*e.lhs, ctx) - eval(*e.rhs, ctx);
    case Expr::Kind::mul:
    case Expr::Kind::wedge: return wedge(eval(*e.lhs, ctx), eval(*e.rhs, ctx));
    case Expr::Kind::neg: return -eval(*e.lhs, ctx);
  }
  throw std::logic_error("unknown expression node");
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::neg: return 2;
    case Expr::Kind::mul: return 3;
    case Expr::Kind::wedge: return 4;
    default: return 5;
  }
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scalar_text(Complex c) {
  if (c == Complex(0.0, 1.0)) return "i";
  if (c.imag() == 0.0 && !std::signbit(c.real())) return number(c.real());
  std::string s = "(" + number(c.real());
  s += std::signbit(c.imag()) ? " - " : " + ";
  return s + number(std::abs(c.imag())) + "*i)";
}

void render(const Expr& e, std::string& out);

void render_operand(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  render(e, out);
  if (parens) out += ')';
}

void render(const Expr& e, std::string& out) {
  const int p = precedence(e);
  switch (e.kind) {
    case Expr::Kind::scalar: {
      const std::string s = scalar_text(e.value);
      out += s;
      return;
    }
    case Expr::Kind::gen: out += "e" + std::to_string(e.index); return;
    case Expr::Kind::neg:
      out += '-';
      render_operand(*e.lhs, precedence(*e.lhs) < p, out);
      return;
    default: break;
  }
  const char* op = e.kind == Expr::Kind::add   ? " + "
                   : e.kind == Expr::Kind::sub ? " - "
                   : e.kind == Expr::Kind::mul ? "*"
                                               : "^";
  // A right operand of equal precedence needs parens (left associativity);
  // a negation is a valid right operand of + and -.
  const bool additive = p == 1;
  render_operand(*e.lhs, precedence(*e.lhs) < p && !(additive && e.lhs->kind == Expr::Kind::neg),
                 out);
  out += op;
  const int rp = precedence(*e.rhs);
  render_operand(*e.rhs, additive ? rp <= p : rp <= p || e.rhs->kind == Expr::Kind::neg, out);
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  render(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::scalar: return a.value == b.value;
    case Expr::Kind::gen: return a.index == b.index;
    case Expr::Kind::neg: return structurally_equal(*a.lhs, *b.lhs);
    default: return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

std::string format_multivector(const MultiVector& m) {
  if (m.is_zero()) return "0";
  std::vector<std::pair<Mask, Complex>> terms(m.terms().begin(), m.terms().end());
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return std::popcount(a.first) < std::popcount(b.first);
  });
  std::string out;
  for (const auto& [mask, c] : terms) {
    if (!out.empty()) out += " + ";
    out += "(" + number(c.real()) + (std::signbit(c.imag()) ? " - " : " + ") +
           number(std::abs(c.imag())) + "*i)";
    const char* sep = "*";
    for (int mu = 0; mu < max_dim; ++mu) {
      if (mask & (Mask{1} << mu)) {
        out += sep + ("e" + std::to_string(mu + 1));
        sep = "^";
      }
    }
  }
  return out;
}

namespace {

using json = nlohmann::json;

std::vector<std::vector<std::string>> read_matrix(const json& j, const char* key) {
  if (!j.is_array()) throw CurvatureFileError(std::string("'") + key + "' must be an array");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) {
      throw CurvatureFileError(std::string(key) + "[" + std::to_string(i) + "] must be an array");
    }
    std::vector<std::string> row;
    for (std::size_t k = 0; k < j[i].size(); ++k) {
      const json& e = j[i][k];
      if (e.is_string()) {
        row.push_back(e.get<std::string>());
      } else if (e.is_number()) {
        row.push_back(number(e.get<double>()));
      } else {
        throw CurvatureFileError(std::string(key) + "[" + std::to_string(i) + "][" +
                                 std::to_string(k) + "] must be a string or number");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MultiVector> evaluate_matrix(const std::vector<std::vector<std::string>>& rows,
                                         std::size_t expected, const AlgebraContext& ctx,
                                         const char* key) {
  if (rows.size() != expected) {
    throw CurvatureFileError(std::string("'") + key + "' needs " + std::to_string(expected) +
                             " rows, got " + std::to_string(rows.size()));
  }
  std::vector<MultiVector> entries;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != expected) {
      throw CurvatureFileError(std::string(key) + " row " + std::to_string(i) + " has " +
                               std::to_string(rows[i].size()) + " entries, expected " +
                               std::to_string(expected));
    }
    for (std::size_t k = 0; k < expected; ++k) {
      try {
        entries.push_back(eval(*parse(rows[i][k], ctx.dim()), ctx));
      } catch (const ParseError& err) {
        throw CurvatureFileError(std::string(key) + "[" + std::to_string(i) + "][" +
                                 std::to_string(k) + "]: " + err.what());
      }
    }
  }
  return entries;
}

}  // namespace

CurvatureFile parse_curvature_file(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw CurvatureFileError(std::string("invalid JSON: ") + err.what());
  }
  if (!j.is_object()) throw CurvatureFileError("curvature file must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "name" && key != "n" && key != "normalization" && key != "riemann" &&
        key != "twist") {
      throw CurvatureFileError("unknown key '" + key + "'");
    }
  }
  CurvatureFile file;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw CurvatureFileError("'name' must be a string");
    file.name = j["name"].get<std::string>();
  }
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw CurvatureFileError("'n' (half-dimension) must be an integer");
  }
  file.n = j["n"].get<int>();
  if (j.contains("normalization")) {
    if (!j["normalization"].is_number()) {
      throw CurvatureFileError("'normalization' must be a number");
    }
    file.normalization = j["normalization"].get<double>();
  }
  if (j.contains("riemann")) file.riemann = read_matrix(j["riemann"], "riemann");
  if (j.contains("twist")) file.twist = read_matrix(j["twist"], "twist");
  return file;
}

CurvatureFile read_curvature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CurvatureFileError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_curvature_file(buf.str());
}

Curvature load_curvature(const CurvatureFile& file) {
  if (file.n < 1 || file.n > max_dim / 2) {
    throw CurvatureFileError("'n' must be in [1, " + std::to_string(max_dim / 2) + "]");
  }
  Curvature out{AlgebraContext::from_half_dim(file.n), std::nullopt, std::nullopt};
  const AlgebraContext& ctx = out.context;
  try {
    if (file.riemann) {
      out.riemann = FormMatrix::riemann(
          ctx, evaluate_matrix(*file.riemann, std::size_t(ctx.dim()), ctx, "riemann"));
    }
  } catch (const FormMatrixError& err) {
    throw CurvatureFileError(std::string("riemann: ") + err.what());
  }
  try {
    if (file.twist) {
      const std::size_t k = file.twist->size();
      if (k == 0) throw CurvatureFileError("'twist' must be non-empty");
      out.twist = FormMatrix::twist(ctx, k, evaluate_matrix(*file.twist, k, ctx, "twist"));
    }
  } catch (const FormMatrixError& err) {
    throw CurvatureFileError(std::string("twist: ") + err.what());
  }
  return out;
}

}  // namespace spinindex
