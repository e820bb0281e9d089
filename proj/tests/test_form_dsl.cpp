#include <doctest.h>

#include <random>

#include "spinindex/form_dsl.hpp"

using namespace spinindex;

namespace {

using K = Expr::Kind;

std::vector<TokenKind> kinds(const std::vector<Token>& t) {
  std::vector<TokenKind> out;
  for (const auto& x : t) out.push_back(x.kind);
  return out;
}

ExprPtr random_ast(std::mt19937_64& rng, int depth, int dim) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 8);
  switch (pick(rng)) {
    case 0: return Expr::scalar(double(std::uniform_int_distribution<int>(0, 40)(rng)) / 8.0);
    case 1: return Expr::gen(std::uniform_int_distribution<int>(1, dim)(rng));
    case 2: return Expr::scalar(Complex(0.0, 1.0));
    case 3: return Expr::neg(random_ast(rng, depth - 1, dim));
    case 4: return Expr::binary(K::add, random_ast(rng, depth - 1, dim), random_ast(rng, depth - 1, dim));
    case 5: return Expr::binary(K::sub, random_ast(rng, depth - 1, dim), random_ast(rng, depth - 1, dim));
    case 6: return Expr::binary(K::mul, random_ast(rng, depth - 1, dim), random_ast(rng, depth - 1, dim));
    default:
      return Expr::binary(K::wedge, random_ast(rng, depth - 1, dim), random_ast(rng, depth - 1, dim));
  }
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(kinds(tokenize("2*e1^e2", 4)) ==
        std::vector<TokenKind>{TokenKind::number, TokenKind::star, TokenKind::generator,
                               TokenKind::caret, TokenKind::generator, TokenKind::end});
  CHECK(kinds(tokenize("i*(e3^e4)", 4)) ==
        std::vector<TokenKind>{TokenKind::imag_unit, TokenKind::star, TokenKind::lparen,
                               TokenKind::generator, TokenKind::caret, TokenKind::generator,
                               TokenKind::rparen, TokenKind::end});
  try {
    tokenize("e1 + e99", 4);
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.span().begin == 5);
    CHECK(e.span().end == 8);
  }
  const auto num = tokenize("2e1 1.5e-3 .25", 4);
  CHECK(num[0].number == 20.0);
  CHECK(num[1].number == 1.5e-3);
  CHECK(num[2].number == 0.25);
  CHECK_THROWS_AS(tokenize("e0", 4), ParseError);
  CHECK_THROWS_AS(tokenize("e", 4), ParseError);
  CHECK_THROWS_AS(tokenize("1e999", 4), ParseError);
  try {
    tokenize("e1 $", 2);
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.span().begin == 3);
  }
}

TEST_CASE("precedence and associativity") {
  const auto a = parse("e1 + e2 ^ e3", 4);
  REQUIRE(a->kind == K::add);
  CHECK(a->rhs->kind == K::wedge);
  const auto b = parse("2*e1^e2 - e3^e4", 4);
  REQUIRE(b->kind == K::sub);
  CHECK(b->lhs->kind == K::mul);
  CHECK(b->lhs->rhs->kind == K::wedge);
  CHECK(b->rhs->kind == K::wedge);
  const auto c = parse("e1^e2^e3", 4);
  REQUIRE(c->kind == K::wedge);
  CHECK(c->lhs->kind == K::wedge);
  CHECK(c->rhs->kind == K::gen);
  const auto d = parse("-e1*e2 + e3", 4);
  REQUIRE(d->kind == K::add);
  CHECK(d->lhs->kind == K::neg);
  CHECK(d->lhs->lhs->kind == K::mul);
  CHECK(parse("e1 - e2 - e3", 4)->lhs->kind == K::sub);
  CHECK(parse("(e1 + e2)^e3", 4)->kind == K::wedge);
}

TEST_CASE("parse errors carry positions") {
  const std::vector<std::pair<std::string, std::size_t>> cases = {
      {"(e1 + e2", 8}, {"e1 + e2)", 7}, {"e1 +", 4}, {"e1 e2", 3}, {"*e1", 0}, {"e1 * -e2", 5}};
  for (const auto& [text, at] : cases) {
    CAPTURE(text);
    try {
      parse(text, 4);
      FAIL("expected error");
    } catch (const ParseError& e) {
      CHECK(e.span().begin == at);
    }
  }
  CHECK_THROWS_AS(parse(std::string(1000, '(') + "e1" + std::string(1000, ')'), 2), ParseError);
  CHECK_THROWS_AS(parse(std::string(1000, '-') + "e1", 2), ParseError);
}

TEST_CASE("evaluation") {
  const AlgebraContext ctx(4);
  CHECK(eval(*parse("e1^e1", 4), ctx).is_zero());
  const auto v = eval(*parse("2*e1^e2 - e3^e4", 4), ctx);
  CHECK(v.terms().size() == 2);
  CHECK(v.coefficient(0b0011) == Complex(2.0));
  CHECK(v.coefficient(0b1100) == Complex(-1.0));
  CHECK(eval(*parse("(e1+e2)^(e1+e2)", 4), ctx).is_zero());
  CHECK(eval(*parse("3 - 2*i", 4), ctx).scalar_part() == Complex(3.0, -2.0));
  CHECK(eval(*parse("e2*e1", 4), ctx).coefficient(0b11) == Complex(-1.0));
}

TEST_CASE("random trees survive print and parse") {
  std::mt19937_64 rng(1234);
  const AlgebraContext ctx(6);
  for (int t = 0; t < 500; ++t) {
    const auto ast = random_ast(rng, 5, 6);
    const std::string text = to_string(*ast);
    CAPTURE(text);
    const auto back = parse(text, 6);
    CHECK(structurally_equal(*ast, *back));
    CHECK(max_coefficient_distance(eval(*ast, ctx), eval(*back, ctx)) == 0.0);
  }
}

TEST_CASE("canonical multivector text round-trips exactly") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const AlgebraContext ctx(6);
  for (int t = 0; t < 100; ++t) {
    MultiVector v(ctx, Flavor::exterior);
    for (int k = 0; k < 6; ++k) {
      v.accumulate(std::uniform_int_distribution<Mask>(0, ctx.top_mask())(rng), Complex(u(rng), u(rng)));
    }
    v.prune();
    const std::string text = format_multivector(v);
    CAPTURE(text);
    CHECK(max_coefficient_distance(eval(*parse(text, 6), ctx), v) == 0.0);
  }
  CHECK(format_multivector(MultiVector(ctx, Flavor::exterior)) == "0");
  CHECK(format_multivector(MultiVector::blade(ctx, 0b101, Complex(2, -1))) == "(2 - 1*i)*e1^e3");
}

TEST_CASE("parser is total on random bytes") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "e1234567890i+-*^() .\t$eE\xc3\xa9";
  std::uniform_int_distribution<std::size_t> len(0, 30), ch(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int t = 0; t < 5000; ++t) {
    std::string s;
    const std::size_t n = len(rng);
    for (std::size_t k = 0; k < n; ++k) s += t % 5 == 0 ? char(byte(rng)) : alphabet[ch(rng)];
    try {
      const auto ast = parse(s, 4);
      CHECK(ast != nullptr);
    } catch (const ParseError& e) {
      CHECK(e.span().begin <= s.size());
      CHECK(e.span().end <= s.size());
    }
  }
}

TEST_CASE("curvature files") {
  const std::string dir = SPINDEX_DATA_DIR;
  const auto torus = load_curvature(read_curvature_file(dir + "/torus_flux3.json"));
  CHECK(torus.context.dim() == 2);
  CHECK(torus.twist.has_value());
  CHECK_FALSE(torus.riemann.has_value());
  const auto blocks = load_curvature(read_curvature_file(dir + "/four_dim_blocks.json"));
  CHECK(blocks.riemann->size() == 4);

  const auto ok = parse_curvature_file(R"j({"n":1,"riemann":[[0,"e1^e2"],["-(e1^e2)",0]]})j");
  CHECK_NOTHROW(load_curvature(ok));
  const auto twist = parse_curvature_file(R"({"n":1,"twist":[["e1^e2"]]})");
  CHECK(load_curvature(twist).twist->size() == 1);

  auto message = [](const std::string& json) {
    try {
      load_curvature(parse_curvature_file(json));
    } catch (const CurvatureFileError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"n":1,"riemann":[[0,"e1"],["-e1",0]]})").find("(0, 1)") != std::string::npos);
  CHECK(message(R"({"n":1,"riemann":[[0,"e1^e2"],["e1^e2",0]]})").find("antisymmetric") != std::string::npos);
  CHECK(message(R"({"n":1,"riemann":[[0,"e1^e2"]]})").find("rows") != std::string::npos);
  CHECK(message(R"({"n":1,"riemann":[[0,"e1^e2"],[0]]})").find("row 1") != std::string::npos);
  CHECK(message(R"({"n":1,"twist":[["e1^e3"]]})").find("twist[0][0]") != std::string::npos);
  CHECK(message(R"({"n":1,"twist":[["e1 ^"]]})").find("bytes 4") != std::string::npos);
  CHECK_THROWS_AS(parse_curvature_file("{\"n\": 1,"), CurvatureFileError);
  CHECK_THROWS_AS(parse_curvature_file(R"({"n":1,"bogus":2})"), CurvatureFileError);
  CHECK_THROWS_AS(parse_curvature_file(R"({"riemann":[]})"), CurvatureFileError);
  CHECK(!message(R"({"n":9})").empty());
  CHECK_THROWS_AS(read_curvature_file(dir + "/missing.json"), CurvatureFileError);
}
