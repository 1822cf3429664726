#pragma once

#include <string>
#include <vector>

#include "meu/error.hpp"

namespace meu {

struct Token {
  enum Type { ident, number, sym, end } type = end;
  std::string text;
  double num = 0;
  Span span;
};

// Identifiers, numbers (with an optional leading minus), and the symbols used
// by both surface languages. `//` starts a line comment. The Unicode
// connectives are mapped to their ASCII spellings.
std::vector<Token> lex(const std::string& src);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(size_t k = 0) const {
    size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().type == Token::end; }
  bool is(const std::string& s, size_t k = 0) const {
    const Token& t = peek(k);
    return (t.type == Token::sym || t.type == Token::ident) && t.text == s;
  }
  bool accept(const std::string& s) {
    if (!is(s)) return false;
    next();
    return true;
  }
  const Token& expect(const std::string& s) {
    if (!is(s)) fail("expected '" + s + "'");
    return next();
  }
  std::string expect_ident();
  double expect_number();
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace meu
