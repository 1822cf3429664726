#include "lexer.hpp"

#include <cctype>
#include <cstdlib>

namespace meu {

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  static const std::pair<const char*, const char*> unicode[] = {
      {"∧", "&&"}, {"∨", "||"}, {"¬", "!"}, {"←", "<-"}, {"→", "->"}};
  static const char* two_char[] = {"<-", "->", "=>", "&&", "||", "==", "!="};

  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.span = {line, col};
    bool neg_number = c == '-' && i + 1 < src.size() &&
                      (std::isdigit(static_cast<unsigned char>(src[i + 1])) || src[i + 1] == '.');
    if (std::isdigit(static_cast<unsigned char>(c)) || neg_number ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      const char* begin = src.c_str() + i;
      char* stop = nullptr;
      t.num = std::strtod(begin, &stop);
      size_t n = static_cast<size_t>(stop - begin);
      t.type = Token::number;
      t.text = src.substr(i, n);
      advance(n);
      out.push_back(t);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      t.type = Token::ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (auto& [u, ascii] : unicode) {
      size_t n = std::char_traits<char>::length(u);
      if (src.compare(i, n, u) == 0) {
        t.type = Token::sym;
        t.text = ascii;
        advance(n);
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (const char* s : two_char) {
      if (src.compare(i, 2, s) == 0) {
        t.type = Token::sym;
        t.text = s;
        advance(2);
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string("()[]{};,:|!=").find(c) != std::string::npos) {
      t.type = Token::sym;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(t);
      continue;
    }
    input_error(std::string("unexpected character '") + c + "'", t.span);
  }
  Token end;
  end.type = Token::end;
  end.text = "<end of input>";
  end.span = {line, col};
  out.push_back(end);
  return out;
}

std::string TokenStream::expect_ident() {
  if (peek().type != Token::ident) fail("expected an identifier");
  return next().text;
}

double TokenStream::expect_number() {
  if (peek().type != Token::number) fail("expected a number");
  return next().num;
}

void TokenStream::fail(const std::string& msg) const {
  input_error(msg + ", found '" + peek().text + "'", peek().span);
}

}  // namespace meu
