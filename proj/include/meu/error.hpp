#pragma once

#include <stdexcept>
#include <string>

namespace meu {

enum class ErrorKind { usage = 1, input = 2, solve = 3 };

struct Span {
  int line = 0;
  int col = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg, Span span = {})
      : std::runtime_error(msg), kind_(kind), span_(span) {}

  ErrorKind kind() const { return kind_; }
  Span span() const { return span_; }

 private:
  ErrorKind kind_;
  Span span_;
};

[[noreturn]] inline void input_error(const std::string& msg, Span span = {}) {
  throw Error(ErrorKind::input, msg, span);
}

[[noreturn]] inline void solve_error(const std::string& msg) {
  throw Error(ErrorKind::solve, msg);
}

}  // namespace meu
