#pragma once

// Angles written as plain numbers or simple multiples of pi:
// "0.25", "pi", "-pi/2", "3pi/4", "3*pi/4", "2*pi", "pi*0.5".

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <string>

#include "quanprism/numerics.hpp"

namespace quanprism {

namespace detail {

// Parses a complete decimal number; throws ParseError otherwise.
inline double parse_number(const std::string& s, const std::string& whole) {
  if (s.empty()) throw ParseError("malformed angle '" + whole + "'", 0);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ParseError("malformed angle '" + whole + "'", 0);
  }
  return v;
}

}  // namespace detail

inline double parse_angle(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
  }
  const auto at = s.find("pi");
  if (at == std::string::npos) return detail::parse_number(s, text);

  std::string head = s.substr(0, at);
  std::string tail = s.substr(at + 2);
  if (!head.empty() && head.back() == '*') head.pop_back();
  double coef = 1.0;
  if (head == "-") {
    coef = -1.0;
  } else if (!head.empty() && head != "+") {
    coef = detail::parse_number(head, text);
  }
  double value = coef * kPi;
  if (tail.empty()) return value;
  const char op = tail.front();
  const double rhs = detail::parse_number(tail.substr(1), text);
  if (op == '/') {
    if (rhs == 0.0) throw ParseError("division by zero in angle '" + text + "'", 0);
    return value / rhs;
  }
  if (op == '*') return value * rhs;
  throw ParseError("malformed angle '" + text + "'", 0);
}

}  // namespace quanprism
