#include "wavenet/length.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace wavenet {

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

bool parse_int(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (std::size_t k = i; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  try {
    out = std::stoll(s);
  } catch (...) {
    return false;
  }
  return true;
}

// "a", "a/b"
bool parse_rational(const std::string& s, std::int64_t& a, std::int64_t& b) {
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    b = 1;
    return parse_int(s, a);
  }
  return parse_int(s.substr(0, slash), a) && parse_int(s.substr(slash + 1), b) && b != 0;
}

long double parse_decimal(const std::string& s) {
  std::size_t used = 0;
  long double v;
  try {
    v = std::stold(s, &used);
  } catch (...) {
    throw std::invalid_argument("unparseable length literal '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("unparseable length literal '" + s + "'");
  return v;
}

}  // namespace

Length Length::decimal(long double v) {
  Length l;
  l.value = v;
  return l;
}

Length Length::rational(std::int64_t a, std::int64_t b) {
  if (b < 0) a = -a, b = -b;
  auto g = std::gcd(a, b);
  if (g > 1) a /= g, b /= g;
  Length l;
  l.form = Form::Rational;
  l.num = a;
  l.den = b;
  l.value = static_cast<long double>(a) / static_cast<long double>(b);
  return l;
}

Length Length::pi_times(std::int64_t a, std::int64_t b) {
  Length l = rational(a, b);
  l.form = Form::PiRational;
  l.value = std::numbers::pi_v<long double> * l.value;
  return l;
}

Length Length::sqrt_of(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("sqrt of a negative number");
  Length l;
  l.form = Form::Sqrt;
  l.num = n;
  l.value = std::sqrt(static_cast<long double>(n));
  return l;
}

bool Length::is_rational() const {
  if (form == Form::Rational) return true;
  if (form == Form::Sqrt) {
    auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<long double>(num))));
    return r * r == num;
  }
  return false;
}

std::string Length::literal() const {
  switch (form) {
    case Form::Rational:
      return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    case Form::PiRational:
      return den == 1 ? "pi*" + std::to_string(num)
                      : "pi*" + std::to_string(num) + "/" + std::to_string(den);
    case Form::Sqrt:
      return "sqrt(" + std::to_string(num) + ")";
    case Form::Decimal:
      break;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", value);
  return buf;
}

Length parse_length(const std::string& text) {
  const std::string s = strip(text);
  if (s.empty()) throw std::invalid_argument("empty length literal");
  std::int64_t a = 0, b = 1;
  if (s == "pi") return Length::pi_times(1, 1);
  if (s.rfind("pi*", 0) == 0) {
    if (!parse_rational(s.substr(3), a, b))
      throw std::invalid_argument("bad rational in '" + s + "'");
    return Length::pi_times(a, b);
  }
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "*pi") == 0) {
    if (!parse_rational(s.substr(0, s.size() - 3), a, b))
      throw std::invalid_argument("bad rational in '" + s + "'");
    return Length::pi_times(a, b);
  }
  if (s.rfind("sqrt(", 0) == 0 && s.back() == ')') {
    if (!parse_int(s.substr(5, s.size() - 6), a))
      throw std::invalid_argument("bad radicand in '" + s + "'");
    return Length::sqrt_of(a);
  }
  if (s.find('/') != std::string::npos) {
    if (!parse_rational(s, a, b)) throw std::invalid_argument("bad rational '" + s + "'");
    return Length::rational(a, b);
  }
  if (parse_int(s, a)) return Length::rational(a, 1);
  return Length::decimal(parse_decimal(s));
}

}  // namespace wavenet
