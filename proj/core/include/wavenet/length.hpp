#pragma once

#include <cstdint>
#include <string>

namespace wavenet {

// An edge length as written in a config. Exact forms keep enough structure
// to answer "is this an integer multiple of pi" without rounding.
struct Length {
  enum class Form { Decimal, Rational, PiRational, Sqrt };

  long double value = 0;
  Form form = Form::Decimal;
  std::int64_t num = 0;  // Rational / PiRational numerator, Sqrt radicand
  std::int64_t den = 1;

  static Length decimal(long double v);
  static Length rational(std::int64_t a, std::int64_t b);
  static Length pi_times(std::int64_t a, std::int64_t b);
  static Length sqrt_of(std::int64_t n);

  double to_double() const { return static_cast<double>(value); }
  bool is_exact() const { return form != Form::Decimal; }
  // true for a/b and for sqrt(n) with n a perfect square
  bool is_rational() const;
  std::string literal() const;
};

// Accepts: plain decimals, "a/b", "pi", "pi*a/b", "a/b*pi", "sqrt(n)".
Length parse_length(const std::string& text);

}  // namespace wavenet
