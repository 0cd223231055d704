#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "jordan/error.hpp"

namespace jordan {

/// Arbitrary-precision rational; GMP keeps every result in lowest terms with
/// a positive denominator, and zero as 0/1.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "-p" or "p/q" exactly. Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
  auto valid_int = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  auto slash = text.find('/');
  std::string num(text.substr(0, slash));
  std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
    throw Error(ErrorCode::ParseError, "not a rational literal: '" + std::string(text) + "'");
  Integer d(den);
  if (d == 0) throw Error(ErrorCode::DivisionByZero, "zero denominator in '" + std::string(text) + "'");
  Rational q(Integer(num), d);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational rational_pow(const Rational& base, long exponent) {
  Rational result = 1;
  Rational b = base;
  bool invert = exponent < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-exponent) : static_cast<unsigned long>(exponent);
  while (e) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1u;
  }
  if (invert) {
    if (result == 0) throw Error(ErrorCode::DivisionByZero, "negative power of zero");
    result = 1 / result;
  }
  return result;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// Generalized binomial coefficient C(alpha, k) for rational alpha.
inline Rational binomial(const Rational& alpha, long k) {
  Rational r = 1;
  for (long i = 0; i < k; ++i) {
    r *= (alpha - i);
    r /= (i + 1);
  }
  return r;
}

inline Rational factorial(long n) {
  Integer f = 1;
  for (long i = 2; i <= n; ++i) f *= i;
  return Rational(f);
}

}  // namespace jordan
