#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "mubench/error.hpp"

namespace mubench {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(std::int64_t num, std::int64_t den = 1) { return Rational(num, den); }

/// 2^e for any integer exponent.
inline Rational pow2(std::int64_t e) {
  Integer p = 1;
  p <<= static_cast<unsigned>(e < 0 ? -e : e);
  return e < 0 ? Rational(Integer(1), p) : Rational(p);
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// Lowest-terms `p/q`, always with an explicit denominator.
inline std::string to_string(const Rational& q) {
  std::ostringstream out;
  out << boost::multiprecision::numerator(q) << '/' << boost::multiprecision::denominator(q);
  return out.str();
}

/// Truncated decimal rendering with `digits` fractional digits.
inline std::string to_decimal(const Rational& q, unsigned digits) {
  Integer num = boost::multiprecision::numerator(q);
  const Integer den = boost::multiprecision::denominator(q);
  std::ostringstream out;
  if (num < 0) {
    out << '-';
    num = -num;
  }
  out << num / den;
  Integer rem = num % den;
  if (digits > 0) out << '.';
  for (unsigned i = 0; i < digits; ++i) {
    rem *= 10;
    out << rem / den;
    rem %= den;
  }
  return out.str();
}

/// Parses `p/q`, `-p/q` or an integer.
inline Rational parse_rational(std::string_view text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(Integer(std::string(text)));
    const Integer den(std::string(text.substr(slash + 1)));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(Integer(std::string(text.substr(0, slash))), den);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const ParseError*>(&e)) throw;
    throw ParseError("bad rational '" + std::string(text) + "'");
  }
}

}  // namespace mubench
