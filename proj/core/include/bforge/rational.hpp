#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace bforge {

using Rational = mpq_class;

// Accepts "p/q" or "p" (optional leading '-'); throws StructuralError on
// anything else, including a zero denominator.
Rational parse_rational(std::string_view text);

// Always "p/q", denominator included ("1/1", "-3/4").
std::string to_string(const Rational& r);

Rational pow2(int k);

inline Rational abs_diff(const Rational& a, const Rational& b) {
  return a < b ? Rational(b - a) : Rational(a - b);
}

}  // namespace bforge
