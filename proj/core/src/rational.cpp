#include "bforge/rational.hpp"

#include "bforge/errors.hpp"

#include <cctype>

namespace bforge {

namespace {

bool is_integer_text(std::string_view s) {
  if (!s.empty() && s.front() == '-') s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1")
                                                         : text.substr(slash + 1);
  if (!is_integer_text(num) || !is_integer_text(den) || den.front() == '-')
    throw StructuralError("not a rational: \"" + std::string(text) + "\"");
  mpz_class n(std::string(num), 10), d(std::string(den), 10);
  if (d == 0)
    throw StructuralError("zero denominator: \"" + std::string(text) + "\"");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational pow2(int k) {
  Rational r(1);
  if (k >= 0)
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
  else
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-k));
  return r;
}

}  // namespace bforge
