#include "bpmatch/rational.hpp"

#include "bpmatch/error.hpp"

#include <cctype>
#include <limits>

namespace bpmatch {

namespace {

bool all_digits(std::string_view s)
{
  if (s.empty())
    return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      return false;
  return true;
}

} // namespace

std::optional<rational> parse_rational(std::string_view text)
{
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      return std::nullopt;
    mpz_class q(std::string(den), 10);
    if (q == 0)
      return std::nullopt;
    rational r(mpz_class(std::string(num), 10), q);
    r.canonicalize();
    return r;
  }

  auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    if (!all_digits(text))
      return std::nullopt;
    return rational(mpz_class(std::string(text), 10));
  }

  auto whole = text.substr(0, dot);
  auto frac = text.substr(dot + 1);
  // "1." and ".5" are accepted, "." is not.
  if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
      (!frac.empty() && !all_digits(frac)))
    return std::nullopt;

  std::string digits = std::string(whole) + std::string(frac);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  rational r(mpz_class(digits.empty() ? "0" : digits, 10), den);
  r.canonicalize();
  return r;
}

std::string to_string(const rational& value)
{
  if (value.get_den() == 1)
    return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_decimal(const rational& value, int digits)
{
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  rational scaled = abs(value) * scale + rational(1, 2);
  mpz_class rounded = scaled.get_num() / scaled.get_den();

  std::string s = rounded.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits))
      s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  if (sgn(value) < 0 && rounded != 0)
    s.insert(0, "-");
  return s;
}

long long ceil_to_integer(const rational& value)
{
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  if (!c.fits_slong_p())
    throw size_limit_error("integer overflow converting " + to_string(value));
  return c.get_si();
}

} // namespace bpmatch
