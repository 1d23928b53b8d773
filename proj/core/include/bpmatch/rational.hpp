#ifndef BPMATCH_RATIONAL_HPP
#define BPMATCH_RATIONAL_HPP

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace bpmatch {

/// Exact arbitrary-precision rational. Every weight, LP value and margin in
/// the library is one of these; only the max-product engine drops to double.
using rational = mpq_class;

/// Parses "12", "1.25", "3/8" (no sign, no exponent). Returns nullopt on
/// malformed input. The result is canonicalized.
std::optional<rational> parse_rational(std::string_view text);

/// "p/q" or "p" when the denominator is 1.
std::string to_string(const rational& value);

/// Decimal rendering with a fixed number of digits, for human reports.
std::string to_decimal(const rational& value, int digits = 6);

inline double to_double(const rational& value) { return value.get_d(); }

/// ceil(value) as an integer. Throws if it does not fit in 64 bits.
long long ceil_to_integer(const rational& value);

} // namespace bpmatch

#endif
