#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ffsym {

/// Exact signed integer of unbounded magnitude. Zero carries no sign, which matches
/// the '+' convention for zero used by the tokenizer.
using Coefficient = boost::multiprecision::cpp_int;

inline bool is_negative(const Coefficient& c) { return c.sign() < 0; }

/// '+' or '-'; zero maps to '+'.
inline char sign_char(const Coefficient& c) { return is_negative(c) ? '-' : '+'; }

inline Coefficient magnitude(const Coefficient& c) { return boost::multiprecision::abs(c); }

/// Decimal text: optional '-' then digits with no leading zeros.
std::string to_decimal(const Coefficient& c);

/// Strict decimal parser: optional '+'/'-', at least one digit, nothing else.
/// Throws ParseError.
Coefficient parse_decimal(std::string_view text);

}  // namespace ffsym
