#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace ftrans {

/// Arbitrary-precision integers. Nat is used where values are known to be
/// non-negative; both share one representation.
using Int = boost::multiprecision::cpp_int;
using Nat = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Rejected configuration or input (CLI exit code 1).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Operation applied outside its mathematical domain (CLI exit code 1).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// An internal contract was broken (CLI exit code 2).
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

Int parse_int(std::string_view text);
/// Accepts "p/q", "p", or a finite decimal such as "0.125" or "1e-6".
Rational parse_rational(std::string_view text);
std::string to_string(const Int& v);
std::string to_string(const Rational& v);

Int floor_div(const Int& a, const Int& b);
Int ceil_div(const Int& a, const Int& b);
Int isqrt(const Int& v);
Int pow10(unsigned exponent);
Int pow2(unsigned exponent);
/// Largest t with 2^t <= v, for a positive rational v (may be negative).
Int floor_log2(const Rational& v);
unsigned bit_length(const Int& v);

/// Checked narrowing used for loop bounds and container sizes.
unsigned long long to_u64(const Int& v, std::string_view what);

/// Double with 15 significant digits; handles ratios of huge integers.
std::string format_float15(const Rational& v);
double to_double(const Rational& v);

}  // namespace ftrans
