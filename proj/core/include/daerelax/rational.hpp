// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_RATIONAL_HPP
#define DAERELAX_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace daerelax {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

double rational_to_double(const Rational& r);

/// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double x);

/// Parses decimal literals ("1.5", "40.67286402e-9") exactly, with powers of
/// ten in the denominator. Returns nullopt on malformed input.
std::optional<Rational> rational_from_decimal(const std::string& text);

/// r^k for integer k (negative k inverts; r must be nonzero then).
Rational rational_pow(const Rational& r, long k);

/// Exact k-th root when it exists (used to fold things like 4^(1/2)).
std::optional<Rational> rational_root(const Rational& r, long k);

/// Renders exactly: a terminating decimal when the denominator is 2^a 5^b
/// (and the digit count stays sane), otherwise "p/q".
std::string rational_to_string(const Rational& r);

} // namespace daerelax

#endif
