#ifndef FASTLYAP_RATIONAL_HPP
#define FASTLYAP_RATIONAL_HPP

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace fastlyap {

using Integer = mpz_class;
using Rational = mpq_class;

// Accepts "p/q", "p", "-p/q" and finite decimals such as "0.25" (read exactly).
Rational parse_rational(std::string_view text);
Integer parse_integer(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

// Exact conversion of a finite double.
Rational rational_from_double(double x);

Integer floor(const Rational& q);
bool is_integer(const Rational& q);

// Natural logarithm of |z| or |q| without overflow for huge operands.
double log_abs(const Integer& z);
double log_abs(const Rational& q);

// Number of bits needed for numerator plus denominator.
std::size_t bit_size(const Rational& q);

}  // namespace fastlyap

#endif  // FASTLYAP_RATIONAL_HPP
