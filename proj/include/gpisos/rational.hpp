#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace gpisos {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// n/d in canonical form (mpq_class's two-argument constructor does not reduce).
inline BigRational make_rational(const BigInt& n, const BigInt& d) {
  BigRational q(n, d);
  q.canonicalize();
  return q;
}

/// Canonical text form: "n" for integers, "n/d" otherwise (d > 1, reduced).
std::string to_string(const BigRational& q);
std::string to_string(const BigInt& z);

/// Parses an exact rational. With `strict`, only the canonical form produced
/// by to_string is accepted (no "+", no leading zeros, reduced, no "/1").
/// Throws StructuralError on malformed input.
BigRational parse_rational(std::string_view text, bool strict = false);

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
BigRational best_rational(double x, const BigInt& max_den);

/// Exact value of a finite double.
BigRational exact_rational(double x);

}  // namespace gpisos
