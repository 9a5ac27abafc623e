#include "gpisos/rational.hpp"

#include <cmath>

#include "gpisos/errors.hpp"

namespace gpisos {

std::string to_string(const BigRational& q) { return q.get_str(10); }

std::string to_string(const BigInt& z) { return z.get_str(10); }

namespace {

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

BigRational parse_rational(std::string_view text, bool strict) {
  auto fail = [&](const char* why) {
    throw StructuralError("malformed rational \"" + std::string(text) + "\": " + why);
  };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    if (body.front() == '+' && strict) fail("explicit plus sign");
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{} : body.substr(slash + 1);
  if (!is_digits(num)) fail("numerator is not a digit string");
  if (slash != std::string_view::npos && !is_digits(den)) fail("denominator is not a digit string");

  BigInt n(std::string(num), 10);
  BigInt d = slash == std::string_view::npos ? BigInt(1) : BigInt(std::string(den), 10);
  if (d == 0) fail("zero denominator");
  if (negative) n = -n;

  BigRational q(n, d);
  q.canonicalize();
  if (strict && to_string(q) != text) fail("not in canonical form");
  return q;
}

BigRational exact_rational(double x) {
  if (!std::isfinite(x)) throw DomainError("cannot convert a non-finite double to a rational");
  return BigRational(x);
}

BigRational best_rational(double x, const BigInt& max_den) {
  if (!std::isfinite(x)) throw DomainError("cannot approximate a non-finite double");
  if (max_den < 1) throw DomainError("denominator bound must be positive");
  const BigRational target = exact_rational(x);

  // Convergents h/k of the continued fraction of target.
  BigInt h_prev2 = 0, h_prev = 1;
  BigInt k_prev2 = 1, k_prev = 0;
  BigRational rest = target;
  while (true) {
    BigInt a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    BigInt h = a * h_prev + h_prev2;
    BigInt k = a * k_prev + k_prev2;
    if (k > max_den) {
      // Largest admissible semiconvergent, compared against the last convergent.
      BigInt t = (max_den - k_prev2) / k_prev;
      BigRational semi(t * h_prev + h_prev2, t * k_prev + k_prev2);
      semi.canonicalize();
      BigRational conv(h_prev, k_prev);
      conv.canonicalize();
      if (t == 0) return conv;
      return abs(semi - target) < abs(conv - target) ? semi : conv;
    }
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    BigRational frac = rest - BigRational(a);
    if (frac == 0) {
      BigRational q(h, k);
      q.canonicalize();
      return q;
    }
    rest = 1 / frac;
  }
}

}  // namespace gpisos
