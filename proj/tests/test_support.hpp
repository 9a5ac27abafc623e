#pragma once

#include <random>
#include <string>
#include <vector>

#include "gpisos/matrix.hpp"
#include "gpisos/polynomial.hpp"

namespace gpisos::testing {

inline BigRational random_rational(std::mt19937_64& rng, long lo, long hi, long max_den = 1) {
  std::uniform_int_distribution<long> num(lo, hi);
  std::uniform_int_distribution<long> den(1, max_den);
  BigRational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline RingPtr letters_ring(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.emplace_back(1, static_cast<char>('a' + i));
  return make_ring(std::move(names));
}

/// Random polynomial with up to `terms` terms of total degree <= max_deg.
inline MultiPoly random_poly(std::mt19937_64& rng, const RingPtr& ring, unsigned max_deg,
                             std::size_t terms, long coef = 100, long max_den = 1) {
  MultiPoly p(ring);
  std::uniform_int_distribution<unsigned> deg(0, max_deg);
  std::uniform_int_distribution<std::size_t> var(0, ring->size() - 1);
  for (std::size_t t = 0; t < terms; ++t) {
    Monomial m(ring->size());
    const unsigned d = deg(rng);
    for (unsigned k = 0; k < d; ++k) {
      const auto v = var(rng);
      m.set(v, m[v] + 1);
    }
    p.add_term(m, random_rational(rng, -coef, coef, max_den));
  }
  return p;
}

inline RationalMatrix random_symmetric(std::mt19937_64& rng, std::size_t n, long range = 20,
                                       long max_den = 5) {
  RationalMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      a(i, j) = random_rational(rng, -range, range, max_den);
      a(j, i) = a(i, j);
    }
  }
  return a;
}

/// M^T M for a random k x n integer matrix: PSD with rank <= k.
inline RationalMatrix random_psd(std::mt19937_64& rng, std::size_t n, std::size_t k, long range = 5) {
  RationalMatrix m(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = random_rational(rng, -range, range);
  }
  return m.transpose() * m;
}

}  // namespace gpisos::testing
