#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpisos/polynomial.hpp"

namespace gpisos {

struct SosTerm {
  BigRational c;
  MultiPoly f;
};

/// F = sum_i c_i f_i^2 with every c_i > 0.
struct SosCertificate {
  std::vector<SosTerm> terms;
  /// Gram basis the squares were extracted over; empty for external fixtures.
  std::vector<Monomial> basis;
  std::string provenance;
  std::string target_fingerprint;
};

struct StrictnessVerdict {
  enum class Kind { strict_constant_square, strict_epsilon_shift, nonneg_only };
  Kind kind = Kind::nonneg_only;
  /// Shift certified for strict_epsilon_shift.
  std::optional<BigRational> epsilon;

  bool strict() const { return kind != Kind::nonneg_only; }
  /// "strict_constant_square", "strict_epsilon_shift(1/10)", "nonneg_only".
  std::string to_string() const;
  /// Inverse of to_string; throws DomainError.
  static StrictnessVerdict parse(const std::string& text);
};

struct VerifyResult {
  bool ok = false;
  /// Empty on success, otherwise the first problem found.
  std::string diagnostic;
  explicit operator bool() const { return ok; }
};

/// sum_i c_i f_i^2 in the ring of the target.
MultiPoly expand(const SosCertificate& cert, const RingPtr& ring);

/// Exact check of sum_i c_i f_i^2 == F with all c_i > 0. On mismatch the
/// diagnostic names the lowest mismatching monomial in graded-lex order.
VerifyResult verify_certificate(const SosCertificate& cert, const MultiPoly& target);

/// Index of a nonzero constant square with positive weight, if any.
std::optional<std::size_t> constant_square(const SosCertificate& cert);

/// Ring names and ascending terms, one per line: "ring a,b" then "2,0 3/4".
std::string canonical_text(const MultiPoly& p);

/// "sha256:<hex>" of canonical_text.
std::string fingerprint(const MultiPoly& p);

/// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace gpisos
