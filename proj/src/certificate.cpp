#include "gpisos/certificate.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <sstream>

#include "gpisos/errors.hpp"

namespace gpisos {

std::string StrictnessVerdict::to_string() const {
  switch (kind) {
    case Kind::strict_constant_square: return "strict_constant_square";
    case Kind::strict_epsilon_shift: return "strict_epsilon_shift(" + gpisos::to_string(epsilon.value_or(0)) + ")";
    case Kind::nonneg_only: return "nonneg_only";
  }
  return "nonneg_only";
}

StrictnessVerdict StrictnessVerdict::parse(const std::string& text) {
  StrictnessVerdict v;
  if (text == "strict_constant_square") {
    v.kind = Kind::strict_constant_square;
  } else if (text == "nonneg_only") {
    v.kind = Kind::nonneg_only;
  } else {
    const std::string prefix = "strict_epsilon_shift(";
    if (text.rfind(prefix, 0) != 0 || text.back() != ')') throw DomainError("unknown strictness verdict \"" + text + "\"");
    v.kind = Kind::strict_epsilon_shift;
    try {
      v.epsilon = parse_rational(text.substr(prefix.size(), text.size() - prefix.size() - 1), true);
    } catch (const StructuralError& e) {
      throw DomainError(std::string("bad epsilon in strictness verdict: ") + e.what());
    }
    if (*v.epsilon <= 0) throw DomainError("epsilon must be positive");
  }
  return v;
}

MultiPoly expand(const SosCertificate& cert, const RingPtr& ring) {
  MultiPoly sum(ring);
  for (const auto& t : cert.terms) {
    const MultiPoly f = same_ring(t.f.ring_ptr(), ring) ? t.f : change_ring(t.f, ring);
    sum += t.c * (f * f);
  }
  return sum;
}

VerifyResult verify_certificate(const SosCertificate& cert, const MultiPoly& target) {
  VerifyResult r;
  for (std::size_t i = 0; i < cert.terms.size(); ++i) {
    if (cert.terms[i].c <= 0) {
      r.diagnostic = "term " + std::to_string(i + 1) + " has non-positive weight " + to_string(cert.terms[i].c);
      return r;
    }
  }
  MultiPoly diff(target.ring_ptr());
  try {
    diff = expand(cert, target.ring_ptr()) - target;
  } catch (const StructuralError& e) {
    r.diagnostic = std::string("certificate ring does not match target: ") + e.what();
    return r;
  }
  if (!diff.is_zero()) {
    const auto& [m, c] = *diff.terms().begin();
    const MultiPoly mono = MultiPoly::monomial(target.ring_ptr(), m);
    r.diagnostic = "mismatch at monomial " + mono.to_string() + ": certificate gives " +
                   to_string(c + target.coefficient(m)) + ", target has " + to_string(target.coefficient(m));
    return r;
  }
  r.ok = true;
  return r;
}

std::optional<std::size_t> constant_square(const SosCertificate& cert) {
  for (std::size_t i = 0; i < cert.terms.size(); ++i) {
    const auto& t = cert.terms[i];
    if (t.c > 0 && t.f.is_constant() && !t.f.is_zero()) return i;
  }
  return std::nullopt;
}

std::string canonical_text(const MultiPoly& p) {
  std::ostringstream out;
  out << "ring ";
  const auto& names = p.ring().names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << "\n";
  for (const auto& [m, c] : p.terms()) {
    for (std::size_t i = 0; i < m.size(); ++i) out << (i ? "," : "") << m[i];
    out << " " << to_string(c) << "\n";
  }
  return out.str();
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw ResourceError("SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string fingerprint(const MultiPoly& p) { return "sha256:" + sha256_hex(canonical_text(p)); }

}  // namespace gpisos
