#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gpisos/certificate.hpp"
#include "gpisos/errors.hpp"
#include "gpisos/polynomial.hpp"

namespace gpisos::certfmt {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kExtension = ".gpicert";
inline constexpr const char* kFixtureProvenance = "external fixture (published decomposition)";

struct Metadata {
  std::string instance;
  std::string normalization = "1";
  std::string strictness;
  std::string toolchain;
  /// Unknown string-valued keys, kept in file order.
  std::vector<std::pair<std::string, std::string>> extra;

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

/// On-disk certificate: target polynomial, squares and metadata. The
/// certificate's provenance and target fingerprint travel in the metadata
/// block.
struct CertificateFile {
  MultiPoly target;
  SosCertificate certificate;
  Metadata metadata;
};

bool operator==(const CertificateFile& a, const CertificateFile& b);

class ParseError : public StructuralError {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : StructuralError("byte " + std::to_string(offset) + ": " + message), offset(offset) {}
  std::size_t offset;
};

/// Canonical bytes. Throws DomainError unless the certificate verifies
/// against the target.
std::string emit(const CertificateFile& file);

/// Parses canonical bytes. Strict mode rejects non-canonical rationals,
/// unsorted or duplicate term lists and unknown top-level keys; unknown
/// metadata keys are always tolerated. Throws ParseError.
CertificateFile parse(std::string_view bytes, bool strict = true);

CertificateFile read_file(const std::filesystem::path& path, bool strict = true);
void write_file(const std::filesystem::path& path, const CertificateFile& file);

/// verify_certificate against the embedded target, then the fingerprint match.
VerifyResult verify_file(const CertificateFile& file);

/// Library versions baked into this build.
std::string toolchain_id();

}  // namespace gpisos::certfmt
