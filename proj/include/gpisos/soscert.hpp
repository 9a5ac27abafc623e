#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpisos/certificate.hpp"
#include "gpisos/errors.hpp"
#include "gpisos/matrix.hpp"
#include "gpisos/polynomial.hpp"
#include "gpisos/sdp.hpp"

namespace gpisos {

/// Structural proof that the target is not a sum of squares.
class NotSosError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A target monomial cannot be written as z_i z_j over the chosen basis.
class BasisInsufficientError : public StructuralError {
 public:
  BasisInsufficientError(const std::string& what, Monomial m) : StructuralError(what), monomial(std::move(m)) {}
  Monomial monomial;
};

/// Candidate half-degree support, graded-lex ascending, no duplicates.
struct GramBasis {
  std::vector<Monomial> monomials;
  std::size_t size() const { return monomials.size(); }
};

struct BasisOptions {
  /// Keep only lattice points u with 2u in the Newton polytope; otherwise
  /// every monomial of degree <= deg(F)/2.
  bool newton = true;
  /// Iteratively drop z_j when z_j^2 is absent from F and no other product
  /// z_k z_l (k != l) in the basis equals it, which forces G_jj = 0.
  bool prune_diagonal = true;
};

/// Throws NotSosError for odd total degree or odd extreme degree in some
/// variable.
GramBasis select_basis(const MultiPoly& F, const BasisOptions& options = {});

/// Exact membership of `point` in the convex hull of `points` (phase-one
/// simplex over the rationals, Bland's rule).
bool in_convex_hull(const std::vector<std::vector<long>>& points, const std::vector<long>& point);

/// sum over (i,j) in pairs[k] of (2 - delta_ij) G_ij = rhs[k] for every
/// product monomial products[k].
struct GramSystem {
  RingPtr ring;
  GramBasis basis;
  std::vector<Monomial> products;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs;
  std::vector<BigRational> rhs;

  std::optional<std::size_t> index_of(const Monomial& m) const;
};

/// Throws BasisInsufficientError naming the first unrepresentable monomial.
GramSystem build_gram_system(const MultiPoly& F, const GramBasis& z);

/// Whether a symmetric rational matrix satisfies every constraint exactly.
bool satisfies(const GramSystem& sys, const RationalMatrix& g);

/// Float SDP for the system with right-hand sides divided by `scale`.
sdp::Problem to_sdp(const GramSystem& sys, double scale = 1.0);

/// Entrywise best rational approximation with denominators <= denom_bound,
/// then the minimum-Frobenius correction onto the constraint set. The
/// constraint supports are disjoint, so the normal equations are diagonal and
/// every entry of a group moves by the same amount.
RationalMatrix round_and_project(const Eigen::MatrixXd& g, const GramSystem& sys, const BigInt& denom_bound);

/// LDL^T of G with the basis eliminated from the highest monomial down, so a
/// positive definite G ends with a constant square. Throws DomainError when G
/// is not PSD.
SosCertificate extract_sos(const RationalMatrix& g, const GramBasis& z, const RingPtr& ring);

/// Moment vector l over the product monomials with M(l)_{ij} = l(z_i z_j)
/// PSD and sum_k rhs_k l_k = value < 0; proves that no PSD Gram matrix exists.
struct DualCertificate {
  std::vector<BigRational> moments;
  BigRational value;
};

bool verify_dual(const GramSystem& sys, const DualCertificate& dual);

enum class CertifyStatus { certified, refused, indeterminate };

const char* to_string(CertifyStatus s);

struct CertifyOptions {
  BasisOptions basis;
  sdp::Options sdp;
  std::size_t max_basis = 400;
  std::vector<BigInt> denominator_bounds{BigInt(1000), BigInt(1000000), BigInt(1000000000), BigInt("1000000000000")};
  /// Run check_strictness on success.
  bool strictness = true;
  /// Smallest epsilon tried by the shift ladder 1, 1/10, 1/100, ...
  BigRational epsilon_floor{1, 1000000};
  std::optional<std::chrono::steady_clock::time_point> deadline;
  const std::atomic<bool>* cancel = nullptr;
};

struct CertifyResult {
  CertifyStatus status = CertifyStatus::indeterminate;
  std::optional<SosCertificate> certificate;
  std::optional<StrictnessVerdict> strictness;
  /// Present for refusals found by the SDP dual.
  std::optional<DualCertificate> dual;
  std::string reason;
  std::size_t basis_size = 0;
  double margin = 0.0;
  int sdp_iterations = 0;
  /// Denominator bound at which rounding succeeded.
  std::optional<BigInt> denominator_bound;
};

/// select_basis -> build_gram_system -> SDP -> round_and_project over the
/// denominator ladder (then once more after a tighter solve) -> exact PSD
/// check -> extract_sos -> verify_certificate. A refusal always carries a
/// structural reason or an exactly verified dual certificate; anything else
/// that fails is indeterminate.
CertifyResult certify(const MultiPoly& F, const CertifyOptions& options = {});

/// Constant square if present, otherwise the first epsilon on the ladder for
/// which F - epsilon certifies, otherwise nonneg_only.
StrictnessVerdict check_strictness(const SosCertificate& cert, const MultiPoly& F, const CertifyOptions& options = {});

}  // namespace gpisos
