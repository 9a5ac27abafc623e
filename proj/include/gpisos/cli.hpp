#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gpisos/gapbuild.hpp"
#include "gpisos/rational.hpp"
#include "gpisos/soscert.hpp"

namespace gpisos::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRefused = 2, kIndeterminate = 3 };

/// Set by the SIGINT handler; every long-running command polls it.
std::atomic<bool>& interrupt_flag();

/// GPISOS_WORKERS if set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
std::size_t default_workers();

/// Runs task(i) for i in [0, count) on up to `workers` threads. Results are
/// written by index, so the output order never depends on scheduling.
template <class Task>
void parallel_for(std::size_t count, std::size_t workers, Task task) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) task(i);
  };
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), count);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(loop);
  loop();
  for (auto& th : pool) th.join();
}

struct Budgets {
  /// Wall-clock limit per subproblem.
  double seconds = 600.0;
  BigInt max_denominator{"1000000000000"};
  std::size_t max_basis = 400;
};

CertifyOptions certify_options(const Budgets& budgets);

struct BuildRequest {
  std::string exponents;
  std::optional<std::size_t> case_id;
  bool symbolic = false;
  std::optional<std::filesystem::path> output;
};

int cmd_build(const BuildRequest& request, std::ostream& out, std::ostream& err);

/// certified-strict | certified-nonneg | refused-not-SOS | indeterminate.
struct SubproblemReport {
  std::string label;
  std::string slug;
  std::string status;
  std::string strictness;
  bool strict_required = false;
  std::size_t basis_size = 0;
  std::size_t squares = 0;
  std::string reason;
  std::string certificate_path;
  double seconds = 0.0;
};

struct RunReport {
  std::string target;
  std::vector<SubproblemReport> subproblems;
  /// "inequality certified" | "refused" | "indeterminate".
  std::string verdict;
  /// Whether every strict_required subproblem came back strict.
  bool equality_characterization = false;
  int exit_code = kOk;

  std::string text(bool timings = true) const;
  std::string json(bool timings = true) const;
};

struct CertifyRequest {
  /// Exponent pattern; ignored when `polynomial` is set.
  std::string exponents;
  bool symbolic = false;
  /// Certify a single polynomial instead of a gap chain.
  std::optional<std::string> polynomial;
  std::vector<std::string> variables;
  std::filesystem::path output_dir = "gpisos-out";
  Budgets budgets;
  std::size_t workers = 1;
  bool timings = true;
};

RunReport run_certify(const CertifyRequest& request);
int cmd_certify(const CertifyRequest& request, std::ostream& out, std::ostream& err);

struct FileCheck {
  std::string path;
  bool ok = false;
  std::string instance;
  std::string strictness;
  /// "rechecked" when a constant-square claim was confirmed.
  std::string strictness_check;
  std::string diagnostic;
};

/// Parses and verifies one certificate file; a strict_constant_square claim
/// must be backed by an actual constant square.
FileCheck check_file(const std::filesystem::path& path);

/// Directory holding the bundled published decompositions.
std::filesystem::path fixture_dir();

struct VerifyRequest {
  std::vector<std::filesystem::path> paths;
  bool published_fixtures = false;
};

int cmd_verify(const VerifyRequest& request, std::ostream& out, std::ostream& err);

/// Lower-triangular construction with small random rationals, some cells
/// replaced by free variables.
Construction random_construction(std::mt19937_64& rng, std::size_t n);

struct OracleRequest {
  std::uint64_t seed = 1;
  std::size_t count = 200;
  std::size_t max_dim = 4;
  /// Largest sum of exponents drawn.
  unsigned max_total = 6;
  /// Largest Gaussian factor count 2M handed to the pairing oracle.
  unsigned max_factors = 24;
  std::optional<std::filesystem::path> json;
};

struct OracleReport {
  std::size_t agreed = 0;
  std::size_t mismatched = 0;
  std::size_t skipped = 0;
  std::string text;
  std::string json;
};

OracleReport run_oracle(const OracleRequest& request);
int cmd_oracle(const OracleRequest& request, std::ostream& out, std::ostream& err);

struct ConjectureRequest {
  std::size_t n = 3;
  std::string exponents = "1,1,1";
  std::filesystem::path output_dir = "gpisos-out";
  Budgets budgets;
  std::optional<std::filesystem::path> json;
};

int cmd_conjecture(const ConjectureRequest& request, std::ostream& out, std::ostream& err);

}  // namespace gpisos::cli
