#include "gpisos/cli.hpp"

#include <Eigen/Core>
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gpisos/certfmt.hpp"
#include "gpisos/moments.hpp"

#ifndef GPISOS_FIXTURE_DIR
#define GPISOS_FIXTURE_DIR "fixtures"
#endif

namespace gpisos::cli {

using Json = nlohmann::ordered_json;

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("GPISOS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

CertifyOptions certify_options(const Budgets& budgets) {
  CertifyOptions opts;
  opts.max_basis = budgets.max_basis;
  opts.sdp.max_dim = std::max(opts.sdp.max_dim, budgets.max_basis);
  std::vector<BigInt> ladder;
  for (const auto& b : opts.denominator_bounds) {
    if (b <= budgets.max_denominator) ladder.push_back(b);
  }
  if (ladder.empty() || ladder.back() != budgets.max_denominator) ladder.push_back(budgets.max_denominator);
  opts.denominator_bounds = ladder;
  opts.cancel = &interrupt_flag();
  return opts;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StructuralError("cannot write " + path.string());
  out << text;
}

std::string toolchain() {
  return certfmt::toolchain_id() + "; eigen " + std::to_string(EIGEN_WORLD_VERSION) + "." +
         std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION);
}

ExponentPattern pattern_for(const std::string& text, bool symbolic) {
  ExponentPattern p = parse_exponents(text);
  if (symbolic && !p.symbolic) throw DomainError("--symbolic needs an \"m\" entry in the exponents");
  return p;
}

// Plans for the pattern and every lower-dimensional reference it points to.
std::vector<GapInstance> full_chain(const ExponentPattern& pattern) {
  std::vector<GapInstance> out;
  std::optional<ExponentPattern> next = pattern;
  while (next) {
    SubproblemPlan plan = enumerate_subproblems(*next);
    out.insert(out.end(), plan.instances.begin(), plan.instances.end());
    next = plan.recursive;
  }
  return out;
}

struct Job {
  std::string label;
  std::string slug;
  std::string normalization = "1";
  bool strict_required = false;
  std::optional<GapInstance> instance;
  std::optional<MultiPoly> poly;
};

SubproblemReport run_job(const Job& job, const CertifyRequest& request) {
  SubproblemReport rep;
  rep.label = job.label;
  rep.slug = job.slug;
  rep.strict_required = job.strict_required;
  const auto start = Clock::now();
  try {
    MultiPoly F = job.poly ? *job.poly : build_instance(*job.instance).poly;
    CertifyOptions opts = certify_options(request.budgets);
    opts.deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(request.budgets.seconds));
    const CertifyResult r = certify(F, opts);
    rep.basis_size = r.basis_size;
    rep.reason = r.reason;
    if (r.status == CertifyStatus::certified) {
      const StrictnessVerdict s = r.strictness.value_or(StrictnessVerdict{});
      rep.status = s.strict() ? "certified-strict" : "certified-nonneg";
      rep.strictness = s.to_string();
      rep.squares = r.certificate->terms.size();
      certfmt::CertificateFile file{F, *r.certificate, {}};
      file.metadata.instance = job.label;
      file.metadata.normalization = job.normalization;
      file.metadata.strictness = rep.strictness;
      file.metadata.toolchain = toolchain();
      const auto path = request.output_dir / (job.slug + certfmt::kExtension);
      certfmt::write_file(path, file);
      rep.certificate_path = path.string();
    } else if (r.status == CertifyStatus::refused) {
      rep.status = "refused-not-SOS";
    } else {
      rep.status = "indeterminate";
    }
  } catch (const std::exception& e) {
    rep.status = "indeterminate";
    rep.reason = e.what();
  }
  rep.seconds = seconds_since(start);
  return rep;
}

}  // namespace

int cmd_build(const BuildRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const ExponentPattern pattern = pattern_for(request.exponents, request.symbolic);
    const auto cases = enumerate_cases(pattern.size());
    const std::size_t id = request.case_id.value_or(1);
    if (id < 1 || id > cases.size()) {
      err << "case " << id << " out of range 1.." << cases.size() << "\n";
      return kUsage;
    }
    GapInstance inst{pattern, cases[id - 1], std::nullopt, id, cases.size()};
    const GapPolynomial g = build_instance(inst);
    std::ostringstream text;
    text << "instance: " << inst.label() << "\n"
         << "construction: " << inst.construction.describe() << "\n"
         << "normalization: " << normalization_text(g.normalization) << "\n"
         << "ring: ";
    const auto& names = g.poly.ring().names();
    for (std::size_t i = 0; i < names.size(); ++i) text << (i ? "," : "") << names[i];
    text << "\n" << g.poly.to_string() << "\n";
    out << text.str();
    if (request.output) write_text(*request.output, text.str());
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

std::string RunReport::text(bool timings) const {
  std::ostringstream s;
  s << "target: " << target << "\n";
  for (const auto& r : subproblems) {
    s << "  " << std::left << std::setw(28) << r.label << " " << std::setw(18) << r.status << std::right;
    if (r.basis_size) s << " basis " << r.basis_size;
    if (r.squares) s << " squares " << r.squares;
    if (!r.strictness.empty()) s << " " << r.strictness;
    if (r.strict_required) s << " [strict needed]";
    if (timings) s << " " << fixed(r.seconds, 2) << "s";
    s << "\n";
    if (!r.certificate_path.empty()) s << "      certificate: " << r.certificate_path << "\n";
    if (!r.reason.empty() && r.status.rfind("certified", 0) != 0) s << "      reason: " << r.reason << "\n";
  }
  s << "verdict: " << verdict << "\n";
  s << "equality characterization: " << (equality_characterization ? "certified" : "not certified") << "\n";
  return s.str();
}

std::string RunReport::json(bool timings) const {
  Json j;
  j["target"] = target;
  j["verdict"] = verdict;
  j["equality_characterization"] = equality_characterization;
  j["exit_code"] = exit_code;
  Json list = Json::array();
  for (const auto& r : subproblems) {
    Json e;
    e["instance"] = r.label;
    e["status"] = r.status;
    e["strictness"] = r.strictness;
    e["strict_required"] = r.strict_required;
    e["basis_size"] = r.basis_size;
    e["squares"] = r.squares;
    e["certificate"] = r.certificate_path;
    e["reason"] = r.reason;
    if (timings) e["seconds"] = r.seconds;
    list.push_back(std::move(e));
  }
  j["subproblems"] = std::move(list);
  return j.dump(2) + "\n";
}

RunReport run_certify(const CertifyRequest& request) {
  std::vector<Job> jobs;
  RunReport report;
  if (request.polynomial) {
    if (request.variables.empty()) throw DomainError("--polynomial needs --vars");
    Job job;
    job.poly = parse_poly(*request.polynomial, make_ring(request.variables));
    job.label = job.poly->to_string();
    job.slug = "polynomial";
    report.target = job.label;
    jobs.push_back(std::move(job));
  } else {
    const ExponentPattern pattern = pattern_for(request.exponents, request.symbolic);
    report.target = "F_{" + pattern.to_string() + "}";
    for (const GapInstance& inst : full_chain(pattern)) {
      Job job;
      job.label = inst.label();
      job.slug = inst.slug();
      job.strict_required = inst.strict_required;
      job.normalization = normalization_text(pattern.symbolic ? Normalization::symbolic_double_factorial : Normalization::none);
      job.instance = inst;
      jobs.push_back(std::move(job));
    }
  }

  report.subproblems.resize(jobs.size());
  parallel_for(jobs.size(), request.workers, [&](std::size_t i) { report.subproblems[i] = run_job(jobs[i], request); });

  bool refused = false;
  bool open = false;
  report.equality_characterization = true;
  bool any_strict_required = false;
  for (const auto& r : report.subproblems) {
    refused |= r.status == "refused-not-SOS";
    open |= r.status == "indeterminate";
    if (r.strict_required) {
      any_strict_required = true;
      report.equality_characterization &= r.status == "certified-strict";
    }
  }
  report.equality_characterization &= any_strict_required && !refused && !open;
  if (refused) {
    report.verdict = "refused";
    report.exit_code = kRefused;
  } else if (open) {
    report.verdict = "indeterminate";
    report.exit_code = kIndeterminate;
  } else {
    report.verdict = request.polynomial ? "certified" : "inequality certified";
    report.exit_code = kOk;
  }
  return report;
}

int cmd_certify(const CertifyRequest& request, std::ostream& out, std::ostream& err) {
  RunReport report;
  try {
    report = run_certify(request);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  const std::string text = report.text(request.timings);
  out << text;
  try {
    write_text(request.output_dir / "report.txt", text);
    write_text(request.output_dir / "report.json", report.json(request.timings));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (interrupt_flag()) err << "interrupted: partial results written to " << request.output_dir.string() << "\n";
  return report.exit_code;
}

std::filesystem::path fixture_dir() {
  if (const char* env = std::getenv("GPISOS_FIXTURE_DIR")) return env;
  return GPISOS_FIXTURE_DIR;
}

FileCheck check_file(const std::filesystem::path& path) {
  FileCheck check;
  check.path = path.string();
  try {
    const certfmt::CertificateFile file = certfmt::read_file(path);
    check.instance = file.metadata.instance;
    check.strictness = file.metadata.strictness;
    const VerifyResult v = certfmt::verify_file(file);
    if (!v.ok) {
      check.diagnostic = v.diagnostic;
      return check;
    }
    if (!check.strictness.empty()) {
      const StrictnessVerdict claim = StrictnessVerdict::parse(check.strictness);
      if (claim.kind == StrictnessVerdict::Kind::strict_constant_square) {
        if (!constant_square(file.certificate)) {
          check.diagnostic = "claims strict_constant_square but no constant square is present";
          return check;
        }
        check.strictness_check = "rechecked";
      } else {
        check.strictness_check = "not rechecked";
      }
    }
    check.ok = true;
  } catch (const std::exception& e) {
    check.diagnostic = e.what();
  }
  return check;
}

int cmd_verify(const VerifyRequest& request, std::ostream& out, std::ostream& err) {
  std::vector<std::filesystem::path> roots = request.paths;
  if (request.published_fixtures) roots.push_back(fixture_dir());
  if (roots.empty()) {
    err << "error: nothing to verify\n";
    return kUsage;
  }
  std::vector<std::filesystem::path> files;
  for (const auto& root : roots) {
    if (std::filesystem::is_directory(root)) {
      std::vector<std::filesystem::path> found;
      for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
        if (e.is_regular_file() && e.path().extension() == certfmt::kExtension) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) err << "warning: no " << certfmt::kExtension << " files under " << root.string() << "\n";
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(root);
    }
  }
  std::size_t passed = 0;
  for (const auto& f : files) {
    const FileCheck c = check_file(f);
    if (c.ok) {
      ++passed;
      out << "PASS " << c.path << "  " << c.instance;
      if (!c.strictness.empty()) out << "  " << c.strictness << " (" << c.strictness_check << ")";
      out << "\n";
    } else {
      out << "FAIL " << c.path << ": " << c.diagnostic << "\n";
    }
  }
  out << passed << " passed, " << files.size() - passed << " failed\n";
  if (files.empty()) return kUsage;
  return passed == files.size() ? kOk : kRefused;
}

Construction random_construction(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::vector<std::string>> cells(n, std::vector<std::string>(n));
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<long> num(-3, 3);
  std::uniform_int_distribution<long> den(1, 3);
  char next = 'a';
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      const int what = kind(rng);
      if (what == 0 && next <= 'e') {
        cells[k][j] = std::string(1, next++);
      } else if (what != 1 || j == k) {
        const long a = num(rng);
        const long b = den(rng);
        cells[k][j] = to_string(make_rational(BigInt(a), BigInt(b)));
      }
    }
  }
  return make_construction(cells);
}

OracleReport run_oracle(const OracleRequest& request) {
  if (request.max_dim < 1 || request.max_total < request.max_dim) {
    throw DomainError("oracle needs 1 <= max-dim <= max-total");
  }
  std::mt19937_64 rng(request.seed);
  OracleReport report;
  std::ostringstream text;
  Json list = Json::array();
  for (std::size_t i = 0; i < request.count; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, request.max_dim)(rng);
    ExponentVector m(n, 1);
    const unsigned extra = std::uniform_int_distribution<unsigned>(0, request.max_total - static_cast<unsigned>(n))(rng);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (unsigned e = 0; e < extra; ++e) ++m[pick(rng)];
    const Construction c = random_construction(rng, n);

    std::string exps;
    unsigned total = 0;
    for (std::size_t k = 0; k < n; ++k) {
      exps += (k ? "," : "") + std::to_string(m[k]);
      total += m[k];
    }
    Json e;
    e["index"] = i;
    e["exponents"] = exps;
    e["construction"] = c.describe();
    std::string status;
    if (2 * total > request.max_factors) {
      status = "skipped";
      e["reason"] = "2M = " + std::to_string(2 * total) + " exceeds the factor budget " + std::to_string(request.max_factors);
      ++report.skipped;
    } else {
      const bool same = moment_by_coefficient(covariance(c), m) == moment_by_wick(c, m, request.max_factors);
      status = same ? "agree" : "MISMATCH";
      ++(same ? report.agreed : report.mismatched);
    }
    e["status"] = status;
    text << std::setw(4) << i << "  " << std::left << std::setw(12) << exps << std::setw(9) << status << std::right
         << c.describe() << "\n";
    list.push_back(std::move(e));
  }
  text << "agreed " << report.agreed << ", mismatched " << report.mismatched << ", skipped " << report.skipped << "\n";
  Json j;
  j["seed"] = request.seed;
  j["count"] = request.count;
  j["agreed"] = report.agreed;
  j["mismatched"] = report.mismatched;
  j["skipped"] = report.skipped;
  j["instances"] = std::move(list);
  report.text = text.str();
  report.json = j.dump(2) + "\n";
  return report;
}

int cmd_oracle(const OracleRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const OracleReport r = run_oracle(request);
    out << r.text;
    if (request.json) write_text(*request.json, r.json);
    return r.mismatched ? kRefused : kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

int cmd_conjecture(const ConjectureRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const ExponentPattern pattern = parse_exponents(request.exponents);
    if (pattern.symbolic) throw DomainError("H needs concrete exponents");
    if (pattern.size() != request.n) {
      throw DomainError("expected " + std::to_string(request.n) + " exponents, got " + std::to_string(pattern.size()));
    }
    const MultiPoly H = build_conjecture_H(request.n, pattern.values);
    const std::vector<BigRational> origin(H.ring().size());
    const bool vanishes = H.evaluate(origin) == 0;

    CertifyRequest cr;
    cr.output_dir = request.output_dir;
    cr.budgets = request.budgets;
    Job job;
    job.poly = H;
    job.label = "H_{" + pattern.to_string() + "} n=" + std::to_string(request.n);
    job.slug = "H_n" + std::to_string(request.n) + "_" + pattern.to_string();
    for (auto& ch : job.slug) {
      if (ch == ',') ch = '_';
    }
    const SubproblemReport r = run_job(job, cr);

    std::ostringstream text;
    text << "H for n=" << request.n << ", exponents " << pattern.to_string() << "\n"
         << "ring: ";
    const auto& names = H.ring().names();
    for (std::size_t i = 0; i < names.size(); ++i) text << (i ? "," : "") << names[i];
    text << "\nterms: " << H.size() << ", degree " << H.total_degree() << "\n"
         << "H(0) = 0: " << (vanishes ? "yes" : "NO") << "\n"
         << "status: " << r.status;
    if (!r.strictness.empty()) text << " (" << r.strictness << ")";
    text << "\n";
    if (r.basis_size) text << "basis: " << r.basis_size << "\n";
    if (!r.certificate_path.empty()) text << "certificate: " << r.certificate_path << "\n";
    if (!r.reason.empty() && r.status.rfind("certified", 0) != 0) text << "reason: " << r.reason << "\n";
    if (r.status == "refused-not-SOS") {
      text << "*** H has no SOS representation: evidence against the SOS form of the conjecture ***\n";
    }
    out << text.str();

    if (request.json) {
      Json j;
      j["n"] = request.n;
      j["exponents"] = pattern.to_string();
      j["terms"] = H.size();
      j["degree"] = H.total_degree();
      j["vanishes_at_origin"] = vanishes;
      j["status"] = r.status;
      j["strictness"] = r.strictness;
      j["basis_size"] = r.basis_size;
      j["certificate"] = r.certificate_path;
      j["reason"] = r.reason;
      write_text(*request.json, j.dump(2) + "\n");
    }
    if (!vanishes) return kUsage;
    if (r.status == "refused-not-SOS") return kRefused;
    if (r.status == "indeterminate") return kIndeterminate;
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace gpisos::cli
