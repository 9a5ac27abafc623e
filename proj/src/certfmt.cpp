#include "gpisos/certfmt.hpp"

#include <gmp.h>
#include <rapidjson/error/en.h>
#include <rapidjson/reader.h>
#include <rapidjson/stringbuffer.h>
#include <rapidjson/writer.h>

#include <fstream>
#include <set>
#include <sstream>

#ifndef GPISOS_VERSION
#define GPISOS_VERSION "dev"
#endif

namespace gpisos::certfmt {

bool operator==(const CertificateFile& a, const CertificateFile& b) {
  if (!(a.target.ring() == b.target.ring()) || a.target.terms() != b.target.terms()) return false;
  if (!(a.metadata == b.metadata)) return false;
  const auto& x = a.certificate;
  const auto& y = b.certificate;
  if (x.provenance != y.provenance || x.target_fingerprint != y.target_fingerprint || x.basis != y.basis) return false;
  if (x.terms.size() != y.terms.size()) return false;
  for (std::size_t i = 0; i < x.terms.size(); ++i) {
    if (x.terms[i].c != y.terms[i].c || x.terms[i].f.terms() != y.terms[i].f.terms()) return false;
    if (!(x.terms[i].f.ring() == y.terms[i].f.ring())) return false;
  }
  return true;
}

std::string toolchain_id() {
  std::ostringstream out;
  out << "gpisos " << GPISOS_VERSION << "; gmp " << gmp_version;
  return out.str();
}

namespace {

// ---------------------------------------------------------------- emission

std::string quote(const std::string& s) {
  rapidjson::StringBuffer buf;
  rapidjson::Writer<rapidjson::StringBuffer> w(buf);
  w.String(s.c_str(), static_cast<rapidjson::SizeType>(s.size()));
  return buf.GetString();
}

std::string exponents(const Monomial& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) out += (i ? ", " : "") + std::to_string(m[i]);
  return out + "]";
}

void emit_terms(std::ostringstream& out, const MultiPoly& p, const std::string& indent) {
  if (p.is_zero()) {
    out << "[]";
    return;
  }
  out << "[\n";
  std::size_t k = 0;
  for (const auto& [m, c] : p.terms()) {
    out << indent << "  {\"m\": " << exponents(m) << ", \"c\": " << quote(to_string(c)) << "}"
        << (++k < p.size() ? ",\n" : "\n");
  }
  out << indent << "]";
}

// ------------------------------------------------------------------ parsing

struct Node {
  enum class Kind { null, boolean, number, string, array, object };
  Kind kind = Kind::null;
  std::string text;
  bool flag = false;
  std::vector<Node> items;
  std::vector<std::pair<std::string, Node>> members;
  std::size_t offset = 0;
};

// SAX handler that builds a Node tree annotated with byte offsets.
struct TreeBuilder : rapidjson::BaseReaderHandler<rapidjson::UTF8<>, TreeBuilder> {
  explicit TreeBuilder(const rapidjson::StringStream& s) : stream(s) {}

  const rapidjson::StringStream& stream;
  Node root;
  std::vector<Node*> stack;
  std::vector<std::string> keys;
  std::string pending_key;
  std::size_t pending_key_offset = 0;
  std::optional<ParseError> error;

  Node* place(Node n) {
    if (stack.empty()) {
      root = std::move(n);
      return &root;
    }
    Node* parent = stack.back();
    if (parent->kind == Node::Kind::array) {
      parent->items.push_back(std::move(n));
      return &parent->items.back();
    }
    for (const auto& [k, v] : parent->members) {
      if (k == pending_key) {
        error.emplace("duplicate key \"" + pending_key + "\"", pending_key_offset);
        return nullptr;
      }
    }
    parent->members.emplace_back(pending_key, std::move(n));
    return &parent->members.back().second;
  }
  bool scalar(Node::Kind kind, std::string text, std::size_t length) {
    Node n;
    n.kind = kind;
    n.text = std::move(text);
    n.offset = stream.Tell() - length;
    return place(std::move(n)) != nullptr;
  }

  bool Null() { return scalar(Node::Kind::null, "", 4); }
  bool Bool(bool b) {
    Node n;
    n.kind = Node::Kind::boolean;
    n.flag = b;
    n.offset = stream.Tell() - (b ? 4 : 5);
    return place(std::move(n)) != nullptr;
  }
  bool RawNumber(const char* s, rapidjson::SizeType len, bool) { return scalar(Node::Kind::number, std::string(s, len), len); }
  bool String(const char* s, rapidjson::SizeType len, bool) {
    return scalar(Node::Kind::string, std::string(s, len), len + 2);
  }
  bool Key(const char* s, rapidjson::SizeType len, bool) {
    pending_key.assign(s, len);
    pending_key_offset = stream.Tell() - len - 2;
    return true;
  }
  bool open(Node::Kind kind) {
    Node n;
    n.kind = kind;
    n.offset = stream.Tell() - 1;
    Node* placed = place(std::move(n));
    if (!placed) return false;
    stack.push_back(placed);
    return true;
  }
  bool StartObject() { return open(Node::Kind::object); }
  bool EndObject(rapidjson::SizeType) {
    stack.pop_back();
    return true;
  }
  bool StartArray() { return open(Node::Kind::array); }
  bool EndArray(rapidjson::SizeType) {
    stack.pop_back();
    return true;
  }
};

[[noreturn]] void fail(const Node& n, const std::string& message) { throw ParseError(message, n.offset); }

const Node* member(const Node& obj, const std::string& key) {
  for (const auto& [k, v] : obj.members) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Node& require(const Node& obj, const std::string& key, Node::Kind kind, const char* what) {
  const Node* n = member(obj, key);
  if (!n) fail(obj, "missing key \"" + key + "\"");
  if (n->kind != kind) fail(*n, "\"" + key + "\" must be " + what);
  return *n;
}

BigRational rational(const Node& n, bool strict) {
  if (n.kind != Node::Kind::string) fail(n, "rational must be a string");
  try {
    return parse_rational(n.text, strict);
  } catch (const StructuralError& e) {
    fail(n, "malformed rational \"" + n.text + "\": " + e.what());
  }
}

Monomial monomial(const Node& n, std::size_t nvars) {
  if (n.kind != Node::Kind::array) fail(n, "exponent vector must be an array");
  if (n.items.size() != nvars) {
    fail(n, "exponent vector has " + std::to_string(n.items.size()) + " entries, ring has " + std::to_string(nvars));
  }
  Monomial m(nvars);
  for (std::size_t i = 0; i < nvars; ++i) {
    const Node& e = n.items[i];
    if (e.kind != Node::Kind::number || e.text.empty() || e.text.find_first_not_of("0123456789") != std::string::npos ||
        e.text.size() > 9 || (e.text.size() > 1 && e.text[0] == '0')) {
      fail(e, "exponent must be a non-negative integer");
    }
    m.set(i, static_cast<Monomial::Exponent>(std::stoul(e.text)));
  }
  return m;
}

MultiPoly term_list(const Node& n, const RingPtr& ring, bool strict) {
  if (n.kind != Node::Kind::array) fail(n, "term list must be an array");
  MultiPoly p(ring);
  std::optional<Monomial> previous;
  for (const Node& t : n.items) {
    if (t.kind != Node::Kind::object) fail(t, "term must be an object");
    if (strict) {
      if (t.members.size() != 2 || t.members[0].first != "m" || t.members[1].first != "c") {
        fail(t, "term must have exactly the keys \"m\" then \"c\"");
      }
    }
    const Node* mn = member(t, "m");
    const Node* cn = member(t, "c");
    if (!mn || !cn) fail(t, "term needs \"m\" and \"c\"");
    const Monomial m = monomial(*mn, ring->size());
    const BigRational c = rational(*cn, strict);
    if (strict) {
      if (c == 0) fail(*cn, "zero coefficient");
      if (previous && !(*previous < m)) fail(t, "terms are not in ascending graded-lex order");
    }
    previous = m;
    p.add_term(m, c);
  }
  return p;
}

}  // namespace

std::string emit(const CertificateFile& file) {
  const VerifyResult v = verify_certificate(file.certificate, file.target);
  if (!v) throw DomainError("refusing to emit an unverified certificate: " + v.diagnostic);
  const auto& names = file.target.ring().names();

  std::ostringstream out;
  out << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"ring\": [";
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << quote(names[i]);
  out << "],\n  \"target\": ";
  emit_terms(out, file.target, "  ");
  out << ",\n  \"terms\": [";
  for (std::size_t i = 0; i < file.certificate.terms.size(); ++i) {
    const auto& t = file.certificate.terms[i];
    const MultiPoly f = same_ring(t.f.ring_ptr(), file.target.ring_ptr()) ? t.f : change_ring(t.f, file.target.ring_ptr());
    out << (i ? ",\n" : "\n") << "    {\n      \"c\": " << quote(to_string(t.c)) << ",\n      \"f\": ";
    emit_terms(out, f, "      ");
    out << "\n    }";
  }
  out << (file.certificate.terms.empty() ? "]" : "\n  ]") << ",\n  \"basis\": [";
  for (std::size_t i = 0; i < file.certificate.basis.size(); ++i) {
    out << (i ? ", " : "") << exponents(file.certificate.basis[i]);
  }
  out << "],\n  \"metadata\": {\n";
  std::vector<std::pair<std::string, std::string>> meta{
      {"instance", file.metadata.instance},
      {"normalization", file.metadata.normalization},
      {"strictness", file.metadata.strictness},
      {"toolchain", file.metadata.toolchain},
      {"provenance", file.certificate.provenance},
      {"target_fingerprint", file.certificate.target_fingerprint},
  };
  meta.insert(meta.end(), file.metadata.extra.begin(), file.metadata.extra.end());
  for (std::size_t i = 0; i < meta.size(); ++i) {
    out << "    " << quote(meta[i].first) << ": " << quote(meta[i].second) << (i + 1 < meta.size() ? ",\n" : "\n");
  }
  out << "  }\n}\n";
  return out.str();
}

CertificateFile parse(std::string_view bytes, bool strict) {
  const std::string text(bytes);
  rapidjson::StringStream stream(text.c_str());
  TreeBuilder builder(stream);
  rapidjson::Reader reader;
  const auto ok = reader.Parse<rapidjson::kParseNumbersAsStringsFlag>(stream, builder);
  if (builder.error) throw *builder.error;
  if (ok.IsError()) throw ParseError(rapidjson::GetParseError_En(ok.Code()), ok.Offset());
  if (text.find('\0') != std::string::npos) throw ParseError("embedded NUL byte", text.find('\0'));
  const Node& root = builder.root;
  if (root.kind != Node::Kind::object) fail(root, "top level must be an object");

  static const std::set<std::string> known{"format_version", "ring", "target", "terms", "basis", "metadata"};
  if (strict) {
    for (const auto& [k, v] : root.members) {
      if (!known.count(k)) fail(v, "unknown top-level key \"" + k + "\"");
    }
  }
  const Node& version = require(root, "format_version", Node::Kind::number, "a number");
  if (version.text != std::to_string(kFormatVersion)) {
    fail(version, "unsupported format_version " + version.text + " (expected " + std::to_string(kFormatVersion) + ")");
  }

  const Node& ring_node = require(root, "ring", Node::Kind::array, "an array of names");
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const Node& n : ring_node.items) {
    if (n.kind != Node::Kind::string || n.text.empty()) fail(n, "variable name must be a non-empty string");
    if (!seen.insert(n.text).second) fail(n, "duplicate variable name \"" + n.text + "\"");
    names.push_back(n.text);
  }
  const RingPtr ring = make_ring(names);

  CertificateFile file{MultiPoly(ring), SosCertificate{}, Metadata{}};
  file.target = term_list(require(root, "target", Node::Kind::array, "a term list"), ring, strict);

  for (const Node& sq : require(root, "terms", Node::Kind::array, "an array of squares").items) {
    if (sq.kind != Node::Kind::object) fail(sq, "square must be an object");
    if (strict && (sq.members.size() != 2 || sq.members[0].first != "c" || sq.members[1].first != "f")) {
      fail(sq, "square must have exactly the keys \"c\" then \"f\"");
    }
    const Node* cn = member(sq, "c");
    const Node* fn = member(sq, "f");
    if (!cn || !fn) fail(sq, "square needs \"c\" and \"f\"");
    const BigRational c = rational(*cn, strict);
    if (c <= 0) fail(*cn, "square weight must be positive");
    MultiPoly f = term_list(*fn, ring, strict);
    if (strict && f.is_zero()) fail(*fn, "square of the zero polynomial");
    file.certificate.terms.push_back({c, std::move(f)});
  }

  if (const Node* basis = member(root, "basis")) {
    if (basis->kind != Node::Kind::array) fail(*basis, "\"basis\" must be an array");
    for (const Node& m : basis->items) {
      Monomial mono = monomial(m, ring->size());
      if (strict && !file.certificate.basis.empty() && !(file.certificate.basis.back() < mono)) {
        fail(m, "basis is not in ascending graded-lex order");
      }
      file.certificate.basis.push_back(std::move(mono));
    }
  }

  const Node& meta = require(root, "metadata", Node::Kind::object, "an object");
  for (const auto& [k, v] : meta.members) {
    std::string* slot = nullptr;
    if (k == "instance") slot = &file.metadata.instance;
    if (k == "normalization") slot = &file.metadata.normalization;
    if (k == "strictness") slot = &file.metadata.strictness;
    if (k == "toolchain") slot = &file.metadata.toolchain;
    if (k == "provenance") slot = &file.certificate.provenance;
    if (k == "target_fingerprint") slot = &file.certificate.target_fingerprint;
    if (slot) {
      if (v.kind != Node::Kind::string) fail(v, "metadata \"" + k + "\" must be a string");
      *slot = v.text;
    } else if (v.kind == Node::Kind::string) {
      file.metadata.extra.emplace_back(k, v.text);
    }
  }
  return file;
}

CertificateFile read_file(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), strict);
}

void write_file(const std::filesystem::path& path, const CertificateFile& file) {
  const std::string bytes = emit(file);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StructuralError("cannot write " + path.string());
  out << bytes;
  if (!out) throw StructuralError("write failed for " + path.string());
}

VerifyResult verify_file(const CertificateFile& file) {
  VerifyResult v = verify_certificate(file.certificate, file.target);
  if (!v) return v;
  const std::string expected = fingerprint(file.target);
  if (!file.certificate.target_fingerprint.empty() && file.certificate.target_fingerprint != expected) {
    return {false, "target fingerprint " + file.certificate.target_fingerprint + " does not match " + expected};
  }
  return v;
}

}  // namespace gpisos::certfmt
