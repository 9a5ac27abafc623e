#include "gpisos/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

#include <boost/container_hash/hash.hpp>

#include "gpisos/errors.hpp"

namespace gpisos {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::initializer_list<Exponent> exps) : exps_(exps.begin(), exps.end()) {
  for (auto e : exps_) degree_ += e;
}

Monomial::Monomial(std::span<const Exponent> exps) : exps_(exps.begin(), exps.end()) {
  for (auto e : exps_) degree_ += e;
}

void Monomial::set(std::size_t i, Exponent e) {
  degree_ = degree_ - exps_[i] + e;
  exps_[i] = e;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.size() != size()) throw StructuralError("monomial product over different variable counts");
  Monomial r = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += other.exps_[i];
  r.degree_ = degree_ + other.degree_;
  return r;
}

bool Monomial::divides(const Monomial& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] > other.exps_[i]) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.exps_.begin(), a.exps_.end(), b.exps_.begin(),
                                                b.exps_.end());
}

namespace {

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const {
    auto e = m.exponents();
    return boost::hash_range(e.begin(), e.end());
  }
};

}  // namespace

// -------------------------------------------------------------------- Ring

Ring::Ring(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw StructuralError("empty variable name");
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw StructuralError("duplicate variable name " + names_[i]);
    }
  }
}

std::optional<std::size_t> Ring::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

RingPtr make_ring(std::vector<std::string> names) {
  return std::make_shared<const Ring>(std::move(names));
}

bool same_ring(const RingPtr& a, const RingPtr& b) { return a == b || *a == *b; }

// --------------------------------------------------------------- MultiPoly

MultiPoly::MultiPoly(RingPtr ring) : ring_(std::move(ring)) {
  if (!ring_) throw StructuralError("polynomial without a ring");
}

MultiPoly::MultiPoly(RingPtr ring, TermMap terms) : MultiPoly(std::move(ring)) {
  for (auto& [m, c] : terms) {
    if (m.size() != ring_->size()) throw StructuralError("monomial length does not match ring");
    if (c != 0) terms_.emplace(m, c);
  }
}

MultiPoly MultiPoly::constant(RingPtr ring, const BigRational& c) {
  MultiPoly p(std::move(ring));
  p.add_term(Monomial(p.ring_->size()), c);
  return p;
}

MultiPoly MultiPoly::variable(RingPtr ring, std::string_view name) {
  MultiPoly p(std::move(ring));
  auto idx = p.ring_->index_of(name);
  if (!idx) throw StructuralError("unknown variable " + std::string(name));
  Monomial m(p.ring_->size());
  m.set(*idx, 1);
  p.add_term(m, 1);
  return p;
}

MultiPoly MultiPoly::monomial(RingPtr ring, const Monomial& m, const BigRational& c) {
  MultiPoly p(std::move(ring));
  if (m.size() != p.ring_->size()) throw StructuralError("monomial length does not match ring");
  p.add_term(m, c);
  return p;
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

long MultiPoly::total_degree() const {
  if (terms_.empty()) return -1;
  return static_cast<long>(terms_.rbegin()->first.degree());
}

Monomial::Exponent MultiPoly::degree_in(std::size_t var) const {
  Monomial::Exponent d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
  return d;
}

BigRational MultiPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? BigRational(0) : it->second;
}

void MultiPoly::add_term(const Monomial& m, const BigRational& c) {
  if (c == 0) return;
  if (m.size() != ring_->size()) throw StructuralError("monomial length does not match ring");
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

BigRational MultiPoly::evaluate(std::span<const BigRational> point) const {
  if (point.size() != ring_->size()) throw StructuralError("evaluation point has wrong dimension");
  BigRational total = 0;
  for (const auto& [m, c] : terms_) {
    BigRational v = c;
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (Monomial::Exponent e = 0; e < m[i]; ++e) v *= point[i];
    }
    total += v;
  }
  return total;
}

void MultiPoly::require_same_ring(const MultiPoly& other, const char* op) const {
  if (!same_ring(ring_, other.ring_)) {
    throw StructuralError(std::string("ring mismatch in polynomial ") + op);
  }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& other) {
  require_same_ring(other, "addition");
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& other) {
  require_same_ring(other, "subtraction");
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const BigRational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r = *this;
  for (auto& [m, v] : r.terms_) v = -v;
  return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  a.require_same_ring(b, "multiplication");
  std::unordered_map<Monomial, BigRational, MonomialHash> acc;
  acc.reserve(a.terms_.size() * b.terms_.size());
  BigRational prod;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      mpq_mul(prod.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
      auto [it, inserted] = acc.try_emplace(ma * mb, prod);
      if (!inserted) it->second += prod;
    }
  }
  MultiPoly r(a.ring_);
  for (auto& [m, c] : acc) {
    if (c != 0) r.terms_.emplace_hint(r.terms_.end(), m, std::move(c));
  }
  return r;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
  return same_ring(a.ring_, b.ring_) && a.terms_ == b.terms_;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    BigRational mag = abs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (mag != 1 || m.is_one()) {
      out << gpisos::to_string(mag);
      wrote = true;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (wrote) out << "*";
      out << ring_->name(i);
      if (m[i] > 1) out << "^" << m[i];
      wrote = true;
    }
  }
  return out.str();
}

// --------------------------------------------------------------- free ops

MultiPoly poly_mul(const MultiPoly& p, const MultiPoly& q) { return p * q; }

MultiPoly poly_pow(const MultiPoly& p, unsigned k) {
  MultiPoly result = MultiPoly::constant(p.ring_ptr(), 1);
  MultiPoly base = p;
  while (k > 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

MultiPoly poly_pow_truncated(const MultiPoly& p, unsigned k,
                             std::span<const std::optional<Monomial::Exponent>> caps) {
  if (caps.size() != p.ring().size()) throw StructuralError("truncation caps do not match ring");
  auto within = [&](const Monomial& m) {
    for (std::size_t i = 0; i < caps.size(); ++i) {
      if (caps[i] && m[i] > *caps[i]) return false;
    }
    return true;
  };
  MultiPoly::TermMap base_terms;
  for (const auto& [m, c] : p.terms()) {
    if (within(m)) base_terms.emplace(m, c);
  }
  const MultiPoly base(p.ring_ptr(), std::move(base_terms));

  MultiPoly result = MultiPoly::constant(p.ring_ptr(), 1);
  for (unsigned step = 0; step < k; ++step) {
    std::unordered_map<Monomial, BigRational, MonomialHash> acc;
    BigRational prod;
    for (const auto& [ma, ca] : result.terms()) {
      for (const auto& [mb, cb] : base.terms()) {
        Monomial m = ma * mb;
        if (!within(m)) continue;
        mpq_mul(prod.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
        auto [it, inserted] = acc.try_emplace(std::move(m), prod);
        if (!inserted) it->second += prod;
      }
    }
    MultiPoly::TermMap next;
    for (auto& [m, c] : acc) {
      if (c != 0) next.emplace(m, std::move(c));
    }
    result = MultiPoly(p.ring_ptr(), std::move(next));
  }
  return result;
}

BigRational coefficient_of(const MultiPoly& p, const Monomial& m) {
  if (m.size() != p.ring().size()) throw StructuralError("monomial length does not match ring");
  return p.coefficient(m);
}

namespace {

// Index of every variable of `from` inside `to`; nullopt when absent.
std::vector<std::optional<std::size_t>> ring_map(const Ring& from, const Ring& to) {
  std::vector<std::optional<std::size_t>> map(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) map[i] = to.index_of(from.name(i));
  return map;
}

}  // namespace

MultiPoly coefficient_in(const MultiPoly& p, std::span<const std::size_t> vars,
                         std::span<const Monomial::Exponent> exps, const RingPtr& target) {
  if (vars.size() != exps.size()) throw StructuralError("coefficient_in: vars/exps length mismatch");
  std::vector<bool> selected(p.ring().size(), false);
  for (auto v : vars) {
    if (v >= p.ring().size()) throw StructuralError("coefficient_in: variable index out of range");
    selected[v] = true;
  }
  const auto map = ring_map(p.ring(), *target);
  MultiPoly out(target);
  for (const auto& [m, c] : p.terms()) {
    bool match = true;
    for (std::size_t i = 0; i < vars.size() && match; ++i) match = m[vars[i]] == exps[i];
    if (!match) continue;
    Monomial t(target->size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (selected[i] || m[i] == 0) continue;
      if (!map[i]) throw StructuralError("coefficient_in: target ring lacks " + p.ring().name(i));
      t.set(*map[i], m[i]);
    }
    out.add_term(t, c);
  }
  return out;
}

MultiPoly substitute(const MultiPoly& p, std::string_view var, const MultiPoly& replacement) {
  const auto idx = p.ring().index_of(var);
  if (!idx) throw StructuralError("substitute: unknown variable " + std::string(var));
  const RingPtr& target = replacement.ring_ptr();
  const auto map = ring_map(p.ring(), *target);
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (i != *idx && !map[i]) {
      throw StructuralError("substitute: replacement ring lacks variable " + p.ring().name(i));
    }
  }
  std::vector<MultiPoly> powers{MultiPoly::constant(target, 1)};
  MultiPoly out(target);
  for (const auto& [m, c] : p.terms()) {
    const auto e = m[*idx];
    while (powers.size() <= e) powers.push_back(powers.back() * replacement);
    Monomial rest(target->size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == *idx || m[i] == 0) continue;
      rest.set(*map[i], rest[*map[i]] + m[i]);
    }
    out += MultiPoly::monomial(target, rest, c) * powers[e];
  }
  return out;
}

MultiPoly compose(const MultiPoly& p, std::span<const MultiPoly> images, const RingPtr& target) {
  if (images.size() != p.ring().size()) throw StructuralError("compose: one image per variable required");
  for (const auto& img : images) {
    if (!same_ring(img.ring_ptr(), target)) throw StructuralError("compose: images must share the target ring");
  }
  std::vector<std::vector<MultiPoly>> powers(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) powers[i].push_back(MultiPoly::constant(target, 1));
  MultiPoly out(target);
  for (const auto& [m, c] : p.terms()) {
    MultiPoly term = MultiPoly::constant(target, c);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      while (powers[i].size() <= m[i]) powers[i].push_back(powers[i].back() * images[i]);
      term = term * powers[i][m[i]];
    }
    out += term;
  }
  return out;
}

MultiPoly change_ring(const MultiPoly& p, const RingPtr& target) {
  if (same_ring(p.ring_ptr(), target)) return MultiPoly(target, p.terms());
  const auto map = ring_map(p.ring(), *target);
  MultiPoly out(target);
  for (const auto& [m, c] : p.terms()) {
    Monomial t(target->size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!map[i]) throw StructuralError("change_ring: target ring lacks variable " + p.ring().name(i));
      t.set(*map[i], m[i]);
    }
    out.add_term(t, c);
  }
  return out;
}

MultiPoly deflate_variable(const MultiPoly& p, std::string_view var, Monomial::Exponent factor) {
  const auto idx = p.ring().index_of(var);
  if (!idx) throw StructuralError("deflate_variable: unknown variable " + std::string(var));
  if (factor == 0) throw DomainError("deflate_variable: zero factor");
  MultiPoly out(p.ring_ptr());
  for (const auto& [m, c] : p.terms()) {
    if (m[*idx] % factor != 0) {
      throw DomainError("deflate_variable: exponent of " + std::string(var) + " not divisible");
    }
    Monomial t = m;
    t.set(*idx, m[*idx] / factor);
    out.add_term(t, c);
  }
  return out;
}

// ------------------------------------------------------------------ parser

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, RingPtr ring) : text_(text), ring_(std::move(ring)) {}

  MultiPoly parse() {
    MultiPoly out(ring_);
    skip_ws();
    if (pos_ == text_.size()) fail("empty polynomial");
    bool first = true;
    while (pos_ < text_.size()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      auto [m, c] = parse_term();
      out.add_term(m, sign * c);
      skip_ws();
    }
    return out;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw StructuralError("polynomial parse error at offset " + std::to_string(pos_) + ": " + why);
  }

  std::pair<Monomial, BigRational> parse_term() {
    Monomial m(ring_->size());
    BigRational c = 1;
    while (true) {
      skip_ws();
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        c *= parse_number();
      } else if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
        const std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        auto idx = ring_->index_of(name);
        if (!idx) fail("unknown variable " + name);
        skip_ws();
        Monomial::Exponent e = 1;
        if (peek() == '^') {
          ++pos_;
          skip_ws();
          e = static_cast<Monomial::Exponent>(parse_unsigned());
        }
        m.set(*idx, m[*idx] + e);
      } else {
        fail("expected a number or a variable");
      }
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        continue;
      }
      return {m, c};
    }
  }

  unsigned long parse_unsigned() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected digits");
    return std::stoul(std::string(text_.substr(start, pos_ - start)));
  }

  BigRational parse_number() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '/') {
      ++pos_;
      const std::size_t dstart = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (dstart == pos_) fail("expected denominator digits");
    }
    return parse_rational(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  RingPtr ring_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(std::string_view text, const RingPtr& ring) { return PolyParser(text, ring).parse(); }

}  // namespace gpisos
