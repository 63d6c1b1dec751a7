#include "wpscert/bipoly.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "wpscert/rng.hpp"

namespace wpscert {

namespace {

void require_compatible(const BiPoly& a, const BiPoly& b) {
  if (!a.grading().same_as(b.grading())) throw std::invalid_argument("different gradings");
  if (a.field() != b.field()) throw std::invalid_argument("mixed fields");
}

// Exponent vectors pack into one word when every entry fits 6 bits and there
// are at most 10 variables; variable 0 sits in the top bits so word order is
// lexicographic order.
bool packable(std::size_t nvars, std::int64_t max_expo) {
  return nvars <= 10 && max_expo < 64;
}

std::uint64_t pack(const Expo& e) {
  std::uint64_t key = 0;
  for (std::int32_t v : e) key = key << 6 | static_cast<std::uint32_t>(v);
  return key;
}

Expo unpack(std::uint64_t key, std::size_t nvars) {
  Expo e(nvars);
  for (std::size_t i = nvars; i-- > 0;) {
    e[i] = static_cast<std::int32_t>(key & 63);
    key >>= 6;
  }
  return e;
}

}  // namespace

BiPoly::BiPoly(std::shared_ptr<const GradingMatrix> g, Field f, Bidegree d)
    : g_(std::move(g)), f_(std::move(f)), d_(d) {
  if (!g_) throw std::invalid_argument("null grading");
}

void BiPoly::add_term(const Expo& e, const Elem& c) {
  if (g_->bidegree(e) != d_) throw std::invalid_argument("term bidegree mismatch");
  if (c.tag() != f_.raw()) throw std::invalid_argument("mixed fields");
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

Elem BiPoly::coeff(const Expo& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? f_.zero() : it->second;
}

std::string BiPoly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  // descending lex reads like handwritten polynomials
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (!out.empty()) out += " + ";
    const std::string mono = g_->monomial_str(e);
    if (c.is_one() && mono != "1") {
      out += mono;
      continue;
    }
    std::string cs = c.str();
    if (cs.find('+') != std::string::npos || cs.find('-') != std::string::npos) cs = "(" + cs + ")";
    out += cs;
    if (mono != "1") out += "*" + mono;
  }
  return out;
}

BiPoly operator+(const BiPoly& a, const BiPoly& b) {
  require_compatible(a, b);
  if (a.degree() != b.degree()) {
    // a zero polynomial may be absorbed into any piece
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    throw std::invalid_argument("bidegree mismatch in sum");
  }
  BiPoly out = a;
  for (const auto& [e, c] : b.terms_) out.add_term(e, c);
  return out;
}

BiPoly operator-(const BiPoly& a, const BiPoly& b) {
  return a + scale(b, -b.field().one());
}

BiPoly operator*(const BiPoly& a, const BiPoly& b) {
  require_compatible(a, b);
  const Bidegree d{a.degree().alpha + b.degree().alpha, a.degree().beta + b.degree().beta};
  BiPoly out(a.grading_ptr(), a.field(), d);
  if (a.is_zero() || b.is_zero()) return out;

  const std::size_t nvars = a.grading().var_count();
  std::int64_t max_expo = 0;
  for (const auto& [e, c] : a.terms_)
    for (std::int32_t v : e) max_expo = std::max<std::int64_t>(max_expo, v);
  std::int64_t max_b = 0;
  for (const auto& [e, c] : b.terms_)
    for (std::int32_t v : e) max_b = std::max<std::int64_t>(max_b, v);

  if (packable(nvars, max_expo + max_b)) {
    std::unordered_map<std::uint64_t, Elem> acc;
    acc.reserve(a.term_count() + b.term_count());
    for (const auto& [ea, ca] : a.terms_) {
      const std::uint64_t ka = pack(ea);
      for (const auto& [eb, cb] : b.terms_) {
        const Elem prod = ca * cb;
        if (prod.is_zero()) continue;
        auto [it, fresh] = acc.emplace(ka + pack(eb), prod);
        if (!fresh) it->second = it->second + prod;
      }
    }
    for (const auto& [key, c] : acc) {
      if (c.is_zero()) continue;
      out.terms_.emplace(unpack(key, nvars), c);
    }
    return out;
  }
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Expo e(nvars);
      for (std::size_t i = 0; i < nvars; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  return out;
}

bool operator==(const BiPoly& a, const BiPoly& b) {
  require_compatible(a, b);
  return a.d_ == b.d_ && a.terms_ == b.terms_;
}

BiPoly scale(const BiPoly& a, const Elem& c) {
  BiPoly out(a.grading_ptr(), a.field(), a.degree());
  if (c.is_zero()) return out;
  for (const auto& [e, v] : a.terms()) out.add_term(e, v * c);
  return out;
}

BiPoly pow(const BiPoly& a, int e) {
  if (e < 0) throw std::invalid_argument("negative polynomial power");
  const Bidegree unit{0, 0};
  BiPoly out(a.grading_ptr(), a.field(), unit);
  out.add_term(Expo(a.grading().var_count(), 0), a.field().one());
  BiPoly base = a;
  int n = e;
  while (n > 0) {
    if (n & 1) out = out * base;
    if (n >>= 1) base = base * base;
  }
  return out;
}

Elem evaluate(const BiPoly& a, std::span<const Elem> values) {
  const std::size_t nvars = a.grading().var_count();
  if (values.size() != nvars) throw std::invalid_argument("value tuple length mismatch");
  const Field& f = a.field();
  Elem out = f.zero();
  for (const auto& [e, c] : a.terms()) {
    Elem term = c;
    for (std::size_t i = 0; i < nvars; ++i)
      if (e[i] != 0) term = term * f.pow(values[i], e[i]);
    out = out + term;
  }
  return out;
}

BiPoly lift_to(const BiPoly& a, std::shared_ptr<const GradingMatrix> target) {
  if (!target) throw std::invalid_argument("null grading");
  const GradingMatrix& src = a.grading();
  std::vector<std::size_t> map(src.var_count());
  for (std::size_t i = 0; i < src.var_count(); ++i) map[i] = target->index_of(src.name(i));
  Bidegree d{};
  bool first = true;
  BiPoly out(target, a.field(), Bidegree{0, 0});
  for (const auto& [e, c] : a.terms()) {
    Expo te(target->var_count(), 0);
    for (std::size_t i = 0; i < src.var_count(); ++i) te[map[i]] = e[i];
    if (first) {
      d = target->bidegree(te);
      out = BiPoly(target, a.field(), d);
      first = false;
    }
    out.add_term(te, c);
  }
  return out;
}

RandomPoly random_bipoly(std::shared_ptr<const GradingMatrix> g, const Field& f, Bidegree d,
                         std::uint64_t seed) {
  if (!g) throw std::invalid_argument("null grading");
  const auto basis = g->basis(d);
  RandomPoly out{BiPoly(g, f, d), basis.empty()};
  Rng rng(seed);
  for (const Expo& e : basis) {
    Elem c = f.is_finite() ? f.from_index(rng.below(f.size()))
                           : f.from_int(static_cast<std::int64_t>(rng.below(19)) - 9);
    out.poly.add_term(e, c);
  }
  return out;
}

}  // namespace wpscert
