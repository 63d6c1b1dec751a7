#include "wpscert/field.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace wpscert {

namespace {

constexpr std::uint64_t kTableLimit = 1024;  // build uint16 tables up to this q

using Coeffs = std::vector<std::int64_t>;  // poly over F_p, c[i] coeff of t^i

std::int64_t mod_p(std::int64_t v, std::int64_t p) {
  v %= p;
  return v < 0 ? v + p : v;
}

void trim(Coeffs& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

// Remainder of a by b over F_p, b monic.
Coeffs poly_rem(Coeffs a, const Coeffs& b, std::int64_t p) {
  trim(a);
  const std::size_t db = b.size() - 1;
  while (a.size() >= b.size()) {
    const std::int64_t lead = a.back();
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i < b.size(); ++i)
      a[shift + i] = mod_p(a[shift + i] - lead * b[i], p);
    trim(a);
  }
  return a;
}

bool poly_divides(const Coeffs& g, const Coeffs& f, std::int64_t p) {
  return poly_rem(f, g, p).empty();
}

// Irreducibility over F_p by trial division with every monic divisor of degree
// up to deg(f)/2.  Fine at the supported sizes.
bool poly_irreducible(const Coeffs& f, std::int64_t p) {
  const std::size_t deg = f.size() - 1;
  for (std::size_t d = 1; 2 * d <= deg; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= static_cast<std::uint64_t>(p);
    for (std::uint64_t v = 0; v < count; ++v) {
      Coeffs g(d + 1, 0);
      std::uint64_t rest = v;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = static_cast<std::int64_t>(rest % static_cast<std::uint64_t>(p));
        rest /= static_cast<std::uint64_t>(p);
      }
      g[d] = 1;
      if (poly_divides(g, f, p)) return false;
    }
  }
  return true;
}

Coeffs find_defpoly(std::int64_t p, int k) {
  const std::uint64_t up = [&] {
    std::uint64_t c = 1;
    for (int i = 0; i < k; ++i) c *= static_cast<std::uint64_t>(p);
    return c;
  }();
  for (std::uint64_t v = 0; v < up; ++v) {
    Coeffs f(static_cast<std::size_t>(k) + 1, 0);
    std::uint64_t rest = v;
    for (int i = 0; i < k; ++i) {
      f[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(rest % static_cast<std::uint64_t>(p));
      rest /= static_cast<std::uint64_t>(p);
    }
    f[static_cast<std::size_t>(k)] = 1;
    if (poly_irreducible(f, p)) return f;
  }
  throw std::logic_error("no irreducible polynomial found");  // unreachable
}

std::shared_ptr<const detail::FieldImpl> make_impl(std::int64_t p, int k) {
  auto impl = std::make_shared<detail::FieldImpl>();
  impl->p = p;
  impl->k = k;
  std::uint64_t q = 1;
  for (int i = 0; i < k; ++i) {
    if (q > (1ULL << 62) / static_cast<std::uint64_t>(p))
      throw std::invalid_argument("field too large");
    q *= static_cast<std::uint64_t>(p);
  }
  impl->q = q;
  if (k >= 2) {
    if (p > 10000) throw std::invalid_argument("extension fields supported for p <= 10000");
    impl->defpoly = find_defpoly(p, k);
  }
  if (q <= kTableLimit) {
    impl->addt.resize(q * q);
    impl->mult.resize(q * q);
    impl->negt.resize(q);
    impl->invt.resize(q);
    for (std::uint64_t a = 0; a < q; ++a) {
      impl->negt[a] = static_cast<std::uint16_t>(impl->neg_slow(a));
      impl->invt[a] = a == 0 ? 0 : static_cast<std::uint16_t>(impl->inv_slow(a));
      for (std::uint64_t b = 0; b < q; ++b) {
        impl->addt[a * q + b] = static_cast<std::uint16_t>(impl->add_slow(a, b));
        impl->mult[a * q + b] = static_cast<std::uint16_t>(impl->mul_slow(a, b));
      }
    }
    impl->tabled = true;
  }
  return impl;
}

std::shared_ptr<const detail::FieldImpl> rational_impl() {
  static const std::shared_ptr<const detail::FieldImpl> impl = std::make_shared<detail::FieldImpl>();
  return impl;
}

std::shared_ptr<const detail::FieldImpl> interned(std::int64_t p, int k) {
  static std::mutex mu;
  static std::map<std::pair<std::int64_t, int>, std::shared_ptr<const detail::FieldImpl>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{p, k}];
  if (!slot) slot = make_impl(p, k);
  return slot;
}

}  // namespace

namespace detail {

std::uint64_t FieldImpl::add_slow(std::uint64_t a, std::uint64_t b) const {
  if (k == 1) return (a + b) % static_cast<std::uint64_t>(p);
  std::uint64_t out = 0, mul = 1;
  const std::uint64_t up = static_cast<std::uint64_t>(p);
  for (int i = 0; i < k; ++i) {
    out += ((a % up + b % up) % up) * mul;
    a /= up;
    b /= up;
    mul *= up;
  }
  return out;
}

std::uint64_t FieldImpl::mul_slow(std::uint64_t a, std::uint64_t b) const {
  const std::uint64_t up = static_cast<std::uint64_t>(p);
  if (k == 1) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % up);
  }
  // Schoolbook product of the coordinate polynomials, reduced by defpoly.
  std::int64_t ca[4] = {0, 0, 0, 0}, cb[4] = {0, 0, 0, 0};
  std::int64_t prod[7] = {0, 0, 0, 0, 0, 0, 0};
  std::uint64_t ta = a, tb = b;
  for (int i = 0; i < k; ++i) {
    ca[i] = static_cast<std::int64_t>(ta % up);
    cb[i] = static_cast<std::int64_t>(tb % up);
    ta /= up;
    tb /= up;
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) prod[i + j] = mod_p(prod[i + j] + ca[i] * cb[j], p);
  for (int d = 2 * k - 2; d >= k; --d) {
    const std::int64_t lead = prod[d];
    if (lead == 0) continue;
    prod[d] = 0;
    for (int i = 0; i < k; ++i)
      prod[d - k + i] = mod_p(prod[d - k + i] - lead * defpoly[static_cast<std::size_t>(i)], p);
  }
  std::uint64_t out = 0, mul = 1;
  for (int i = 0; i < k; ++i) {
    out += static_cast<std::uint64_t>(prod[i]) * mul;
    mul *= up;
  }
  return out;
}

std::uint64_t FieldImpl::neg_slow(std::uint64_t a) const {
  if (k == 1) return a == 0 ? 0 : static_cast<std::uint64_t>(p) - a;
  std::uint64_t out = 0, mul = 1;
  const std::uint64_t up = static_cast<std::uint64_t>(p);
  for (int i = 0; i < k; ++i) {
    const std::uint64_t d = a % up;
    out += (d == 0 ? 0 : up - d) * mul;
    a /= up;
    mul *= up;
  }
  return out;
}

std::uint64_t FieldImpl::pow(std::uint64_t a, std::uint64_t e) const {
  std::uint64_t out = 1;  // index of 1 is 1 in every finite field here
  std::uint64_t base = a;
  while (e > 0) {
    if (e & 1) out = mul(out, base);
    base = mul(base, base);
    e >>= 1;
  }
  return out;
}

std::uint64_t FieldImpl::inv_slow(std::uint64_t a) const {
  if (a == 0) throw_div_zero();
  return pow(a, q - 2);
}

void FieldImpl::throw_div_zero() { throw std::domain_error("division by zero"); }

std::string FieldImpl::elem_str(std::uint64_t a) const {
  if (k == 1) return std::to_string(a);
  if (a == 0) return "0";
  const std::uint64_t up = static_cast<std::uint64_t>(p);
  std::string out;
  std::uint64_t rest = a;
  for (int i = 0; i < k && rest != 0; ++i) {
    const std::uint64_t c = rest % up;
    rest /= up;
    if (c == 0) continue;
    std::string term;
    if (i == 0) {
      term = std::to_string(c);
    } else {
      if (c != 1) term = std::to_string(c) + "*";
      term += "t";
      if (i > 1) term += "^" + std::to_string(i);
    }
    if (out.empty())
      out = term;
    else
      out = term + "+" + out;  // higher powers first
  }
  return out;
}

const FieldImpl* require_same(const Elem& a, const Elem& b) {
  if (a.fi_ == nullptr || b.fi_ == nullptr) throw std::invalid_argument("unset field element");
  if (a.fi_ != b.fi_) throw std::invalid_argument("mixed fields");
  return a.fi_;
}

}  // namespace detail

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n == d) return true;
    if (n % d == 0) return false;
  }
  // Deterministic Miller-Rabin for 64-bit with the standard witness set.
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  std::uint64_t d = un - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  auto mulmod = [un](std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % un);
  };
  auto powmod = [&](std::uint64_t a, std::uint64_t e) {
    std::uint64_t out = 1;
    while (e > 0) {
      if (e & 1) out = mulmod(out, a);
      a = mulmod(a, a);
      e >>= 1;
    }
    return out;
  };
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a % un, d);
    if (x == 1 || x == un - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x);
      if (x == un - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

// ---- Field ----

Field Field::rationals() { return Field(rational_impl()); }

Field Field::finite(std::int64_t p, int k) {
  if (!is_prime(p)) throw std::invalid_argument("characteristic must be prime");
  if (k < 1 || k > 4) throw std::invalid_argument("extension degree must be in [1,4]");
  return Field(interned(p, k));
}

const detail::FieldImpl* Field::impl() const {
  if (!impl_) throw std::invalid_argument("unset field");
  return impl_.get();
}

std::uint64_t Field::size() const {
  if (!is_finite()) throw std::invalid_argument("infinite field has no size");
  return impl()->q;
}

std::vector<std::int64_t> Field::modulus() const { return impl()->defpoly; }

std::string Field::name() const {
  if (!is_finite()) return "QQ";
  return "F_" + std::to_string(impl()->q);
}

Elem Field::zero() const {
  const auto* f = impl();
  return f->finite() ? Elem::make_idx(f, 0) : Elem::make_rat(f, mpq_class(0));
}

Elem Field::one() const {
  const auto* f = impl();
  return f->finite() ? Elem::make_idx(f, 1) : Elem::make_rat(f, mpq_class(1));
}

Elem Field::from_int(std::int64_t v) const {
  const auto* f = impl();
  if (!f->finite()) return Elem::make_rat(f, mpq_class(static_cast<long>(v)));
  const std::int64_t r = mod_p(v, f->p);
  return Elem::make_idx(f, static_cast<std::uint64_t>(r));
}

Elem Field::from_fraction(std::int64_t num, std::int64_t den) const {
  const auto* f = impl();
  if (f->finite()) throw std::invalid_argument("from_fraction is for the rationals");
  if (den == 0) throw std::domain_error("division by zero");
  mpq_class r(static_cast<long>(num), static_cast<long>(den));
  r.canonicalize();
  return Elem::make_rat(f, std::move(r));
}

Elem Field::from_index(std::uint64_t i) const {
  const auto* f = impl();
  if (!f->finite()) throw std::invalid_argument("from_index is for finite fields");
  if (i >= f->q) throw std::invalid_argument("element index out of range");
  return Elem::make_idx(f, i);
}

std::vector<Elem> Field::enumerate() const {
  const auto* f = impl();
  if (!f->finite()) throw std::invalid_argument("cannot enumerate an infinite field");
  std::vector<Elem> out;
  out.reserve(f->q);
  for (std::uint64_t i = 0; i < f->q; ++i) out.push_back(Elem::make_idx(f, i));
  return out;
}

Elem Field::inv(const Elem& a) const {
  const auto* f = impl();
  if (a.fi_ != f) throw std::invalid_argument("mixed fields");
  if (f->finite()) return Elem::make_idx(f, f->inv(a.idx_));
  if (a.rat_ == 0) throw std::domain_error("division by zero");
  return Elem::make_rat(f, 1 / a.rat_);
}

Elem Field::pow(const Elem& a, std::int64_t e) const {
  const auto* f = impl();
  if (a.fi_ != f) throw std::invalid_argument("mixed fields");
  if (e < 0) return pow(inv(a), -e);
  if (f->finite()) return Elem::make_idx(f, f->pow(a.idx_, static_cast<std::uint64_t>(e)));
  mpq_class out(1), base = a.rat_;
  std::int64_t n = e;
  while (n > 0) {
    if (n & 1) out *= base;
    base *= base;
    n >>= 1;
  }
  return Elem::make_rat(f, std::move(out));
}

// ---- Elem ----

bool Elem::is_zero() const {
  if (!fi_) throw std::invalid_argument("unset field element");
  return fi_->finite() ? idx_ == 0 : rat_ == 0;
}

bool Elem::is_one() const {
  if (!fi_) throw std::invalid_argument("unset field element");
  return fi_->finite() ? idx_ == 1 : rat_ == 1;
}

Field Elem::field() const {
  if (!fi_) throw std::invalid_argument("unset field element");
  if (!fi_->finite()) return Field::rationals();
  return Field::finite(fi_->p, fi_->k);
}

std::string Elem::str() const {
  if (!fi_) throw std::invalid_argument("unset field element");
  if (fi_->finite()) return fi_->elem_str(idx_);
  return rat_.get_str();
}

std::uint64_t Elem::index() const {
  if (!fi_ || !fi_->finite()) throw std::invalid_argument("index is for finite-field elements");
  return idx_;
}

const mpq_class& Elem::rational() const {
  if (!fi_ || fi_->finite()) throw std::invalid_argument("rational is for elements of QQ");
  return rat_;
}

Elem operator+(const Elem& a, const Elem& b) {
  const auto* f = detail::require_same(a, b);
  if (f->finite()) return Elem::make_idx(f, f->add(a.idx_, b.idx_));
  return Elem::make_rat(f, a.rat_ + b.rat_);
}

Elem operator-(const Elem& a, const Elem& b) {
  const auto* f = detail::require_same(a, b);
  if (f->finite()) return Elem::make_idx(f, f->sub(a.idx_, b.idx_));
  return Elem::make_rat(f, a.rat_ - b.rat_);
}

Elem operator*(const Elem& a, const Elem& b) {
  const auto* f = detail::require_same(a, b);
  if (f->finite()) return Elem::make_idx(f, f->mul(a.idx_, b.idx_));
  return Elem::make_rat(f, a.rat_ * b.rat_);
}

Elem operator/(const Elem& a, const Elem& b) {
  const auto* f = detail::require_same(a, b);
  if (f->finite()) return Elem::make_idx(f, f->mul(a.idx_, f->inv(b.idx_)));
  if (b.rat_ == 0) throw std::domain_error("division by zero");
  return Elem::make_rat(f, a.rat_ / b.rat_);
}

Elem operator-(const Elem& a) {
  if (!a.fi_) throw std::invalid_argument("unset field element");
  if (a.fi_->finite()) return Elem::make_idx(a.fi_, a.fi_->neg(a.idx_));
  return Elem::make_rat(a.fi_, -a.rat_);
}

bool operator==(const Elem& a, const Elem& b) {
  const auto* f = detail::require_same(a, b);
  return f->finite() ? a.idx_ == b.idx_ : a.rat_ == b.rat_;
}

// ---- DenseMatrix ----

DenseMatrix::DenseMatrix(Field f, std::size_t rows, std::size_t cols)
    : f_(std::move(f)), rows_(rows), cols_(cols), data_(rows * cols, f_.zero()) {}

DenseMatrix::DenseMatrix(Field f, const std::vector<std::vector<Elem>>& rows)
    : f_(std::move(f)), rows_(rows.size()), cols_(rows.empty() ? 0 : rows[0].size()) {
  for (const auto& r : rows)
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix rows");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows)
    for (const auto& e : r) {
      set_check(e);
      data_.push_back(e);
    }
}

void DenseMatrix::set_check(const Elem& v) const {
  if (!v.valid()) throw std::invalid_argument("unset field element");
  if (v.tag() != f_.raw()) throw std::invalid_argument("mixed fields");
}

void DenseMatrix::set(std::size_t r, std::size_t c, const Elem& v) {
  set_check(v);
  data_[r * cols_ + c] = v;
}

namespace {

// Row echelon reduction in place; returns pivot bookkeeping.  First nonzero
// entry is the pivot (exact fields need no magnitude pivoting).
RankInfo eliminate(DenseMatrix& m) {
  RankInfo info;
  const std::size_t nr = m.rows(), nc = m.cols();
  std::vector<std::size_t> rowidx(nr);
  for (std::size_t i = 0; i < nr; ++i) rowidx[i] = i;
  std::size_t row = 0;
  for (std::size_t col = 0; col < nc && row < nr; ++col) {
    std::size_t piv = nr;
    for (std::size_t r = row; r < nr; ++r) {
      if (!m.at(r, col).is_zero()) {
        piv = r;
        break;
      }
    }
    if (piv == nr) continue;
    if (piv != row) {
      for (std::size_t c = 0; c < nc; ++c) std::swap(m.at(piv, c), m.at(row, c));
      std::swap(rowidx[piv], rowidx[row]);
    }
    const Elem inv = m.field().inv(m.at(row, col));
    for (std::size_t c = col; c < nc; ++c) m.at(row, c) = m.at(row, c) * inv;
    for (std::size_t r = 0; r < nr; ++r) {
      if (r == row) continue;
      const Elem& factor = m.at(r, col);
      if (factor.is_zero()) continue;
      const Elem fcopy = factor;
      for (std::size_t c = col; c < nc; ++c) m.at(r, c) = m.at(r, c) - fcopy * m.at(row, c);
    }
    info.pivot_rows.push_back(rowidx[row]);
    info.pivot_cols.push_back(col);
    ++row;
  }
  info.rank = info.pivot_cols.size();
  return info;
}

}  // namespace

std::size_t mat_rank(const DenseMatrix& m) {
  DenseMatrix work = m;
  return eliminate(work).rank;
}

RankInfo mat_rank_info(const DenseMatrix& m) {
  DenseMatrix work = m;
  return eliminate(work);
}

std::vector<std::vector<Elem>> mat_kernel(const DenseMatrix& m) {
  DenseMatrix work = m;
  const RankInfo info = eliminate(work);
  const std::size_t nc = m.cols();
  std::vector<bool> is_pivot(nc, false);
  for (std::size_t c : info.pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<Elem>> basis;
  for (std::size_t free = 0; free < nc; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Elem> v(nc, m.field().zero());
    v[free] = m.field().one();
    for (std::size_t i = 0; i < info.pivot_cols.size(); ++i)
      v[info.pivot_cols[i]] = -work.at(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---- IncrementalRank ----

IncrementalRank::IncrementalRank(Field f, std::size_t cols) : f_(std::move(f)), cols_(cols) {
  if (!f_.is_finite()) throw std::invalid_argument("IncrementalRank needs a finite field");
  fi_ = f_.raw();
}

bool IncrementalRank::add_row(std::span<const std::uint32_t> row) {
  if (row.size() != cols_) throw std::invalid_argument("row length mismatch");
  std::vector<std::uint32_t> r(row.begin(), row.end());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const std::size_t L = lead_[i];
    const std::uint32_t c = r[L];
    if (c == 0) continue;
    const std::uint64_t nc = fi_->neg(c);
    const auto& base = rows_[i];
    for (std::size_t j = L; j < cols_; ++j)
      r[j] = static_cast<std::uint32_t>(fi_->add(r[j], fi_->mul(nc, base[j])));
  }
  std::size_t L = cols_;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (r[j] != 0) {
      L = j;
      break;
    }
  }
  if (L == cols_) return false;
  const std::uint64_t inv = fi_->inv(r[L]);
  for (std::size_t j = L; j < cols_; ++j)
    r[j] = static_cast<std::uint32_t>(fi_->mul(r[j], inv));
  // Keep stored rows ordered by leading column so reduction stays one pass.
  const auto pos = std::lower_bound(lead_.begin(), lead_.end(), L) - lead_.begin();
  lead_.insert(lead_.begin() + pos, L);
  rows_.insert(rows_.begin() + pos, std::move(r));
  return true;
}

}  // namespace wpscert
