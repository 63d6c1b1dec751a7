#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace wpscert {

class Field;
class Elem;

namespace detail {

// Shared state of one field.  Instances are interned per (p, k), so a raw
// pointer identifies the field for the whole process lifetime and element tags
// can be compared by address.
struct FieldImpl {
  std::int64_t p = 0;  // 0 marks the rationals
  int k = 1;
  std::uint64_t q = 0;                 // p^k, 0 for the rationals
  std::vector<std::int64_t> defpoly;   // c0..ck of the monic defining poly, k >= 2 only
  bool tabled = false;
  std::vector<std::uint16_t> addt;     // q*q entries when tabled
  std::vector<std::uint16_t> mult;     // q*q entries when tabled
  std::vector<std::uint16_t> negt;     // q entries when tabled
  std::vector<std::uint16_t> invt;     // q entries when tabled, invt[0] = 0 sentinel

  bool finite() const { return p != 0; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    return tabled ? addt[a * q + b] : add_slow(a, b);
  }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return tabled ? mult[a * q + b] : mul_slow(a, b);
  }
  std::uint64_t neg(std::uint64_t a) const { return tabled ? negt[a] : neg_slow(a); }
  std::uint64_t inv(std::uint64_t a) const {
    if (a == 0) throw_div_zero();
    return tabled ? invt[a] : inv_slow(a);
  }
  [[noreturn]] static void throw_div_zero();
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return add(a, neg(b)); }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;

  std::uint64_t add_slow(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t mul_slow(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t neg_slow(std::uint64_t a) const;
  std::uint64_t inv_slow(std::uint64_t a) const;  // throws on 0

  std::string elem_str(std::uint64_t a) const;
};

const FieldImpl* require_same(const Elem& a, const Elem& b);

}

// One element of Q or of F_{p^k}.  Defaults to an unset state that throws on
// use; every constructed value remembers its field, and mixing fields in any
// operation is an error.
class Elem {
public:
  Elem() = default;

  bool valid() const { return fi_ != nullptr; }
  bool is_zero() const;
  bool is_one() const;
  Field field() const;
  std::string str() const;

  // Finite-field index Sum c_i p^i of the coordinate vector; error for Q.
  std::uint64_t index() const;
  // Exact value as a rational; error for finite fields.
  const mpq_class& rational() const;
  // Interned identity of the element's field; null when unset.
  const detail::FieldImpl* tag() const { return fi_; }

  friend Elem operator+(const Elem& a, const Elem& b);
  friend Elem operator-(const Elem& a, const Elem& b);
  friend Elem operator*(const Elem& a, const Elem& b);
  friend Elem operator/(const Elem& a, const Elem& b);
  friend Elem operator-(const Elem& a);
  friend bool operator==(const Elem& a, const Elem& b);
  friend bool operator!=(const Elem& a, const Elem& b) { return !(a == b); }

private:
  friend class Field;
  friend const detail::FieldImpl* detail::require_same(const Elem&, const Elem&);

  static Elem make_idx(const detail::FieldImpl* f, std::uint64_t i) {
    Elem e;
    e.fi_ = f;
    e.idx_ = i;
    return e;
  }
  static Elem make_rat(const detail::FieldImpl* f, mpq_class r) {
    Elem e;
    e.fi_ = f;
    e.rat_ = std::move(r);
    return e;
  }

  const detail::FieldImpl* fi_ = nullptr;
  std::uint64_t idx_ = 0;
  mpq_class rat_;
};

// Value handle on an interned field.  Copies are cheap and compare equal when
// they denote the same field.
class Field {
public:
  Field() = default;

  static Field rationals();
  // F_{p^k}: p prime, 1 <= k <= 4.  The defining polynomial for k >= 2 is the
  // first irreducible monic in ascending base-p integer order of its
  // coefficient vector, so the construction is deterministic.
  static Field finite(std::int64_t p, int k = 1);

  bool valid() const { return impl_ != nullptr; }
  bool is_finite() const { return impl()->finite(); }
  std::int64_t characteristic() const { return impl()->p; }
  int extension_degree() const { return impl()->k; }
  std::uint64_t size() const;                         // p^k; error for Q
  std::vector<std::int64_t> modulus() const;          // c0..ck for k >= 2, else empty
  std::string name() const;                           // "QQ", "F_9", ...

  Elem zero() const;
  Elem one() const;
  Elem from_int(std::int64_t v) const;
  Elem from_fraction(std::int64_t num, std::int64_t den) const;  // Q only
  Elem from_index(std::uint64_t i) const;                        // finite only
  std::vector<Elem> enumerate() const;  // finite only, index order 0..q-1

  Elem pow(const Elem& a, std::int64_t e) const;  // negative e inverts a unit
  Elem inv(const Elem& a) const;

  bool operator==(const Field& o) const { return impl_.get() == o.impl_.get(); }
  bool operator!=(const Field& o) const { return !(*this == o); }

  // Index-level fast path for scan loops over finite fields.
  std::uint64_t idx_add(std::uint64_t a, std::uint64_t b) const { return impl()->add(a, b); }
  std::uint64_t idx_mul(std::uint64_t a, std::uint64_t b) const { return impl()->mul(a, b); }
  std::uint64_t idx_neg(std::uint64_t a) const { return impl()->neg(a); }
  std::uint64_t idx_inv(std::uint64_t a) const { return impl()->inv(a); }
  std::uint64_t idx_pow(std::uint64_t a, std::uint64_t e) const { return impl()->pow(a, e); }
  const detail::FieldImpl* raw() const { return impl(); }

private:
  friend class Elem;
  explicit Field(std::shared_ptr<const detail::FieldImpl> i) : impl_(std::move(i)) {}
  const detail::FieldImpl* impl() const;
  std::shared_ptr<const detail::FieldImpl> impl_;
};

// Dense matrix over one field.  Row-major, exact entries.
class DenseMatrix {
public:
  DenseMatrix(Field f, std::size_t rows, std::size_t cols);
  // Builds from explicit rows; ragged rows or entries from another field are
  // errors.
  DenseMatrix(Field f, const std::vector<std::vector<Elem>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Field& field() const { return f_; }

  Elem& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Elem& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, const Elem& v);

private:
  void set_check(const Elem& v) const;
  Field f_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Elem> data_;
};

struct RankInfo {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_rows;  // original row index per pivot, in pivot order
  std::vector<std::size_t> pivot_cols;
};

std::size_t mat_rank(const DenseMatrix& m);
RankInfo mat_rank_info(const DenseMatrix& m);
// Right kernel basis in reduced echelon form, one vector per free column,
// ascending free-column order.  Deterministic.
std::vector<std::vector<Elem>> mat_kernel(const DenseMatrix& m);

// Rank accumulator over a finite field, rows fed as index vectors.  Keeps a
// reduced row basis, so feeding can stop as soon as the rank hits a target.
class IncrementalRank {
public:
  IncrementalRank(Field f, std::size_t cols);
  bool add_row(std::span<const std::uint32_t> row);  // true when the rank grew
  std::size_t rank() const { return rows_.size(); }
  bool full() const { return rows_.size() == cols_; }

private:
  Field f_;
  const detail::FieldImpl* fi_;
  std::size_t cols_;
  std::vector<std::vector<std::uint32_t>> rows_;  // normalized to leading 1
  std::vector<std::size_t> lead_;
};

bool is_prime(std::int64_t n);

}
