#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>

#include "wpscert/field.hpp"
#include "wpscert/grading.hpp"

namespace wpscert {

// Homogeneous element of a bigraded Cox ring: sparse term map plus a declared
// bidegree every term must match.  The zero polynomial of any bidegree has an
// empty term map.
class BiPoly {
public:
  BiPoly(std::shared_ptr<const GradingMatrix> g, Field f, Bidegree d);

  const GradingMatrix& grading() const { return *g_; }
  const std::shared_ptr<const GradingMatrix>& grading_ptr() const { return g_; }
  const Field& field() const { return f_; }
  Bidegree degree() const { return d_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Expo, Elem>& terms() const { return terms_; }

  // Accumulates c on the monomial e; drops the term when the sum cancels.
  // Errors: wrong bidegree, element from another field.
  void add_term(const Expo& e, const Elem& c);
  Elem coeff(const Expo& e) const;  // zero for absent monomials

  std::string str() const;

  friend BiPoly operator+(const BiPoly& a, const BiPoly& b);
  friend BiPoly operator-(const BiPoly& a, const BiPoly& b);
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b);
  friend bool operator==(const BiPoly& a, const BiPoly& b);
  friend bool operator!=(const BiPoly& a, const BiPoly& b) { return !(a == b); }

private:
  std::shared_ptr<const GradingMatrix> g_;
  Field f_;
  Bidegree d_;
  std::map<Expo, Elem> terms_;
};

BiPoly scale(const BiPoly& a, const Elem& c);
BiPoly pow(const BiPoly& a, int e);  // e >= 0

// Value at a full affine coordinate tuple (one entry per variable).
Elem evaluate(const BiPoly& a, std::span<const Elem> values);

// Re-expresses a in a ring with more variables, matching variables by name.
// Errors: a uses a variable the target lacks.
BiPoly lift_to(const BiPoly& a, std::shared_ptr<const GradingMatrix> target);

struct RandomPoly {
  BiPoly poly;
  bool empty_basis = false;  // the requested piece had no monomials at all
};

// Uniform coefficients on every basis monomial of the piece; same seed, same
// polynomial.  Over Q coefficients are drawn from small integers.
RandomPoly random_bipoly(std::shared_ptr<const GradingMatrix> g, const Field& f, Bidegree d,
                         std::uint64_t seed);

}
