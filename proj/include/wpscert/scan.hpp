#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "wpscert/field.hpp"
#include "wpscert/grading.hpp"

namespace wpscert {

// Point budget shared by the exhaustive finite-field enumerations; chosen so
// a 16^6 chart still fits.
inline constexpr std::uint64_t kDefaultScanBudget = 40'000'000;

// Sparse polynomial with packed exponent keys for scan loops: 6 bits per
// variable, variable 0 in the top bits, so key order is lexicographic order
// and dropping the last variable is a shift.  Coefficients are finite-field
// element indices.
struct PackedPoly {
  std::size_t nvars = 0;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> terms;  // sorted by key

  static PackedPoly from_terms(std::size_t nvars, const std::map<Expo, Elem>& terms);
  static std::uint64_t pack_expo(const Expo& e);
};

// Visits every common zero of the polynomials over F^nvars, coordinates as
// element indices.  Scan order: the last variable is the outermost loop, each
// level running 0..q-1.  The visitor returns false to stop early.  Throws
// BudgetError when q^nvars exceeds the budget.
void for_each_common_zero(const Field& f, std::size_t nvars, const std::vector<PackedPoly>& polys,
                          std::uint64_t budget,
                          const std::function<bool(const std::vector<std::uint64_t>&)>& visit);

}
