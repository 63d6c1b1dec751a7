#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wpscert {

// Exponent vector, one entry per Cox-ring variable.
using Expo = std::vector<std::int32_t>;

struct Bidegree {
  std::int64_t alpha = 0;
  std::int64_t beta = 0;

  bool operator==(const Bidegree&) const = default;
  bool operator<(const Bidegree& o) const {
    return alpha != o.alpha ? alpha < o.alpha : beta < o.beta;
  }
  std::string str() const {
    return "(" + std::to_string(alpha) + "," + std::to_string(beta) + ")";
  }
};

std::uint64_t binom(std::uint64_t n, std::uint64_t k);

// Two-row weight matrix of a projective-bundle Cox ring.  The first
// base_count variables form the base block with column (1, 0); every fiber
// column has a positive second-row weight.  Columns are fixed at construction,
// so variable indices are stable identifiers.
class GradingMatrix {
public:
  GradingMatrix(std::vector<std::string> names, std::vector<std::int64_t> row1,
                std::vector<std::int64_t> row2, std::size_t base_count);

  std::size_t var_count() const { return names_.size(); }
  std::size_t base_count() const { return base_count_; }
  std::size_t fiber_count() const { return names_.size() - base_count_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  std::int64_t row1(std::size_t i) const { return row1_[i]; }
  std::int64_t row2(std::size_t i) const { return row2_[i]; }
  std::size_t index_of(const std::string& name) const;  // error when absent
  bool has_var(const std::string& name) const;

  // Errors: wrong exponent length, negative exponent.
  Bidegree bidegree(const Expo& e) const;

  // All monomials of the given bidegree, ascending lexicographic in the
  // exponent vector.  Empty result for an empty piece.
  std::vector<Expo> basis(const Bidegree& d) const;
  // Dimension of the piece, counted without materializing it.
  std::uint64_t basis_size(const Bidegree& d) const;

  std::string monomial_str(const Expo& e) const;  // "u0^2*x1*y^3", constant is "1"

  bool same_as(const GradingMatrix& o) const {
    return names_ == o.names_ && row1_ == o.row1_ && row2_ == o.row2_ &&
           base_count_ == o.base_count_;
  }

private:
  void check_expo(const Expo& e) const;
  std::vector<std::string> names_;
  std::vector<std::int64_t> row1_, row2_;
  std::size_t base_count_;
};

}
