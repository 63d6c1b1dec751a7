#include "wpscert/grading.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace wpscert {

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // out holds C(n-k+i-1, i-1), so out*(n-k+i) is divisible by i
    if (out > std::numeric_limits<std::uint64_t>::max() / (n - k + i))
      throw std::overflow_error("binomial overflow");
    out = out * (n - k + i) / i;
  }
  return out;
}

GradingMatrix::GradingMatrix(std::vector<std::string> names, std::vector<std::int64_t> row1,
                             std::vector<std::int64_t> row2, std::size_t base_count)
    : names_(std::move(names)), row1_(std::move(row1)), row2_(std::move(row2)),
      base_count_(base_count) {
  const std::size_t n = names_.size();
  if (n == 0 || row1_.size() != n || row2_.size() != n)
    throw std::invalid_argument("grading rows must match the variable list");
  if (base_count_ == 0 || base_count_ >= n)
    throw std::invalid_argument("need at least one base and one fiber variable");
  std::set<std::string> seen(names_.begin(), names_.end());
  if (seen.size() != n) throw std::invalid_argument("duplicate variable name");
  for (std::size_t i = 0; i < base_count_; ++i)
    if (row1_[i] != 1 || row2_[i] != 0)
      throw std::invalid_argument("base variables must have column (1,0)");
  for (std::size_t i = base_count_; i < n; ++i)
    if (row2_[i] < 1) throw std::invalid_argument("fiber weights must be positive");
}

std::size_t GradingMatrix::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::invalid_argument("unknown variable: " + name);
  return static_cast<std::size_t>(it - names_.begin());
}

bool GradingMatrix::has_var(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

void GradingMatrix::check_expo(const Expo& e) const {
  if (e.size() != names_.size()) throw std::invalid_argument("exponent vector length mismatch");
  for (std::int32_t v : e)
    if (v < 0) throw std::invalid_argument("negative exponent");
}

Bidegree GradingMatrix::bidegree(const Expo& e) const {
  check_expo(e);
  Bidegree d;
  for (std::size_t i = 0; i < e.size(); ++i) {
    d.alpha += row1_[i] * e[i];
    d.beta += row2_[i] * e[i];
  }
  return d;
}

namespace {

// Compositions of total into the first `vars` slots of out, reported via cb.
template <typename Cb>
void compositions(std::int64_t total, std::size_t vars, Expo& out, std::size_t at, Cb&& cb) {
  if (vars == 1) {
    out[at] = static_cast<std::int32_t>(total);
    cb();
    return;
  }
  for (std::int64_t v = 0; v <= total; ++v) {
    out[at] = static_cast<std::int32_t>(v);
    compositions(total - v, vars - 1, out, at + 1, cb);
  }
  out[at] = 0;
}

}  // namespace

std::vector<Expo> GradingMatrix::basis(const Bidegree& d) const {
  std::vector<Expo> out;
  const std::size_t n = var_count();
  Expo e(n, 0);
  // walk fiber exponents with weighted degree exactly beta, then fill the base
  // block with every monomial of the forced degree
  auto walk = [&](auto&& self, std::size_t j, std::int64_t beta_left) -> void {
    if (j == n) {
      if (beta_left != 0) return;
      std::int64_t alpha_fiber = 0;
      for (std::size_t i = base_count_; i < n; ++i) alpha_fiber += row1_[i] * e[i];
      const std::int64_t d0 = d.alpha - alpha_fiber;
      if (d0 < 0) return;
      compositions(d0, base_count_, e, 0, [&] { out.push_back(e); });
      return;
    }
    const std::int64_t w = row2_[j];
    for (std::int64_t v = 0; v * w <= beta_left; ++v) {
      e[j] = static_cast<std::int32_t>(v);
      self(self, j + 1, beta_left - v * w);
    }
    e[j] = 0;
  };
  if (d.beta >= 0) walk(walk, base_count_, d.beta);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t GradingMatrix::basis_size(const Bidegree& d) const {
  if (d.beta < 0) return 0;
  const std::size_t n = var_count();
  Expo e(n, 0);
  std::uint64_t count = 0;
  auto walk = [&](auto&& self, std::size_t j, std::int64_t beta_left) -> void {
    if (j == n) {
      if (beta_left != 0) return;
      std::int64_t alpha_fiber = 0;
      for (std::size_t i = base_count_; i < n; ++i) alpha_fiber += row1_[i] * e[i];
      const std::int64_t d0 = d.alpha - alpha_fiber;
      if (d0 < 0) return;
      count += binom(static_cast<std::uint64_t>(d0) + base_count_ - 1, base_count_ - 1);
      return;
    }
    const std::int64_t w = row2_[j];
    for (std::int64_t v = 0; v * w <= beta_left; ++v) {
      e[j] = static_cast<std::int32_t>(v);
      self(self, j + 1, beta_left - v * w);
    }
    e[j] = 0;
  };
  walk(walk, base_count_, d.beta);
  return count;
}

std::string GradingMatrix::monomial_str(const Expo& e) const {
  check_expo(e);
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += names_[i];
    if (e[i] > 1) out += "^" + std::to_string(e[i]);
  }
  return out.empty() ? "1" : out;
}

}  // namespace wpscert
