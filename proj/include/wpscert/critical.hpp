#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpscert/bundle.hpp"
#include "wpscert/scan.hpp"

namespace wpscert {

// Terms of a local polynomial around a chosen center, split by total degree:
// constant, linear form, quadratic form, and the degree >= 3 tail truncated
// at `order`.  Reassembling the pieces reproduces the truncated Taylor
// expansion exactly.
class LocalExpansion {
public:
  LocalExpansion(const LocalPoly& p, std::span<const Elem> center, int order = 5);

  const Field& field() const { return f_; }
  std::size_t nvars() const { return n_; }
  int order() const { return order_; }

  const Elem& alpha() const { return alpha_; }
  const std::vector<Elem>& linear() const { return linear_; }
  Elem quad(std::size_t i, std::size_t j) const;  // coefficient of x_i x_j
  const std::map<Expo, Elem>& higher() const { return higher_; }

  bool is_critical() const;  // linear part identically zero
  std::map<Expo, Elem> terms() const;

  // Hessian M with M_ii = 2 q_ii, M_ij = q_ij, and the polar bilinear form
  // (same off-diagonal, zero diagonal; the char-2 replacement).
  DenseMatrix hessian() const;
  DenseMatrix polar_form() const;
  Elem quad_value(std::span<const Elem> v) const;

private:
  Field f_;
  std::size_t n_;
  int order_;
  Elem alpha_;
  std::vector<Elem> linear_;
  std::vector<Elem> quad_;  // upper triangle, row-major
  std::map<Expo, Elem> higher_;
};

enum class AdmissStatus { NOT_CRITICAL, ADMISSIBLE, NOT_ADMISSIBLE };
enum class AdmissCase { ODD_P_OR_EVEN_N, CHAR2_ODD_N_4NMID, CHAR2_ODD_N_4MID };

std::string to_string(AdmissStatus s);
std::string to_string(AdmissCase c);

// Case tag from (characteristic, parity of the chart dimension, covering
// degree mod 4) alone.
AdmissCase admissibility_case(std::uint64_t p, std::size_t chart_dim, std::uint64_t mu);

struct AdmissibilityVerdict {
  AdmissStatus status = AdmissStatus::NOT_CRITICAL;
  AdmissCase case_tag = AdmissCase::ODD_P_OR_EVEN_N;
  // diagnostics; -1 when the branch did not compute them
  std::int64_t hessian_rank = -1;
  std::int64_t bilinear_rank = -1;
  std::int64_t length4 = -1;
  std::int64_t length5 = -1;
  int quadric_smooth = -1;  // 0/1 in the 4 | mu branch

  nlohmann::ordered_json to_json() const;
};

// Admissibility of a critical point per the three-case taxonomy.  Requires a
// critical expansion (throws otherwise); `p` must match the coefficient
// field's characteristic and `chart_dim` the expansion's variable count.
AdmissibilityVerdict classify(const LocalExpansion& e, std::uint64_t p, std::size_t chart_dim,
                              std::uint64_t mu);

// Convenience wrapper: expands at the center first and reports NOT_CRITICAL
// instead of throwing when the linear part survives.
AdmissibilityVerdict classify_at(const LocalPoly& p, std::span<const Elem> center,
                                 std::uint64_t char_p, std::uint64_t mu);

// All points of F^nvars where every first formal partial of `p` vanishes,
// in scan order.  Finite fields only; throws BudgetError when q^nvars
// exceeds the budget.
std::vector<std::vector<Elem>> critical_points(const LocalPoly& p,
                                               std::uint64_t budget = kDefaultScanBudget);

// Streaming variant: the visitor sees each critical point as field elements
// and returns false to stop the scan early.  Avoids materialising large
// structurally critical loci (for p >= 3 all of a = 0 is critical for
// a^(p-1) f, a full divisor's worth of points).
void for_each_critical_point(const LocalPoly& p, std::uint64_t budget,
                             const std::function<bool(std::span<const Elem>)>& visit);

// Substitution oracle: re-checks one point against every partial.
bool is_critical_point(const LocalPoly& p, std::span<const Elem> point);

// a^(p-1) * f for a of bidegree (m, 0) and f of bidegree (m, l); the section
// whose critical points mirror those of the degree-p cover.
BiPoly cover_transform(const BiPoly& a, const BiPoly& f, std::uint64_t p);

// The identity a^p z + a^(p-1) f == a^(p-1) (a z + f) after lifting a and f
// from the fiberwise quotient to `cover`, which must carry a variable z.
// Holds by distributivity; exposed so the transform can be replayed against
// the defining equation a z + f of the covered hypersurface.
bool cover_identity_holds(const WpsBundle& cover, const BiPoly& a, const BiPoly& f,
                          std::uint64_t p);

struct CriticalRecord {
  std::string chart;
  std::vector<Elem> point;
  bool on_gamma = false;  // the y = 0 section through the point's chart
  AdmissibilityVerdict verdict;
};

struct CensusReport {
  std::uint64_t n = 0, m = 0, r = 0, p = 0;
  std::uint64_t mu = 0;
  std::string field_name;
  std::uint64_t seed = 0;
  int attempts = 1;
  bool a_degenerate = false;  // a vanished at every rational base point
  std::string warning;
  std::string a_str, f_str;
  std::vector<CriticalRecord> points;  // critical points on (a != 0), per chart
  std::uint64_t critical_total = 0;    // == points.size() summed over charts
  std::uint64_t a_zero_skipped = 0;    // scan hits discarded because a = 0 there
  std::uint64_t gamma_count = 0;
  bool pass = false;

  nlohmann::ordered_json to_json() const;
};

// Scans every chart of R(n, r) for critical points of a^(p-1) f with random
// a in the (m, 0) piece and f in the (m, l) piece, l = n+1-m.  Points where
// a vanishes are filtered out; the rest are classified with covering degree
// mu = l and checked against the y = 0 section.  Redraws a (up to
// max_attempts) when it vanishes at every rational base point; if the limit
// is hit the vacuous pass is flagged in the report.
CensusReport census(std::uint64_t n, std::uint64_t m, std::uint64_t r, std::uint64_t p,
                    const Field& field, std::uint64_t seed,
                    std::uint64_t budget = kDefaultScanBudget, int max_attempts = 8);

// Same scan with caller-supplied polynomials (bidegrees (m, 0) and (m, l)).
CensusReport census_with(const WpsBundle& bundle, const BiPoly& a, const BiPoly& f,
                         std::uint64_t p, std::uint64_t mu,
                         std::uint64_t budget = kDefaultScanBudget);

}
