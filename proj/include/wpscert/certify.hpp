#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpscert/critical.hpp"
#include "wpscert/jet.hpp"

namespace wpscert {

inline constexpr std::string_view kToolVersion = "wpscert 1.0.0";

// Smallest prime divisor of v (v >= 2).
std::uint64_t smallest_prime_factor(std::uint64_t v);

// Field degrees used by default.  Jet sampling needs at least 9 coordinate
// values; the census needs a larger field because its failure rate per seed
// scales like 1/q, and q = 16 is the measured floor for the 4-out-of-5
// tolerance.  Both are capped at degree 4 by the element encoding.
int default_jet_degree(std::uint64_t p);     // minimal k with p^k >= 9
int default_census_degree(std::uint64_t p);  // minimal k <= 4 with p^k >= 16

// One verification run: the bundle family parameters, the working prime and
// field degree, and the seed every random draw derives from.
struct ParamTuple {
  std::uint64_t n = 0, m = 0, r = 0;
  std::uint64_t p = 0;
  int k = 1;
  bool k_explicit = false;  // true when the degree was user-chosen
  std::uint64_t seed = 0;

  std::uint64_t l() const { return n + 1 - m; }
  std::int64_t lambda() const {
    return static_cast<std::int64_t>(n) - static_cast<std::int64_t>(m) -
           static_cast<std::int64_t>(r);
  }
  Field field() const;         // F_{p^k}
  Field census_field() const;  // explicit k wins, else the census default
  std::string label() const;   // "n4-m2-r1-p3"
  nlohmann::ordered_json to_json() const;
};

// Validates n >= 3, m >= 1, r >= 1, n >= m + r, p prime and dividing
// l = n + 1 - m, 1 <= k <= 4.  Defaults: p = smallest prime factor of l,
// k = default_jet_degree(p).  Throws std::invalid_argument otherwise.
ParamTuple make_tuple(std::uint64_t n, std::uint64_t m, std::uint64_t r,
                      std::optional<std::uint64_t> p = std::nullopt,
                      std::optional<int> k = std::nullopt, std::uint64_t seed = 3);

struct LemmaCertificate {
  std::string lemma_id;
  ParamTuple tuple;
  std::string verdict;  // "PASS", "FAIL", or "SKIPPED(reason)"
  std::string scope;    // "exact" or "sampled"
  nlohmann::ordered_json witnesses = nlohmann::ordered_json::array();
  std::int64_t elapsed_ms = 0;  // stays 0 unless timing was requested

  bool passed() const { return verdict == "PASS"; }
  bool skipped() const { return verdict.rfind("SKIPPED", 0) == 0; }
  bool failed() const { return !passed() && !skipped(); }
  nlohmann::ordered_json to_json() const;
};

struct VerifyOptions {
  std::uint64_t budget = kDefaultScanBudget;
  int sample_points = 25;  // random centers per chart class, on top of the standard one
  int max_attempts = 8;    // redraw limit for degenerate random data
  bool timing = false;     // fill elapsed_ms with wall-clock (breaks byte determinism)
};

// The explicit monomial generators whose common zero locus must be empty:
// u_i^m w^l, u_i^m x_j^l, u_i^(n+1) y^l on the family-P ring.
std::vector<BiPoly> smooth_lemma_sections(const WpsBundle& P, std::uint64_t m, const Field& f);

// Monomial families whose chart restrictions are 1, the coordinate functions:
// the order-2 jet witnesses at any point of the named chart kind.
std::vector<BiPoly> qsmooth_witness_sections(const WpsBundle& Q, std::uint64_t m,
                                             const Field& f, bool y_chart);
std::vector<BiPoly> restR_gamma_witness_sections(const WpsBundle& R, std::uint64_t m,
                                                 const Field& f, bool literal_xr);
// The ten order-4 jet families u_0^(n+1-s-t) M_u M_x y^(l-t), s + t <= 3,
// on the y chart of the family-R ring.  Needs l >= 3.
std::vector<BiPoly> restR_vy_witness_sections(const WpsBundle& R, std::uint64_t m,
                                              const Field& f);

// Base-point-freeness of the explicit generator set.
LemmaCertificate check_smooth_lemma(const ParamTuple& t, const VerifyOptions& opt = {});
// Order-2 jet surjectivity of the (m, l) sections on the smooth locus of the
// family-Q bundle, plus the boundary surrogate: a random degree-m base form
// with smooth zero locus vanishes to order exactly 1 at sampled zeros.
LemmaCertificate check_qsmooth(const ParamTuple& t, const VerifyOptions& opt = {});
// Order-2 jet surjectivity along the y = 0 section and order-4 jet
// surjectivity on the y != 0 locus of the family-R bundle; SKIPPED for l < 3.
LemmaCertificate check_restR(const ParamTuple& t, const VerifyOptions& opt = {});
// Critical-point census of a random member, wrapped as a certificate.
LemmaCertificate check_census(const ParamTuple& t, const VerifyOptions& opt = {});
// Same with caller-planted polynomials (for engineered counterexamples).
LemmaCertificate check_census_with(const ParamTuple& t, const BiPoly& a, const BiPoly& f,
                                   const VerifyOptions& opt = {});
// The (-lambda, lambda) piece contains y^lambda and the correction piece
// (-lambda - m, lambda - l) is empty.
LemmaCertificate check_form_sections(const ParamTuple& t, const VerifyOptions& opt = {});
// dim of the (m, l) piece equals the count of degree-(n+1) monomials in
// w, x_1..x_r, y_0..y_(n-r) with total y-degree >= m.
LemmaCertificate check_blowup_dim(const ParamTuple& t, const VerifyOptions& opt = {});

struct ETableRow {
  std::uint64_t n = 0;
  std::uint64_t e = 0;                     // max t with 2^t + t <= n
  std::vector<std::uint64_t> admissible_r;  // 1..e
  bool inequality_ok = false;               // n - r + 1 > 2^r for every r <= e
};
ETableRow theorem2_arith(std::uint64_t n);
LemmaCertificate check_e_arith(const ParamTuple& t, const VerifyOptions& opt = {});

struct RunBundle {
  ParamTuple tuple;
  std::vector<LemmaCertificate> certificates;
  bool overall_pass = false;  // every certificate PASS or SKIPPED

  nlohmann::ordered_json to_json() const;
};

// All checks in dependency order: base locus, Q-side jets, R-side jets,
// census, form sections, dimension correspondence, exponent arithmetic.
RunBundle run_all(const ParamTuple& t, const VerifyOptions& opt = {});

// Every (n, m, r) with 3 <= n <= n_max, m, r >= 1, n >= m + r, default p and
// k, and a per-tuple seed derived from base_seed.
std::vector<ParamTuple> grid_tuples(std::uint64_t n_max, std::uint64_t base_seed);

}
