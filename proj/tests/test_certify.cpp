#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "wpscert/certify.hpp"
#include "wpscert/rng.hpp"

using namespace wpscert;

namespace {

// Independent e(n): largest t whose check 2^t + t <= n holds, found by
// trying every t from 0 upward until the inequality breaks.
std::uint64_t e_brute(std::uint64_t n) {
  std::uint64_t best = 0;
  for (std::uint64_t t = 1; t <= 64; ++t) {
    const std::uint64_t pow = std::uint64_t{1} << t;
    if (pow + t <= n) best = t;
    if (pow > n) break;
  }
  return best;
}

// Independent blown-down count: odometer over exponent vectors of
// (w, x_1..x_r, y_0..y_(n-r)), keeping total degree n+1 and y-degree >= m.
std::uint64_t pushforward_brute(std::uint64_t n, std::uint64_t m, std::uint64_t r) {
  const std::size_t vars = 1 + r + (n - r + 1);
  std::vector<std::uint64_t> e(vars, 0);
  std::uint64_t count = 0;
  while (true) {
    std::uint64_t total = 0, ydeg = 0;
    for (std::size_t i = 0; i < vars; ++i) {
      total += e[i];
      if (i >= 1 + r) ydeg += e[i];
    }
    if (total == n + 1 && ydeg >= m) count += 1;
    std::size_t i = 0;
    while (i < vars && e[i] == n + 1) {
      e[i] = 0;
      i += 1;
    }
    if (i == vars) break;
    e[i] += 1;
  }
  return count;
}

}  // namespace

TEST_CASE("tuple construction validates and fills defaults") {
  const ParamTuple t = make_tuple(4, 2, 1);
  CHECK(t.l() == 3);
  CHECK(t.p == 3);  // smallest prime factor of 3
  CHECK(t.k == 2);  // 3^2 = 9 is the jet floor
  CHECK_FALSE(t.k_explicit);
  CHECK(t.seed == 3);
  CHECK(t.field().name() == "F_9");
  CHECK(t.census_field().name() == "F_27");
  CHECK(t.label() == "n4-m2-r1-p3");
  CHECK(t.lambda() == 1);

  const ParamTuple s = make_tuple(5, 2, 1);
  CHECK(s.l() == 4);
  CHECK(s.p == 2);
  CHECK(s.k == 4);  // 2^4 = 16 >= 9
  CHECK(s.census_field().name() == "F_16");

  const ParamTuple ex = make_tuple(4, 2, 1, 3, 3);
  CHECK(ex.k_explicit);
  CHECK(ex.field().name() == "F_27");
  CHECK(ex.census_field().name() == "F_27");  // explicit degree wins everywhere

  CHECK_THROWS_AS(make_tuple(2, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_tuple(4, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_tuple(4, 2, 3), std::invalid_argument);   // n < m + r
  CHECK_THROWS_AS(make_tuple(4, 2, 1, 2), std::invalid_argument);  // 2 does not divide 3
  CHECK_THROWS_AS(make_tuple(5, 2, 1, 3), std::invalid_argument);  // 3 does not divide 4
  CHECK_THROWS_AS(make_tuple(6, 3, 1, 4), std::invalid_argument);  // 4 is not prime
  CHECK_THROWS_AS(make_tuple(4, 2, 1, 3, 5), std::invalid_argument);  // degree cap

  CHECK(smallest_prime_factor(2) == 2);
  CHECK(smallest_prime_factor(9) == 3);
  CHECK(smallest_prime_factor(35) == 5);
  CHECK(smallest_prime_factor(97) == 97);
  CHECK(default_jet_degree(2) == 4);
  CHECK(default_jet_degree(3) == 2);
  CHECK(default_jet_degree(11) == 1);
  CHECK(default_census_degree(2) == 4);
  CHECK(default_census_degree(3) == 3);
  CHECK(default_census_degree(5) == 2);
  CHECK(default_census_degree(17) == 1);
}

TEST_CASE("exponent bound arithmetic matches brute force") {
  for (std::uint64_t n = 3; n <= 100; ++n) {
    const ETableRow row = theorem2_arith(n);
    CHECK(row.e == e_brute(n));
    CHECK(row.admissible_r.size() == row.e);
    CHECK(row.inequality_ok);
  }
  CHECK(theorem2_arith(3).e == 1);
  CHECK(theorem2_arith(5).e == 1);
  CHECK(theorem2_arith(6).e == 2);
  CHECK(theorem2_arith(10).e == 2);
  CHECK(theorem2_arith(11).e == 3);
  // monotone and unbounded
  std::uint64_t prev = 0;
  for (std::uint64_t n = 3; n <= 100; ++n) {
    const std::uint64_t e = theorem2_arith(n).e;
    CHECK(e >= prev);
    prev = e;
  }
  CHECK(prev >= 6);

  const LemmaCertificate c = check_e_arith(make_tuple(11, 8, 3, 2, 1));
  CHECK(c.passed());
  CHECK(c.lemma_id == "e_arithmetic");
  CHECK(c.witnesses[0]["e"] == 3);
}

TEST_CASE("blowup dimension correspondence") {
  for (const auto& [n, m, r] : std::vector<std::array<std::uint64_t, 3>>{
           {3, 1, 1}, {4, 2, 1}, {4, 1, 2}, {5, 2, 2}, {6, 3, 1}, {6, 1, 5}}) {
    const ParamTuple t = make_tuple(n, m, r);
    const LemmaCertificate c = check_blowup_dim(t);
    CHECK(c.passed());
    CHECK(c.scope == "exact");
    const std::uint64_t brute = pushforward_brute(n, m, r);
    CHECK(c.witnesses[0]["cox_dim"] == brute);
    CHECK(c.witnesses[0]["pushforward_count"] == brute);
  }
  const LemmaCertificate c = check_blowup_dim(make_tuple(3, 1, 1));
  CHECK(c.witnesses[0]["cox_dim"] == 65);
}

TEST_CASE("form section pieces") {
  {
    // lambda = 2: the (-2, 2) piece is exactly y^2
    const LemmaCertificate c = check_form_sections(make_tuple(5, 2, 1, 2, 1));
    CHECK(c.passed());
    CHECK(c.witnesses[0]["lambda"] == 2);
    CHECK(c.witnesses[0]["dim"] == 1);
    CHECK(c.witnesses[0]["monomials"][0] == "y^2");
    CHECK(c.witnesses[1]["dim"] == 0);
  }
  {
    // lambda = 0: the (0, 0) piece is the constants
    const LemmaCertificate c = check_form_sections(make_tuple(3, 1, 2, 3, 1));
    CHECK(c.passed());
    CHECK(c.witnesses[0]["dim"] == 1);
    CHECK(c.witnesses[0]["monomials"][0] == "1");
  }
  for (const auto& [n, m, r] : std::vector<std::array<std::uint64_t, 3>>{
           {4, 2, 1}, {5, 2, 2}, {6, 3, 1}, {6, 2, 3}}) {
    CHECK(check_form_sections(make_tuple(n, m, r)).passed());
  }
}

TEST_CASE("base locus of the explicit generators is empty") {
  for (const auto& [n, m, r] : std::vector<std::array<std::uint64_t, 3>>{
           {3, 1, 1}, {4, 2, 2}, {5, 2, 1}}) {
    const ParamTuple t = make_tuple(n, m, r);
    const LemmaCertificate c = check_smooth_lemma(t);
    CHECK(c.passed());
    CHECK(c.lemma_id == "base_locus_empty");
    CHECK(c.witnesses[0]["count"] == (n - r + 1) * (r + 2));
    CHECK(c.witnesses[1]["empty"] == true);
  }

  // dropping the y-covering monomials leaves the whole y section in the
  // base locus, so the emptiness check must notice
  const ParamTuple t = make_tuple(3, 1, 1);
  const WpsBundle P = WpsBundle::standard_P(3, 1);
  std::vector<BiPoly> gens = smooth_lemma_sections(P, 1, t.field());
  std::erase_if(gens, [](const BiPoly& s) {
    for (const auto& [e, c] : s.terms())
      if (e[s.grading().index_of("y")] > 0) return true;
    return false;
  });
  const BaseLocusReport rep = base_locus(P, gens, kDefaultScanBudget);
  CHECK_FALSE(rep.empty);
}

TEST_CASE("order-2 jets on the double cover side") {
  const ParamTuple t = make_tuple(4, 2, 1);
  const LemmaCertificate c = check_qsmooth(t);
  CHECK(c.passed());
  CHECK(c.lemma_id == "rest2_on_Q");
  CHECK(c.scope == "sampled");
  // dim Q = 5, so every rank must be 5 + 1... the chart has one coordinate
  // per dimension and the order-2 target is 1 + dim
  const std::size_t target = 6;
  for (std::size_t w = 1; w <= 2; ++w) {
    CHECK(c.witnesses[w]["target_dim"] == target);
    CHECK(c.witnesses[w]["standard_point"]["full_rank"] == target);
    CHECK(c.witnesses[w]["standard_point"]["witness_rank"] == target);
    CHECK(c.witnesses[w]["witness_family"].size() == target);
    CHECK(c.witnesses[w]["random_points"].size() == 25);
    for (const auto& pt : c.witnesses[w]["random_points"]) {
      CHECK(pt["full_rank"] == target);
      CHECK(pt["witness_rank"] == target);
    }
  }
  CHECK(c.witnesses[3]["kind"] == "boundary_multiplicity");
  CHECK(c.witnesses[3]["all_multiplicity_one"] == true);
}

TEST_CASE("jets on the inseparable cover side") {
  {
    const ParamTuple t = make_tuple(4, 2, 1);
    const LemmaCertificate c = check_restR(t);
    CHECK(c.passed());
    CHECK(c.scope == "sampled");
    CHECK(c.witnesses[1]["kind"] == "gamma_chart");
    CHECK(c.witnesses[1]["target_dim"] == 5);  // order 2, dim R = 4
    CHECK(c.witnesses[1]["standard_point"]["witness_rank"] == 5);
    CHECK(c.witnesses[2]["kind"] == "vy_chart");
    CHECK(c.witnesses[2]["target_dim"] == 35);  // order 4, dim R = 4
    CHECK(c.witnesses[2]["witness_family"].size() == 35);
    CHECK(c.witnesses[2]["standard_point"]["witness_rank"] == 35);
    for (const auto& pt : c.witnesses[2]["random_points"])
      CHECK(pt["full_rank"] == 35);
  }
  {
    // r = 2 exercises the printed family whose restrictions degenerate at
    // the chart origin; the working variant must still have full rank while
    // the printed one is only recorded
    const ParamTuple t = make_tuple(5, 2, 2);
    const LemmaCertificate c = check_restR(t);
    CHECK(c.passed());
    CHECK(c.witnesses[1]["standard_point"]["witness_rank"] == 6);
    CHECK(c.witnesses[1]["standard_point"]["literal_rank"] != nullptr);
  }
  {
    // l = 2 is out of scope for the order-4 families
    const LemmaCertificate c = check_restR(make_tuple(4, 3, 1));
    CHECK(c.skipped());
    CHECK_FALSE(c.failed());
    CHECK(c.verdict.find("l = 2") != std::string::npos);
  }
}

TEST_CASE("census certificate wraps the scan verdict") {
  const ParamTuple t = make_tuple(4, 2, 1);
  const LemmaCertificate c = check_census(t);
  CHECK(c.passed());
  CHECK(c.lemma_id == "census");
  const auto& rep = c.witnesses[0]["report"];
  CHECK(rep["field"] == "F_27");
  CHECK(rep["seed"] == 3);
  CHECK(rep["pass"] == true);
  CHECK(rep["gamma_count"] == 0);

  // planted degenerate member: f = u1^2 x1^3 + u0^5 y^3 has a whole critical
  // hyperplane through the y = 0 section
  const ParamTuple tp = make_tuple(4, 2, 1, 3, 2);
  const WpsBundle R = WpsBundle::standard_R(4, 1);
  const auto g = R.grading_ptr();
  const Field f9 = tp.field();
  BiPoly a(g, f9, {2, 0});
  Expo ea(g->var_count(), 0);
  ea[g->index_of("u0")] = 2;
  a.add_term(ea, f9.one());
  BiPoly f(g, f9, {2, 3});
  Expo e1(g->var_count(), 0);
  e1[g->index_of("u1")] = 2;
  e1[g->index_of("x1")] = 3;
  f.add_term(e1, f9.one());
  Expo e2(g->var_count(), 0);
  e2[g->index_of("u0")] = 5;
  e2[g->index_of("y")] = 3;
  f.add_term(e2, f9.one());
  const LemmaCertificate bad = check_census_with(tp, a, f);
  CHECK(bad.failed());
  CHECK(bad.witnesses[0]["report"]["gamma_count"] != 0);
}

TEST_CASE("full run aggregates and is byte deterministic") {
  const ParamTuple t = make_tuple(4, 2, 1);
  const RunBundle run = run_all(t);
  CHECK(run.overall_pass);
  CHECK(run.certificates.size() == 7);
  std::vector<std::string> ids;
  for (const auto& c : run.certificates) {
    ids.push_back(c.lemma_id);
    CHECK_FALSE(c.failed());
    CHECK(c.elapsed_ms == 0);  // timing off by default
  }
  const std::vector<std::string> expect{"base_locus_empty", "rest2_on_Q", "rest_on_R",
                                        "census",           "form_sections", "blowup_dimension",
                                        "e_arithmetic"};
  CHECK(ids == expect);

  const RunBundle again = run_all(t);
  CHECK(run.to_json().dump(2) == again.to_json().dump(2));

  // the conic-bundle family adds an informational note
  const RunBundle dp = run_all(make_tuple(4, 2, 2));
  CHECK(dp.certificates.size() == 8);
  CHECK(dp.certificates.back().lemma_id == "known_case_note");
  CHECK(dp.certificates.back().skipped());
  CHECK(dp.overall_pass);
}

TEST_CASE("grid enumeration") {
  const std::vector<ParamTuple> grid = grid_tuples(5, 7);
  // n = 3: (1,1),(1,2),(2,1); n = 4: (1,1),(1,2),(1,3),(2,1),(2,2),(3,1);
  // n = 5: ten more
  CHECK(grid.size() == 3 + 6 + 10);
  std::set<std::string> labels;
  for (const ParamTuple& t : grid) {
    CHECK(t.n >= t.m + t.r);
    CHECK(t.l() % t.p == 0);
    CHECK(t.seed == Rng::derive(7, t.label()));
    labels.insert(t.label());
  }
  CHECK(labels.size() == grid.size());
  CHECK(grid_tuples(5, 8)[0].seed != grid[0].seed);
}
