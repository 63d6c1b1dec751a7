#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "wpscert/bundle.hpp"
#include "wpscert/rng.hpp"
#include "wpscert/scan.hpp"

using namespace wpscert;

namespace {

Expo mono(const GradingMatrix& g, const std::vector<std::pair<std::string, int>>& vs) {
  Expo e(g.var_count(), 0);
  for (const auto& [name, k] : vs) e[g.index_of(name)] = k;
  return e;
}

BiPoly monomial_section(const WpsBundle& b, const Field& f,
                        const std::vector<std::pair<std::string, int>>& vs) {
  const Expo e = mono(b.grading(), vs);
  BiPoly s(b.grading_ptr(), f, b.grading().bidegree(e));
  s.add_term(e, f.one());
  return s;
}

// the base-point-free family: u_i^m w^l, u_i^m x_j^l, u_i^(n+1) y^l
std::vector<BiPoly> bpf_family(const WpsBundle& P, const Field& f, int m) {
  const int n = P.n(), r = P.r(), l = n + 1 - m;
  std::vector<BiPoly> out;
  for (int i = 0; i <= n - r; ++i) {
    const std::string ui = "u" + std::to_string(i);
    out.push_back(monomial_section(P, f, {{ui, m}, {"w", l}}));
    for (int j = 1; j <= r; ++j)
      out.push_back(monomial_section(P, f, {{ui, m}, {"x" + std::to_string(j), l}}));
    out.push_back(monomial_section(P, f, {{ui, n + 1}, {"y", l}}));
  }
  return out;
}

}  // namespace

TEST_CASE("standard family matrices") {
  const WpsBundle P = WpsBundle::standard_P(3, 1);
  CHECK(P.grading().names() == std::vector<std::string>{"u0", "u1", "u2", "w", "x1", "y"});
  std::vector<std::int64_t> r1, r2;
  for (std::size_t i = 0; i < 6; ++i) {
    r1.push_back(P.grading().row1(i));
    r2.push_back(P.grading().row2(i));
  }
  CHECK(r1 == std::vector<std::int64_t>{1, 1, 1, 0, 0, -1});
  CHECK(r2 == std::vector<std::int64_t>{0, 0, 0, 1, 1, 1});

  const WpsBundle Q = WpsBundle::standard_Q(3, 1, 3);
  CHECK(Q.grading().names() == std::vector<std::string>{"u0", "u1", "u2", "z", "x1", "y"});
  CHECK(Q.grading().row2(Q.grading().index_of("z")) == 3);
  CHECK(Q.grading().row1(Q.grading().index_of("z")) == 0);

  const WpsBundle R = WpsBundle::standard_R(3, 1);
  CHECK(R.grading().names() == std::vector<std::string>{"u0", "u1", "u2", "x1", "y"});

  CHECK(P.name() == "P(3,1)");
  CHECK(Q.name() == "Q(3,1,3)");
  CHECK(R.name() == "R(3,1)");

  CHECK_THROWS_AS(WpsBundle::standard_P(2, 1), std::invalid_argument);
  CHECK_THROWS_AS(WpsBundle::standard_P(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(WpsBundle::standard_P(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(WpsBundle::standard_Q(3, 1, 1), std::invalid_argument);
}

TEST_CASE("dimensions and chart counts") {
  for (int n = 3; n <= 7; ++n)
    for (int r = 1; r < n; ++r) {
      const WpsBundle P = WpsBundle::standard_P(n, r);
      const WpsBundle R = WpsBundle::standard_R(n, r);
      CHECK(P.dimension() == static_cast<std::size_t>(n + 1));
      CHECK(R.dimension() == static_cast<std::size_t>(n));
      CHECK(P.charts().size() == static_cast<std::size_t>((n - r + 1) * (r + 2)));
      CHECK(R.charts().size() == static_cast<std::size_t>((n - r + 1) * (r + 1)));
      for (int l = 2; l <= 4; ++l) {
        const WpsBundle Q = WpsBundle::standard_Q(n, r, l);
        CHECK(Q.dimension() == static_cast<std::size_t>(n + 1));
        CHECK(Q.charts().size() == static_cast<std::size_t>((n - r + 1) * (r + 1)));
        for (const Chart& c : Q.charts())
          CHECK(Q.grading().name(c.fiber_var()) != "z");
      }
      std::set<std::string> labels;
      for (const Chart& c : P.charts()) labels.insert(c.label());
      CHECK(labels.size() == P.charts().size());
    }
}

TEST_CASE("chart construction rejects bad variables") {
  const WpsBundle Q = WpsBundle::standard_Q(4, 2, 2);
  CHECK_THROWS_AS(Q.chart(0, "z"), std::invalid_argument);       // weight 2
  CHECK_THROWS_AS(Q.chart(0, "u1"), std::invalid_argument);      // base var
  CHECK_THROWS_AS(Q.chart(9, "x1"), std::invalid_argument);      // out of range
  const Chart c = Q.chart(0, "x1");
  CHECK(c.label() == "U(u0,x1)");
  CHECK(c.dim() == Q.dimension());
  CHECK(c.coord_names() == std::vector<std::string>{"u1", "u2", "z", "x2", "y"});
}

TEST_CASE("chart coordinates follow the transition formulas") {
  const WpsBundle Q = WpsBundle::standard_Q(4, 2, 2);
  const Field f = Field::finite(7);
  const GradingMatrix& g = Q.grading();
  Rng rng(5);
  for (int it = 0; it < 50; ++it) {
    std::vector<Elem> co(g.var_count());
    for (auto& c : co) c = f.from_index(1 + rng.below(6));  // everything invertible
    const BundlePoint pt(Q.grading_ptr(), co);
    const auto cc = chart_coords(Q.chart(0, "x1"), pt);
    REQUIRE(cc.has_value());
    const Elem u0 = co[g.index_of("u0")], x1 = co[g.index_of("x1")];
    // coords are u1, u2, z, x2, y in variable order
    CHECK((*cc)[0] == co[g.index_of("u1")] / u0);
    CHECK((*cc)[1] == co[g.index_of("u2")] / u0);
    CHECK((*cc)[2] == co[g.index_of("z")] / (x1 * x1));
    CHECK((*cc)[3] == co[g.index_of("x2")] / x1);
    CHECK((*cc)[4] == u0 * co[g.index_of("y")] / x1);

    const auto cy = chart_coords(Q.chart(0, "y"), pt);
    REQUIRE(cy.has_value());
    const Elem y = co[g.index_of("y")];
    // coords are u1, u2, z, x1, x2; z~ = z/(u0^2 y^2), x~_j = x_j/(u0 y)
    CHECK((*cy)[2] == co[g.index_of("z")] / (u0 * u0 * y * y));
    CHECK((*cy)[3] == co[g.index_of("x1")] / (u0 * y));
    CHECK((*cy)[4] == co[g.index_of("x2")] / (u0 * y));
  }
  // a point off the chart
  std::vector<Elem> co(g.var_count(), f.one());
  co[g.index_of("x1")] = f.zero();
  CHECK_FALSE(chart_coords(Q.chart(0, "x1"), BundlePoint(Q.grading_ptr(), co)).has_value());
}

TEST_CASE("localization substitutes 1 for the inverted pair") {
  const WpsBundle Q = WpsBundle::standard_Q(4, 1, 2);
  const Field f = Field::finite(5);
  const int m = 3, l = 2;
  const Chart c = Q.chart(0, "x1");
  // u0^m x1^l localizes to 1, u1 u0^(m-1) x1^l to the u1-coordinate
  const LocalPoly one = localize(monomial_section(Q, f, {{"u0", m}, {"x1", l}}), c);
  REQUIRE(one.terms().size() == 1);
  CHECK(one.terms().begin()->first == Expo(c.dim(), 0));
  const LocalPoly lin =
      localize(monomial_section(Q, f, {{"u1", 1}, {"u0", m - 1}, {"x1", l}}), c);
  REQUIRE(lin.terms().size() == 1);
  Expo want(c.dim(), 0);
  want[c.coord_of_var(Q.grading().index_of("u1"))] = 1;
  CHECK(lin.terms().begin()->first == want);

  // distinct monomials of one bidegree stay distinct after localization
  const auto basis = Q.grading().basis({m, l});
  std::set<Expo> images;
  for (const auto& e : basis) {
    BiPoly s(Q.grading_ptr(), f, Bidegree{m, l});
    s.add_term(e, f.one());
    const LocalPoly lp = localize(s, c);
    REQUIRE(lp.terms().size() == 1);
    images.insert(lp.terms().begin()->first);
  }
  CHECK(images.size() == basis.size());
}

TEST_CASE("transition units are section-independent") {
  const WpsBundle P = WpsBundle::standard_P(4, 2);
  const Field f = Field::finite(3, 2);
  const Bidegree d{2, 3};
  Rng rng(17);
  const auto s = random_bipoly(P.grading_ptr(), f, d, rng.next()).poly;
  const auto t = random_bipoly(P.grading_ptr(), f, d, rng.next()).poly;
  const auto charts = P.charts();
  for (int it = 0; it < 40; ++it) {
    std::vector<Elem> co(P.grading().var_count());
    for (auto& c : co) c = f.from_index(1 + rng.below(f.size() - 1));
    const BundlePoint pt(P.grading_ptr(), co);
    for (std::size_t a = 0; a < charts.size(); ++a)
      for (std::size_t b = a + 1; b < charts.size(); ++b) {
        const auto ca = chart_coords(charts[a], pt), cb = chart_coords(charts[b], pt);
        REQUIRE(ca.has_value());
        REQUIRE(cb.has_value());
        const Elem sa = localize(s, charts[a]).evaluate(*ca);
        const Elem sb = localize(s, charts[b]).evaluate(*cb);
        const Elem ta = localize(t, charts[a]).evaluate(*ca);
        const Elem tb = localize(t, charts[b]).evaluate(*cb);
        CHECK(sa.is_zero() == sb.is_zero());
        CHECK(sa * tb == sb * ta);
      }
  }
}

TEST_CASE("every point lies on a chart unless excluded") {
  // P has fiber weights all 1: full coverage
  const WpsBundle P = WpsBundle::standard_P(3, 1);
  const Field f2 = Field::finite(2);
  const auto charts = P.charts();
  const std::size_t nv = P.grading().var_count();
  std::uint64_t valid = 0;
  for (std::uint64_t code = 0; code < (1ULL << nv); ++code) {
    std::vector<Elem> co;
    for (std::size_t i = 0; i < nv; ++i) co.push_back(f2.from_index(code >> i & 1));
    try {
      const BundlePoint pt(P.grading_ptr(), co);
      ++valid;
      CHECK_NOTHROW(chart_containing(charts, pt));
    } catch (const std::invalid_argument&) {
      // irrelevant locus
    }
  }
  CHECK(valid == (7ULL) * (7ULL));  // (2^3-1)(2^3-1) patterns

  // Q has the z-section excluded: u arbitrary, z != 0, x = y = 0
  const WpsBundle Q = WpsBundle::standard_Q(3, 1, 2);
  std::vector<Elem> co(Q.grading().var_count(), f2.zero());
  co[Q.grading().index_of("u0")] = f2.one();
  co[Q.grading().index_of("z")] = f2.one();
  const BundlePoint excluded(Q.grading_ptr(), co);
  CHECK_THROWS_AS(chart_containing(Q.charts(), excluded), ExcludedLocusError);
}

TEST_CASE("points in the irrelevant locus are rejected") {
  const WpsBundle P = WpsBundle::standard_P(3, 1);
  const Field f = Field::finite(3);
  std::vector<Elem> co(P.grading().var_count(), f.zero());
  CHECK_THROWS_AS(BundlePoint(P.grading_ptr(), co), std::invalid_argument);
  co[0] = f.one();  // base ok, fiber all zero
  CHECK_THROWS_AS(BundlePoint(P.grading_ptr(), co), std::invalid_argument);
  std::vector<Elem> co2(P.grading().var_count(), f.zero());
  co2[P.grading().index_of("w")] = f.one();  // fiber ok, base all zero
  CHECK_THROWS_AS(BundlePoint(P.grading_ptr(), co2), std::invalid_argument);
  co[P.grading().index_of("y")] = f.one();
  CHECK_NOTHROW(BundlePoint(P.grading_ptr(), co));
}

TEST_CASE("local derivatives respect the characteristic") {
  const WpsBundle R = WpsBundle::standard_R(3, 1);
  const Field f = Field::finite(3);
  const Chart c = R.chart(0, "x1");
  LocalPoly p(c, f);
  p.add_term({3, 0, 0}, f.one());  // u1~^3 has zero derivative in char 3
  p.add_term({1, 2, 0}, f.one());
  const LocalPoly d0 = p.derivative(0);
  CHECK(d0.terms().size() == 1);
  CHECK(d0.coeff({0, 2, 0}) == f.one());
  const LocalPoly d2 = p.derivative(2);
  CHECK(d2.is_zero());
  CHECK(p.total_degree() == 3);
}

TEST_CASE("common-zero scan matches brute force") {
  const WpsBundle R = WpsBundle::standard_R(3, 1);
  const Field f = Field::finite(3);
  const Chart c = R.chart(0, "x1");
  Rng rng(71);
  for (int it = 0; it < 60; ++it) {
    // two random local polynomials in 3 variables
    std::vector<LocalPoly> ps;
    for (int pi = 0; pi < 2; ++pi) {
      LocalPoly p(c, f);
      const int nterms = 1 + static_cast<int>(rng.below(6));
      for (int t = 0; t < nterms; ++t) {
        Expo e = {static_cast<std::int32_t>(rng.below(3)), static_cast<std::int32_t>(rng.below(3)),
                  static_cast<std::int32_t>(rng.below(3))};
        p.add_term(e, f.from_index(rng.below(3)));
      }
      ps.push_back(std::move(p));
    }
    std::set<std::vector<std::uint64_t>> brute;
    for (std::uint64_t a = 0; a < 3; ++a)
      for (std::uint64_t b = 0; b < 3; ++b)
        for (std::uint64_t cc = 0; cc < 3; ++cc) {
          const std::vector<Elem> pt = {f.from_index(a), f.from_index(b), f.from_index(cc)};
          bool allzero = true;
          for (const auto& p : ps) allzero = allzero && p.evaluate(pt).is_zero();
          if (allzero) brute.insert({a, b, cc});
        }
    std::vector<PackedPoly> packed;
    for (const auto& p : ps) packed.push_back(PackedPoly::from_terms(3, p.terms()));
    std::set<std::vector<std::uint64_t>> scanned;
    std::vector<std::vector<std::uint64_t>> order;
    for_each_common_zero(f, 3, packed, 1000, [&](const std::vector<std::uint64_t>& pt) {
      scanned.insert(pt);
      order.push_back(pt);
      return true;
    });
    CHECK(scanned == brute);
    CHECK(order.size() == scanned.size());  // no duplicates
    // early stop
    if (!brute.empty()) {
      int seen = 0;
      for_each_common_zero(f, 3, packed, 1000, [&](const std::vector<std::uint64_t>&) {
        ++seen;
        return false;
      });
      CHECK(seen == 1);
    }
  }
  CHECK_THROWS_AS(
      for_each_common_zero(f, 3, {}, 10, [](const std::vector<std::uint64_t>&) { return true; }),
      BudgetError);
}

TEST_CASE("base locus of the base-point-free family is empty") {
  for (const auto& [n, m, r] : std::vector<std::tuple<int, int, int>>{
           {3, 1, 1}, {4, 2, 1}, {4, 1, 2}, {5, 2, 2}}) {
    const WpsBundle P = WpsBundle::standard_P(n, r);
    const Field f = Field::finite(2);
    const auto fam = bpf_family(P, f, m);
    const auto rep = base_locus(P, fam, 1ULL << 40);
    CHECK(rep.combinatorial_applicable);
    CHECK(rep.combinatorial_empty);
    CHECK(rep.scanned);
    CHECK(rep.empty);
    CHECK_FALSE(rep.witness.has_value());
  }
}

TEST_CASE("dropping the y-sections leaves a base point") {
  const WpsBundle P = WpsBundle::standard_P(4, 1);
  const Field f = Field::finite(3);
  const int m = 2, l = 3;
  std::vector<BiPoly> fam;
  for (int i = 0; i <= 3; ++i) {
    const std::string ui = "u" + std::to_string(i);
    fam.push_back(monomial_section(P, f, {{ui, m}, {"w", l}}));
    fam.push_back(monomial_section(P, f, {{ui, m}, {"x1", l}}));
  }
  const auto rep = base_locus(P, fam, 1ULL << 40);
  CHECK(rep.combinatorial_applicable);
  CHECK_FALSE(rep.combinatorial_empty);
  CHECK_FALSE(rep.empty);
  REQUIRE(rep.witness.has_value());
  const BundlePoint wp(P.grading_ptr(), *rep.witness);
  for (const auto& s : fam) CHECK(vanishes_at(s, wp));
}

TEST_CASE("base locus scan handles non-monomial sections") {
  const WpsBundle P = WpsBundle::standard_P(3, 1);
  const Field f = Field::finite(3);
  BiPoly s1(P.grading_ptr(), f, {0, 1});
  s1.add_term(mono(P.grading(), {{"w", 1}}), f.one());
  s1.add_term(mono(P.grading(), {{"x1", 1}}), f.one());
  BiPoly s2 = monomial_section(P, f, {{"x1", 1}});
  const auto rep = base_locus(P, {s1, s2}, 1ULL << 40);
  CHECK_FALSE(rep.combinatorial_applicable);
  CHECK(rep.scanned);
  CHECK_FALSE(rep.empty);
  REQUIRE(rep.witness.has_value());
  const BundlePoint wp(P.grading_ptr(), *rep.witness);
  CHECK(vanishes_at(s1, wp));
  CHECK(vanishes_at(s2, wp));

  CHECK_THROWS_AS(base_locus(P, {s1, s2}, 10), BudgetError);
  // monomial input over Q skips the scan but still decides
  const Field qq = Field::rationals();
  const auto repq = base_locus(P, bpf_family(P, qq, 2), 1ULL << 40);
  CHECK(repq.combinatorial_empty);
  CHECK(repq.empty);
  CHECK_FALSE(repq.scanned);
}

TEST_CASE("bundle description is a faithful mirror") {
  const WpsBundle Q = WpsBundle::standard_Q(4, 2, 2);
  const auto j = Q.describe();
  CHECK(j["name"] == "Q(4,2,2)");
  CHECK(j["family"] == "Q");
  CHECK(j["l"] == 2);
  CHECK(j["variables"].size() == Q.grading().var_count());
  CHECK(j["row1"].size() == Q.grading().var_count());
  CHECK(j["dimension"] == 5);
  CHECK(j["charts"].size() == Q.charts().size());
}
