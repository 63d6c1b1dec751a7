#include "wpscert/critical.hpp"

#include <algorithm>
#include <stdexcept>

#include "wpscert/jet.hpp"
#include "wpscert/rng.hpp"

namespace wpscert {

namespace {

std::int64_t expo_total(const Expo& e) {
  std::int64_t t = 0;
  for (auto v : e) t += v;
  return t;
}

}  // namespace

LocalExpansion::LocalExpansion(const LocalPoly& p, std::span<const Elem> center, int order)
    : f_(p.field()), n_(p.nvars()), order_(order), alpha_(f_.zero()) {
  if (order < 2) throw std::invalid_argument("expansion order must be at least 2");
  const auto coeffs = expand_at(p, center, order + 1);
  const auto monos = jet_monomials(n_, order + 1);
  linear_.assign(n_, f_.zero());
  quad_.assign(n_ * (n_ + 1) / 2, f_.zero());
  for (std::size_t i = 0; i < monos.size(); ++i) {
    const Elem& c = coeffs[i];
    if (c.is_zero()) continue;
    const Expo& e = monos[i];
    const std::int64_t total = expo_total(e);
    if (total == 0) {
      alpha_ = c;
    } else if (total == 1) {
      const auto nz = std::find_if(e.begin(), e.end(), [](auto v) { return v != 0; });
      linear_[static_cast<std::size_t>(nz - e.begin())] = c;
    } else if (total == 2) {
      std::size_t a = n_, b = n_;
      for (std::size_t v = 0; v < n_; ++v) {
        if (e[v] == 2) a = b = v;
        if (e[v] == 1) (a == n_ ? a : b) = v;
      }
      quad_[a * n_ - a * (a - 1) / 2 + (b - a)] = c;
    } else {
      higher_.emplace(e, c);
    }
  }
}

Elem LocalExpansion::quad(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("quad index");
  const std::size_t a = std::min(i, j), b = std::max(i, j);
  return quad_[a * n_ - a * (a - 1) / 2 + (b - a)];
}

bool LocalExpansion::is_critical() const {
  return std::all_of(linear_.begin(), linear_.end(), [](const Elem& c) { return c.is_zero(); });
}

std::map<Expo, Elem> LocalExpansion::terms() const {
  std::map<Expo, Elem> out = higher_;
  if (!alpha_.is_zero()) out.emplace(Expo(n_, 0), alpha_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (linear_[i].is_zero()) continue;
    Expo e(n_, 0);
    e[i] = 1;
    out.emplace(e, linear_[i]);
  }
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) {
      const Elem c = quad(i, j);
      if (c.is_zero()) continue;
      Expo e(n_, 0);
      e[i] += 1;
      e[j] += 1;
      out.emplace(e, c);
    }
  return out;
}

DenseMatrix LocalExpansion::hessian() const {
  DenseMatrix m(f_, n_, n_);
  const Elem two = f_.from_int(2);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      m.set(i, j, i == j ? two * quad(i, i) : quad(i, j));
  return m;
}

DenseMatrix LocalExpansion::polar_form() const {
  DenseMatrix m(f_, n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) m.set(i, j, quad(i, j));
  return m;
}

Elem LocalExpansion::quad_value(std::span<const Elem> v) const {
  if (v.size() != n_) throw std::invalid_argument("vector length mismatch");
  Elem acc = f_.zero();
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) acc = acc + quad(i, j) * v[i] * v[j];
  return acc;
}

std::string to_string(AdmissStatus s) {
  switch (s) {
    case AdmissStatus::NOT_CRITICAL: return "NOT_CRITICAL";
    case AdmissStatus::ADMISSIBLE: return "ADMISSIBLE";
    default: return "NOT_ADMISSIBLE";
  }
}

std::string to_string(AdmissCase c) {
  switch (c) {
    case AdmissCase::ODD_P_OR_EVEN_N: return "ODD_P_OR_EVEN_N";
    case AdmissCase::CHAR2_ODD_N_4NMID: return "CHAR2_ODD_N_4NMID";
    default: return "CHAR2_ODD_N_4MID";
  }
}

AdmissCase admissibility_case(std::uint64_t p, std::size_t chart_dim, std::uint64_t mu) {
  if (p != 2 || chart_dim % 2 == 0) return AdmissCase::ODD_P_OR_EVEN_N;
  if (mu == 0) throw std::invalid_argument("covering degree required in characteristic 2");
  return mu % 4 != 0 ? AdmissCase::CHAR2_ODD_N_4NMID : AdmissCase::CHAR2_ODD_N_4MID;
}

nlohmann::ordered_json AdmissibilityVerdict::to_json() const {
  nlohmann::ordered_json j;
  j["status"] = to_string(status);
  j["case"] = to_string(case_tag);
  j["hessian_rank"] = hessian_rank;
  j["bilinear_rank"] = bilinear_rank;
  j["length4"] = length4;
  j["length5"] = length5;
  j["quadric_smooth"] = quadric_smooth;
  return j;
}

namespace {

// dim F[x]/(J + m^D) for the Jacobian ideal J of the expanded germ: monomials
// of degree < D modulo the span of all monomial multiples of the partials,
// truncated below D.
std::int64_t local_length(const LocalExpansion& e, int D) {
  const Field& f = e.field();
  const std::size_t n = e.nvars();
  const auto full = e.terms();
  std::vector<std::map<Expo, Elem>> partials(n);
  for (const auto& [expo, c] : full)
    for (std::size_t i = 0; i < n; ++i) {
      if (expo[i] == 0) continue;
      const Elem fac = c * f.from_int(expo[i]);
      if (fac.is_zero()) continue;
      Expo d = expo;
      d[i] -= 1;
      auto [it, fresh] = partials[i].emplace(std::move(d), fac);
      if (!fresh) it->second = it->second + fac;
    }

  const auto monos = jet_monomials(n, D);
  std::map<Expo, std::size_t> index;
  for (std::size_t i = 0; i < monos.size(); ++i) index.emplace(monos[i], i);

  IncrementalRank rank(f, monos.size());
  const auto mults = jet_monomials(n, D - 1);  // degrees <= D-2
  std::vector<std::uint32_t> row;
  for (const auto& g : partials)
    for (const auto& alpha : mults) {
      row.assign(monos.size(), 0);
      bool nonzero = false;
      for (const auto& [gamma, c] : g) {
        Expo prod = alpha;
        for (std::size_t v = 0; v < n; ++v) prod[v] += gamma[v];
        const auto it = index.find(prod);
        if (it == index.end()) continue;  // degree >= D, truncated away
        const Elem cur = f.from_index(row[it->second]) + c;
        row[it->second] = static_cast<std::uint32_t>(cur.index());
        nonzero = nonzero || !cur.is_zero();
      }
      if (nonzero) rank.add_row(row);
    }
  return static_cast<std::int64_t>(monos.size()) - static_cast<std::int64_t>(rank.rank());
}

}  // namespace

AdmissibilityVerdict classify(const LocalExpansion& e, std::uint64_t p, std::size_t chart_dim,
                              std::uint64_t mu) {
  const Field& f = e.field();
  if (chart_dim != e.nvars()) throw std::invalid_argument("chart dimension mismatch");
  if (f.is_finite() ? static_cast<std::int64_t>(p) != f.characteristic() : p != 0)
    throw std::invalid_argument("characteristic mismatch");
  if (!e.is_critical()) throw std::invalid_argument("expansion has a nonzero linear part");

  AdmissibilityVerdict v;
  v.case_tag = admissibility_case(p, chart_dim, mu);
  const std::int64_t n = static_cast<std::int64_t>(chart_dim);
  bool admissible = false;
  switch (v.case_tag) {
    case AdmissCase::ODD_P_OR_EVEN_N: {
      if (p != 2) {
        v.hessian_rank = static_cast<std::int64_t>(mat_rank(e.hessian()));
        admissible = v.hessian_rank == n;
      } else {
        v.bilinear_rank = static_cast<std::int64_t>(mat_rank(e.polar_form()));
        admissible = v.bilinear_rank == n;
      }
      break;
    }
    case AdmissCase::CHAR2_ODD_N_4NMID: {
      if (e.order() < 5) throw std::invalid_argument("length test needs an order-5 expansion");
      v.length4 = local_length(e, 4);
      v.length5 = local_length(e, 5);
      admissible = v.length4 == 2 && v.length5 == 2;
      break;
    }
    case AdmissCase::CHAR2_ODD_N_4MID: {
      if (e.order() < 5) throw std::invalid_argument("length test needs an order-5 expansion");
      v.length4 = local_length(e, 4);
      v.length5 = local_length(e, 5);
      v.bilinear_rank = static_cast<std::int64_t>(mat_rank(e.polar_form()));
      bool smooth = false;
      if (v.bilinear_rank == n) {
        smooth = true;  // cannot happen for odd n (alternating), kept for safety
      } else if (v.bilinear_rank == n - 1) {
        const auto kern = mat_kernel(e.polar_form());
        smooth = kern.size() == 1 && !e.quad_value(kern[0]).is_zero();
      }
      v.quadric_smooth = smooth ? 1 : 0;
      admissible = v.length4 == 2 && v.length5 == 2 && smooth;
      break;
    }
  }
  v.status = admissible ? AdmissStatus::ADMISSIBLE : AdmissStatus::NOT_ADMISSIBLE;
  return v;
}

AdmissibilityVerdict classify_at(const LocalPoly& p, std::span<const Elem> center,
                                 std::uint64_t char_p, std::uint64_t mu) {
  const LocalExpansion e(p, center, 5);
  if (!e.is_critical()) {
    AdmissibilityVerdict v;
    v.status = AdmissStatus::NOT_CRITICAL;
    v.case_tag = admissibility_case(char_p, p.nvars(), mu);
    return v;
  }
  return classify(e, char_p, p.nvars(), mu);
}

void for_each_critical_point(const LocalPoly& p, std::uint64_t budget,
                             const std::function<bool(std::span<const Elem>)>& visit) {
  const Field& f = p.field();
  if (!f.is_finite()) throw std::invalid_argument("critical point scan needs a finite field");
  const std::size_t n = p.nvars();
  std::vector<PackedPoly> partials;
  for (std::size_t i = 0; i < n; ++i)
    partials.push_back(PackedPoly::from_terms(n, p.derivative(i).terms()));
  std::vector<Elem> coords(n, f.zero());
  for_each_common_zero(f, n, partials, budget, [&](const std::vector<std::uint64_t>& pt) {
    for (std::size_t i = 0; i < n; ++i) coords[i] = f.from_index(pt[i]);
    return visit(coords);
  });
}

std::vector<std::vector<Elem>> critical_points(const LocalPoly& p, std::uint64_t budget) {
  std::vector<std::vector<Elem>> out;
  for_each_critical_point(p, budget, [&](std::span<const Elem> pt) {
    out.emplace_back(pt.begin(), pt.end());
    return true;
  });
  return out;
}

bool is_critical_point(const LocalPoly& p, std::span<const Elem> point) {
  for (std::size_t i = 0; i < p.nvars(); ++i)
    if (!p.derivative(i).evaluate(point).is_zero()) return false;
  return true;
}

BiPoly cover_transform(const BiPoly& a, const BiPoly& f, std::uint64_t p) {
  if (p < 2) throw std::invalid_argument("covering degree must be at least 2");
  if (!a.grading().same_as(f.grading())) throw std::invalid_argument("different gradings");
  if (a.field() != f.field()) throw std::invalid_argument("mixed fields");
  const Bidegree da = a.degree(), df = f.degree();
  if (da.beta != 0 || da.alpha < 1)
    throw std::invalid_argument("first factor must have bidegree (m, 0) with m >= 1");
  if (df.alpha != da.alpha || df.beta < 1)
    throw std::invalid_argument("second factor must have bidegree (m, l) with l >= 1");
  return pow(a, static_cast<int>(p) - 1) * f;
}

bool cover_identity_holds(const WpsBundle& cover, const BiPoly& a, const BiPoly& f,
                          std::uint64_t p) {
  cover_transform(a, f, p);  // validates shapes
  const auto& g = cover.grading_ptr();
  const std::size_t zi = g->index_of("z");
  const BiPoly la = lift_to(a, g);
  const BiPoly lf = lift_to(f, g);
  BiPoly z(g, la.field(), Bidegree{g->row1(zi), g->row2(zi)});
  Expo e(g->var_count(), 0);
  e[zi] = 1;
  z.add_term(e, la.field().one());
  const int pe = static_cast<int>(p);
  const BiPoly lhs = pow(la, pe) * z + pow(la, pe - 1) * lf;
  const BiPoly rhs = pow(la, pe - 1) * (la * z + lf);
  return lhs == rhs;
}

namespace {

// True when a takes a nonzero value at some rational point of the base
// projective space.  Random probing first; exhaustive only on small bases.
bool base_witness_exists(const WpsBundle& bundle, const BiPoly& a, std::uint64_t seed) {
  const Field& f = a.field();
  const std::size_t nv = bundle.grading().var_count();
  const std::size_t nb = bundle.grading().base_count();
  const std::uint64_t q = f.size();
  std::vector<Elem> vals(nv, f.one());  // fiber coordinates are irrelevant
  Rng rng(Rng::derive(seed, "base-witness"));
  for (int t = 0; t < 1000; ++t) {
    bool allzero = true;
    for (std::size_t i = 0; i < nb; ++i) {
      vals[i] = f.from_index(rng.below(q));
      allzero = allzero && vals[i].is_zero();
    }
    if (allzero) continue;
    if (!evaluate(a, vals).is_zero()) return true;
  }
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < nb; ++i) {
    if (total > (1u << 22) / q) return false;  // sampling verdict stands
    total *= q;
  }
  std::vector<std::uint64_t> odo(nb, 0);
  for (std::uint64_t step = 1; step < total; ++step) {
    std::size_t carry = 0;
    while (true) {
      odo[carry] += 1;
      if (odo[carry] < q) break;
      odo[carry] = 0;
      carry += 1;
    }
    for (std::size_t i = 0; i < nb; ++i) vals[i] = f.from_index(odo[i]);
    if (!evaluate(a, vals).is_zero()) return true;
  }
  return false;
}

}  // namespace

CensusReport census_with(const WpsBundle& bundle, const BiPoly& a, const BiPoly& f,
                         std::uint64_t p, std::uint64_t mu, std::uint64_t budget) {
  const BiPoly s = cover_transform(a, f, p);
  const auto& g = bundle.grading();
  const std::size_t yi = g.index_of("y");

  CensusReport rep;
  rep.n = static_cast<std::uint64_t>(bundle.n());
  rep.m = static_cast<std::uint64_t>(a.degree().alpha);
  rep.r = static_cast<std::uint64_t>(bundle.r());
  rep.p = p;
  rep.mu = mu;
  rep.field_name = a.field().name();
  rep.a_str = a.str();
  rep.f_str = f.str();

  bool all_admissible = true;
  for (const Chart& chart : bundle.charts()) {
    const LocalPoly s_loc = localize(s, chart);
    const LocalPoly a_loc = localize(a, chart);
    const bool x_chart = chart.fiber_var() != yi;
    const std::size_t y_coord = x_chart ? chart.coord_of_var(yi) : 0;
    for_each_critical_point(s_loc, budget, [&](std::span<const Elem> pt) {
      if (a_loc.evaluate(pt).is_zero()) {
        rep.a_zero_skipped += 1;
        return true;
      }
      CriticalRecord rec;
      rec.chart = chart.label();
      rec.point.assign(pt.begin(), pt.end());
      rec.on_gamma = x_chart && rec.point[y_coord].is_zero();
      rec.verdict = classify(LocalExpansion(s_loc, rec.point, 5), p, chart.dim(), mu);
      rep.critical_total += 1;
      if (rec.on_gamma) rep.gamma_count += 1;
      if (rec.verdict.status != AdmissStatus::ADMISSIBLE) all_admissible = false;
      rep.points.push_back(std::move(rec));
      return true;
    });
  }
  rep.pass = all_admissible && rep.gamma_count == 0;
  return rep;
}

CensusReport census(std::uint64_t n, std::uint64_t m, std::uint64_t r, std::uint64_t p,
                    const Field& field, std::uint64_t seed, std::uint64_t budget,
                    int max_attempts) {
  if (n < 3 || r < 1 || m < 1 || n < m + r) throw std::invalid_argument("bad parameter tuple");
  const std::uint64_t l = n + 1 - m;
  if (!is_prime(p) || l % p != 0)
    throw std::invalid_argument("characteristic must be a prime dividing the fiber degree");
  if (!field.is_finite() || field.characteristic() != static_cast<std::int64_t>(p))
    throw std::invalid_argument("field characteristic mismatch");
  const WpsBundle R = WpsBundle::standard_R(static_cast<int>(n), static_cast<int>(r));
  const Bidegree da{static_cast<std::int64_t>(m), 0};
  const Bidegree df{static_cast<std::int64_t>(m), static_cast<std::int64_t>(l)};
  const BiPoly f = random_bipoly(R.grading_ptr(), field, df, Rng::derive(seed, "census-f")).poly;

  int attempts = 0;
  while (attempts < max_attempts) {
    const std::string tag = "census-a-" + std::to_string(attempts);
    const BiPoly a = random_bipoly(R.grading_ptr(), field, da, Rng::derive(seed, tag)).poly;
    attempts += 1;
    if (!base_witness_exists(R, a, Rng::derive(seed, tag + "-probe"))) continue;
    CensusReport rep = census_with(R, a, f, p, l, budget);
    rep.seed = seed;
    rep.attempts = attempts;
    return rep;
  }

  CensusReport rep;
  rep.n = n;
  rep.m = m;
  rep.r = r;
  rep.p = p;
  rep.mu = l;
  rep.field_name = field.name();
  rep.seed = seed;
  rep.attempts = attempts;
  rep.a_degenerate = true;
  rep.warning = "every drawn a vanished at all rational base points; census is vacuous";
  rep.f_str = f.str();
  rep.pass = true;
  return rep;
}

nlohmann::ordered_json CensusReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["m"] = m;
  j["r"] = r;
  j["p"] = p;
  j["mu"] = mu;
  j["field"] = field_name;
  j["seed"] = seed;
  j["attempts"] = attempts;
  j["a_degenerate"] = a_degenerate;
  j["warning"] = warning;
  j["a"] = a_str;
  j["f"] = f_str;
  j["critical_total"] = critical_total;
  j["a_zero_skipped"] = a_zero_skipped;
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const auto& rec : points) {
    nlohmann::ordered_json pj;
    pj["chart"] = rec.chart;
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    for (const auto& c : rec.point) coords.push_back(c.str());
    pj["point"] = coords;
    pj["on_gamma"] = rec.on_gamma;
    pj["verdict"] = rec.verdict.to_json();
    pts.push_back(std::move(pj));
  }
  j["points"] = pts;
  j["gamma_count"] = gamma_count;
  j["pass"] = pass;
  return j;
}

}
