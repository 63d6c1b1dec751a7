#include "wpscert/bundle.hpp"

#include <algorithm>

#include "wpscert/scan.hpp"

namespace wpscert {

// ---- Chart ----

Chart::Chart(std::shared_ptr<const GradingMatrix> g, std::size_t base_var, std::size_t fiber_var)
    : g_(std::move(g)), base_var_(base_var), fiber_var_(fiber_var) {
  if (!g_) throw std::invalid_argument("null grading");
  if (base_var_ >= g_->base_count()) throw std::invalid_argument("not a base variable");
  if (fiber_var_ < g_->base_count() || fiber_var_ >= g_->var_count())
    throw std::invalid_argument("not a fiber variable");
  if (g_->row2(fiber_var_) != 1)
    throw std::invalid_argument("chart needs a fiber variable of weight 1");
  for (std::size_t i = 0; i < g_->var_count(); ++i)
    if (i != base_var_ && i != fiber_var_) coord_vars_.push_back(i);
}

std::vector<std::string> Chart::coord_names() const {
  std::vector<std::string> out;
  out.reserve(coord_vars_.size());
  for (std::size_t v : coord_vars_) out.push_back(g_->name(v));
  return out;
}

std::size_t Chart::coord_of_var(std::size_t var) const {
  const auto it = std::find(coord_vars_.begin(), coord_vars_.end(), var);
  if (it == coord_vars_.end()) throw std::invalid_argument("variable is inverted on this chart");
  return static_cast<std::size_t>(it - coord_vars_.begin());
}

bool Chart::has_coord(std::size_t var) const {
  return std::find(coord_vars_.begin(), coord_vars_.end(), var) != coord_vars_.end();
}

std::string Chart::label() const {
  return "U(" + g_->name(base_var_) + "," + g_->name(fiber_var_) + ")";
}

// ---- LocalPoly ----

LocalPoly::LocalPoly(Chart chart, Field f) : chart_(std::move(chart)), f_(std::move(f)) {}

std::int64_t LocalPoly::total_degree() const {
  std::int64_t deg = -1;
  for (const auto& [e, c] : terms_) {
    std::int64_t d = 0;
    for (std::int32_t v : e) d += v;
    deg = std::max(deg, d);
  }
  return deg;
}

void LocalPoly::add_term(const Expo& e, const Elem& c) {
  if (e.size() != chart_.dim()) throw std::invalid_argument("exponent length mismatch");
  for (std::int32_t v : e)
    if (v < 0) throw std::invalid_argument("negative exponent");
  if (c.tag() != f_.raw()) throw std::invalid_argument("mixed fields");
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

Elem LocalPoly::coeff(const Expo& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? f_.zero() : it->second;
}

Elem LocalPoly::evaluate(std::span<const Elem> pt) const {
  if (pt.size() != chart_.dim()) throw std::invalid_argument("point length mismatch");
  Elem out = f_.zero();
  for (const auto& [e, c] : terms_) {
    Elem term = c;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0) term = term * f_.pow(pt[i], e[i]);
    out = out + term;
  }
  return out;
}

LocalPoly LocalPoly::derivative(std::size_t coord) const {
  if (coord >= chart_.dim()) throw std::invalid_argument("coordinate out of range");
  LocalPoly out(chart_, f_);
  for (const auto& [e, c] : terms_) {
    if (e[coord] == 0) continue;
    Expo d = e;
    d[coord] -= 1;
    out.add_term(d, c * f_.from_int(e[coord]));
  }
  return out;
}

std::string LocalPoly::str() const {
  if (terms_.empty()) return "0";
  const auto names = chart_.coord_names();
  std::string out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (!out.empty()) out += " + ";
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    if (mono.empty()) {
      out += c.str();
      continue;
    }
    if (c.is_one()) {
      out += mono;
      continue;
    }
    std::string cs = c.str();
    if (cs.find('+') != std::string::npos || cs.find('-') != std::string::npos) cs = "(" + cs + ")";
    out += cs + "*" + mono;
  }
  return out;
}

// ---- BundlePoint ----

BundlePoint::BundlePoint(std::shared_ptr<const GradingMatrix> g, std::vector<Elem> coords)
    : g_(std::move(g)), coords_(std::move(coords)) {
  if (!g_) throw std::invalid_argument("null grading");
  if (coords_.size() != g_->var_count()) throw std::invalid_argument("coordinate length mismatch");
  const auto* tag = coords_.empty() ? nullptr : coords_[0].tag();
  for (const auto& c : coords_)
    if (!c.valid() || c.tag() != tag) throw std::invalid_argument("mixed fields");
  bool base_ok = false, fiber_ok = false;
  for (std::size_t i = 0; i < g_->base_count(); ++i) base_ok = base_ok || !coords_[i].is_zero();
  for (std::size_t i = g_->base_count(); i < g_->var_count(); ++i)
    fiber_ok = fiber_ok || !coords_[i].is_zero();
  if (!base_ok || !fiber_ok)
    throw std::invalid_argument("point lies in the irrelevant locus");
}

// ---- WpsBundle ----

namespace {

std::shared_ptr<const GradingMatrix> family_grading(WpsBundle::Family fam, int n, int r, int l) {
  std::vector<std::string> names;
  std::vector<std::int64_t> r1, r2;
  for (int i = 0; i <= n - r; ++i) {
    names.push_back("u" + std::to_string(i));
    r1.push_back(1);
    r2.push_back(0);
  }
  if (fam == WpsBundle::Family::P) {
    names.push_back("w");
    r1.push_back(0);
    r2.push_back(1);
  } else if (fam == WpsBundle::Family::Q) {
    names.push_back("z");
    r1.push_back(0);
    r2.push_back(l);
  }
  for (int j = 1; j <= r; ++j) {
    names.push_back("x" + std::to_string(j));
    r1.push_back(0);
    r2.push_back(1);
  }
  names.push_back("y");
  r1.push_back(-1);
  r2.push_back(1);
  return std::make_shared<GradingMatrix>(std::move(names), std::move(r1), std::move(r2),
                                         static_cast<std::size_t>(n - r + 1));
}

void check_family_params(int n, int r) {
  if (n < 3) throw std::invalid_argument("need n >= 3");
  if (r < 1) throw std::invalid_argument("need r >= 1");
  if (n < r + 1) throw std::invalid_argument("need n >= r + 1");
}

}  // namespace

WpsBundle WpsBundle::standard_P(int n, int r) {
  check_family_params(n, r);
  return WpsBundle(Family::P, n, r, 0, family_grading(Family::P, n, r, 0));
}

WpsBundle WpsBundle::standard_Q(int n, int r, int l) {
  check_family_params(n, r);
  if (l < 2) throw std::invalid_argument("need fiber weight l >= 2");
  return WpsBundle(Family::Q, n, r, l, family_grading(Family::Q, n, r, l));
}

WpsBundle WpsBundle::standard_R(int n, int r) {
  check_family_params(n, r);
  return WpsBundle(Family::R, n, r, 0, family_grading(Family::R, n, r, 0));
}

std::size_t WpsBundle::dimension() const {
  return (g_->base_count() - 1) + (g_->fiber_count() - 1);
}

std::string WpsBundle::name() const {
  std::string fam = family_ == Family::P ? "P" : family_ == Family::Q ? "Q" : "R";
  std::string out = fam + "(" + std::to_string(n_) + "," + std::to_string(r_);
  if (family_ == Family::Q) out += "," + std::to_string(l_);
  return out + ")";
}

std::vector<Chart> WpsBundle::charts() const {
  std::vector<Chart> out;
  for (std::size_t i = 0; i < g_->base_count(); ++i)
    for (std::size_t j = g_->base_count(); j < g_->var_count(); ++j)
      if (g_->row2(j) == 1) out.emplace_back(g_, i, j);
  return out;
}

Chart WpsBundle::chart(std::size_t base_index, const std::string& fiber_name) const {
  return Chart(g_, base_index, g_->index_of(fiber_name));
}

nlohmann::ordered_json WpsBundle::describe() const {
  nlohmann::ordered_json j;
  j["name"] = name();
  j["family"] = family_ == Family::P ? "P" : family_ == Family::Q ? "Q" : "R";
  j["n"] = n_;
  j["r"] = r_;
  if (family_ == Family::Q) j["l"] = l_;
  j["variables"] = g_->names();
  j["row1"] = std::vector<std::int64_t>(g_->names().size(), 0);
  j["row2"] = std::vector<std::int64_t>(g_->names().size(), 0);
  for (std::size_t i = 0; i < g_->var_count(); ++i) {
    j["row1"][i] = g_->row1(i);
    j["row2"][i] = g_->row2(i);
  }
  j["base_count"] = g_->base_count();
  j["dimension"] = dimension();
  std::vector<std::string> labels;
  for (const Chart& c : charts()) labels.push_back(c.label());
  j["charts"] = labels;
  return j;
}

// ---- localization and points ----

LocalPoly localize(const BiPoly& s, const Chart& chart) {
  if (!chart.grading().same_as(s.grading()))
    throw std::invalid_argument("chart and section live on different bundles");
  LocalPoly out(chart, s.field());
  const auto& cv = chart.coord_vars();
  for (const auto& [e, c] : s.terms()) {
    Expo le(cv.size());
    for (std::size_t k = 0; k < cv.size(); ++k) le[k] = e[cv[k]];
    out.add_term(le, c);
  }
  return out;
}

std::optional<std::vector<Elem>> chart_coords(const Chart& chart, const BundlePoint& pt) {
  if (!chart.grading().same_as(pt.grading()))
    throw std::invalid_argument("chart and point live on different bundles");
  const GradingMatrix& g = chart.grading();
  const auto& co = pt.coords();
  const Elem& ai = co[chart.base_var()];
  const Elem& aj = co[chart.fiber_var()];
  if (ai.is_zero() || aj.is_zero()) return std::nullopt;
  const Field f = ai.field();
  const std::int64_t lam_j = g.row1(chart.fiber_var());
  std::vector<Elem> out;
  out.reserve(chart.dim());
  for (std::size_t v : chart.coord_vars()) {
    if (v < g.base_count()) {
      out.push_back(co[v] / ai);
      continue;
    }
    const std::int64_t a_v = g.row2(v);
    const std::int64_t lam_v = g.row1(v);
    // x~_v = u_i^(a_v*lam_j - lam_v) * x_v / x_j^a_v
    Elem val = f.pow(ai, a_v * lam_j - lam_v) * co[v] / f.pow(aj, a_v);
    out.push_back(std::move(val));
  }
  return out;
}

const Chart& chart_containing(const std::vector<Chart>& charts, const BundlePoint& pt) {
  for (const Chart& c : charts) {
    if (!c.grading().same_as(pt.grading())) continue;
    if (!pt.coords()[c.base_var()].is_zero() && !pt.coords()[c.fiber_var()].is_zero()) return c;
  }
  throw ExcludedLocusError("point lies on no chart of the bundle");
}

Elem evaluate_at(const BiPoly& s, const BundlePoint& pt) {
  if (!s.grading().same_as(pt.grading()))
    throw std::invalid_argument("section and point live on different bundles");
  return evaluate(s, pt.coords());
}

bool vanishes_at(const BiPoly& s, const BundlePoint& pt) { return evaluate_at(s, pt).is_zero(); }

// ---- base locus ----

BaseLocusReport base_locus(const WpsBundle& bundle, const std::vector<BiPoly>& sections,
                           std::uint64_t budget) {
  if (sections.empty()) throw std::invalid_argument("no sections given");
  const GradingMatrix& g = bundle.grading();
  const Field f = sections[0].field();
  for (const auto& s : sections) {
    if (!s.grading().same_as(g)) throw std::invalid_argument("section on a different bundle");
    if (s.field() != f) throw std::invalid_argument("mixed fields");
  }

  BaseLocusReport rep;
  bool all_monomial = true;
  for (const auto& s : sections) all_monomial = all_monomial && s.term_count() == 1;

  if (all_monomial) {
    rep.combinatorial_applicable = true;
    // A vanishing pattern is a set S of variables allowed to be zero; it is
    // realizable iff it misses some base and some fiber variable, and it kills
    // every section iff each monomial has a variable in S.  Checking all
    // patterns decides emptiness over every field at once.
    const std::size_t nv = g.var_count();
    std::optional<std::uint32_t> hit;
    for (std::uint32_t mask = 0; mask < (1u << nv); ++mask) {
      bool base_free = false, fiber_free = false;
      for (std::size_t i = 0; i < g.base_count(); ++i)
        if (!(mask >> i & 1)) base_free = true;
      for (std::size_t i = g.base_count(); i < nv; ++i)
        if (!(mask >> i & 1)) fiber_free = true;
      if (!base_free || !fiber_free) continue;
      bool covers = true;
      for (const auto& s : sections) {
        const Expo& e = s.terms().begin()->first;
        bool has = false;
        for (std::size_t i = 0; i < nv; ++i)
          if (e[i] > 0 && (mask >> i & 1)) has = true;
        if (!has) {
          covers = false;
          break;
        }
      }
      if (covers) {
        hit = mask;
        break;
      }
    }
    rep.combinatorial_empty = !hit.has_value();
    if (hit) {
      rep.empty = false;
      std::vector<Elem> w(nv);
      for (std::size_t i = 0; i < nv; ++i) w[i] = (*hit >> i & 1) ? f.zero() : f.one();
      rep.witness = std::move(w);
      rep.witness_chart = "pattern";
      return rep;
    }
  }

  if (!f.is_finite()) {
    if (!all_monomial)
      throw std::invalid_argument("scan route needs a finite field");
    rep.empty = rep.combinatorial_empty;
    return rep;
  }

  const auto charts = bundle.charts();
  std::uint64_t total = 0;
  const std::uint64_t q = f.size();
  for (const Chart& c : charts) {
    std::uint64_t pts = 1;
    bool over = false;
    for (std::size_t i = 0; i < c.dim(); ++i) {
      if (pts > budget / q) {
        over = true;
        break;
      }
      pts *= q;
    }
    if (over || total > budget - pts) {
      if (all_monomial) return rep;  // combinatorial verdict already exact
      throw BudgetError("base locus scan budget exceeded");
    }
    total += pts;
  }

  rep.scanned = true;
  rep.points_checked = total;
  for (const Chart& c : charts) {
    std::vector<PackedPoly> polys;
    for (const auto& s : sections)
      polys.push_back(PackedPoly::from_terms(c.dim(), localize(s, c).terms()));
    bool found = false;
    std::vector<std::uint64_t> zero;
    for_each_common_zero(f, c.dim(), polys, budget, [&](const std::vector<std::uint64_t>& pt) {
      found = true;
      zero = pt;
      return false;
    });
    if (found) {
      rep.empty = false;
      std::vector<Elem> w(g.var_count(), f.one());
      for (std::size_t k = 0; k < c.coord_vars().size(); ++k)
        w[c.coord_vars()[k]] = f.from_index(zero[k]);
      rep.witness = std::move(w);
      rep.witness_chart = c.label();
      return rep;
    }
  }
  rep.empty = true;
  return rep;
}

}  // namespace wpscert
