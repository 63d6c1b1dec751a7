#include "wpscert/jet.hpp"

#include <algorithm>
#include <map>

namespace wpscert {

namespace {

std::int64_t total(const Expo& e) {
  std::int64_t d = 0;
  for (std::int32_t v : e) d += v;
  return d;
}

void check_order(int k) {
  if (k < 1) throw std::invalid_argument("jet order must be at least 1");
}

// Multiplies acc by (c + t_i)^e truncated below degree k, where t_i is the
// i-th local coordinate.  Binomial coefficients are taken in the field, so
// characteristic-p cancellation is automatic.
void shift_factor(std::map<Expo, Elem>& acc, std::size_t i, const Elem& c, std::int32_t e, int k,
                  const Field& f) {
  std::vector<std::pair<std::int32_t, Elem>> binomials;  // (power of t_i, coefficient)
  for (std::int32_t s = 0; s <= e && s < k; ++s) {
    // C(e,s) stays small for the supported exponents; from_int reduces mod p
    const Elem coef = f.from_int(static_cast<std::int64_t>(
                          binom(static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(s)))) *
                      f.pow(c, e - s);
    binomials.emplace_back(s, coef);
  }
  std::map<Expo, Elem> next;
  for (const auto& [expo, coeff] : acc) {
    const std::int64_t room = k - 1 - total(expo);
    for (const auto& [s, bc] : binomials) {
      if (s > room) break;
      const Elem prod = coeff * bc;
      if (prod.is_zero()) continue;
      Expo ne = expo;
      ne[i] += s;
      auto [it, fresh] = next.emplace(ne, prod);
      if (!fresh) {
        it->second = it->second + prod;
        if (it->second.is_zero()) next.erase(it);
      }
    }
  }
  acc = std::move(next);
}

}  // namespace

std::vector<Expo> jet_monomials(std::size_t dim, int k) {
  check_order(k);
  std::vector<Expo> out;
  Expo e(dim, 0);
  auto walk = [&](auto&& self, std::size_t i, std::int64_t left) -> void {
    if (i == dim) {
      out.push_back(e);
      return;
    }
    for (std::int64_t v = 0; v <= left; ++v) {
      e[i] = static_cast<std::int32_t>(v);
      self(self, i + 1, left - v);
    }
    e[i] = 0;
  };
  walk(walk, 0, k - 1);
  std::stable_sort(out.begin(), out.end(),
                   [](const Expo& a, const Expo& b) {
                     const std::int64_t ta = total(a), tb = total(b);
                     return ta != tb ? ta < tb : a < b;
                   });
  return out;
}

std::uint64_t jet_dim(std::size_t dim, int k) {
  check_order(k);
  return binom(dim + static_cast<std::uint64_t>(k) - 1, dim);
}

std::vector<Elem> expand_at(const LocalPoly& p, std::span<const Elem> center, int k) {
  check_order(k);
  if (center.size() != p.nvars()) throw std::invalid_argument("center length mismatch");
  const Field& f = p.field();
  for (const Elem& c : center)
    if (c.tag() != f.raw()) throw std::invalid_argument("mixed fields");

  const auto monos = jet_monomials(p.nvars(), k);
  std::map<Expo, std::size_t> index;
  for (std::size_t i = 0; i < monos.size(); ++i) index.emplace(monos[i], i);

  std::vector<Elem> out(monos.size(), f.zero());
  for (const auto& [e, c] : p.terms()) {
    std::map<Expo, Elem> acc;
    acc.emplace(Expo(p.nvars(), 0), c);
    for (std::size_t i = 0; i < e.size() && !acc.empty(); ++i)
      if (e[i] != 0) shift_factor(acc, i, center[i], e[i], k, f);
    for (const auto& [expo, coeff] : acc) {
      const std::size_t at = index.at(expo);
      out[at] = out[at] + coeff;
    }
  }
  return out;
}

JetTarget::JetTarget(Chart c, std::vector<Elem> ctr, int order)
    : chart(std::move(c)), center(std::move(ctr)), k(order) {
  check_order(k);
  if (k > 4) throw std::invalid_argument("jet order above 4 is not supported");
  if (center.size() != chart.dim()) throw std::invalid_argument("center length mismatch");
}

JetTarget jet_target_at(const WpsBundle& bundle, const BundlePoint& pt, int k) {
  const auto charts = bundle.charts();
  const Chart& c = chart_containing(charts, pt);
  auto coords = chart_coords(c, pt);
  return JetTarget(c, std::move(*coords), k);
}

namespace {

std::string section_label(const BiPoly& s) {
  if (s.term_count() <= 3) return s.str();
  return "[" + std::to_string(s.term_count()) + " terms, degree " + s.degree().str() + "]";
}

std::string local_label(const GradingMatrix& g, const Chart& chart, const Expo& e) {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += g.name(chart.coord_vars()[i]);
    if (e[i] > 1) out += "^" + std::to_string(e[i]);
  }
  return out.empty() ? "1" : out;
}

void check_sections(const std::vector<BiPoly>& sections, const JetTarget& t) {
  if (sections.empty()) throw std::invalid_argument("no sections given");
  const Field& f = sections[0].field();
  for (const auto& s : sections) {
    if (!s.grading().same_as(t.chart.grading()))
      throw std::invalid_argument("section on a different bundle");
    if (s.field() != f) throw std::invalid_argument("mixed fields");
    if (s.degree() != sections[0].degree())
      throw std::invalid_argument("sections of mixed bidegrees");
  }
  for (const Elem& c : t.center)
    if (c.tag() != f.raw()) throw std::invalid_argument("mixed fields");
}

}  // namespace

JetMatrix rest_matrix(const std::vector<BiPoly>& sections, const JetTarget& t) {
  check_sections(sections, t);
  const Field& f = sections[0].field();
  const auto monos = jet_monomials(t.chart.dim(), t.k);
  JetMatrix out{DenseMatrix(f, sections.size(), monos.size()), {}, {}};
  for (const auto& e : monos) out.col_labels.push_back(local_label(t.chart.grading(), t.chart, e));
  for (std::size_t i = 0; i < sections.size(); ++i) {
    out.row_labels.push_back(section_label(sections[i]));
    const auto row = expand_at(localize(sections[i], t.chart), t.center, t.k);
    for (std::size_t j = 0; j < row.size(); ++j) out.mat.set(i, j, row[j]);
  }
  return out;
}

SurjectivityResult rest_surjective(const std::vector<BiPoly>& sections, const JetTarget& t) {
  check_sections(sections, t);
  const Field& f = sections[0].field();
  SurjectivityResult res;
  res.target_dim = jet_dim(t.chart.dim(), t.k);

  if (f.is_finite()) {
    IncrementalRank inc(f, static_cast<std::size_t>(res.target_dim));
    for (std::size_t i = 0; i < sections.size() && !inc.full(); ++i) {
      const auto row = expand_at(localize(sections[i], t.chart), t.center, t.k);
      std::vector<std::uint32_t> idx(row.size());
      for (std::size_t j = 0; j < row.size(); ++j)
        idx[j] = static_cast<std::uint32_t>(row[j].index());
      if (inc.add_row(idx)) res.witness_rows.push_back(i);
    }
    res.rank = inc.rank();
  } else {
    const JetMatrix jm = rest_matrix(sections, t);
    const RankInfo info = mat_rank_info(jm.mat);
    res.rank = info.rank;
    res.witness_rows = info.pivot_rows;
  }
  res.surjective = res.rank == res.target_dim;
  return res;
}

}  // namespace wpscert
