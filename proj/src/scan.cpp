#include "wpscert/scan.hpp"

#include <algorithm>
#include <stdexcept>

#include "wpscert/bundle.hpp"

namespace wpscert {

std::uint64_t PackedPoly::pack_expo(const Expo& e) {
  std::uint64_t key = 0;
  for (std::int32_t v : e) {
    if (v < 0 || v > 63) throw std::invalid_argument("exponent out of packing range");
    key = key << 6 | static_cast<std::uint32_t>(v);
  }
  return key;
}

PackedPoly PackedPoly::from_terms(std::size_t nvars, const std::map<Expo, Elem>& terms) {
  if (nvars > 10) throw std::invalid_argument("too many variables to pack");
  PackedPoly out;
  out.nvars = nvars;
  out.terms.reserve(terms.size());
  for (const auto& [e, c] : terms) {
    if (e.size() != nvars) throw std::invalid_argument("exponent length mismatch");
    if (c.is_zero()) continue;
    out.terms.emplace_back(pack_expo(e), static_cast<std::uint32_t>(c.index()));
  }
  // map order is lex order, which is packed-key order
  return out;
}

namespace {

using Terms = std::vector<std::pair<std::uint64_t, std::uint32_t>>;

struct Scanner {
  const detail::FieldImpl* f;
  std::uint64_t q;
  std::size_t nvars;
  std::size_t npolys;
  // scratch term lists, one per (depth, poly)
  std::vector<std::vector<Terms>> level;
  std::vector<std::uint64_t> point;
  const std::function<bool(const std::vector<std::uint64_t>&)>* visit;
  bool stopped = false;
  std::uint64_t vpow[64];

  // Substitutes value v for the last remaining variable of src into dst.
  void substitute(const Terms& src, Terms& dst, std::uint64_t v) {
    dst.clear();
    if (v == 0) {
      for (const auto& [key, c] : src)
        if ((key & 63) == 0) dst.emplace_back(key >> 6, c);
      return;
    }
    std::uint32_t maxe = 0;
    for (const auto& [key, c] : src) maxe = std::max(maxe, static_cast<std::uint32_t>(key & 63));
    vpow[0] = 1;
    for (std::uint32_t e = 1; e <= maxe; ++e) vpow[e] = f->mul(vpow[e - 1], v);
    for (const auto& [key, c] : src) {
      const std::uint64_t nk = key >> 6;
      const std::uint64_t nc = f->mul(c, vpow[key & 63]);
      if (!dst.empty() && dst.back().first == nk) {
        const std::uint64_t acc = f->add(dst.back().second, nc);
        if (acc == 0)
          dst.pop_back();
        else
          dst.back().second = static_cast<std::uint32_t>(acc);
      } else if (nc != 0) {
        dst.emplace_back(nk, static_cast<std::uint32_t>(nc));
      }
    }
  }

  static bool dead(const Terms& t) { return t.size() == 1 && t[0].first == 0; }

  void leaf_check(std::size_t depth) {
    for (const Terms& t : level[depth])
      if (!t.empty()) return;
    if (!(*visit)(point)) stopped = true;
  }

  // remaining == 1: root-filter on the sparsest univariate, then confirm the
  // rest only at its roots.
  void univariate(std::size_t depth) {
    const auto& polys = level[depth];
    std::size_t pivot = npolys;
    std::uint64_t best = ~0ULL;
    for (std::size_t i = 0; i < npolys; ++i) {
      if (polys[i].empty()) continue;
      const std::uint64_t deg = polys[i].back().first;
      if (deg < best) {
        best = deg;
        pivot = i;
      }
    }
    if (pivot == npolys) {
      // every polynomial vanished identically
      for (std::uint64_t v = 0; v < q && !stopped; ++v) {
        point[0] = v;
        if (!(*visit)(point)) stopped = true;
      }
      return;
    }
    std::uint64_t dense[64] = {0};
    const std::uint64_t deg = polys[pivot].back().first;
    for (const auto& [e, c] : polys[pivot]) dense[e] = c;
    for (std::uint64_t v = 0; v < q && !stopped; ++v) {
      std::uint64_t acc = 0;
      for (std::uint64_t d = deg + 1; d-- > 0;) acc = f->add(f->mul(acc, v), dense[d]);
      if (acc != 0) continue;
      bool ok = true;
      for (std::size_t i = 0; i < npolys && ok; ++i) {
        if (i == pivot || polys[i].empty()) continue;
        std::uint64_t val = 0;
        for (auto it = polys[i].rbegin(); it != polys[i].rend(); ++it) {
          // evaluate by powers; degrees are tiny
          val = f->add(val, f->mul(it->second, f->pow(v, it->first)));
        }
        ok = val == 0;
      }
      if (ok) {
        point[0] = v;
        if (!(*visit)(point)) stopped = true;
      }
    }
  }

  void rec(std::size_t depth) {
    if (stopped) return;
    const std::size_t remaining = nvars - depth;
    if (remaining == 0) {
      leaf_check(depth);
      return;
    }
    if (remaining == 1) {
      univariate(depth);
      return;
    }
    for (std::uint64_t v = 0; v < q && !stopped; ++v) {
      bool prune = false;
      for (std::size_t i = 0; i < npolys; ++i) {
        substitute(level[depth][i], level[depth + 1][i], v);
        if (dead(level[depth + 1][i])) {
          prune = true;
          break;
        }
      }
      if (prune) continue;
      point[remaining - 1] = v;
      rec(depth + 1);
    }
  }
};

}  // namespace

void for_each_common_zero(const Field& f, std::size_t nvars, const std::vector<PackedPoly>& polys,
                          std::uint64_t budget,
                          const std::function<bool(const std::vector<std::uint64_t>&)>& visit) {
  if (!f.is_finite()) throw std::invalid_argument("scan needs a finite field");
  if (nvars > 10) throw std::invalid_argument("too many variables to scan");
  const std::uint64_t q = f.size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < nvars; ++i) {
    if (total > budget / q) throw BudgetError("scan budget exceeded: field size " +
                                              std::to_string(q) + "^" + std::to_string(nvars));
    total *= q;
  }
  if (total > budget) throw BudgetError("scan budget exceeded");

  Scanner s;
  s.f = f.raw();
  s.q = q;
  s.nvars = nvars;
  s.npolys = polys.size();
  s.point.assign(nvars == 0 ? 1 : nvars, 0);
  s.visit = &visit;
  s.level.assign(nvars + 1, {});
  for (auto& lv : s.level) {
    lv.resize(polys.size());
    for (std::size_t i = 0; i < polys.size(); ++i) lv[i].reserve(polys[i].terms.size());
  }
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (polys[i].nvars != nvars) throw std::invalid_argument("scan variable count mismatch");
    s.level[0][i] = polys[i].terms;
  }
  if (nvars == 0) {
    s.point.clear();
    s.leaf_check(0);
    return;
  }
  // a nonzero constant among the inputs kills everything up front
  for (const auto& lv : s.level[0])
    if (Scanner::dead(lv)) return;
  s.rec(0);
}

}  // namespace wpscert
