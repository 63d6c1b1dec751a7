#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpscert/bipoly.hpp"

namespace wpscert {

// Thrown when a requested finite enumeration would overrun its point budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for points that lie on no affine chart of the bundle (the excluded
// locus of the construction).
struct ExcludedLocusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Affine chart obtained by inverting one base variable and one fiber variable
// of weight 1.  Local coordinates are the remaining variables, in ascending
// variable order.
class Chart {
public:
  Chart(std::shared_ptr<const GradingMatrix> g, std::size_t base_var, std::size_t fiber_var);

  const GradingMatrix& grading() const { return *g_; }
  const std::shared_ptr<const GradingMatrix>& grading_ptr() const { return g_; }
  std::size_t base_var() const { return base_var_; }
  std::size_t fiber_var() const { return fiber_var_; }
  const std::vector<std::size_t>& coord_vars() const { return coord_vars_; }
  std::size_t dim() const { return coord_vars_.size(); }
  std::vector<std::string> coord_names() const;
  // Position of a variable among the chart coordinates; error for the two
  // inverted variables.
  std::size_t coord_of_var(std::size_t var) const;
  bool has_coord(std::size_t var) const;
  std::string label() const;  // "U(u0,x1)"
  bool same_as(const Chart& o) const {
    return g_->same_as(*o.g_) && base_var_ == o.base_var_ && fiber_var_ == o.fiber_var_;
  }

private:
  std::shared_ptr<const GradingMatrix> g_;
  std::size_t base_var_, fiber_var_;
  std::vector<std::size_t> coord_vars_;
};

// Polynomial in the local coordinates of one chart.
class LocalPoly {
public:
  LocalPoly(Chart chart, Field f);

  const Chart& chart() const { return chart_; }
  const Field& field() const { return f_; }
  std::size_t nvars() const { return chart_.dim(); }
  const std::map<Expo, Elem>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::int64_t total_degree() const;  // -1 for the zero polynomial

  void add_term(const Expo& e, const Elem& c);
  Elem coeff(const Expo& e) const;
  Elem evaluate(std::span<const Elem> pt) const;
  LocalPoly derivative(std::size_t coord) const;
  std::string str() const;

private:
  Chart chart_;
  Field f_;
  std::map<Expo, Elem> terms_;
};

// Point of the bundle in affine representative coordinates, one per variable.
// Valid when the base block and the fiber block are each not identically zero.
class BundlePoint {
public:
  BundlePoint(std::shared_ptr<const GradingMatrix> g, std::vector<Elem> coords);
  const std::vector<Elem>& coords() const { return coords_; }
  const GradingMatrix& grading() const { return *g_; }

private:
  std::shared_ptr<const GradingMatrix> g_;
  std::vector<Elem> coords_;
};

// Toric projective-bundle model fixed by a two-row grading matrix.  The three
// standard families share the base P^{n-r}:
//   P: fiber variables w, x_1..x_r, y with first row (0, 0..0, -1),
//   Q: w replaced by z of weight (0, l),
//   R: no w or z at all.
class WpsBundle {
public:
  enum class Family { P, Q, R };

  static WpsBundle standard_P(int n, int r);
  static WpsBundle standard_Q(int n, int r, int l);
  static WpsBundle standard_R(int n, int r);

  Family family() const { return family_; }
  int n() const { return n_; }
  int r() const { return r_; }
  int fiber_weight() const { return l_; }  // z-weight for Q, 0 otherwise
  const GradingMatrix& grading() const { return *g_; }
  const std::shared_ptr<const GradingMatrix>& grading_ptr() const { return g_; }
  std::size_t dimension() const;
  std::string name() const;

  // Every chart with a weight-1 fiber variable, base index ascending then
  // fiber variable ascending.
  std::vector<Chart> charts() const;
  Chart chart(std::size_t base_index, const std::string& fiber_name) const;

  nlohmann::ordered_json describe() const;

private:
  WpsBundle(Family fam, int n, int r, int l, std::shared_ptr<const GradingMatrix> g)
      : family_(fam), n_(n), r_(r), l_(l), g_(std::move(g)) {}
  Family family_;
  int n_, r_, l_;
  std::shared_ptr<const GradingMatrix> g_;
};

// Substitutes 1 for the chart's two inverted variables.  Distinct monomials of
// one bidegree stay distinct locally, so no information is lost.
LocalPoly localize(const BiPoly& s, const Chart& chart);

// Local coordinates of a point on the chart; empty when either inverted
// variable vanishes at the point.
std::optional<std::vector<Elem>> chart_coords(const Chart& chart, const BundlePoint& pt);

// First chart containing the point; throws ExcludedLocusError when none does.
const Chart& chart_containing(const std::vector<Chart>& charts, const BundlePoint& pt);

// Value on the affine representative (representative-dependent; its vanishing
// is not).
Elem evaluate_at(const BiPoly& s, const BundlePoint& pt);
bool vanishes_at(const BiPoly& s, const BundlePoint& pt);

struct BaseLocusReport {
  bool combinatorial_applicable = false;  // every section is a monomial
  bool combinatorial_empty = false;
  bool scanned = false;
  std::uint64_t points_checked = 0;
  bool empty = true;
  std::optional<std::vector<Elem>> witness;  // affine representative of a common zero
  std::string witness_chart;
};

// Decides emptiness of the common zero locus of the sections on the bundle.
// Monomial sections get an exact combinatorial certificate (valid over any
// field); finite fields additionally get a full chart-by-chart scan.
BaseLocusReport base_locus(const WpsBundle& bundle, const std::vector<BiPoly>& sections,
                           std::uint64_t budget);

}
