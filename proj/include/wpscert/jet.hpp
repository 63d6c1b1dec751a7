#pragma once

#include "wpscert/bundle.hpp"

namespace wpscert {

// Local monomials of total degree below k, degree first, then ascending lex.
// This order indexes every jet coefficient vector and jet matrix column.
std::vector<Expo> jet_monomials(std::size_t dim, int k);
std::uint64_t jet_dim(std::size_t dim, int k);  // = C(dim + k - 1, dim)

// Taylor coefficients of p at the center, truncated below total degree k,
// indexed by jet_monomials(p.nvars(), k).  Exact in any characteristic.
std::vector<Elem> expand_at(const LocalPoly& p, std::span<const Elem> center, int k);

// Jet evaluation target: a chart point plus the truncation order.  Orders
// beyond 4 are not needed by any restriction map here and are rejected.
struct JetTarget {
  Chart chart;
  std::vector<Elem> center;
  int k = 1;

  JetTarget(Chart c, std::vector<Elem> ctr, int order);
};

// Target through a bundle point: picks the first chart containing the point.
// Points on no chart (the excluded locus) raise ExcludedLocusError.
JetTarget jet_target_at(const WpsBundle& bundle, const BundlePoint& pt, int k);

struct JetMatrix {
  DenseMatrix mat;  // one row per section, one column per local monomial
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};

JetMatrix rest_matrix(const std::vector<BiPoly>& sections, const JetTarget& target);

struct SurjectivityResult {
  bool surjective = false;
  std::size_t rank = 0;
  std::uint64_t target_dim = 0;
  // rows that stepped the rank up, in feed order; a certificate-sized
  // independent subset when surjective
  std::vector<std::size_t> witness_rows;
};

// Rank of the jet evaluation against the full jet space.  Feeds rows
// incrementally and stops as soon as the map is onto, which cannot change the
// verdict: extra rows never lower a rank.
SurjectivityResult rest_surjective(const std::vector<BiPoly>& sections, const JetTarget& target);

}
