#pragma once

#include <vector>

#include "ojoin/hypergraph.hpp"

namespace ojoin::lp {

enum class Sense { kLe, kGe, kEq };

struct Row {
  std::vector<Rational> a;
  Sense sense;
  Rational b;
};

struct Result {
  bool feasible = false;
  bool bounded = false;
  Rational value;
  std::vector<Rational> x;
};

// min c.x subject to rows, x >= 0. Exact two-phase simplex with Bland's rule.
Result minimize(const std::vector<Rational>& c, const std::vector<Row>& rows);

// Among optimal points of min c.x, the lexicographically smallest x.
Result lexmin_optimum(const std::vector<Rational>& c, std::vector<Row> rows);

}  // namespace ojoin::lp
