#include <gtest/gtest.h>

#include <numeric>

#include "ojoin/hypergraph.hpp"
#include "ojoin/oracle.hpp"
#include "support.hpp"

using namespace ojoin;

namespace {

// min c.x subject to A x >= b, x >= 0, by enumerating every basic solution.
std::optional<Rational> vertex_min(const std::vector<Rational>& c, const std::vector<std::vector<Rational>>& a,
                                   const std::vector<Rational>& b) {
  const std::size_t n = c.size();
  std::vector<std::vector<Rational>> rows = a;
  std::vector<Rational> rhs = b;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rational> e(n, 0);
    e[j] = 1;
    rows.push_back(e);
    rhs.push_back(0);
  }
  const std::size_t m = rows.size();
  std::optional<Rational> best;
  std::vector<bool> pick(m, false);
  std::fill(pick.end() - static_cast<long>(n), pick.end(), true);
  do {
    std::vector<std::vector<Rational>> sys;
    for (std::size_t i = 0; i < m; ++i) {
      if (!pick[i]) continue;
      auto r = rows[i];
      r.push_back(rhs[i]);
      sys.push_back(r);
    }
    // Gauss-Jordan; skip singular systems.
    bool singular = false;
    for (std::size_t col = 0; col < n && !singular; ++col) {
      std::size_t piv = col;
      while (piv < n && sys[piv][col] == 0) ++piv;
      if (piv == n) {
        singular = true;
        break;
      }
      std::swap(sys[piv], sys[col]);
      for (std::size_t i = 0; i < n; ++i) {
        if (i == col || sys[i][col] == 0) continue;
        const Rational f = sys[i][col] / sys[col][col];
        for (std::size_t k = col; k <= n; ++k) sys[i][k] -= f * sys[col][k];
      }
    }
    if (singular) continue;
    std::vector<Rational> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = sys[j][n] / sys[j][j];
    bool feasible = true;
    for (std::size_t i = 0; i < m && feasible; ++i) {
      Rational lhs = 0;
      for (std::size_t j = 0; j < n; ++j) lhs += rows[i][j] * x[j];
      feasible = lhs >= rhs[i];
    }
    if (!feasible) continue;
    Rational v = 0;
    for (std::size_t j = 0; j < n; ++j) v += c[j] * x[j];
    if (!best || v < *best) best = v;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

Rational cover_oracle(const JoinQuery& q) {
  std::vector<std::vector<Rational>> a;
  for (AttrId x : q.vars().ids()) {
    std::vector<Rational> row;
    for (const auto& e : q.edges()) row.push_back(e.attrs.contains(x) ? 1 : 0);
    a.push_back(row);
  }
  return *vertex_min(std::vector<Rational>(q.num_edges(), 1), a, std::vector<Rational>(a.size(), 1));
}

Rational integral_oracle(const JoinQuery& q) {
  std::size_t best = q.num_edges();
  for (std::uint32_t mask = 0; mask < (1u << q.num_edges()); ++mask) {
    AttrSet covered;
    for (std::size_t e = 0; e < q.num_edges(); ++e) {
      if (mask >> e & 1) covered = covered | q.edge(e).attrs;
    }
    if (covered == q.vars()) best = std::min<std::size_t>(best, static_cast<std::size_t>(std::popcount(mask)));
  }
  return best;
}

JoinQuery random_query(test::Gen& g) {
  const std::size_t nv = 2 + g.below(5), ne = 1 + g.below(5);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < nv; ++i) names.push_back("v" + std::to_string(i));
  std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  std::vector<bool> used(nv, false);
  for (std::size_t e = 0; e < ne; ++e) {
    std::vector<std::string> attrs;
    for (std::size_t i = 0; i < nv; ++i) {
      if (g.coin(0.4)) attrs.push_back(names[i]), used[i] = true;
    }
    if (attrs.empty()) attrs.push_back(names[e % nv]), used[e % nv] = true;
    edges.push_back({"E" + std::to_string(e), attrs});
  }
  // Cover anything left with one more edge.
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < nv; ++i) {
    if (!used[i]) rest.push_back(names[i]);
  }
  if (!rest.empty()) edges.push_back({"Z", rest});
  return JoinQuery(names, edges);
}

}  // namespace

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(parse_rational("3/2"), Rational(3, 2));
  EXPECT_EQ(parse_rational("2"), Rational(2));
  EXPECT_EQ(parse_rational("0.5"), Rational(1, 2));
  EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
  EXPECT_EQ(to_string(Rational(2)), "2");
  EXPECT_THROW(parse_rational("x/2"), InvalidArgument);
}

TEST(JoinQuery, Validation) {
  EXPECT_THROW(JoinQuery({"a", "b"}, {{"R", {"a"}}}), InvalidArgument);          // b uncovered
  EXPECT_THROW(JoinQuery({"a"}, {{"R", {"a"}}, {"R", {"a"}}}), InvalidArgument);  // duplicate id
  EXPECT_THROW(JoinQuery({"a"}, {{"R", {"c"}}}), InvalidArgument);
  EXPECT_THROW(JoinQuery({"a", "a"}, {{"R", {"a"}}}), InvalidArgument);
  std::vector<std::string> many;
  for (int i = 0; i < 17; ++i) many.push_back("v" + std::to_string(i));
  EXPECT_THROW(JoinQuery(many, {{"R", many}}), InvalidArgument);
}

TEST(JoinQuery, RestrictKeepsIdsAndDropsEmpty) {
  const JoinQuery q = named_query("chain-3");
  const JoinQuery r = restrict_query(q, AttrSet::of({0, 1}));
  ASSERT_EQ(r.num_edges(), 2u);
  EXPECT_EQ(r.edge(0).id, "R1");
  EXPECT_EQ(r.edge(0).attrs, AttrSet::of({0, 1}));
  EXPECT_EQ(r.edge(1).id, "R2");
  EXPECT_EQ(r.edge(1).attrs, AttrSet::of({1}));
  EXPECT_EQ(r.edge(1).origin, 1u);
}

// Published cover numbers for named query families.
TEST(EdgeCover, KnownValues) {
  EXPECT_EQ(fractional_edge_cover(named_query("triangle")).total, Rational(3, 2));
  EXPECT_EQ(integral_edge_cover(named_query("triangle")).total, Rational(2));
  EXPECT_EQ(fractional_edge_cover(named_query("cycle-4")).total, Rational(2));
  EXPECT_EQ(fractional_edge_cover(named_query("cycle-6")).total, Rational(3));
  EXPECT_EQ(fractional_edge_cover(named_query("boat-2")).total, Rational(2));
  EXPECT_EQ(integral_edge_cover(named_query("boat-3")).total, Rational(2));
  EXPECT_EQ(fractional_edge_cover(named_query("boat-3")).total, Rational(2));
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(fractional_edge_cover(named_query("edge-" + std::to_string(k))).total, 1);
}

TEST(EdgeCover, TriangleWeightsAreHalves) {
  const auto c = fractional_edge_cover(named_query("triangle"));
  EXPECT_EQ(c.weights, std::vector<Rational>(3, Rational(1, 2)));
  EXPECT_FALSE(c.integral);
}

TEST(EdgeCover, FamiliesMatchVertexEnumeration) {
  for (const auto& name : {"triangle", "cycle-4", "cycle-5", "lw-3", "lw-4", "chain-3", "boat-2", "star-3"}) {
    const JoinQuery q = named_query(name);
    EXPECT_EQ(fractional_edge_cover(q).total, cover_oracle(q)) << name;
    EXPECT_EQ(integral_edge_cover(q).total, integral_oracle(q)) << name;
  }
  EXPECT_EQ(cover_oracle(named_query("lw-4")), Rational(4, 3));
  EXPECT_EQ(cover_oracle(named_query("cycle-5")), Rational(5, 2));
}

TEST(EdgeCover, RandomHypergraphsMatchOracles) {
  test::Gen g(3);
  for (int i = 0; i < 60; ++i) {
    const JoinQuery q = random_query(g);
    const auto fc = fractional_edge_cover(q);
    const auto ic = integral_edge_cover(q);
    EXPECT_TRUE(fc.covers(q));
    EXPECT_TRUE(ic.covers(q));
    EXPECT_EQ(fc.total, std::accumulate(fc.weights.begin(), fc.weights.end(), Rational(0)));
    EXPECT_EQ(fc.total, cover_oracle(q));
    EXPECT_EQ(ic.total, integral_oracle(q));
    EXPECT_LE(fc.total, ic.total);
    for (const auto& w : ic.weights) EXPECT_TRUE(w == 0 || w == 1);
  }
}

TEST(VertexPacking, DualOptimumEqualsCover) {
  test::Gen g(8);
  for (int i = 0; i < 40; ++i) {
    const JoinQuery q = random_query(g);
    const auto v = fractional_vertex_packing(q);
    Rational total = 0;
    for (AttrId x : q.vars().ids()) {
      EXPECT_GE(v[x], 0);
      total += v[x];
    }
    for (const auto& e : q.edges()) {
      Rational load = 0;
      for (AttrId x : e.attrs.ids()) load += v[x];
      EXPECT_LE(load, 1);
    }
    EXPECT_EQ(total, fractional_edge_cover(q).total);
  }
}

TEST(PowerBudget, Values) {
  EXPECT_EQ(power_budget(16, Rational(3, 2)), 64u);
  EXPECT_EQ(power_budget(10, Rational(3, 2)), 32u);  // ceil(31.62...)
  EXPECT_EQ(power_budget(7, Rational(0)), 1u);
  EXPECT_EQ(power_budget(0, Rational(3, 2)), 0u);
  EXPECT_EQ(power_budget(1, Rational(5, 2)), 1u);
  EXPECT_EQ(power_budget(9, Rational(1, 2)), 3u);
  EXPECT_THROW(power_budget(4, Rational(-1, 2)), InvalidArgument);
  EXPECT_THROW(power_budget(1ull << 40, Rational(2)), BudgetOverflow);
}

TEST(PowerBudget, MatchesSmallestIntegerAboveThePower) {
  for (std::uint64_t n = 0; n < 60; ++n) {
    for (const Rational e : {Rational(1, 2), Rational(3, 2), Rational(4, 3), Rational(5, 2), Rational(2), Rational(3)}) {
      const auto p = numerator(e).convert_to<unsigned>(), q = denominator(e).convert_to<unsigned>();
      const BigInt target = boost::multiprecision::pow(BigInt(n), p);
      std::uint64_t m = 0;
      while (boost::multiprecision::pow(BigInt(m), q) < target) ++m;
      EXPECT_EQ(power_budget(n, e), m) << n << "^" << to_string(e);
    }
  }
}

TEST(Ghd, SingleBagTriangle) {
  const JoinQuery q = named_query("triangle");
  Ghd d{{q.vars()}, {std::nullopt}, 0};
  EXPECT_EQ(validate_ghd(q, d), Rational(3, 2));
  EXPECT_EQ(validate_ghd(q, search_ghd(q)), Rational(3, 2));
}

TEST(Ghd, SearchWidths) {
  EXPECT_EQ(validate_ghd(named_query("chain-3"), search_ghd(named_query("chain-3"))), 1);
  EXPECT_EQ(validate_ghd(named_query("star-3"), search_ghd(named_query("star-3"))), 1);
  EXPECT_EQ(validate_ghd(named_query("cycle-4"), search_ghd(named_query("cycle-4"))), 2);
  EXPECT_EQ(validate_ghd(named_query("cycle-5"), search_ghd(named_query("cycle-5"))), 2);
  EXPECT_EQ(validate_ghd(named_query("lw-4"), search_ghd(named_query("lw-4"))), Rational(4, 3));
}

TEST(Ghd, SearchedDecompositionsAreValidOnRandomQueries) {
  test::Gen g(21);
  for (int i = 0; i < 30; ++i) {
    const JoinQuery q = random_query(g);
    const Ghd d = search_ghd(q);
    const Rational w = validate_ghd(q, d);
    EXPECT_LE(w, fractional_edge_cover(q).total);
    EXPECT_EQ(d.bottom_up().size(), d.bags.size());
    EXPECT_EQ(d.bottom_up().back(), d.root);
  }
}

TEST(Ghd, InvalidDecompositionsAreRejected) {
  const JoinQuery q = named_query("chain-3");  // x1-x2-x3-x4
  // R3 uncovered.
  Ghd missing{{AttrSet::of({0, 1}), AttrSet::of({1, 2})}, {std::nullopt, 0}, 0};
  EXPECT_THROW(validate_ghd(q, missing), GhdInvalid);
  // x2 appears in two bags that are not adjacent.
  Ghd split{{AttrSet::of({0, 1}), AttrSet::of({2, 3}), AttrSet::of({1, 2})}, {std::nullopt, 0, 1}, 0};
  EXPECT_THROW(validate_ghd(q, split), GhdInvalid);
  // Cycle in the parent table.
  Ghd loop{{AttrSet::of({0, 1}), AttrSet::of({1, 2, 3})}, {1, 0}, 0};
  EXPECT_THROW(validate_ghd(q, loop), GhdInvalid);
}

TEST(Ghd, SearchRefusesLargeQueries) {
  EXPECT_THROW(search_ghd(named_query("chain-9")), SizeLimit);
}
