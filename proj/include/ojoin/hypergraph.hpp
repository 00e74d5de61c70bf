#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ojoin/attrset.hpp"

namespace ojoin {

// Always kept in lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

std::string to_string(const Rational& r);
// Parses "3/2", "2" or "0.5".
Rational parse_rational(const std::string& text);

struct Edge {
  std::string id;
  AttrSet attrs;
  // Index of the edge in the query this one was restricted from.
  std::size_t origin = 0;
};

class JoinQuery {
 public:
  JoinQuery() = default;
  // Attribute order is the canonical order; attribute i gets id i.
  JoinQuery(std::vector<std::string> attributes,
            const std::vector<std::pair<std::string, std::vector<std::string>>>& edges);
  // Same attribute universe, active attributes `vars`.
  JoinQuery(std::vector<std::string> universe, AttrSet vars, std::vector<Edge> edges);

  const std::vector<std::string>& universe() const { return names_; }
  AttrSet vars() const { return vars_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }

  AttrId attr(const std::string& name) const;
  const std::string& attr_name(AttrId id) const { return names_.at(id); }
  std::optional<std::size_t> edge_index(const std::string& id) const;
  std::string describe(AttrSet s) const;

 private:
  void validate() const;

  std::vector<std::string> names_;
  AttrSet vars_;
  std::vector<Edge> edges_;
};

// Q[S]: edges intersected with s, empty intersections dropped, ids kept.
JoinQuery restrict_query(const JoinQuery& q, AttrSet s);
// Indices of edges containing x, ascending.
std::vector<std::size_t> edges_containing(const JoinQuery& q, AttrId x);

struct EdgeCover {
  std::vector<Rational> weights;  // aligned with q.edges()
  bool integral = false;
  Rational total;

  bool covers(const JoinQuery& q) const;
};

EdgeCover fractional_edge_cover(const JoinQuery& q);
EdgeCover integral_edge_cover(const JoinQuery& q);

// Optimal fractional vertex packing (dual of the cover LP); weights per
// attribute id. Drives the worst-case instance generator.
std::vector<Rational> fractional_vertex_packing(const JoinQuery& q);

// ceil(n^exponent) with exact integer arithmetic.
std::uint64_t power_budget(std::uint64_t n, const Rational& exponent);

struct Ghd {
  std::vector<AttrSet> bags;
  std::vector<std::optional<std::size_t>> parent;
  std::size_t root = 0;

  std::vector<std::size_t> children(std::size_t u) const;
  // Nodes ordered so that every child precedes its parent.
  std::vector<std::size_t> bottom_up() const;
};

// Checks the tree, coverage and connectivity conditions; returns the width.
Rational validate_ghd(const JoinQuery& q, const Ghd& d);
Ghd search_ghd(const JoinQuery& q);

}  // namespace ojoin
