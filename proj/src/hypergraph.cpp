#include "ojoin/hypergraph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "lp.hpp"
#include "ojoin/errors.hpp"

namespace ojoin {

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

Rational parse_rational(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
      std::string frac = text.substr(dot + 1);
      BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
      std::string whole = text.substr(0, dot);
      if (whole.empty() || whole == "-") whole += "0";
      BigInt w(whole);
      BigInt f = frac.empty() ? BigInt(0) : BigInt(frac);
      if (!whole.empty() && whole[0] == '-') f = -f;
      return Rational(w * scale + f, scale);
    }
    return Rational(BigInt(text));
  } catch (const std::exception&) {
    throw InvalidArgument("not a rational number: '" + text + "'");
  }
}

JoinQuery::JoinQuery(std::vector<std::string> attributes,
                     const std::vector<std::pair<std::string, std::vector<std::string>>>& edges)
    : names_(std::move(attributes)) {
  if (names_.size() > kMaxAttributes) {
    throw InvalidArgument("query has " + std::to_string(names_.size()) + " attributes; at most " +
                          std::to_string(kMaxAttributes) + " are supported");
  }
  vars_ = AttrSet::first_n(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw InvalidArgument("duplicate attribute '" + names_[i] + "'");
    }
  }
  for (const auto& [id, attrs] : edges) {
    Edge e{id, AttrSet(), edges_.size()};
    for (const auto& a : attrs) {
      AttrId x = attr(a);
      if (e.attrs.contains(x)) {
        throw InvalidArgument("relation '" + id + "' lists attribute '" + a + "' twice");
      }
      e.attrs.insert(x);
    }
    edges_.push_back(std::move(e));
  }
  validate();
}

JoinQuery::JoinQuery(std::vector<std::string> universe, AttrSet vars, std::vector<Edge> edges)
    : names_(std::move(universe)), vars_(vars), edges_(std::move(edges)) {
  validate();
}

void JoinQuery::validate() const {
  if (names_.size() > kMaxAttributes) throw InvalidArgument("too many attributes");
  if (edges_.size() > kMaxEdges) {
    throw InvalidArgument("query has " + std::to_string(edges_.size()) + " relations; at most " +
                          std::to_string(kMaxEdges) + " are supported");
  }
  if (vars_.empty()) throw InvalidArgument("query has no attributes");
  AttrSet seen;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.attrs.empty()) throw InvalidArgument("relation '" + e.id + "' has no attributes");
    if (!e.attrs.subset_of(vars_)) {
      throw InvalidArgument("relation '" + e.id + "' uses attributes outside the query");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (edges_[j].id == e.id) throw InvalidArgument("duplicate relation name '" + e.id + "'");
    }
    seen = seen | e.attrs;
  }
  if (seen != vars_) {
    throw InvalidArgument("attribute " + describe(vars_ - seen) + " appears in no relation");
  }
}

AttrId JoinQuery::attr(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name && vars_.contains(static_cast<AttrId>(i))) return static_cast<AttrId>(i);
  }
  throw InvalidArgument("unknown attribute '" + name + "'");
}

std::optional<std::size_t> JoinQuery::edge_index(const std::string& id) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].id == id) return i;
  }
  return std::nullopt;
}

std::string JoinQuery::describe(AttrSet s) const {
  std::string out = "{";
  bool first = true;
  for (AttrId x : s.ids()) {
    if (!first) out += ",";
    first = false;
    out += x < names_.size() ? names_[x] : "#" + std::to_string(x);
  }
  return out + "}";
}

JoinQuery restrict_query(const JoinQuery& q, AttrSet s) {
  if (s.empty()) throw InvalidArgument("cannot restrict a query to the empty attribute set");
  if (!s.subset_of(q.vars())) {
    throw InvalidArgument("restriction set " + q.describe(s) + " is not part of the query");
  }
  std::vector<Edge> edges;
  for (const Edge& e : q.edges()) {
    AttrSet a = e.attrs & s;
    if (!a.empty()) edges.push_back({e.id, a, e.origin});
  }
  return JoinQuery(q.universe(), s, std::move(edges));
}

std::vector<std::size_t> edges_containing(const JoinQuery& q, AttrId x) {
  if (!q.vars().contains(x)) throw InvalidArgument("attribute id " + std::to_string(x) + " not in query");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < q.num_edges(); ++i) {
    if (q.edge(i).attrs.contains(x)) out.push_back(i);
  }
  return out;
}

bool EdgeCover::covers(const JoinQuery& q) const {
  if (weights.size() != q.num_edges()) return false;
  for (AttrId x : q.vars().ids()) {
    Rational sum = 0;
    for (std::size_t i = 0; i < q.num_edges(); ++i) {
      if (q.edge(i).attrs.contains(x)) sum += weights[i];
    }
    if (sum < 1) return false;
  }
  return true;
}

EdgeCover fractional_edge_cover(const JoinQuery& q) {
  const std::size_t m = q.num_edges();
  std::vector<lp::Row> rows;
  for (AttrId x : q.vars().ids()) {
    lp::Row r{std::vector<Rational>(m), lp::Sense::kGe, 1};
    for (std::size_t i = 0; i < m; ++i) {
      if (q.edge(i).attrs.contains(x)) r.a[i] = 1;
    }
    rows.push_back(std::move(r));
  }
  lp::Result res = lp::lexmin_optimum(std::vector<Rational>(m, 1), std::move(rows));
  EdgeCover c;
  c.weights = std::move(res.x);
  c.total = res.value;
  c.integral = false;
  return c;
}

EdgeCover integral_edge_cover(const JoinQuery& q) {
  const std::size_t m = q.num_edges();
  for (std::size_t k = 1; k <= m; ++k) {
    // Combinations of size k in lexicographic order.
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
      AttrSet cov;
      for (auto i : pick) cov = cov | q.edge(i).attrs;
      if (cov == q.vars()) {
        EdgeCover c;
        c.weights.assign(m, 0);
        for (auto i : pick) c.weights[i] = 1;
        c.integral = true;
        c.total = static_cast<int>(k);
        return c;
      }
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == m - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  throw InvalidArgument("query has no edge cover");
}

std::vector<Rational> fractional_vertex_packing(const JoinQuery& q) {
  const auto ids = q.vars().ids();
  const std::size_t n = ids.size();
  std::vector<lp::Row> rows;
  for (const Edge& e : q.edges()) {
    lp::Row r{std::vector<Rational>(n), lp::Sense::kLe, 1};
    for (std::size_t j = 0; j < n; ++j) {
      if (e.attrs.contains(ids[j])) r.a[j] = 1;
    }
    rows.push_back(std::move(r));
  }
  lp::Result res = lp::lexmin_optimum(std::vector<Rational>(n, -1), std::move(rows));
  std::vector<Rational> out(kMaxAttributes);
  for (std::size_t j = 0; j < n; ++j) out[ids[j]] = res.x[j];
  return out;
}

std::uint64_t power_budget(std::uint64_t n, const Rational& exponent) {
  if (exponent < 0) throw InvalidArgument("negative exponent " + to_string(exponent));
  if (exponent == 0) return 1;
  if (n <= 1) return n;
  const BigInt p = numerator(exponent);
  const BigInt qd = denominator(exponent);
  if (p > 4096 || qd > 4096) throw InvalidArgument("exponent " + to_string(exponent) + " too large");
  const unsigned pe = p.convert_to<unsigned>();
  const unsigned qe = qd.convert_to<unsigned>();
  const BigInt target = boost::multiprecision::pow(BigInt(n), pe);
  const BigInt limit = BigInt(1) << 63;
  if (boost::multiprecision::pow(limit, qe) < target) {
    throw BudgetOverflow("power_budget(" + std::to_string(n) + ", " + to_string(exponent) +
                         ") exceeds 2^63");
  }
  // Smallest m with m^q >= n^p.
  BigInt lo = 1, hi = limit;
  while (lo < hi) {
    BigInt mid = (lo + hi) / 2;
    if (boost::multiprecision::pow(mid, qe) >= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo.convert_to<std::uint64_t>();
}

std::vector<std::size_t> Ghd::children(std::size_t u) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < parent.size(); ++v) {
    if (parent[v] && *parent[v] == u) out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> Ghd::bottom_up() const {
  std::vector<std::size_t> order{root};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (auto c : children(order[i])) order.push_back(c);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

namespace {

void check_tree(const Ghd& d) {
  const std::size_t n = d.bags.size();
  if (n == 0) throw GhdInvalid("decomposition has no nodes");
  if (d.parent.size() != n) throw GhdInvalid("parent table size does not match bag count");
  if (d.root >= n || d.parent[d.root]) throw GhdInvalid("root node has a parent");
  for (std::size_t u = 0; u < n; ++u) {
    // Walk to the root; a cycle or a second root breaks the walk.
    std::size_t v = u;
    for (std::size_t steps = 0; v != d.root; ++steps) {
      if (steps > n || !d.parent[v] || *d.parent[v] >= n) {
        throw GhdInvalid("node " + std::to_string(u) + " is not connected to the root");
      }
      v = *d.parent[v];
    }
  }
}

Rational bag_width(const JoinQuery& q, AttrSet bag, std::map<std::uint32_t, Rational>& memo) {
  auto it = memo.find(bag.bits());
  if (it != memo.end()) return it->second;
  Rational w = fractional_edge_cover(restrict_query(q, bag)).total;
  memo.emplace(bag.bits(), w);
  return w;
}

}  // namespace

Rational validate_ghd(const JoinQuery& q, const Ghd& d) {
  check_tree(d);
  for (std::size_t u = 0; u < d.bags.size(); ++u) {
    if (d.bags[u].empty() || !d.bags[u].subset_of(q.vars())) {
      throw GhdInvalid("bag " + std::to_string(u) + " is empty or uses unknown attributes");
    }
  }
  for (const Edge& e : q.edges()) {
    bool found = std::any_of(d.bags.begin(), d.bags.end(),
                             [&](AttrSet b) { return e.attrs.subset_of(b); });
    if (!found) throw GhdInvalid("no bag contains relation '" + e.id + "'");
  }
  for (AttrId x : q.vars().ids()) {
    std::size_t tops = 0;
    for (std::size_t u = 0; u < d.bags.size(); ++u) {
      if (!d.bags[u].contains(x)) continue;
      if (!d.parent[u] || !d.bags[*d.parent[u]].contains(x)) ++tops;
    }
    if (tops != 1) {
      throw GhdInvalid("bags containing attribute '" + q.attr_name(x) + "' are not connected");
    }
  }
  std::map<std::uint32_t, Rational> memo;
  Rational width = 0;
  for (AttrSet b : d.bags) width = std::max(width, bag_width(q, b, memo));
  return width;
}

namespace {

// Tree decomposition of the primal graph from an elimination ordering, with
// subsumed bags contracted into a neighbour.
Ghd decomposition_from_order(const JoinQuery& q, const std::vector<AttrId>& order) {
  std::vector<AttrSet> adj(kMaxAttributes);
  for (const Edge& e : q.edges()) {
    for (AttrId x : e.attrs.ids()) adj[x] = adj[x] | (e.attrs - AttrSet::single(x));
  }
  const std::size_t n = order.size();
  std::vector<std::size_t> rank(kMaxAttributes);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

  std::vector<AttrSet> bags(n);
  std::vector<std::optional<std::size_t>> parent(n);
  AttrSet remaining = q.vars();
  for (std::size_t i = 0; i < n; ++i) {
    AttrId v = order[i];
    AttrSet nb = adj[v] & remaining;
    nb.erase(v);
    bags[i] = nb | AttrSet::single(v);
    for (AttrId a : nb.ids()) adj[a] = adj[a] | (nb - AttrSet::single(a));
    remaining.erase(v);
    if (!nb.empty()) {
      std::size_t p = n;
      for (AttrId a : nb.ids()) p = std::min(p, rank[a]);
      parent[i] = p;
    } else if (i + 1 < n) {
      // Disconnected component: hang it under the next node.
      parent[i] = i + 1;
    }
  }

  std::vector<bool> alive(n, true);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t u = 0; u < n && !changed; ++u) {
      if (!alive[u]) continue;
      // Merge into the parent if subsumed by it.
      if (parent[u] && bags[u].subset_of(bags[*parent[u]])) {
        std::size_t p = *parent[u];
        for (std::size_t c = 0; c < n; ++c) {
          if (alive[c] && parent[c] && *parent[c] == u) parent[c] = p;
        }
        alive[u] = false;
        changed = true;
        continue;
      }
      // Parent subsumed by this child: the child takes its place.
      if (parent[u] && bags[*parent[u]].subset_of(bags[u])) {
        std::size_t p = *parent[u];
        for (std::size_t c = 0; c < n; ++c) {
          if (alive[c] && c != u && parent[c] && *parent[c] == p) parent[c] = u;
        }
        parent[u] = parent[p];
        alive[p] = false;
        changed = true;
      }
    }
  }

  Ghd d;
  std::vector<std::size_t> index(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    if (!alive[u]) continue;
    index[u] = d.bags.size();
    d.bags.push_back(bags[u]);
  }
  d.parent.resize(d.bags.size());
  for (std::size_t u = 0; u < n; ++u) {
    if (!alive[u]) continue;
    if (parent[u]) {
      d.parent[index[u]] = index[*parent[u]];
    } else {
      d.root = index[u];
    }
  }
  return d;
}

}  // namespace

Ghd search_ghd(const JoinQuery& q) {
  if (q.vars().size() > 8) {
    throw SizeLimit("GHD search supports at most 8 attributes; supply a \"ghd\" entry in the query file");
  }
  std::vector<AttrId> order = q.vars().ids();
  std::map<std::uint32_t, Rational> memo;
  std::optional<Ghd> best;
  Rational best_width;
  do {
    Ghd d = decomposition_from_order(q, order);
    Rational w = 0;
    for (AttrSet b : d.bags) w = std::max(w, bag_width(q, b, memo));
    if (!best || w < best_width || (w == best_width && d.bags.size() < best->bags.size())) {
      best = std::move(d);
      best_width = w;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return *best;
}

}  // namespace ojoin
