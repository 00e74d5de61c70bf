#include "ojoin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace ojoin {

namespace {

using EdgeList = std::vector<std::pair<std::string, std::vector<std::string>>>;

std::vector<std::string> names(const std::string& prefix, int k) {
  std::vector<std::string> out;
  for (int i = 1; i <= k; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

JoinQuery named_query(const std::string& name) {
  const auto dash = name.rfind('-');
  const std::string family = dash == std::string::npos ? name : name.substr(0, dash);
  int k = 0;
  if (dash != std::string::npos) {
    try {
      k = std::stoi(name.substr(dash + 1));
    } catch (const std::exception&) {
      throw InvalidArgument("bad query name '" + name + "'");
    }
  }
  EdgeList edges;
  if (family == "triangle") {
    auto x = names("x", 3);
    return JoinQuery(x, {{"R1", {"x2", "x3"}}, {"R2", {"x1", "x3"}}, {"R3", {"x1", "x2"}}});
  }
  if (family == "cycle" && k >= 3) {
    auto x = names("x", k);
    for (int i = 0; i < k; ++i) edges.push_back({"R" + std::to_string(i + 1), {x[i], x[(i + 1) % k]}});
    return JoinQuery(x, edges);
  }
  if (family == "lw" && k >= 3) {
    auto x = names("x", k);
    for (int i = 0; i < k; ++i) {
      std::vector<std::string> e;
      for (int j = 0; j < k; ++j) {
        if (j != i) e.push_back(x[j]);
      }
      edges.push_back({"R" + std::to_string(i + 1), e});
    }
    return JoinQuery(x, edges);
  }
  if (family == "chain" && k >= 1) {
    auto x = names("x", k + 1);
    for (int i = 0; i < k; ++i) edges.push_back({"R" + std::to_string(i + 1), {x[i], x[i + 1]}});
    return JoinQuery(x, edges);
  }
  if (family == "boat" && k >= 2) {
    auto x = names("x", k), y = names("y", k);
    std::vector<std::string> all = x;
    all.insert(all.end(), y.begin(), y.end());
    for (int i = 0; i < k; ++i) edges.push_back({"R" + std::to_string(i + 1), {x[i], y[i]}});
    edges.push_back({"R" + std::to_string(k + 1), x});
    edges.push_back({"R" + std::to_string(k + 2), y});
    return JoinQuery(all, edges);
  }
  if (family == "star" && k >= 1) {
    std::vector<std::string> all{"c"};
    auto a = names("a", k);
    all.insert(all.end(), a.begin(), a.end());
    for (int i = 0; i < k; ++i) edges.push_back({"R" + std::to_string(i + 1), {"c", a[i]}});
    return JoinQuery(all, edges);
  }
  if (family == "edge" && k >= 1) {
    auto x = names("x", k);
    return JoinQuery(x, {{"R1", x}});
  }
  throw InvalidArgument("unknown query '" + name + "'");
}

const std::vector<std::string>& acceptance_queries() {
  static const std::vector<std::string> q{"triangle", "cycle-4", "cycle-5", "lw-3",
                                          "lw-4",     "chain-3", "boat-2",  "star-3"};
  return q;
}

ResultRows brute_force_join(const JoinQuery& q, const PlainInstance& inst) {
  if (inst.size() != q.num_edges()) throw InvalidArgument("instance does not match query");
  double product = 1;
  for (const auto& r : inst) product *= static_cast<double>(r.rows.size());
  if (product > kBruteForceGuard) {
    throw SizeLimit("brute-force join would enumerate " + std::to_string(product) + " combinations");
  }
  const auto vars = q.vars().ids();
  std::set<Row> out;
  std::array<Value, kMaxAttributes> assign{};
  std::array<int, kMaxAttributes> bound{};

  // Depth-first over relations; a row extends the assignment if it agrees on
  // every attribute already bound.
  auto rec = [&](auto&& self, std::size_t e) -> void {
    if (e == inst.size()) {
      Row row;
      for (AttrId x : vars) row.push_back(assign[x]);
      out.insert(std::move(row));
      return;
    }
    const auto ids = q.edge(e).attrs.ids();
    for (const Row& row : inst[e].rows) {
      bool ok = true;
      for (std::size_t k = 0; k < ids.size() && ok; ++k) {
        ok = bound[ids[k]] == 0 || assign[ids[k]] == row[k];
      }
      if (!ok) continue;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (bound[ids[k]]++ == 0) assign[ids[k]] = row[k];
      }
      self(self, e + 1);
      for (auto id : ids) --bound[id];
    }
  };
  rec(rec, 0);
  return ResultRows(out.begin(), out.end());
}

ResultRows result_rows(const JoinQuery& q, const Relation& out) {
  if (out.schema != q.vars()) throw InvalidArgument("result schema does not cover the query");
  ResultRows rows = extract_rows(out);
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::string to_string(Profile p) {
  switch (p) {
    case Profile::kUniform: return "uniform";
    case Profile::kSkewed: return "skewed";
    case Profile::kHeavyHitter: return "heavy-hitter";
    case Profile::kAgmExtremal: return "agm-extremal";
  }
  return "?";
}

Profile parse_profile(const std::string& name) {
  for (Profile p : {Profile::kUniform, Profile::kSkewed, Profile::kHeavyHitter, Profile::kAgmExtremal}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidArgument("unknown profile '" + name + "'");
}

std::vector<std::uint64_t> split_sizes(std::uint64_t total, std::size_t relations) {
  std::vector<std::uint64_t> sizes(relations, total / relations);
  for (std::size_t i = 0; i < total % relations; ++i) ++sizes[i];
  return sizes;
}

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull) {}
  std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : gen_() % n; }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

// Zipf sampler over ranks 0..n-1 by inverse CDF.
class Zipf {
 public:
  Zipf(std::uint64_t n, double alpha) : cdf_(n) {
    double sum = 0;
    for (std::uint64_t i = 0; i < n; ++i) cdf_[i] = sum += 1.0 / std::pow(static_cast<double>(i + 1), alpha);
    for (auto& c : cdf_) c /= sum;
  }
  std::uint64_t draw(Rng& rng) const {
    const double u = rng.unit();
    return static_cast<std::uint64_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

// Per-attribute domain large enough for every relation over it to hold its rows.
std::vector<std::uint64_t> domains(const JoinQuery& q, const std::vector<std::uint64_t>& sizes,
                                   double factor) {
  std::vector<std::uint64_t> d(kMaxAttributes, 2);
  for (std::size_t e = 0; e < q.num_edges(); ++e) {
    const double k = static_cast<double>(q.edge(e).attrs.size());
    const auto need = static_cast<std::uint64_t>(
        std::ceil(factor * std::pow(static_cast<double>(std::max<std::uint64_t>(sizes[e], 1)), 1.0 / k)));
    for (AttrId x : q.edge(e).attrs.ids()) d[x] = std::max(d[x], need);
  }
  return d;
}

template <class Draw>
PlainRelation sample_distinct(AttrSet schema, std::uint64_t n, const std::vector<std::uint64_t>& dom,
                              Rng& rng, Draw draw) {
  const auto ids = schema.ids();
  std::set<Row> seen;
  PlainRelation r{schema, {}};
  std::uint64_t attempts = 0;
  while (r.rows.size() < n && attempts < 64 * n + 64) {
    ++attempts;
    Row row;
    for (AttrId x : ids) row.push_back(draw(x, rng));
    if (seen.insert(row).second) r.rows.push_back(std::move(row));
  }
  // Heavy skew can stall rejection; top up uniformly.
  while (r.rows.size() < n) {
    Row row;
    for (AttrId x : ids) row.push_back(rng.below(dom[x]));
    if (seen.insert(row).second) r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace

PlainInstance gen_instance(const JoinQuery& q, const GenOptions& opts,
                           const std::vector<std::uint64_t>& sizes, std::uint64_t seed) {
  if (sizes.size() != q.num_edges()) throw InvalidArgument("need one size per relation");
  Rng rng(seed);
  PlainInstance inst;

  switch (opts.profile) {
    case Profile::kUniform: {
      const auto dom = domains(q, sizes, 1.5);
      for (std::size_t e = 0; e < q.num_edges(); ++e) {
        inst.push_back(sample_distinct(q.edge(e).attrs, sizes[e], dom, rng,
                                       [&](AttrId x, Rng& g) { return g.below(dom[x]); }));
      }
      break;
    }
    case Profile::kSkewed: {
      const auto dom = domains(q, sizes, 2.0);
      std::vector<Zipf> zipf;
      for (std::size_t x = 0; x < kMaxAttributes; ++x) zipf.emplace_back(dom[x], opts.alpha);
      for (std::size_t e = 0; e < q.num_edges(); ++e) {
        inst.push_back(sample_distinct(q.edge(e).attrs, sizes[e], dom, rng,
                                       [&](AttrId x, Rng& g) { return zipf[x].draw(g); }));
      }
      break;
    }
    case Profile::kHeavyHitter: {
      // Odd seeds: every row shares one value on the first join attribute.
      // Even seeds: row i carries value i everywhere.
      const bool hot = seed % 2 == 1;
      std::optional<AttrId> key;
      for (AttrId x : q.vars().ids()) {
        if (!key && edges_containing(q, x).size() >= 2) key = x;
      }
      for (std::size_t e = 0; e < q.num_edges(); ++e) {
        PlainRelation r{q.edge(e).attrs, {}};
        std::set<Row> seen;
        for (std::uint64_t i = 0; i < sizes[e]; ++i) {
          Row row;
          for (AttrId x : q.edge(e).attrs.ids()) row.push_back(hot && key && x == *key ? 0 : i);
          if (seen.insert(row).second) r.rows.push_back(std::move(row));
        }
        inst.push_back(std::move(r));
      }
      break;
    }
    case Profile::kAgmExtremal: {
      // Product construction: attribute x ranges over floor(n^{v_x}) values
      // for an optimal vertex packing v, with n the smallest relation size.
      const auto packing = fractional_vertex_packing(q);
      const std::uint64_t n = *std::min_element(sizes.begin(), sizes.end());
      std::vector<std::uint64_t> dom(kMaxAttributes, 1);
      for (AttrId x : q.vars().ids()) {
        // Largest d with d^den <= n^num.
        const BigInt num = numerator(packing[x]), den = denominator(packing[x]);
        const BigInt target = boost::multiprecision::pow(BigInt(n), num.convert_to<unsigned>());
        std::uint64_t d = 1;
        while (boost::multiprecision::pow(BigInt(d + 1), den.convert_to<unsigned>()) <= target) ++d;
        dom[x] = d;
      }
      for (std::size_t e = 0; e < q.num_edges(); ++e) {
        const auto ids = q.edge(e).attrs.ids();
        PlainRelation r{q.edge(e).attrs, {}};
        Row row(ids.size(), 0);
        for (;;) {
          r.rows.push_back(row);
          std::size_t k = ids.size();
          while (k > 0 && ++row[k - 1] == dom[ids[k - 1]]) row[--k] = 0;
          if (k == 0) break;
        }
        inst.push_back(std::move(r));
      }
      break;
    }
  }
  return inst;
}

Instance load_instance(EngineContext& ctx, const PlainInstance& plain, std::uint64_t pad_to) {
  Instance inst;
  for (const auto& r : plain) {
    if (pad_to && r.rows.size() > pad_to) {
      throw InvalidArgument("relation has " + std::to_string(r.rows.size()) +
                            " rows, more than the padded size " + std::to_string(pad_to));
    }
    inst.push_back(load_relation(ctx, r, pad_to));
  }
  return inst;
}

std::string BudgetReport::summary() const {
  std::ostringstream os;
  os << entries.size() << " expand calls, " << violations << " over budget";
  if (!entries.empty()) os << ", largest requirement " << max_required << " of " << tau_at_max;
  return os.str();
}

BudgetReport check_budget_report(const std::vector<BudgetRecord>& log) {
  BudgetReport r;
  r.entries = log;
  for (const auto& b : log) {
    if (b.required > b.tau) ++r.violations;
    if (b.required >= r.max_required) {
      r.max_required = b.required;
      r.tau_at_max = b.tau;
    }
  }
  return r;
}

namespace reference {

std::vector<Tuple> sort(std::vector<Tuple> r, AttrSet key) {
  std::stable_sort(r.begin(), r.end(),
                   [key](const Tuple& a, const Tuple& b) { return compare_on(a, b, key) < 0; });
  return r;
}

std::vector<Tuple> semi_join(const std::vector<Tuple>& r, const std::vector<Tuple>& s, AttrSet x) {
  std::vector<Tuple> out;
  for (const auto& t : r) {
    if (std::any_of(s.begin(), s.end(), [&](const Tuple& u) { return equal_on(t, u, x); })) {
      out.push_back(t);
    }
  }
  return out;
}

std::vector<Tuple> reduce_by_key(const std::vector<Tuple>& r, AttrSet x) {
  std::map<Row, std::uint64_t> count;
  for (const auto& t : r) ++count[row_from_tuple(x, t)];
  std::vector<Tuple> out;
  for (const auto& [k, c] : count) {
    Tuple t = tuple_from_row(x, k);
    t.ann[0] = c;
    out.push_back(t);
  }
  return out;
}

std::vector<Tuple> annotate(const std::vector<Tuple>& r, const std::vector<Tuple>& s, AttrSet x,
                            std::size_t slot, bool absent_as_zero) {
  std::vector<Tuple> out;
  for (Tuple t : r) {
    auto it = std::find_if(s.begin(), s.end(), [&](const Tuple& u) { return equal_on(t, u, x); });
    if (it != s.end()) {
      t.ann[slot] = it->ann[0];
      out.push_back(t);
    } else if (absent_as_zero) {
      t.ann[slot] = 0;
      out.push_back(t);
    }
  }
  return out;
}

std::vector<Tuple> multi_number(const std::vector<Tuple>& r, AttrSet x) {
  std::vector<Tuple> out = sort(r, x);
  std::map<Row, std::uint64_t> seen;
  for (auto& t : out) t.num = ++seen[row_from_tuple(x, t)];
  return out;
}

std::vector<Tuple> project(const std::vector<Tuple>& r, AttrSet x) {
  std::set<Row> rows;
  for (const auto& t : r) rows.insert(row_from_tuple(x, t));
  std::vector<Tuple> out;
  for (const auto& row : rows) out.push_back(tuple_from_row(x, row));
  return out;
}

std::vector<Tuple> intersect(const std::vector<Tuple>& r, const std::vector<Tuple>& s, AttrSet schema) {
  std::set<Row> in_s;
  for (const auto& t : s) in_s.insert(row_from_tuple(schema, t));
  std::set<Row> both;
  for (const auto& t : r) {
    Row row = row_from_tuple(schema, t);
    if (in_s.count(row)) both.insert(row);
  }
  std::vector<Tuple> out;
  for (const auto& row : both) out.push_back(tuple_from_row(schema, row));
  return out;
}

std::vector<std::uint64_t> degrees(const std::vector<Tuple>& r, const std::vector<Tuple>& s, AttrSet x) {
  std::vector<std::uint64_t> out;
  for (const auto& t : r) {
    out.push_back(static_cast<std::uint64_t>(
        std::count_if(s.begin(), s.end(), [&](const Tuple& u) { return equal_on(t, u, x); })));
  }
  return out;
}

std::vector<Tuple> expand(const std::vector<Tuple>& r, std::size_t weight_slot) {
  std::vector<Tuple> out;
  for (const auto& t : r) {
    for (std::uint64_t k = 0; k < t.ann[weight_slot]; ++k) out.push_back(t);
  }
  return out;
}

std::vector<Tuple> join(const std::vector<Tuple>& r, AttrSet rs, const std::vector<Tuple>& s, AttrSet ss) {
  std::vector<Tuple> out;
  for (const auto& a : r) {
    for (const auto& b : s) {
      if (equal_on(a, b, rs & ss)) out.push_back(join_tuples(a, b, ss));
    }
  }
  return out;
}

}  // namespace reference

}  // namespace ojoin
