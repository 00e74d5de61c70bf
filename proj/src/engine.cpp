#include "ojoin/engine.hpp"

#include <algorithm>
#include <map>

#include "ojoin/primitives.hpp"
#include "ojoin/twoway.hpp"

namespace ojoin {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kNestedLoop: return "nested-loop";
    case Strategy::kTriangleV1: return "triangle-v1";
    case Strategy::kTriangleV2: return "triangle-v2";
    case Strategy::kGeneric: return "generic";
    case Strategy::kGhdRelaxed: return "ghd-relaxed";
    case Strategy::kInsecureSortMerge: return "insecure-sortmerge";
  }
  return "?";
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all = {Strategy::kNestedLoop, Strategy::kTriangleV1,
                                            Strategy::kTriangleV2, Strategy::kGeneric,
                                            Strategy::kGhdRelaxed, Strategy::kInsecureSortMerge};
  return all;
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : all_strategies()) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown strategy '" + name + "'");
}

std::uint64_t input_size(const Instance& inst) {
  std::uint64_t n = 0;
  for (const auto& r : inst) n += r.size();
  return n;
}

AttrSet choose_j(const JoinQuery& q) {
  const auto ids = q.vars().ids();
  const AttrId z = ids.back();
  if (ids.size() >= 3) {
    const AttrId y = ids[ids.size() - 2];
    bool y_only = false, z_only = false;
    for (const Edge& e : q.edges()) {
      y_only |= e.attrs.contains(y) && !e.attrs.contains(z);
      z_only |= e.attrs.contains(z) && !e.attrs.contains(y);
    }
    if (y_only && z_only) return AttrSet::of({y, z});
  }
  return AttrSet::single(z);
}

std::vector<EliminationStep> elimination_order(const JoinQuery& q) {
  std::vector<EliminationStep> steps;
  JoinQuery cur = q;
  while (cur.vars().size() > 1) {
    AttrSet j = choose_j(cur);
    AttrSet i = cur.vars() - j;
    steps.push_back({cur.vars(), i, j});
    cur = restrict_query(cur, i);
  }
  return steps;
}

namespace {

void check_instance(const JoinQuery& q, const Instance& inst) {
  if (inst.size() != q.num_edges()) {
    throw InvalidArgument("instance has " + std::to_string(inst.size()) + " relations, query has " +
                          std::to_string(q.num_edges()));
  }
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (inst[i].schema != q.edge(i).attrs) {
      throw InvalidArgument("relation '" + q.edge(i).id + "' does not match its schema");
    }
  }
}

std::vector<const Relation*> pointers(const std::vector<Relation>& rels) {
  std::vector<const Relation*> out;
  for (const auto& r : rels) out.push_back(&r);
  return out;
}

// Slot-by-slot copy that turns every tuple failing `keep` into a dummy.
template <class Pred>
Relation filter_scan(EngineContext& ctx, const Relation& r, Pred keep) {
  Relation out = make_relation(ctx, r.schema, r.size());
  for (std::uint64_t i = 0; i < r.size(); ++i) {
    Tuple t = r.data.read(i);
    out.data.write(i, t.real() && keep(t) ? t : Tuple::bottom());
  }
  return out;
}

Relation semi_join_all(EngineContext& ctx, Relation l, const JoinQuery& q,
                       std::span<const Relation* const> rels, std::span<const std::size_t> skip) {
  for (std::size_t e = 0; e < q.num_edges(); ++e) {
    if (std::find(skip.begin(), skip.end(), e) != skip.end()) continue;
    l = semi_join(ctx, l, *rels[e], l.schema & q.edge(e).attrs);
  }
  return l;
}

}  // namespace

Relation oblivious_nested_loop_join(EngineContext& ctx, const JoinQuery& q, const Instance& inst) {
  check_instance(q, inst);
  const EdgeCover cover = integral_edge_cover(q);
  const auto rels = pointers(inst);
  std::optional<Relation> l;
  for (std::size_t e = 0; e < q.num_edges(); ++e) {
    if (cover.weights[e] != 1) continue;
    SiteScope site(ctx, "nested-loop/" + q.edge(e).id);
    l = l ? nested_loop_join(ctx, *l, inst[e]) : oblivious_compact(ctx, inst[e], inst[e].size());
    const std::size_t skip[] = {e};
    l = semi_join_all(ctx, std::move(*l), q, rels, skip);
  }
  return std::move(*l);
}

TriangleRoles triangle_roles(const JoinQuery& q) {
  const auto ids = q.vars().ids();
  bool ok = ids.size() == 3 && q.num_edges() == 3;
  TriangleRoles t{};
  if (ok) {
    t.x1 = ids[0];
    t.x2 = ids[1];
    t.x3 = ids[2];
    auto find = [&](AttrId a, AttrId b) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < q.num_edges(); ++i) {
        if (q.edge(i).attrs == AttrSet::of({a, b})) return i;
      }
      return std::nullopt;
    };
    auto r1 = find(t.x2, t.x3), r2 = find(t.x1, t.x3), r3 = find(t.x1, t.x2);
    ok = r1 && r2 && r3;
    if (ok) {
      t.r1 = *r1;
      t.r2 = *r2;
      t.r3 = *r3;
    }
  }
  if (!ok) throw InvalidArgument("triangle strategies need a query R1(x2,x3), R2(x1,x3), R3(x1,x2)");
  return t;
}

namespace {

struct Split {
  Relation first;
  Relation second;
};

// Writes each tuple to `first` if to_first(t) holds and to `second`
// otherwise, with a dummy going to the other output.
template <class Pred>
Split split_scan(EngineContext& ctx, const Relation& r, Pred to_first) {
  Split s{make_relation(ctx, r.schema, r.size()), make_relation(ctx, r.schema, r.size())};
  for (std::uint64_t i = 0; i < r.size(); ++i) {
    Tuple t = r.data.read(i);
    const bool real = t.real();
    const bool first = real && to_first(t);
    s.first.data.write(i, first ? t : Tuple::bottom());
    s.second.data.write(i, real && !first ? t : Tuple::bottom());
  }
  return s;
}

Relation finish_union(EngineContext& ctx, const std::vector<Relation>& parts, AttrSet schema,
                      std::uint64_t keep) {
  std::uint64_t total = 0;
  for (const auto& p : parts) total += p.size();
  return concat_compact(ctx, pointers(parts), schema, std::min(keep, total));
}

}  // namespace

Relation oblivious_triangle_v1(EngineContext& ctx, const JoinQuery& q, const Instance& inst,
                               std::uint64_t n) {
  check_instance(q, inst);
  const TriangleRoles t = triangle_roles(q);
  const Relation& r1 = inst[t.r1];
  const Relation& r2 = inst[t.r2];
  const Relation& r3 = inst[t.r3];
  const AttrSet x1 = AttrSet::single(t.x1);
  const std::uint64_t tau = power_budget(n, Rational(3, 2));
  const std::uint64_t r1_size = r1.size();

  Relation a = intersect(ctx, project(ctx, r2, x1), project(ctx, r3, x1));
  {
    const Relation* degrees[] = {&r2, &r3};
    a = augment(ctx, a, degrees, x1);
  }
  Split light_heavy = split_scan(ctx, a, [&](const Tuple& u) {
    return static_cast<unsigned __int128>(u.ann[0]) * u.ann[1] <= r1_size;
  });

  std::vector<Relation> parts;
  {
    SiteScope site(ctx, "triangle-v1/L1");
    Relation l1 = relaxed_two_way(ctx, light_heavy.second, r1, tau);
    l1 = semi_join(ctx, l1, r2, r2.schema);
    l1 = semi_join(ctx, l1, r3, r3.schema);
    parts.push_back(std::move(l1));
  }
  {
    SiteScope site(ctx, "triangle-v1/L2");
    Relation r2_light = semi_join(ctx, r2, light_heavy.first, x1);
    Relation r3_light = semi_join(ctx, r3, light_heavy.first, x1);
    Relation l2 = relaxed_two_way(ctx, r2_light, r3_light, tau);
    l2 = semi_join(ctx, l2, r1, r1.schema);
    parts.push_back(std::move(l2));
  }
  return finish_union(ctx, parts, q.vars(), tau);
}

Relation oblivious_triangle_v2(EngineContext& ctx, const JoinQuery& q, const Instance& inst,
                               std::uint64_t n) {
  check_instance(q, inst);
  const TriangleRoles t = triangle_roles(q);
  const Relation& r1 = inst[t.r1];
  const Relation& r2 = inst[t.r2];
  const Relation& r3 = inst[t.r3];
  const std::uint64_t tau = power_budget(n, Rational(3, 2));

  Relation k = augment(ctx, r3, r1, AttrSet::single(t.x2), 0);
  k = augment(ctx, k, r2, AttrSet::single(t.x1), 1);
  Split ks = split_scan(ctx, k, [](const Tuple& u) { return u.ann[0] <= u.ann[1]; });

  std::vector<Relation> parts;
  {
    SiteScope site(ctx, "triangle-v2/L1");
    Relation l1 = relaxed_two_way(ctx, ks.first, r1, tau);
    parts.push_back(semi_join(ctx, l1, r2, r2.schema));
  }
  {
    SiteScope site(ctx, "triangle-v2/L2");
    Relation l2 = relaxed_two_way(ctx, ks.second, r2, tau);
    parts.push_back(semi_join(ctx, l2, r1, r1.schema));
  }
  return finish_union(ctx, parts, q.vars(), tau);
}

std::vector<Relation> partition_one(EngineContext& ctx, const Relation& q_i,
                                    std::span<const std::size_t> slots) {
  if (slots.empty()) throw InvalidArgument("partition_one: no edges");
  for (auto s : slots) {
    if (s >= kMaxAnnotations) throw InvalidArgument("partition_one: no annotation slot " + std::to_string(s));
  }
  RegisterScope regs(ctx, 1);
  std::vector<Relation> out;
  for (std::size_t k = 0; k < slots.size(); ++k) out.push_back(make_relation(ctx, q_i.schema, q_i.size()));
  for (std::uint64_t i = 0; i < q_i.size(); ++i) {
    Tuple t = q_i.data.read(i);
    std::size_t arg = 0;
    for (std::size_t k = 1; k < slots.size(); ++k) {
      if (t.ann[slots[k]] < t.ann[slots[arg]]) arg = k;
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      out[k].data.write(i, t.real() && k == arg ? t : Tuple::bottom());
    }
  }
  return out;
}

PartitionTwo partition_two(EngineContext& ctx, const Relation& q_i,
                           std::span<const std::size_t> y_only, std::span<const std::size_t> z_only,
                           std::span<const std::size_t> shared) {
  if (y_only.empty() || z_only.empty()) {
    throw PreconditionViolation("partition_two: both one-sided edge sets must be non-empty");
  }
  for (auto list : {y_only, z_only, shared}) {
    for (auto s : list) {
      if (s >= kMaxAnnotations) throw InvalidArgument("partition_two: no annotation slot " + std::to_string(s));
    }
  }
  RegisterScope regs(ctx, 1);
  auto argmin = [](const Tuple& t, std::span<const std::size_t> slots) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < slots.size(); ++k) {
      if (t.ann[slots[k]] < t.ann[slots[arg]]) arg = k;
    }
    return arg;
  };

  PartitionTwo out;
  for (std::size_t k = 0; k < y_only.size() * z_only.size(); ++k) {
    out.pairs.push_back(make_relation(ctx, q_i.schema, q_i.size()));
  }
  for (std::size_t k = 0; k < shared.size(); ++k) {
    out.singles.push_back(make_relation(ctx, q_i.schema, q_i.size()));
  }
  for (std::uint64_t i = 0; i < q_i.size(); ++i) {
    Tuple t = q_i.data.read(i);
    const std::size_t e1 = argmin(t, y_only), e2 = argmin(t, z_only);
    const unsigned __int128 product =
        static_cast<unsigned __int128>(t.ann[y_only[e1]]) * t.ann[z_only[e2]];
    std::size_t e3 = 0;
    bool to_pair = true;
    if (!shared.empty()) {
      e3 = argmin(t, shared);
      to_pair = product <= t.ann[shared[e3]];
    }
    const std::size_t pair_index = e1 * z_only.size() + e2;
    for (std::size_t k = 0; k < out.pairs.size(); ++k) {
      out.pairs[k].data.write(i, t.real() && to_pair && k == pair_index ? t : Tuple::bottom());
    }
    for (std::size_t k = 0; k < out.singles.size(); ++k) {
      out.singles[k].data.write(i, t.real() && !to_pair && k == e3 ? t : Tuple::bottom());
    }
  }
  return out;
}

namespace {

std::string edge_label(const JoinQuery& q, std::size_t e) { return q.edge(e).id; }

Relation generic_rec(EngineContext& ctx, const JoinQuery& q, std::span<const Relation* const> rels,
                     std::uint64_t tau) {
  if (q.vars().size() == 1) {
    Relation acc = oblivious_compact(ctx, *rels[0], rels[0]->size());
    for (std::size_t e = 1; e < rels.size(); ++e) acc = intersect(ctx, acc, *rels[e]);
    return acc;
  }

  const AttrSet j = choose_j(q);
  const AttrSet i = q.vars() - j;
  Relation q_i = [&] {
    const JoinQuery sub = restrict_query(q, i);
    std::vector<Relation> projected;
    for (std::size_t e = 0; e < q.num_edges(); ++e) {
      const AttrSet keep = q.edge(e).attrs & i;
      if (!keep.empty()) projected.push_back(project(ctx, *rels[e], keep));
    }
    return generic_rec(ctx, sub, pointers(projected), tau);
  }();

  SiteScope site(ctx, "generic" + q.describe(q.vars()));
  std::vector<Relation> parts;

  if (j.size() == 1) {
    const auto ex = edges_containing(q, j.front());
    if (ex.size() > kMaxAnnotations) {
      throw SizeLimit("attribute '" + q.attr_name(j.front()) + "' occurs in more than " +
                      std::to_string(kMaxAnnotations) + " relations");
    }
    std::vector<std::size_t> slots;
    for (std::size_t k = 0; k < ex.size(); ++k) {
      q_i = augment(ctx, q_i, *rels[ex[k]], q.edge(ex[k]).attrs & i, k);
      slots.push_back(k);
    }
    std::vector<Relation> split = partition_one(ctx, q_i, slots);
    for (std::size_t k = 0; k < ex.size(); ++k) {
      SiteScope edge_site(ctx, edge_label(q, ex[k]));
      Relation l = relaxed_two_way(ctx, split[k], *rels[ex[k]], tau);
      for (std::size_t other : ex) {
        if (other != ex[k]) l = semi_join(ctx, l, *rels[other], l.schema & q.edge(other).attrs);
      }
      parts.push_back(std::move(l));
    }
  } else {
    const AttrId y = j.front(), z = j.back();
    std::vector<std::size_t> all, y_only, z_only, shared;
    for (std::size_t e = 0; e < q.num_edges(); ++e) {
      const AttrSet a = q.edge(e).attrs;
      if (!a.contains(y) && !a.contains(z)) continue;
      const std::size_t slot = all.size();
      all.push_back(e);
      if (a.contains(y) && a.contains(z)) {
        shared.push_back(slot);
      } else if (a.contains(y)) {
        y_only.push_back(slot);
      } else {
        z_only.push_back(slot);
      }
    }
    if (all.size() > kMaxAnnotations) {
      throw SizeLimit("attributes " + q.describe(j) + " occur in more than " +
                      std::to_string(kMaxAnnotations) + " relations");
    }
    for (std::size_t k = 0; k < all.size(); ++k) {
      q_i = augment(ctx, q_i, *rels[all[k]], q.edge(all[k]).attrs & i, k);
    }
    PartitionTwo split = partition_two(ctx, q_i, y_only, z_only, shared);

    for (std::size_t a = 0; a < y_only.size(); ++a) {
      for (std::size_t b = 0; b < z_only.size(); ++b) {
        const std::size_t e1 = all[y_only[a]], e2 = all[z_only[b]];
        SiteScope edge_site(ctx, edge_label(q, e1) + "," + edge_label(q, e2));
        // A tuple with no partner in e2 joins nothing; dropping it here keeps
        // the first two-way join within the product bound.
        const std::size_t slot2 = z_only[b];
        Relation seeds = filter_scan(ctx, split.pairs[a * z_only.size() + b],
                                     [slot2](const Tuple& t) { return t.ann[slot2] != 0; });
        Relation l = relaxed_two_way(ctx, seeds, *rels[e1], tau);
        l = relaxed_two_way(ctx, l, *rels[e2], tau);
        const std::size_t skip[] = {e1, e2};
        parts.push_back(semi_join_all(ctx, std::move(l), q, rels, skip));
      }
    }
    for (std::size_t c = 0; c < shared.size(); ++c) {
      const std::size_t e3 = all[shared[c]];
      SiteScope edge_site(ctx, edge_label(q, e3));
      Relation l = relaxed_two_way(ctx, split.singles[c], *rels[e3], tau);
      const std::size_t skip[] = {e3};
      parts.push_back(semi_join_all(ctx, std::move(l), q, rels, skip));
    }
  }
  return finish_union(ctx, parts, q.vars(), tau);
}

// Reshapes r to exactly tau slots; fails if it holds more reals than that.
Relation fit_to(EngineContext& ctx, const Relation& r, std::uint64_t tau) {
  std::uint64_t reals = 0;
  Relation copy = make_relation(ctx, r.schema, r.size());
  for (std::uint64_t i = 0; i < r.size(); ++i) {
    Tuple t = r.data.read(i);
    reals += t.real();
    copy.data.write(i, t);
  }
  ctx.note_budget(reals, tau);
  if (reals > tau) throw BudgetExceeded(ctx.site(), reals, tau);
  const std::uint64_t keep = std::min(tau, r.size());
  Relation packed = oblivious_compact(ctx, copy, keep);
  if (keep == tau) return packed;
  Relation out = make_relation(ctx, r.schema, tau);
  for (std::uint64_t i = 0; i < tau; ++i) {
    out.data.write(i, i < keep ? packed.data.read(i) : Tuple::bottom());
  }
  return out;
}

}  // namespace

Relation oblivious_generic_join(EngineContext& ctx, const JoinQuery& q, const Instance& inst,
                                std::uint64_t tau) {
  check_instance(q, inst);
  return generic_rec(ctx, q, pointers(inst), tau);
}

Relation relaxed_join_ghd(EngineContext& ctx, const JoinQuery& q, const Instance& inst, const Ghd& d,
                          std::uint64_t tau, std::uint64_t n) {
  check_instance(q, inst);
  validate_ghd(q, d);
  const std::size_t nodes = d.bags.size();

  std::vector<Relation> bag;
  for (std::size_t u = 0; u < nodes; ++u) {
    SiteScope site(ctx, "ghd/bag" + std::to_string(u));
    const JoinQuery sub = restrict_query(q, d.bags[u]);
    std::vector<Relation> projected;
    for (std::size_t e = 0; e < q.num_edges(); ++e) {
      const AttrSet keep = q.edge(e).attrs & d.bags[u];
      if (!keep.empty()) projected.push_back(project(ctx, inst[e], keep));
    }
    const std::uint64_t tau_u = power_budget(n, fractional_edge_cover(sub).total);
    bag.push_back(generic_rec(ctx, sub, pointers(projected), tau_u));
  }

  const std::vector<std::size_t> up = d.bottom_up();
  for (std::size_t u : up) {
    if (!d.parent[u]) continue;
    const std::size_t p = *d.parent[u];
    bag[p] = semi_join(ctx, bag[p], bag[u], bag[p].schema & bag[u].schema);
  }
  for (auto it = up.rbegin(); it != up.rend(); ++it) {
    for (std::size_t v : d.children(*it)) {
      bag[v] = semi_join(ctx, bag[v], bag[*it], bag[v].schema & bag[*it].schema);
    }
  }
  for (std::size_t u : up) {
    if (!d.parent[u]) continue;
    const std::size_t p = *d.parent[u];
    SiteScope site(ctx, "ghd/edge(" + std::to_string(u) + "->" + std::to_string(p) + ")");
    bag[p] = relaxed_two_way(ctx, bag[p], bag[u], tau);
  }
  SiteScope site(ctx, "ghd/root");
  return fit_to(ctx, bag[d.root], tau);
}

Relation insecure_sortmerge_join(EngineContext& ctx, const JoinQuery& q, const Instance& inst) {
  check_instance(q, inst);
  auto load_sorted = [&](const Relation& r, AttrSet key) {
    std::vector<Tuple> v;
    for (std::uint64_t i = 0; i < r.size(); ++i) {
      Tuple t = r.data.read(i);
      if (t.real()) v.push_back(t);
    }
    std::stable_sort(v.begin(), v.end(),
                     [key](const Tuple& a, const Tuple& b) { return compare_on(a, b, key) < 0; });
    Relation out = make_relation(ctx, r.schema, v.size());
    for (std::uint64_t i = 0; i < v.size(); ++i) out.data.write(i, v[i]);
    return out;
  };

  Relation acc = load_sorted(inst[0], AttrSet());
  for (std::size_t e = 1; e < q.num_edges(); ++e) {
    const AttrSet key = acc.schema & inst[e].schema;
    Relation a = load_sorted(acc, key);
    Relation b = load_sorted(inst[e], key);
    std::vector<Tuple> found;
    std::uint64_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      Tuple ta = a.data.read(i);
      Tuple tb = b.data.read(j);
      const int c = compare_on(ta, tb, key);
      if (c < 0) {
        ++i;
      } else if (c > 0) {
        ++j;
      } else {
        std::uint64_t jj = j;
        for (; jj < b.size(); ++jj) {
          Tuple u = b.data.read(jj);
          if (!equal_on(ta, u, key)) break;
          found.push_back(join_tuples(ta, u, b.schema));
        }
        ++i;
      }
    }
    acc = make_relation(ctx, a.schema | b.schema, found.size());
    for (std::uint64_t k = 0; k < found.size(); ++k) acc.data.write(k, found[k]);
  }
  return acc;
}

JoinPlan make_plan(const JoinQuery& q, const RunOptions& opts, std::uint64_t n) {
  JoinPlan p;
  p.strategy = opts.strategy;
  p.n = n;
  p.fractional = fractional_edge_cover(q);
  p.integral = integral_edge_cover(q);
  switch (opts.strategy) {
    case Strategy::kTriangleV1:
    case Strategy::kTriangleV2: {
      triangle_roles(q);
      const std::uint64_t tau = power_budget(n, Rational(3, 2));
      const std::string prefix = to_string(opts.strategy);
      p.budgets = {{prefix + "/L1", tau}, {prefix + "/L2", tau}, {prefix + "/output", tau}};
      break;
    }
    case Strategy::kGeneric: {
      p.elimination = elimination_order(q);
      const std::uint64_t tau = power_budget(n, p.fractional.total);
      for (const auto& s : p.elimination) p.budgets.push_back({"generic" + q.describe(s.vars), tau});
      break;
    }
    case Strategy::kGhdRelaxed: {
      p.ghd = opts.ghd ? *opts.ghd : search_ghd(q);
      p.fhtw = validate_ghd(q, *p.ghd);
      for (std::size_t u = 0; u < p.ghd->bags.size(); ++u) {
        const Rational w = fractional_edge_cover(restrict_query(q, p.ghd->bags[u])).total;
        p.budgets.push_back({"ghd/bag" + std::to_string(u), power_budget(n, w)});
      }
      p.budgets.push_back({"ghd/edges", opts.tau ? *opts.tau : power_budget(n, p.fractional.total)});
      break;
    }
    case Strategy::kNestedLoop:
    case Strategy::kInsecureSortMerge:
      break;
  }
  return p;
}

Relation evaluate(EngineContext& ctx, const JoinQuery& q, const Instance& inst, const RunOptions& opts) {
  check_instance(q, inst);
  const std::uint64_t n = opts.public_n.value_or(input_size(inst));
  switch (opts.strategy) {
    case Strategy::kNestedLoop:
      return oblivious_nested_loop_join(ctx, q, inst);
    case Strategy::kTriangleV1:
      return oblivious_triangle_v1(ctx, q, inst, n);
    case Strategy::kTriangleV2:
      return oblivious_triangle_v2(ctx, q, inst, n);
    case Strategy::kGeneric:
      return oblivious_generic_join(ctx, q, inst, power_budget(n, fractional_edge_cover(q).total));
    case Strategy::kGhdRelaxed: {
      const Ghd d = opts.ghd ? *opts.ghd : search_ghd(q);
      const std::uint64_t tau = opts.tau ? *opts.tau : power_budget(n, fractional_edge_cover(q).total);
      return relaxed_join_ghd(ctx, q, inst, d, tau, n);
    }
    case Strategy::kInsecureSortMerge:
      return insecure_sortmerge_join(ctx, q, inst);
  }
  throw InvalidArgument("unknown strategy");
}

}  // namespace ojoin
