#include "ojoin/twoway.hpp"

#include <cassert>

#include "ojoin/primitives.hpp"

namespace ojoin {
namespace {

struct NestedLoop {
  const Relation& r;
  const Relation& s;
  AttrSet shared;
  TracedArray& out;
  std::uint64_t next = 0;

  void visit(std::uint64_t r0, std::uint64_t rn, std::uint64_t s0, std::uint64_t sn) {
    if (rn == 0 || sn == 0) return;
    if (rn == 1 && sn == 1) {
      Tuple a = r.data.read(r0);
      Tuple b = s.data.read(s0);
      const bool match = a.real() && b.real() && equal_on(a, b, shared);
      out.write(next++, match ? join_tuples(a, b, s.schema) : Tuple::bottom());
      return;
    }
    if (rn >= sn) {
      visit(r0, rn / 2, s0, sn);
      visit(r0 + rn / 2, rn - rn / 2, s0, sn);
    } else {
      visit(r0, rn, s0, sn / 2);
      visit(r0, rn, s0 + sn / 2, sn - sn / 2);
    }
  }
};

}  // namespace

Relation nested_loop_join(EngineContext& ctx, const Relation& r, const Relation& s) {
  RegisterScope regs(ctx, 2);
  const std::uint64_t nr = r.size(), ns = s.size();
  if (nr != 0 && ns > ctx.slot_cap() / nr) {
    throw BudgetOverflow("nested-loop join needs " + std::to_string(nr) + " x " + std::to_string(ns) +
                         " slots, above the slot cap of " + std::to_string(ctx.slot_cap()));
  }
  Relation out = make_relation(ctx, r.schema | s.schema, nr * ns);
  NestedLoop nl{r, s, r.schema & s.schema, out.data};
  nl.visit(0, nr, 0, ns);
  return out;
}

Relation relaxed_two_way(EngineContext& ctx, const Relation& r, const Relation& s, std::uint64_t tau) {
  RegisterScope regs(ctx, 2);
  const AttrSet x = r.schema & s.schema;

  Relation r_tilde = [&] {
    Relation r_hat = augment(ctx, r, s, x, 0);
    return expand(ctx, r_hat, 0, tau);
  }();
  Relation s_bar = [&] {
    Relation s_hat = augment(ctx, s, r, x, 0);
    Relation s_tilde = expand(ctx, s_hat, 0, tau);
    // Number the replicas of each s-tuple, then deal them out per key group
    // so that the j-th slot of a group pairs r-copy j/d_s with s-tuple j%d_s.
    Relation numbered = multi_number(ctx, s_tilde, s.schema);
    const AttrSet rest = s.schema - x;
    SortBuffer k(ctx, tau);
    for (std::uint64_t i = 0; i < tau; ++i) k.put(i, numbered.data.read(i));
    k.sort([x, rest](const Tuple& a, const Tuple& b) {
      if (a.dummy != b.dummy) return !a.dummy;
      if (!a.dummy) {
        if (int c = compare_on(a, b, x)) return c < 0;
        if (a.num != b.num) return a.num < b.num;
        if (int c = compare_on(a, b, rest)) return c < 0;
      }
      return a.seq < b.seq;
    });
    Relation sorted = make_relation(ctx, s.schema, tau);
    for (std::uint64_t i = 0; i < tau; ++i) sorted.data.write(i, k.get(i));
    return sorted;
  }();

  Relation out = make_relation(ctx, r.schema | s.schema, tau);
  for (std::uint64_t j = 0; j < tau; ++j) {
    Tuple a = r_tilde.data.read(j);
    Tuple b = s_bar.data.read(j);
    if (a.real() && b.real()) {
      assert(equal_on(a, b, x));
      out.data.write(j, join_tuples(a, b, s.schema));
    } else {
      out.data.write(j, Tuple::bottom());
    }
  }
  return out;
}

}  // namespace ojoin
