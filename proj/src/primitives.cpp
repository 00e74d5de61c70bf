#include "ojoin/primitives.hpp"

#include <bit>

namespace ojoin {

std::uint64_t next_pow2(std::uint64_t n) { return n <= 1 ? n : std::bit_ceil(n); }

std::uint64_t bitonic_comparators(std::uint64_t padded) {
  if (padded < 2) return 0;
  const std::uint64_t lg = static_cast<std::uint64_t>(std::countr_zero(padded));
  return padded / 2 * lg * (lg + 1) / 2;
}

namespace {

struct ByDummySeq {
  bool operator()(const Tuple& a, const Tuple& b) const {
    if (a.dummy != b.dummy) return !a.dummy;
    return a.seq < b.seq;
  }
};

struct ByKey {
  AttrSet key;
  bool operator()(const Tuple& a, const Tuple& b) const {
    if (a.dummy != b.dummy) return !a.dummy;
    if (!a.dummy) {
      if (int c = compare_on(a, b, key)) return c < 0;
    }
    return a.seq < b.seq;
  }
};

// Within equal keys the lower tag goes first.
struct ByKeyTag {
  AttrSet key;
  bool operator()(const Tuple& a, const Tuple& b) const {
    if (a.dummy != b.dummy) return !a.dummy;
    if (!a.dummy) {
      if (int c = compare_on(a, b, key)) return c < 0;
      if (a.tag != b.tag) return a.tag < b.tag;
    }
    return a.seq < b.seq;
  }
};

// Sorts the buffer on the dummy flag and copies its first `keep` slots out.
Relation finish_compact(EngineContext& ctx, SortBuffer& c, AttrSet schema, std::uint64_t keep) {
  c.sort(ByDummySeq{});
  Relation out = make_relation(ctx, schema, keep);
  for (std::uint64_t i = 0; i < keep; ++i) out.data.write(i, c.get(i));
  return out;
}

Tuple tagged(Tuple t, std::uint8_t tag) {
  t.tag = tag;
  return t;
}

void require_subset(AttrSet x, AttrSet schema, const char* op) {
  if (!x.subset_of(schema)) {
    throw InvalidArgument(std::string(op) + ": key attributes are not part of the relation schema");
  }
}

}  // namespace

Relation oblivious_sort(EngineContext& ctx, const Relation& r, AttrSet key) {
  const std::uint64_t n = r.size();
  SortBuffer k(ctx, n);
  for (std::uint64_t i = 0; i < n; ++i) k.put(i, r.data.read(i));
  k.sort(ByKey{key});
  Relation out = make_relation(ctx, r.schema, n);
  for (std::uint64_t i = 0; i < n; ++i) out.data.write(i, k.get(i));
  return out;
}

Relation oblivious_compact(EngineContext& ctx, const Relation& r, std::uint64_t keep) {
  const std::uint64_t n = r.size();
  if (keep > n) {
    throw InvalidArgument("compact: keep " + std::to_string(keep) + " exceeds length " +
                          std::to_string(n));
  }
  SortBuffer c(ctx, n);
  for (std::uint64_t i = 0; i < n; ++i) c.put(i, r.data.read(i));
  return finish_compact(ctx, c, r.schema, keep);
}

Relation concat_compact(EngineContext& ctx, std::span<const Relation* const> parts, AttrSet schema,
                        std::uint64_t keep) {
  std::uint64_t n = 0;
  for (const Relation* p : parts) n += p->size();
  if (keep > n) throw InvalidArgument("concat_compact: keep exceeds total length");
  SortBuffer c(ctx, n);
  std::uint64_t at = 0;
  for (const Relation* p : parts) {
    for (std::uint64_t i = 0; i < p->size(); ++i) c.put(at++, p->data.read(i));
  }
  return finish_compact(ctx, c, schema, keep);
}

Relation semi_join(EngineContext& ctx, const Relation& r, const Relation& s, AttrSet x) {
  require_subset(x, r.schema, "semi_join");
  require_subset(x, s.schema, "semi_join");
  RegisterScope regs(ctx, 2);
  const std::uint64_t nr = r.size(), ns = s.size(), n = nr + ns;

  SortBuffer k(ctx, n);
  for (std::uint64_t i = 0; i < ns; ++i) k.put(i, tagged(s.data.read(i), kTagFirst));
  for (std::uint64_t i = 0; i < nr; ++i) k.put(ns + i, tagged(r.data.read(i), kTagSecond));
  k.sort(ByKeyTag{x});

  SortBuffer c(ctx, n);
  Tuple key;
  bool have = false;
  for (std::uint64_t i = 0; i < n; ++i) {
    Tuple t = k.get(i);
    if (t.real() && t.tag == kTagFirst) {
      key = t;
      have = true;
      c.put(i, Tuple::bottom());
    } else if (t.real() && have && equal_on(t, key, x)) {
      c.put(i, t);
    } else {
      c.put(i, Tuple::bottom());
    }
  }
  return finish_compact(ctx, c, r.schema, nr);
}

Relation reduce_by_key(EngineContext& ctx, const Relation& r, AttrSet x, const WeightFn& weight,
                       const CombineFn& combine) {
  require_subset(x, r.schema, "reduce_by_key");
  RegisterScope regs(ctx, 2);
  auto w = [&](const Tuple& t) -> std::uint64_t { return weight ? weight(t) : 1; };
  auto op = [&](std::uint64_t a, std::uint64_t b) { return combine ? combine(a, b) : a + b; };
  auto pair = [&](const Tuple& key, std::uint64_t val) {
    Tuple p = project_tuple(key, x);
    p.ann[0] = val;
    return p;
  };

  const std::uint64_t n = r.size();
  SortBuffer k(ctx, n);
  for (std::uint64_t i = 0; i < n; ++i) k.put(i, r.data.read(i));
  k.sort(ByKey{x});

  SortBuffer c(ctx, n + 1);
  Tuple key;
  std::uint64_t val = 0;
  bool have = false;
  for (std::uint64_t i = 0; i < n; ++i) {
    Tuple t = k.get(i);
    if (t.dummy) {
      c.put(i, Tuple::bottom());
    } else if (have && equal_on(t, key, x)) {
      c.put(i, Tuple::bottom());
      val = op(val, w(t));
    } else {
      c.put(i, have ? pair(key, val) : Tuple::bottom());
      key = t;
      val = w(t);
      have = true;
    }
  }
  c.put(n, have ? pair(key, val) : Tuple::bottom());
  return finish_compact(ctx, c, x, n);
}

Relation annotate(EngineContext& ctx, const Relation& r, const Relation& s, AttrSet x,
                  std::size_t slot, AnnotateMode mode) {
  require_subset(x, r.schema, "annotate");
  require_subset(x, s.schema, "annotate");
  if (slot >= kMaxAnnotations) throw InvalidArgument("annotate: no annotation slot " + std::to_string(slot));
  RegisterScope regs(ctx, 2);
  const std::uint64_t nr = r.size(), ns = s.size(), n = nr + ns;

  SortBuffer k(ctx, n);
  for (std::uint64_t i = 0; i < ns; ++i) k.put(i, tagged(s.data.read(i), kTagFirst));
  for (std::uint64_t i = 0; i < nr; ++i) k.put(ns + i, tagged(r.data.read(i), kTagSecond));
  k.sort(ByKeyTag{x});

  SortBuffer c(ctx, n);
  Tuple key;
  std::uint64_t val = 0;
  bool have = false;
  for (std::uint64_t i = 0; i < n; ++i) {
    Tuple t = k.get(i);
    if (t.dummy) {
      c.put(i, Tuple::bottom());
    } else if (t.tag == kTagFirst) {
      if (have && equal_on(t, key, x)) {
        throw PreconditionViolation("annotate: key/value list has a repeated key");
      }
      key = t;
      val = t.ann[0];
      have = true;
      c.put(i, Tuple::bottom());
    } else if (have && equal_on(t, key, x)) {
      t.ann[slot] = val;
      c.put(i, t);
    } else if (mode == AnnotateMode::kAbsentAsZero) {
      t.ann[slot] = 0;
      c.put(i, t);
    } else {
      c.put(i, Tuple::bottom());
    }
  }
  return finish_compact(ctx, c, r.schema, nr);
}

Relation multi_number(EngineContext& ctx, const Relation& r, AttrSet x) {
  require_subset(x, r.schema, "multi_number");
  RegisterScope regs(ctx, 2);
  const std::uint64_t n = r.size();
  SortBuffer k(ctx, n);
  for (std::uint64_t i = 0; i < n; ++i) k.put(i, r.data.read(i));
  k.sort(ByKey{x});

  Relation out = make_relation(ctx, r.schema, n);
  Tuple key;
  std::uint64_t cnt = 0;
  bool have = false;
  for (std::uint64_t i = 0; i < n; ++i) {
    Tuple t = k.get(i);
    if (t.real()) {
      if (have && equal_on(t, key, x)) {
        ++cnt;
      } else {
        cnt = 1;
        key = t;
        have = true;
      }
      t.num = cnt;
    }
    out.data.write(i, t);
  }
  return out;
}

Relation project(EngineContext& ctx, const Relation& r, AttrSet x) {
  require_subset(x, r.schema, "project");
  RegisterScope regs(ctx, 2);
  const std::uint64_t n = r.size();
  SortBuffer k(ctx, n);
  for (std::uint64_t i = 0; i < n; ++i) k.put(i, r.data.read(i));
  k.sort(ByKey{x});

  SortBuffer c(ctx, n);
  Tuple prev;
  bool have = false;
  for (std::uint64_t i = 0; i < n; ++i) {
    Tuple t = k.get(i);
    if (t.real() && !(have && equal_on(t, prev, x))) {
      c.put(i, project_tuple(t, x));
      prev = t;
      have = true;
    } else {
      c.put(i, Tuple::bottom());
    }
  }
  return finish_compact(ctx, c, x, n);
}

Relation intersect(EngineContext& ctx, const Relation& r, const Relation& s) {
  if (r.schema != s.schema) throw InvalidArgument("intersect: schemas differ");
  RegisterScope regs(ctx, 2);
  const AttrSet x = r.schema;
  const std::uint64_t nr = r.size(), ns = s.size(), n = nr + ns;

  SortBuffer k(ctx, n);
  for (std::uint64_t i = 0; i < nr; ++i) k.put(i, tagged(r.data.read(i), kTagFirst));
  for (std::uint64_t i = 0; i < ns; ++i) k.put(nr + i, tagged(s.data.read(i), kTagSecond));
  k.sort(ByKeyTag{x});

  SortBuffer c(ctx, n);
  Tuple prev;
  bool have = false;
  for (std::uint64_t i = 0; i < n; ++i) {
    Tuple t = k.get(i);
    if (t.real() && have && equal_on(t, prev, x)) {
      if (t.tag == prev.tag) throw PreconditionViolation("intersect: input has duplicate tuples");
      c.put(i, project_tuple(t, x));
    } else {
      c.put(i, Tuple::bottom());
    }
    if (t.real()) {
      prev = t;
      have = true;
    }
  }
  return finish_compact(ctx, c, x, std::min(nr, ns));
}

Relation augment(EngineContext& ctx, const Relation& r, std::span<const Relation* const> s_list,
                 AttrSet x, std::size_t first_slot) {
  if (first_slot + s_list.size() > kMaxAnnotations) {
    throw InvalidArgument("augment: " + std::to_string(s_list.size()) +
                          " relations do not fit the annotation slots");
  }
  require_subset(x, r.schema, "augment");
  if (s_list.empty()) return oblivious_compact(ctx, r, r.size());
  Relation cur = augment(ctx, r, *s_list[0], x, first_slot);
  for (std::size_t i = 1; i < s_list.size(); ++i) {
    cur = augment(ctx, cur, *s_list[i], x, first_slot + i);
  }
  return cur;
}

Relation augment(EngineContext& ctx, const Relation& r, const Relation& s, AttrSet x,
                 std::size_t slot) {
  if (slot >= kMaxAnnotations) throw InvalidArgument("augment: no annotation slot " + std::to_string(slot));
  require_subset(x, r.schema, "augment");
  Relation kv = reduce_by_key(ctx, s, x);
  return annotate(ctx, r, kv, x, slot, AnnotateMode::kAbsentAsZero);
}

Relation expand(EngineContext& ctx, const Relation& r, std::size_t weight_slot, std::uint64_t tau) {
  if (weight_slot >= kMaxAnnotations) throw InvalidArgument("expand: no annotation slot");
  RegisterScope regs(ctx, 2);
  const std::uint64_t n = r.size();
  if (tau > (kInfinity >> 2)) throw BudgetOverflow("expand: bound too large");

  // Real tuples sit at even positions 2p, pad k at 2k+1, so a tuple is
  // followed by exactly the pads standing for its output slots.
  SortBuffer k(ctx, n + tau);
  unsigned __int128 p = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    Tuple t = r.data.read(i);
    const std::uint64_t w = t.real() ? t.ann[weight_slot] : 0;
    if (w == 0 || p > tau) {
      Tuple b;
      b.pos = kInfinity;
      k.put(i, b);
    } else {
      t.pos = static_cast<std::uint64_t>(2 * p);
      k.put(i, t);
    }
    p += w;
  }
  const std::uint64_t required =
      p > static_cast<unsigned __int128>(kInfinity) ? kInfinity : static_cast<std::uint64_t>(p);
  ctx.note_budget(required, tau);
  if (required > tau) throw BudgetExceeded(ctx.site(), required, tau);

  for (std::uint64_t j = 0; j < tau; ++j) {
    Tuple pad;
    pad.tag = kTagPad;
    pad.pos = 2 * j + 1;
    k.put(n + j, pad);
  }
  k.sort([](const Tuple& a, const Tuple& b) {
    if (a.pos != b.pos) return a.pos < b.pos;
    return a.seq < b.seq;
  });

  SortBuffer c(ctx, n + tau);
  Tuple cur;
  std::uint64_t rem = 0;
  for (std::uint64_t i = 0; i < n + tau; ++i) {
    Tuple t = k.get(i);
    if (t.real()) {
      cur = t;
      rem = t.ann[weight_slot];
      c.put(i, Tuple::bottom());
    } else if (t.tag == kTagPad && t.pos != kInfinity && rem > 0) {
      Tuple copy = cur;
      copy.pos = 0;
      c.put(i, copy);
      --rem;
    } else {
      c.put(i, Tuple::bottom());
    }
  }
  return finish_compact(ctx, c, r.schema, tau);
}

}  // namespace ojoin
