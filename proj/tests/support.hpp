#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "ojoin/memory.hpp"
#include "ojoin/trace.hpp"

namespace ojoin::test {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : g_(seed) {}
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : g_() % n; }
  bool coin(double p) { return static_cast<double>(g_() >> 11) * 0x1.0p-53 < p; }

  Tuple tuple(AttrSet schema, std::uint64_t domain) {
    Tuple t;
    for (AttrId x : schema.ids()) t.values[x] = below(domain);
    t.dummy = false;
    return t;
  }
  std::vector<Tuple> tuples(AttrSet schema, std::size_t len, std::uint64_t domain, double dummy_p) {
    std::vector<Tuple> out;
    for (std::size_t i = 0; i < len; ++i) out.push_back(coin(dummy_p) ? Tuple::bottom() : tuple(schema, domain));
    return out;
  }
  // Reals pairwise distinct on the schema; falls back to dummies when the
  // domain runs out.
  std::vector<Tuple> distinct(AttrSet schema, std::size_t len, std::uint64_t domain, double dummy_p) {
    std::set<Row> seen;
    std::vector<Tuple> out;
    for (std::size_t i = 0; i < len; ++i) {
      Tuple t = Tuple::bottom();
      if (!coin(dummy_p)) {
        for (int attempt = 0; attempt < 32; ++attempt) {
          Tuple c = tuple(schema, domain);
          if (seen.insert(row_from_tuple(schema, c)).second) {
            t = c;
            break;
          }
        }
      }
      out.push_back(t);
    }
    return out;
  }
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

inline Relation load(EngineContext& ctx, AttrSet schema, const std::vector<Tuple>& ts) {
  Relation r = make_relation(ctx, schema, ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) r.data.load_untraced(i, ts[i]);
  return r;
}

inline std::vector<Tuple> reals(const std::vector<Tuple>& ts) {
  std::vector<Tuple> out;
  for (const auto& t : ts) {
    if (t.real()) out.push_back(t);
  }
  return out;
}

inline std::vector<Tuple> reals(const Relation& r) {
  return reals(std::vector<Tuple>(r.data.untraced().begin(), r.data.untraced().end()));
}

// Schema values followed by the chosen extra fields.
struct View {
  Row row;
  std::vector<std::uint64_t> extra;
  auto operator<=>(const View&) const = default;
};

enum Extra : unsigned { kNone = 0, kAnn0 = 1, kAnn1 = 2, kAnn2 = 4, kAnn3 = 8, kNum = 16 };

inline std::vector<View> views(AttrSet schema, const std::vector<Tuple>& ts, unsigned extra = kNone) {
  std::vector<View> out;
  for (const auto& t : ts) {
    View v{row_from_tuple(schema, t), {}};
    for (std::size_t k = 0; k < kMaxAnnotations; ++k) {
      if (extra & (1u << k)) v.extra.push_back(t.ann[k]);
    }
    if (extra & kNum) v.extra.push_back(t.num);
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<View> sorted_views(AttrSet schema, const std::vector<Tuple>& ts, unsigned extra = kNone) {
  auto v = views(schema, ts, extra);
  std::sort(v.begin(), v.end());
  return v;
}

struct TraceSummary {
  Digest digest{};
  std::uint64_t events = 0;
  bool operator==(const TraceSummary&) const = default;
};

inline TraceSummary summarize(EngineContext& ctx) { return {ctx.digest(), ctx.event_count()}; }

inline ContextOptions hashed() {
  ContextOptions o;
  o.keep_events = false;
  o.hash = true;
  return o;
}

}  // namespace ojoin::test
