#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <list>

#include "ojoin/memory.hpp"
#include "ojoin/primitives.hpp"
#include "ojoin/trace.hpp"
#include "support.hpp"

using namespace ojoin;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ojoin_memory_" + name);
}

// Straightforward LRU over a list of block keys.
std::uint64_t naive_lru(const std::vector<AccessEvent>& ev, std::uint64_t m, std::uint64_t b) {
  const std::uint64_t cap = std::max<std::uint64_t>(1, m / b);
  std::list<std::pair<std::uint32_t, std::uint64_t>> cache;
  std::uint64_t misses = 0;
  for (const auto& e : ev) {
    const std::pair<std::uint32_t, std::uint64_t> key{e.array, e.index / b};
    auto it = std::find(cache.begin(), cache.end(), key);
    if (it != cache.end()) {
      cache.erase(it);
    } else {
      ++misses;
      if (cache.size() == cap) cache.pop_back();
    }
    cache.push_front(key);
  }
  return misses;
}

std::vector<AccessEvent> random_events(test::Gen& g, std::size_t n) {
  std::vector<AccessEvent> ev;
  for (std::size_t i = 0; i < n; ++i) {
    ev.push_back({static_cast<std::uint32_t>(g.below(3)), g.below(200), g.coin(0.5) ? AccessOp::kRead : AccessOp::kWrite});
  }
  return ev;
}

}  // namespace

TEST(Trace, EventEncodingIsLittleEndian) {
  unsigned char buf[kEventRecordBytes];
  encode_event({1, 2, AccessOp::kWrite}, buf);
  const unsigned char want[] = {1, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1};
  EXPECT_EQ(0, std::memcmp(buf, want, sizeof want));
}

TEST(Trace, DigestsMatchReferenceSha256) {
  EXPECT_EQ(to_hex(digest_of({})), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const std::vector<AccessEvent> one{{1, 2, AccessOp::kWrite}};
  EXPECT_EQ(to_hex(digest_of(one)), "34b603f338a0f7b3ec417f694ed4b1394f8ecabb23f683141b5d7d2020cfcf7e");
  const std::vector<AccessEvent> three{{0, 0, AccessOp::kRead}, {0, 1, AccessOp::kWrite}, {7, 1ull << 40, AccessOp::kRead}};
  EXPECT_EQ(to_hex(digest_of(three)), "ecccac11af3bc4ff09932ffc619b3328f6974af517e77ed1980c81f9730ecf42");
  EXPECT_EQ(digest_from_hex(to_hex(digest_of(three))), digest_of(three));
}

TEST(Trace, HasherCanReportMidStream) {
  test::Gen g(1);
  const auto ev = random_events(g, 20000);
  TraceHasher h;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    h.add(ev[i]);
    if (i == 777) {
      EXPECT_EQ(h.digest(), digest_of(std::span(ev).first(778)));
    }
  }
  EXPECT_EQ(h.digest(), digest_of(ev));
}

TEST(Trace, ComparisonFindsFirstDivergence) {
  auto a = AccessTrace::from_events({{0, 0, AccessOp::kRead}, {0, 1, AccessOp::kRead}, {0, 2, AccessOp::kWrite}});
  auto b = AccessTrace::from_events({{0, 0, AccessOp::kRead}, {0, 5, AccessOp::kRead}, {0, 2, AccessOp::kWrite}});
  const auto c = traces_equal(a, b);
  EXPECT_FALSE(c.equal);
  ASSERT_TRUE(c.position);
  EXPECT_EQ(*c.position, 1u);
  EXPECT_TRUE(traces_equal(a, a).equal);
  auto shorter = AccessTrace::from_events({{0, 0, AccessOp::kRead}});
  EXPECT_EQ(*traces_equal(a, shorter).position, 1u);
}

TEST(TraceFile, RoundTripAndSidecarCheck) {
  test::Gen g(2);
  const auto t = AccessTrace::from_events(random_events(g, 1000));
  const auto path = temp_path("roundtrip.trace");
  write_trace_file(path.string(), t);
  const auto back = read_trace_file(path.string());
  EXPECT_EQ(back.digest, t.digest);
  EXPECT_TRUE(traces_equal(back, t).equal);
  EXPECT_EQ(std::filesystem::file_size(path), 1000u * kEventRecordBytes);

  std::ofstream(sidecar_path(path.string())) << "digest=" << std::string(64, '0') << "\n";
  EXPECT_THROW(read_trace_file(path.string()), FormatError);

  write_trace_file(path.string(), t);
  std::filesystem::resize_file(path, 1000u * kEventRecordBytes - 3);
  EXPECT_THROW(read_trace_file(path.string()), FormatError);
  EXPECT_THROW(read_trace_file(temp_path("missing.trace").string()), FormatError);
}

TEST(Cache, ScanTransfers) {
  std::vector<AccessEvent> scan;
  for (std::uint64_t i = 0; i < 64; ++i) scan.push_back({0, i, AccessOp::kRead});
  EXPECT_EQ(simulate_cache(scan, {32, 8}), 8u);
  EXPECT_EQ(simulate_cache(scan, {32, 1}), 64u);
  EXPECT_THROW(simulate_cache(scan, {32, 0}), InvalidArgument);
}

TEST(Cache, MatchesNaiveLru) {
  test::Gen g(4);
  for (int i = 0; i < 20; ++i) {
    const auto ev = random_events(g, 3000);
    for (auto [m, b] : {std::pair<std::uint64_t, std::uint64_t>{16, 4}, {64, 8}, {7, 1}, {256, 16}, {3, 4}}) {
      EXPECT_EQ(simulate_cache(ev, {m, b}), naive_lru(ev, m, b)) << m << "/" << b;
    }
  }
}

TEST(Cache, MoreCapacityNeverCostsMore) {
  test::Gen g(5);
  for (int i = 0; i < 10; ++i) {
    const auto ev = random_events(g, 5000);
    for (std::uint64_t b : {1u, 4u, 16u}) {
      std::uint64_t prev = UINT64_MAX;
      for (std::uint64_t m = b; m <= 1024; m *= 2) {
        const auto t = simulate_cache(ev, {m, b});
        EXPECT_LE(t, prev);
        prev = t;
      }
    }
  }
}

TEST(EngineContext, OnlineCacheAgreesWithReplay) {
  ContextOptions o;
  o.online_cache = CacheParams{64, 8};
  EngineContext ctx(o);
  test::Gen g(6);
  Relation r = test::load(ctx, AttrSet::of({0}), g.tuples(AttrSet::of({0}), 100, 50, 0.1));
  oblivious_sort(ctx, r, AttrSet::of({0}));
  const auto transfers = ctx.transfers();
  ASSERT_TRUE(transfers);
  EXPECT_EQ(*transfers, simulate_cache(ctx.events(), {64, 8}));
  EXPECT_EQ(ctx.events().size(), ctx.event_count());
}

TEST(EngineContext, CountOnlyModeKeepsCount) {
  ContextOptions o;
  o.keep_events = false;
  o.hash = false;
  EngineContext ctx(o);
  TracedArray a(ctx, 4);
  a.write(0, Tuple{});
  a.read(0);
  EXPECT_EQ(ctx.event_count(), 2u);
  EXPECT_TRUE(ctx.events().empty());
}

TEST(EngineContext, SlotCapAndRelease) {
  ContextOptions o;
  o.slot_cap = 10;
  EngineContext ctx(o);
  {
    TracedArray a(ctx, 6);
    EXPECT_EQ(ctx.live_slots(), 6u);
    EXPECT_THROW(TracedArray(ctx, 5), BudgetOverflow);
    TracedArray b(ctx, 4);
    EXPECT_EQ(ctx.peak_slots(), 10u);
  }
  EXPECT_EQ(ctx.live_slots(), 0u);
  TracedArray c(ctx, 10);
}

TEST(EngineContext, SlotCapFromEnvironment) {
  setenv("OJOIN_SLOT_CAP", "12345", 1);
  EXPECT_EQ(default_slot_cap(), 12345u);
  unsetenv("OJOIN_SLOT_CAP");
  EXPECT_EQ(default_slot_cap(), 1ull << 27);
}

TEST(EngineContext, ArrayIdsAreSequential) {
  EngineContext ctx;
  TracedArray a(ctx, 1), b(ctx, 1);
  EXPECT_EQ(b.id(), a.id() + 1);
}

TEST(EngineContext, SitesNest) {
  EngineContext ctx;
  SiteScope outer(ctx, "a");
  {
    SiteScope inner(ctx, "b");
    EXPECT_EQ(ctx.site(), "a/b");
    ctx.note_budget(3, 4);
  }
  EXPECT_EQ(ctx.site(), "a");
  ASSERT_EQ(ctx.budget_log().size(), 1u);
  EXPECT_EQ(ctx.budget_log()[0].site, "a/b");
}

TEST(RelationIo, RowsRoundTripAndPadding) {
  EngineContext ctx;
  const AttrSet s = AttrSet::of({1, 3});
  PlainRelation p{s, {{1, 2}, {3, 4}}};
  Relation r = load_relation(ctx, p, 5);
  EXPECT_EQ(r.size(), 5u);
  EXPECT_EQ(count_reals(r), 2u);
  EXPECT_EQ(extract_rows(r), p.rows);
  EXPECT_EQ(ctx.event_count(), 0u);
  EXPECT_THROW(tuple_from_row(s, {kReservedCode, 1}), InvalidArgument);
  EXPECT_THROW(tuple_from_row(s, {1}), InvalidArgument);
}

TEST(TracedArrayDeathTest, OutOfBoundsAborts) {
  EXPECT_DEATH(
      {
        EngineContext ctx;
        TracedArray a(ctx, 2);
        a.read(2);
      },
      "");
}

TEST(TracedArrayDeathTest, RegisterLimitAborts) {
  EXPECT_DEATH(
      {
        EngineContext ctx;
        RegisterScope r(ctx, kMaxTrustedRegisters + 1);
      },
      "");
}
