#pragma once

#include <cstdint>
#include <cstdlib>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ojoin/errors.hpp"
#include "ojoin/trace.hpp"
#include "ojoin/tuple.hpp"

namespace ojoin {

std::uint64_t default_slot_cap();  // OJOIN_SLOT_CAP or 2^27

struct ContextOptions {
  bool keep_events = true;
  bool hash = true;
  std::uint64_t slot_cap = default_slot_cap();
  // Receives every event as a binary record when set.
  std::ostream* sink = nullptr;
  std::optional<CacheParams> online_cache;
};

// One expand call's requirement against its bound.
struct BudgetRecord {
  std::string site;
  std::uint64_t required = 0;
  std::uint64_t tau = 0;
};

// Allocator plus the active trace of one engine run. Single-threaded.
class EngineContext {
 public:
  explicit EngineContext(ContextOptions opts = {});
  ~EngineContext();
  EngineContext(const EngineContext&) = delete;
  EngineContext& operator=(const EngineContext&) = delete;

  void record(std::uint32_t array, std::uint64_t index, AccessOp op) {
    ++count_;
    if (!opts_.keep_events && !opts_.hash && !opts_.sink && !cache_) return;
    record_slow(AccessEvent{array, index, op});
  }

  std::uint64_t event_count() const { return count_; }
  const std::vector<AccessEvent>& events() const { return events_; }
  Digest digest();
  AccessTrace take_trace();
  std::optional<std::uint64_t> transfers() const;

  std::uint32_t allocate(std::uint64_t length);
  void release(std::uint64_t length) { live_slots_ -= length; }
  std::uint64_t live_slots() const { return live_slots_; }
  std::uint64_t peak_slots() const { return peak_slots_; }
  std::uint64_t slot_cap() const { return opts_.slot_cap; }

  void note_budget(std::uint64_t required, std::uint64_t tau);
  const std::vector<BudgetRecord>& budget_log() const { return budgets_; }
  std::string site() const;
  void push_site(std::string s) { sites_.push_back(std::move(s)); }
  void pop_site() { sites_.pop_back(); }

  // Trusted-register accounting; see RegisterScope.
  void claim_registers(int n);
  void free_registers(int n) { registers_ -= n; }

 private:
  void record_slow(const AccessEvent& e);

  ContextOptions opts_;
  std::uint64_t count_ = 0;
  std::vector<AccessEvent> events_;
  std::optional<TraceHasher> hasher_;
  std::optional<LruCache> cache_;
  std::uint32_t next_id_ = 0;
  std::uint64_t live_slots_ = 0;
  std::uint64_t peak_slots_ = 0;
  std::vector<BudgetRecord> budgets_;
  std::vector<std::string> sites_;
  int registers_ = 0;
};

inline constexpr int kMaxTrustedRegisters = 64;

// Declares how many tuple-sized trusted locals a primitive keeps live. The sum
// over the active call chain must stay below kMaxTrustedRegisters.
class RegisterScope {
 public:
  RegisterScope(EngineContext& ctx, int n) : ctx_(ctx), n_(n) { ctx_.claim_registers(n); }
  ~RegisterScope() { ctx_.free_registers(n_); }
  RegisterScope(const RegisterScope&) = delete;
  RegisterScope& operator=(const RegisterScope&) = delete;

 private:
  EngineContext& ctx_;
  int n_;
};

class SiteScope {
 public:
  SiteScope(EngineContext& ctx, std::string s) : ctx_(ctx) { ctx_.push_site(std::move(s)); }
  ~SiteScope() { ctx_.pop_site(); }
  SiteScope(const SiteScope&) = delete;
  SiteScope& operator=(const SiteScope&) = delete;

 private:
  EngineContext& ctx_;
};

[[noreturn]] void hard_fault(const char* what, std::uint64_t index, std::uint64_t length);

// Array in untrusted memory. Every read and write appends one event.
class TracedArray {
 public:
  TracedArray(EngineContext& ctx, std::uint64_t length);
  ~TracedArray();
  TracedArray(TracedArray&& o) noexcept;
  TracedArray& operator=(TracedArray&& o) noexcept;
  TracedArray(const TracedArray&) = delete;
  TracedArray& operator=(const TracedArray&) = delete;

  Tuple read(std::uint64_t i) const {
    if (i >= slots_.size()) hard_fault("read", i, slots_.size());
    ctx_->record(id_, i, AccessOp::kRead);
    return slots_[i];
  }
  void write(std::uint64_t i, const Tuple& t) {
    if (i >= slots_.size()) hard_fault("write", i, slots_.size());
    ctx_->record(id_, i, AccessOp::kWrite);
    slots_[i] = t;
  }

  std::uint64_t size() const { return slots_.size(); }
  std::uint32_t id() const { return id_; }
  EngineContext& context() const { return *ctx_; }

  // Contents without recording events: for loading inputs into memory before
  // a run and for handing results back afterwards.
  std::span<const Tuple> untraced() const { return slots_; }
  void load_untraced(std::uint64_t i, const Tuple& t) { slots_.at(i) = t; }

 private:
  EngineContext* ctx_;
  std::uint32_t id_;
  std::vector<Tuple> slots_;
};

struct Relation {
  AttrSet schema;
  TracedArray data;

  std::uint64_t size() const { return data.size(); }
};

inline Relation make_relation(EngineContext& ctx, AttrSet schema, std::uint64_t length) {
  return Relation{schema, TracedArray(ctx, length)};
}

// Plain rows list values in ascending attribute-id order of the schema.
using Row = std::vector<Value>;

struct PlainRelation {
  AttrSet schema;
  std::vector<Row> rows;
};

Tuple tuple_from_row(AttrSet schema, const Row& row);
Row row_from_tuple(AttrSet schema, const Tuple& t);

// Copies rows into a new relation of length max(rows, pad_to).
Relation load_relation(EngineContext& ctx, const PlainRelation& r, std::uint64_t pad_to = 0);
// Real tuples of a relation as rows, in storage order.
std::vector<Row> extract_rows(const Relation& r);
std::uint64_t count_reals(const Relation& r);

}  // namespace ojoin
