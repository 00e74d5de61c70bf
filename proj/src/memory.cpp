#include "ojoin/memory.hpp"

#include <cstdio>
#include <iostream>

namespace ojoin {

std::uint64_t default_slot_cap() {
  if (const char* env = std::getenv("OJOIN_SLOT_CAP")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable OJOIN_SLOT_CAP='" << env << "'\n";
    }
  }
  return std::uint64_t{1} << 27;
}

EngineContext::EngineContext(ContextOptions opts) : opts_(opts) {
  if (opts_.hash) hasher_.emplace();
  if (opts_.online_cache) cache_.emplace(*opts_.online_cache);
}

EngineContext::~EngineContext() = default;

void EngineContext::record_slow(const AccessEvent& e) {
  if (opts_.keep_events) events_.push_back(e);
  if (hasher_) hasher_->add(e);
  if (cache_) cache_->access(e.array, e.index);
  if (opts_.sink) {
    unsigned char rec[kEventRecordBytes];
    encode_event(e, rec);
    opts_.sink->write(reinterpret_cast<const char*>(rec), kEventRecordBytes);
  }
}

Digest EngineContext::digest() { return hasher_ ? hasher_->digest() : Digest{}; }

AccessTrace EngineContext::take_trace() {
  AccessTrace t;
  t.digest = digest();
  t.events = std::move(events_);
  events_.clear();
  return t;
}

std::optional<std::uint64_t> EngineContext::transfers() const {
  if (!cache_) return std::nullopt;
  return cache_->transfers();
}

std::uint32_t EngineContext::allocate(std::uint64_t length) {
  if (live_slots_ + length > opts_.slot_cap || live_slots_ + length < live_slots_) {
    throw BudgetOverflow("allocating " + std::to_string(length) + " slots would exceed the slot cap of " +
                         std::to_string(opts_.slot_cap) + " (set OJOIN_SLOT_CAP to raise it)");
  }
  live_slots_ += length;
  peak_slots_ = std::max(peak_slots_, live_slots_);
  return next_id_++;
}

void EngineContext::note_budget(std::uint64_t required, std::uint64_t tau) {
  budgets_.push_back({site(), required, tau});
}

std::string EngineContext::site() const {
  std::string s;
  for (const auto& p : sites_) {
    if (!s.empty()) s += "/";
    s += p;
  }
  return s.empty() ? "<top>" : s;
}

void EngineContext::claim_registers(int n) {
  registers_ += n;
  if (registers_ > kMaxTrustedRegisters) {
    std::fprintf(stderr, "trusted register budget exceeded: %d live\n", registers_);
    std::abort();
  }
}

void hard_fault(const char* what, std::uint64_t index, std::uint64_t length) {
  std::fprintf(stderr, "out-of-bounds %s at index %llu of array length %llu\n", what,
               static_cast<unsigned long long>(index), static_cast<unsigned long long>(length));
  std::abort();
}

TracedArray::TracedArray(EngineContext& ctx, std::uint64_t length)
    : ctx_(&ctx), id_(ctx.allocate(length)), slots_(length) {}

TracedArray::~TracedArray() {
  if (ctx_) ctx_->release(slots_.size());
}

TracedArray::TracedArray(TracedArray&& o) noexcept
    : ctx_(o.ctx_), id_(o.id_), slots_(std::move(o.slots_)) {
  o.ctx_ = nullptr;
  o.slots_.clear();
}

TracedArray& TracedArray::operator=(TracedArray&& o) noexcept {
  if (this != &o) {
    if (ctx_) ctx_->release(slots_.size());
    ctx_ = o.ctx_;
    id_ = o.id_;
    slots_ = std::move(o.slots_);
    o.ctx_ = nullptr;
    o.slots_.clear();
  }
  return *this;
}

Tuple tuple_from_row(AttrSet schema, const Row& row) {
  if (row.size() != schema.size()) {
    throw InvalidArgument("row has " + std::to_string(row.size()) + " values, schema has " +
                          std::to_string(schema.size()));
  }
  Tuple t;
  std::size_t i = 0;
  for (AttrId x : schema.ids()) {
    if (row[i] == kReservedCode) throw InvalidArgument("value code out of range");
    t.values[x] = row[i++];
  }
  t.dummy = false;
  return t;
}

Row row_from_tuple(AttrSet schema, const Tuple& t) {
  Row r;
  r.reserve(schema.size());
  for (AttrId x : schema.ids()) r.push_back(t.values[x]);
  return r;
}

Relation load_relation(EngineContext& ctx, const PlainRelation& r, std::uint64_t pad_to) {
  const std::uint64_t n = std::max<std::uint64_t>(r.rows.size(), pad_to);
  Relation out = make_relation(ctx, r.schema, n);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    out.data.load_untraced(i, tuple_from_row(r.schema, r.rows[i]));
  }
  return out;
}

std::vector<Row> extract_rows(const Relation& r) {
  std::vector<Row> rows;
  for (const Tuple& t : r.data.untraced()) {
    if (t.real()) rows.push_back(row_from_tuple(r.schema, t));
  }
  return rows;
}

std::uint64_t count_reals(const Relation& r) {
  std::uint64_t n = 0;
  for (const Tuple& t : r.data.untraced()) n += t.real();
  return n;
}

}  // namespace ojoin
