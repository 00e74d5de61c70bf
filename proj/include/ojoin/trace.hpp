#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ojoin {

enum class AccessOp : std::uint8_t { kRead = 0, kWrite = 1 };

struct AccessEvent {
  std::uint32_t array = 0;
  std::uint64_t index = 0;
  AccessOp op = AccessOp::kRead;

  friend bool operator==(const AccessEvent&, const AccessEvent&) = default;
};

std::string to_string(const AccessEvent& e);

inline constexpr std::size_t kEventRecordBytes = 13;
void encode_event(const AccessEvent& e, unsigned char* out);

using Digest = std::array<unsigned char, 32>;
std::string to_hex(const Digest& d);
Digest digest_from_hex(const std::string& hex);

// Streaming SHA-256 over the encoded event records.
class TraceHasher {
 public:
  TraceHasher();
  ~TraceHasher();
  TraceHasher(const TraceHasher&) = delete;
  TraceHasher& operator=(const TraceHasher&) = delete;

  void add(const AccessEvent& e) {
    encode_event(e, buffer_.data() + fill_);
    fill_ += kEventRecordBytes;
    if (fill_ + kEventRecordBytes > buffer_.size()) flush();
  }
  // Digest of everything added so far; adding may continue afterwards.
  Digest digest();

 private:
  void flush();

  struct State;
  std::unique_ptr<State> state_;
  std::array<unsigned char, kEventRecordBytes * 5041> buffer_{};
  std::size_t fill_ = 0;
};

struct AccessTrace {
  std::vector<AccessEvent> events;
  Digest digest{};

  static AccessTrace from_events(std::vector<AccessEvent> events);
};

Digest digest_of(std::span<const AccessEvent> events);

struct TraceComparison {
  bool equal = true;
  std::optional<std::size_t> position;
  std::optional<AccessEvent> left;
  std::optional<AccessEvent> right;

  std::string describe() const;
};

// Compares event sequences; falls back to digests when a side has no events.
TraceComparison traces_equal(const AccessTrace& a, const AccessTrace& b);

struct CacheParams {
  std::uint64_t capacity = 0;  // M, in elements
  std::uint64_t block = 1;     // B, in elements

  std::uint64_t blocks() const;
  bool tall() const { return capacity >= 2 * block; }
};

// Fully associative LRU over blocks addressed by (array, index / B).
class LruCache {
 public:
  explicit LruCache(CacheParams p);
  // Returns true on a hit.
  bool access(std::uint32_t array, std::uint64_t index);
  std::uint64_t transfers() const { return misses_; }
  std::uint64_t accesses() const { return accesses_; }

 private:
  void unlink(std::uint32_t slot);
  void push_front(std::uint32_t slot);

  struct Node {
    std::uint64_t key;
    std::uint32_t prev, next;
  };
  std::uint64_t block_;
  std::uint64_t capacity_;
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, std::uint32_t> where_;
  std::uint32_t head_ = UINT32_MAX, tail_ = UINT32_MAX;
  std::uint64_t misses_ = 0, accesses_ = 0;
};

std::uint64_t simulate_cache(std::span<const AccessEvent> events, CacheParams p);
inline std::uint64_t simulate_cache(const AccessTrace& t, CacheParams p) {
  return simulate_cache(t.events, p);
}

// Binary trace files: concatenated 13-byte little-endian records.
void write_events(std::ostream& os, std::span<const AccessEvent> events);
AccessTrace read_trace_file(const std::string& path);
void write_trace_file(const std::string& path, const AccessTrace& t);
// "digest=<hex>" sidecar next to a trace file.
std::string sidecar_path(const std::string& trace_path);

}  // namespace ojoin
