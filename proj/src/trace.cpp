#include "ojoin/trace.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "ojoin/errors.hpp"

namespace ojoin {

std::string to_string(const AccessEvent& e) {
  std::ostringstream os;
  os << (e.op == AccessOp::kRead ? "read" : "write") << "(array " << e.array << ", index "
     << e.index << ")";
  return os.str();
}

void encode_event(const AccessEvent& e, unsigned char* out) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<unsigned char>(e.array >> (8 * i));
  for (int i = 0; i < 8; ++i) out[4 + i] = static_cast<unsigned char>(e.index >> (8 * i));
  out[12] = static_cast<unsigned char>(e.op);
}

std::string to_hex(const Digest& d) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned char c : d) {
    s += digits[c >> 4];
    s += digits[c & 15];
  }
  return s;
}

Digest digest_from_hex(const std::string& hex) {
  if (hex.size() != 64) throw FormatError("digest must be 64 hex digits");
  Digest d{};
  for (std::size_t i = 0; i < 32; ++i) {
    d[i] = static_cast<unsigned char>(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
  }
  return d;
}

struct TraceHasher::State {
  EVP_MD_CTX* ctx = nullptr;
};

TraceHasher::TraceHasher() : state_(std::make_unique<State>()) {
  state_->ctx = EVP_MD_CTX_new();
  if (!state_->ctx || EVP_DigestInit_ex(state_->ctx, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
}

TraceHasher::~TraceHasher() { EVP_MD_CTX_free(state_->ctx); }

void TraceHasher::flush() {
  EVP_DigestUpdate(state_->ctx, buffer_.data(), fill_);
  fill_ = 0;
}

Digest TraceHasher::digest() {
  flush();
  EVP_MD_CTX* copy = EVP_MD_CTX_new();
  EVP_MD_CTX_copy_ex(copy, state_->ctx);
  Digest d{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(copy, d.data(), &len);
  EVP_MD_CTX_free(copy);
  return d;
}

Digest digest_of(std::span<const AccessEvent> events) {
  TraceHasher h;
  for (const auto& e : events) h.add(e);
  return h.digest();
}

AccessTrace AccessTrace::from_events(std::vector<AccessEvent> events) {
  AccessTrace t;
  t.digest = digest_of(events);
  t.events = std::move(events);
  return t;
}

std::string TraceComparison::describe() const {
  if (equal) return "EQUAL";
  std::ostringstream os;
  os << "UNEQUAL";
  if (position) {
    os << ": first divergence at event " << *position << ": "
       << (left ? to_string(*left) : std::string("<end of trace>")) << " vs "
       << (right ? to_string(*right) : std::string("<end of trace>"));
  } else {
    os << ": digests differ";
  }
  return os.str();
}

TraceComparison traces_equal(const AccessTrace& a, const AccessTrace& b) {
  TraceComparison c;
  if (a.events.empty() || b.events.empty()) {
    // Digest-only traces.
    c.equal = a.digest == b.digest && a.events.size() == b.events.size();
    return c;
  }
  const std::size_t n = std::min(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a.events[i] == b.events[i])) {
      c.equal = false;
      c.position = i;
      c.left = a.events[i];
      c.right = b.events[i];
      return c;
    }
  }
  if (a.events.size() != b.events.size()) {
    c.equal = false;
    c.position = n;
    if (n < a.events.size()) c.left = a.events[n];
    if (n < b.events.size()) c.right = b.events[n];
  }
  return c;
}

std::uint64_t CacheParams::blocks() const {
  const std::uint64_t b = block == 0 ? 1 : block;
  return std::max<std::uint64_t>(1, capacity / b);
}

LruCache::LruCache(CacheParams p) : block_(p.block), capacity_(p.blocks()) {
  if (p.block == 0) throw InvalidArgument("cache block size must be at least 1");
  if (!p.tall()) {
    std::cerr << "warning: cache capacity " << p.capacity << " is below two blocks of " << p.block
              << "\n";
  }
}

void LruCache::unlink(std::uint32_t s) {
  Node& n = nodes_[s];
  if (n.prev != UINT32_MAX) nodes_[n.prev].next = n.next; else head_ = n.next;
  if (n.next != UINT32_MAX) nodes_[n.next].prev = n.prev; else tail_ = n.prev;
}

void LruCache::push_front(std::uint32_t s) {
  nodes_[s].prev = UINT32_MAX;
  nodes_[s].next = head_;
  if (head_ != UINT32_MAX) nodes_[head_].prev = s;
  head_ = s;
  if (tail_ == UINT32_MAX) tail_ = s;
}

bool LruCache::access(std::uint32_t array, std::uint64_t index) {
  ++accesses_;
  const std::uint64_t key = (static_cast<std::uint64_t>(array) << 40) | (index / block_);
  auto it = where_.find(key);
  if (it != where_.end()) {
    if (head_ != it->second) {
      unlink(it->second);
      push_front(it->second);
    }
    return true;
  }
  ++misses_;
  std::uint32_t slot;
  if (nodes_.size() < capacity_) {
    slot = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({key, UINT32_MAX, UINT32_MAX});
  } else {
    slot = tail_;
    unlink(slot);
    where_.erase(nodes_[slot].key);
    nodes_[slot].key = key;
  }
  where_.emplace(key, slot);
  push_front(slot);
  return false;
}

std::uint64_t simulate_cache(std::span<const AccessEvent> events, CacheParams p) {
  LruCache c(p);
  for (const auto& e : events) c.access(e.array, e.index);
  return c.transfers();
}

void write_events(std::ostream& os, std::span<const AccessEvent> events) {
  unsigned char rec[kEventRecordBytes];
  for (const auto& e : events) {
    encode_event(e, rec);
    os.write(reinterpret_cast<const char*>(rec), kEventRecordBytes);
  }
}

std::string sidecar_path(const std::string& trace_path) { return trace_path + ".digest"; }

void write_trace_file(const std::string& path, const AccessTrace& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write " + path);
  write_events(os, t.events);
  std::ofstream side(sidecar_path(path));
  side << "digest=" << to_hex(t.digest) << "\n";
}

AccessTrace read_trace_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open trace file " + path);
  std::vector<AccessEvent> events;
  unsigned char rec[kEventRecordBytes];
  for (;;) {
    is.read(reinterpret_cast<char*>(rec), kEventRecordBytes);
    const auto got = is.gcount();
    if (got == 0) break;
    if (got != static_cast<std::streamsize>(kEventRecordBytes)) {
      throw FormatError(path + ": truncated record at event " + std::to_string(events.size()));
    }
    AccessEvent e;
    for (int i = 0; i < 4; ++i) e.array |= static_cast<std::uint32_t>(rec[i]) << (8 * i);
    for (int i = 0; i < 8; ++i) e.index |= static_cast<std::uint64_t>(rec[4 + i]) << (8 * i);
    if (rec[12] > 1) {
      throw FormatError(path + ": bad op byte at event " + std::to_string(events.size()));
    }
    e.op = static_cast<AccessOp>(rec[12]);
    events.push_back(e);
  }
  AccessTrace t = AccessTrace::from_events(std::move(events));
  std::ifstream side(sidecar_path(path));
  std::string line;
  if (side && std::getline(side, line)) {
    if (line.rfind("digest=", 0) != 0 || digest_from_hex(line.substr(7)) != t.digest) {
      throw FormatError(path + ": digest sidecar does not match trace contents");
    }
  }
  return t;
}

}  // namespace ojoin
