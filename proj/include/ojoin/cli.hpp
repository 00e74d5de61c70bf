#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ojoin/engine.hpp"
#include "ojoin/oracle.hpp"

namespace ojoin {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitBudget = 3, kExitUnequal = 4 };

struct RelationSpec {
  std::string name;
  std::vector<std::string> attrs;
  std::optional<std::filesystem::path> file;  // resolved against the query file
};

struct QuerySpec {
  JoinQuery query;
  std::vector<RelationSpec> relations;  // aligned with query.edges()
  std::optional<Ghd> ghd;
};

// {"attributes": [...], "relations": [{"name", "attrs", "file"?}],
//  "ghd"?: {"bags": [[attr...]...], "edges": [[u, v]...], "root": r}}
QuerySpec parse_query_json(const std::string& text, const std::filesystem::path& base,
                           const std::string& source = "query");
QuerySpec load_query_file(const std::filesystem::path& path);
std::string query_to_json(const QuerySpec& spec);

// Header of attribute names, then comma-separated rows. Columns may come in
// any order; rows are returned over the attributes in ascending id order.
struct RawRelation {
  AttrSet schema;
  std::vector<std::vector<std::string>> rows;
};
RawRelation parse_relation_csv(const JoinQuery& q, std::size_t edge, std::istream& in,
                               const std::string& source);
RawRelation read_relation_file(const JoinQuery& q, std::size_t edge, const std::filesystem::path& path);

// Order-preserving value codes: numeric order when every value is an integer
// that fits in 63 bits, string order otherwise.
class Dictionary {
 public:
  static Dictionary build(const std::vector<RawRelation>& rels);
  Value encode(const std::string& v) const;
  const std::string& decode(Value code) const;
  std::size_t size() const { return values_.size(); }
  void write(std::ostream& os) const;

 private:
  std::vector<std::string> values_;
  std::map<std::string, Value> codes_;
};

struct LoadedData {
  PlainInstance instance;
  Dictionary dict;
  std::uint64_t duplicates = 0;
};
// Encodes and deduplicates every relation of the query.
LoadedData load_data(const QuerySpec& spec, std::ostream& warn);

void write_relation_csv(std::ostream& os, const JoinQuery& q, AttrSet schema, const std::vector<Row>& rows,
                        const Dictionary* dict = nullptr);

struct RunArgs {
  std::filesystem::path query;
  Strategy strategy = Strategy::kGeneric;
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> tau;
  bool pad_to_n = false;
  std::optional<std::filesystem::path> trace_out;
  bool digest_only = false;
};

struct VerifyArgs {
  std::filesystem::path query;
  Strategy strategy = Strategy::kGeneric;
  std::size_t k = 10;
  std::uint64_t seed = 1;
  std::uint64_t n = 32;  // total input size
  bool pad_to_n = false;
  GenOptions gen;
  std::optional<std::uint64_t> tau;
};

struct BenchArgs {
  std::filesystem::path query;
  Strategy strategy = Strategy::kGeneric;
  std::vector<std::uint64_t> grid;
  std::uint64_t seed = 1;
  GenOptions gen;
  CacheParams cache{4096, 16};
};

struct GenArgs {
  std::filesystem::path query;
  std::filesystem::path out_dir;
  std::uint64_t n = 32;
  std::uint64_t seed = 1;
  GenOptions gen;
};

// Every command reports on `out`, diagnostics on `err`, and returns an exit code.
int cmd_bounds(const std::filesystem::path& query, std::optional<std::uint64_t> n, std::ostream& out,
               std::ostream& err);
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_trace(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify_oblivious(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_cache_sim(const std::filesystem::path& trace, CacheParams p, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& err);

struct VerifyResult {
  bool equal = true;
  std::uint64_t events = 0;
  std::size_t runs = 0;
  std::string divergence;  // first difference when unequal
};
// The core of cmd_verify_oblivious, usable without a query file.
VerifyResult verify_oblivious(const JoinQuery& q, const VerifyArgs& args, const std::optional<Ghd>& ghd = {});

struct BenchPoint {
  std::uint64_t n = 0;
  std::uint64_t events = 0;
  std::uint64_t transfers = 0;
};
std::vector<BenchPoint> bench(const JoinQuery& q, const BenchArgs& args, const std::optional<Ghd>& ghd = {});
// Least-squares slope of log(events) against log(n); empty below two points.
std::optional<double> loglog_slope(const std::vector<BenchPoint>& pts);

}  // namespace ojoin
