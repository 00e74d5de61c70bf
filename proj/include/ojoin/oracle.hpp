#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ojoin/engine.hpp"
#include "ojoin/hypergraph.hpp"
#include "ojoin/memory.hpp"

namespace ojoin {

// Relations aligned with the query's edges, rows over each edge's attributes.
using PlainInstance = std::vector<PlainRelation>;
// Rows over q.vars() in ascending attribute order.
using ResultRows = std::vector<Row>;

inline constexpr double kBruteForceGuard = 1e8;

// Test query families: "triangle", "cycle-K", "lw-K" (Loomis-Whitney),
// "chain-K" (K edges), "boat-K", "star-K", "edge-K" (one relation of arity K).
JoinQuery named_query(const std::string& name);
const std::vector<std::string>& acceptance_queries();

// Set semantics; rows sorted ascending.
ResultRows brute_force_join(const JoinQuery& q, const PlainInstance& inst);

// Engine output reals as sorted rows over q.vars(), duplicates kept.
ResultRows result_rows(const JoinQuery& q, const Relation& out);

enum class Profile { kUniform, kSkewed, kHeavyHitter, kAgmExtremal };
std::string to_string(Profile p);
Profile parse_profile(const std::string& name);

struct GenOptions {
  Profile profile = Profile::kUniform;
  double alpha = 1.2;  // Zipf exponent for kSkewed
};

// Pure function of (query, options, sizes, seed). Sizes are upper bounds for
// kHeavyHitter and kAgmExtremal, which may produce fewer rows.
PlainInstance gen_instance(const JoinQuery& q, const GenOptions& opts,
                           const std::vector<std::uint64_t>& sizes, std::uint64_t seed);

// Splits a total evenly over the relations, remainder to the first ones.
std::vector<std::uint64_t> split_sizes(std::uint64_t total, std::size_t relations);

Instance load_instance(EngineContext& ctx, const PlainInstance& plain, std::uint64_t pad_to = 0);

struct BudgetReport {
  std::vector<BudgetRecord> entries;
  std::uint64_t violations = 0;
  std::uint64_t max_required = 0;
  std::uint64_t tau_at_max = 0;

  bool sound() const { return violations == 0; }
  std::string summary() const;
};

BudgetReport check_budget_report(const std::vector<BudgetRecord>& log);

// Reference versions of the primitives over plain tuple lists (reals only).
namespace reference {

std::vector<Tuple> sort(std::vector<Tuple> r, AttrSet key);
std::vector<Tuple> semi_join(const std::vector<Tuple>& r, const std::vector<Tuple>& s, AttrSet x);
// (key, count) pairs in ascending key order; value in ann[0].
std::vector<Tuple> reduce_by_key(const std::vector<Tuple>& r, AttrSet x);
std::vector<Tuple> annotate(const std::vector<Tuple>& r, const std::vector<Tuple>& s, AttrSet x,
                            std::size_t slot, bool absent_as_zero);
std::vector<Tuple> multi_number(const std::vector<Tuple>& r, AttrSet x);
std::vector<Tuple> project(const std::vector<Tuple>& r, AttrSet x);
std::vector<Tuple> intersect(const std::vector<Tuple>& r, const std::vector<Tuple>& s, AttrSet schema);
std::vector<std::uint64_t> degrees(const std::vector<Tuple>& r, const std::vector<Tuple>& s, AttrSet x);
std::vector<Tuple> expand(const std::vector<Tuple>& r, std::size_t weight_slot);
std::vector<Tuple> join(const std::vector<Tuple>& r, AttrSet rs, const std::vector<Tuple>& s, AttrSet ss);

}  // namespace reference

}  // namespace ojoin
