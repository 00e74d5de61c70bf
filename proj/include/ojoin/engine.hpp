#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ojoin/hypergraph.hpp"
#include "ojoin/memory.hpp"

namespace ojoin {

enum class Strategy { kNestedLoop, kTriangleV1, kTriangleV2, kGeneric, kGhdRelaxed, kInsecureSortMerge };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);
const std::vector<Strategy>& all_strategies();

// Relations aligned with the query's edges.
using Instance = std::vector<Relation>;

// Sum of array lengths: the public input size.
std::uint64_t input_size(const Instance& inst);

// One level of the generic join: vars is split into I (recursed on) and J.
struct EliminationStep {
  AttrSet vars;
  AttrSet i;
  AttrSet j;
};

std::vector<EliminationStep> elimination_order(const JoinQuery& q);
// The J chosen for a query with at least two attributes.
AttrSet choose_j(const JoinQuery& q);

struct RunOptions {
  Strategy strategy = Strategy::kGeneric;
  // Output bound for ghd-relaxed; defaults to power_budget(N, rho*).
  std::optional<std::uint64_t> tau;
  std::optional<Ghd> ghd;
  // Public input size used in every budget; defaults to input_size().
  std::optional<std::uint64_t> public_n;
};

struct JoinPlan {
  Strategy strategy = Strategy::kGeneric;
  std::uint64_t n = 0;
  EdgeCover fractional;
  EdgeCover integral;
  std::vector<EliminationStep> elimination;
  std::optional<Ghd> ghd;
  std::optional<Rational> fhtw;
  std::vector<std::pair<std::string, std::uint64_t>> budgets;
};

JoinPlan make_plan(const JoinQuery& q, const RunOptions& opts, std::uint64_t n);

Relation evaluate(EngineContext& ctx, const JoinQuery& q, const Instance& inst, const RunOptions& opts);

Relation oblivious_nested_loop_join(EngineContext& ctx, const JoinQuery& q, const Instance& inst);

// x1 < x2 < x3 in canonical order; r1 = R(x2,x3), r2 = R(x1,x3), r3 = R(x1,x2).
struct TriangleRoles {
  std::size_t r1, r2, r3;
  AttrId x1, x2, x3;
};
TriangleRoles triangle_roles(const JoinQuery& q);

Relation oblivious_triangle_v1(EngineContext& ctx, const JoinQuery& q, const Instance& inst,
                               std::uint64_t n);
Relation oblivious_triangle_v2(EngineContext& ctx, const JoinQuery& q, const Instance& inst,
                               std::uint64_t n);

// Each output has |q_i| slots; a tuple goes to the edge whose degree
// annotation (ann[slots[k]]) is smallest, lowest k on ties.
std::vector<Relation> partition_one(EngineContext& ctx, const Relation& q_i,
                                    std::span<const std::size_t> slots);

struct PartitionTwo {
  std::vector<Relation> pairs;    // row-major over (y_only, z_only)
  std::vector<Relation> singles;  // one per shared edge
};
PartitionTwo partition_two(EngineContext& ctx, const Relation& q_i,
                           std::span<const std::size_t> y_only, std::span<const std::size_t> z_only,
                           std::span<const std::size_t> shared);

// Every intermediate is bounded by tau, normally power_budget(N, rho*(q)).
Relation oblivious_generic_join(EngineContext& ctx, const JoinQuery& q, const Instance& inst,
                                std::uint64_t tau);

Relation relaxed_join_ghd(EngineContext& ctx, const JoinQuery& q, const Instance& inst, const Ghd& d,
                          std::uint64_t tau, std::uint64_t n);

// Left-deep sort-merge join whose reads follow the data. Leaks by design.
Relation insecure_sortmerge_join(EngineContext& ctx, const JoinQuery& q, const Instance& inst);

}  // namespace ojoin
