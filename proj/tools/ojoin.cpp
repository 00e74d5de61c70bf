#include <iostream>

#include <CLI11.hpp>

#include "ojoin/cli.hpp"

using namespace ojoin;

int main(int argc, char** argv) {
  CLI::App app{"Oblivious multi-way join engine"};
  app.require_subcommand(1);

  std::string query, output, trace_out, strategy = "generic", profile = "uniform", grid;
  std::optional<std::uint64_t> n, tau;
  std::uint64_t seed = 1, m = 4096, b = 16;
  std::size_t k = 10;
  double alpha = 1.2;
  bool pad = false, digest_only = false;

  auto strategy_opt = [&](CLI::App* c) {
    c->add_option("--strategy", strategy, "nested-loop, triangle-v1, triangle-v2, generic, ghd-relaxed, insecure-sortmerge");
  };
  auto gen_opts = [&](CLI::App* c) {
    c->add_option("--profile", profile, "uniform, skewed, heavy-hitter, agm-extremal");
    c->add_option("--alpha", alpha, "Zipf exponent for the skewed profile");
    c->add_option("--seed", seed);
  };

  auto* bounds = app.add_subcommand("bounds", "Print cover numbers, decomposition and budgets");
  bounds->add_option("query", query)->required();
  bounds->add_option("--n", n, "Input size (defaults to the relation files)");

  auto* run = app.add_subcommand("run", "Evaluate a join and write the result");
  auto* trace = app.add_subcommand("trace", "Evaluate a join and export its access trace");
  for (auto* c : {run, trace}) {
    c->add_option("query", query)->required();
    strategy_opt(c);
    c->add_option("--tau", tau, "Output bound for ghd-relaxed");
    c->add_flag("--pad-to-n", pad, "Pad every relation to the total input size");
    c->add_option("--trace-out", trace_out, "Binary trace file (digest sidecar alongside)");
    c->add_flag("--digest-only", digest_only, "Only print the trace digest");
  }
  run->add_option("-o,--output", output, "Result CSV (stdout when omitted)");

  auto* verify = app.add_subcommand("verify-oblivious", "Compare traces across random instances");
  verify->add_option("query", query)->required();
  strategy_opt(verify);
  gen_opts(verify);
  verify->add_option("--k", k, "Number of instances")->check(CLI::Range(2, 1 << 20));
  verify->add_option("--n", n, "Total input size (default 32)");
  verify->add_option("--tau", tau, "Output bound for ghd-relaxed");
  verify->add_flag("--pad-to-n", pad, "Vary per-relation sizes, pad each to N");

  std::string trace_file;
  auto* cache = app.add_subcommand("cache-sim", "Replay a trace through an LRU cache");
  cache->add_option("trace", trace_file)->required();
  cache->add_option("--m", m, "Cache capacity in elements");
  cache->add_option("--b", b, "Block size in elements");

  auto* benchc = app.add_subcommand("bench", "Event and transfer counts over an input-size grid");
  benchc->add_option("query", query)->required();
  strategy_opt(benchc);
  gen_opts(benchc);
  benchc->add_option("--grid", grid, "Comma-separated ascending sizes")->required();
  benchc->add_option("--m", m);
  benchc->add_option("--b", b);

  auto* gen = app.add_subcommand("gen", "Write a random instance as CSV files");
  gen->add_option("query", query)->required();
  gen_opts(gen);
  gen->add_option("--n", n, "Total input size (default 32)");
  gen->add_option("-o,--out-dir", output)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const Strategy st = parse_strategy(strategy);
    GenOptions g{parse_profile(profile), alpha};
    if (*bounds) return cmd_bounds(query, n, std::cout, std::cerr);
    if (*run || *trace) {
      RunArgs a{query, st, std::nullopt, tau, pad, std::nullopt, digest_only};
      if (!output.empty()) a.output = output;
      if (!trace_out.empty()) a.trace_out = trace_out;
      return *run ? cmd_run(a, std::cout, std::cerr) : cmd_trace(a, std::cout, std::cerr);
    }
    if (*verify) {
      VerifyArgs a{query, st, k, seed, n.value_or(32), pad, g, tau};
      return cmd_verify_oblivious(a, std::cout, std::cerr);
    }
    if (*cache) return cmd_cache_sim(trace_file, CacheParams{m, b}, std::cout, std::cerr);
    if (*benchc) {
      BenchArgs a{query, st, {}, seed, g, CacheParams{m, b}};
      for (const auto& field : CLI::detail::split(grid, ',')) a.grid.push_back(std::stoull(field));
      return cmd_bench(a, std::cout, std::cerr);
    }
    if (*gen) return cmd_gen(GenArgs{query, output, n.value_or(32), seed, g}, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
