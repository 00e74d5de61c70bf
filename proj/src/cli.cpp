#include "ojoin/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ojoin {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const BudgetOverflow& e) {
    err << "budget overflow: " << e.what() << "\n";
    return kExitBudget;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

std::optional<std::int64_t> as_integer(const std::string& s) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string> string_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw FormatError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw FormatError(what + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Ghd parse_ghd(const json& j, const JoinQuery& q) {
  Ghd d;
  for (const auto& bag : j.at("bags")) {
    AttrSet s;
    for (const auto& name : string_list(bag, "ghd bag")) s.insert(q.attr(name));
    d.bags.push_back(s);
  }
  const std::size_t n = d.bags.size();
  if (n == 0) throw GhdInvalid("ghd has no bags");
  d.root = j.value("root", std::size_t{0});
  if (d.root >= n) throw GhdInvalid("ghd root out of range");
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : j.value("edges", json::array())) {
    const auto u = e.at(0).get<std::size_t>(), v = e.at(1).get<std::size_t>();
    if (u >= n || v >= n) throw GhdInvalid("ghd edge out of range");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  d.parent.assign(n, std::nullopt);
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> bfs;
  bfs.push(d.root);
  seen[d.root] = true;
  std::size_t reached = 1;
  while (!bfs.empty()) {
    const auto u = bfs.front();
    bfs.pop();
    for (auto v : adj[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      d.parent[v] = u;
      ++reached;
      bfs.push(v);
    }
  }
  std::size_t edge_count = 0;
  for (const auto& a : adj) edge_count += a.size();
  if (reached != n || edge_count / 2 != n - 1) throw GhdInvalid("ghd edges do not form a tree");
  return d;
}

RunOptions run_options(const QuerySpec& spec, Strategy s, std::optional<std::uint64_t> tau) {
  RunOptions o;
  o.strategy = s;
  o.tau = tau;
  o.ghd = spec.ghd;
  return o;
}

}  // namespace

QuerySpec parse_query_json(const std::string& text, const fs::path& base, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw ParseError(source, line, "invalid JSON");
  }
  if (!j.is_object()) throw FormatError(source + ": top level must be an object");
  const auto attributes = string_list(j.at("attributes"), "attributes");
  QuerySpec spec;
  std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  for (const auto& r : j.at("relations")) {
    RelationSpec rs;
    rs.name = r.at("name").get<std::string>();
    rs.attrs = string_list(r.at("attrs"), "relation attrs");
    if (r.contains("file")) {
      fs::path f = r.at("file").get<std::string>();
      rs.file = f.is_absolute() ? f : base / f;
    }
    edges.push_back({rs.name, rs.attrs});
    spec.relations.push_back(std::move(rs));
  }
  try {
    spec.query = JoinQuery(attributes, edges);
  } catch (const InvalidArgument& e) {
    throw FormatError(source + ": " + e.what());
  }
  if (j.contains("ghd")) spec.ghd = parse_ghd(j.at("ghd"), spec.query);
  return spec;
}

QuerySpec load_query_file(const fs::path& path) {
  return parse_query_json(read_file(path), path.parent_path(), path.string());
}

std::string query_to_json(const QuerySpec& spec) {
  json j;
  j["attributes"] = spec.query.universe();
  j["relations"] = json::array();
  for (const auto& r : spec.relations) {
    json jr{{"name", r.name}, {"attrs", r.attrs}};
    if (r.file) jr["file"] = r.file->filename().string();
    j["relations"].push_back(jr);
  }
  return j.dump(2) + "\n";
}

RawRelation parse_relation_csv(const JoinQuery& q, std::size_t edge, std::istream& in,
                               const std::string& source) {
  const AttrSet schema = q.edge(edge).attrs;
  RawRelation r{schema, {}};
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> column_of;  // slot in ascending-id row -> CSV column
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!header) {
      header = true;
      const auto ids = schema.ids();
      if (fields.size() != ids.size()) {
        throw ParseError(source, lineno, "header has " + std::to_string(fields.size()) +
                                             " columns, relation " + q.edge(edge).id + " has " +
                                             std::to_string(ids.size()) + " attributes");
      }
      column_of.assign(ids.size(), SIZE_MAX);
      for (std::size_t c = 0; c < fields.size(); ++c) {
        const auto it = std::find_if(ids.begin(), ids.end(),
                                     [&](AttrId x) { return q.attr_name(x) == fields[c]; });
        if (it == ids.end() || column_of[it - ids.begin()] != SIZE_MAX) {
          throw ParseError(source, lineno, "unexpected header column '" + fields[c] + "' for relation " +
                                               q.edge(edge).id + q.describe(schema));
        }
        column_of[it - ids.begin()] = c;
      }
      continue;
    }
    if (fields.size() != column_of.size()) {
      throw ParseError(source, lineno, "expected " + std::to_string(column_of.size()) + " fields, found " +
                                           std::to_string(fields.size()));
    }
    std::vector<std::string> row;
    for (auto c : column_of) {
      if (fields[c].empty()) throw ParseError(source, lineno, "empty value");
      row.push_back(fields[c]);
    }
    r.rows.push_back(std::move(row));
  }
  if (!header) throw ParseError(source, lineno + 1, "missing header line");
  return r;
}

RawRelation read_relation_file(const JoinQuery& q, std::size_t edge, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_relation_csv(q, edge, in, path.string());
}

Dictionary Dictionary::build(const std::vector<RawRelation>& rels) {
  std::set<std::string> all;
  for (const auto& r : rels) {
    for (const auto& row : r.rows) all.insert(row.begin(), row.end());
  }
  Dictionary d;
  d.values_.assign(all.begin(), all.end());
  const bool numeric = std::all_of(d.values_.begin(), d.values_.end(),
                                   [](const std::string& s) { return as_integer(s).has_value(); });
  if (numeric) {
    std::stable_sort(d.values_.begin(), d.values_.end(), [](const std::string& a, const std::string& b) {
      return *as_integer(a) < *as_integer(b);
    });
  }
  for (std::size_t i = 0; i < d.values_.size(); ++i) d.codes_[d.values_[i]] = i;
  return d;
}

Value Dictionary::encode(const std::string& v) const {
  auto it = codes_.find(v);
  if (it == codes_.end()) throw InvalidArgument("value '" + v + "' is not in the dictionary");
  return it->second;
}

const std::string& Dictionary::decode(Value code) const {
  if (code >= values_.size()) throw InvalidArgument("code " + std::to_string(code) + " is not in the dictionary");
  return values_[code];
}

void Dictionary::write(std::ostream& os) const {
  os << "code,value\n";
  for (std::size_t i = 0; i < values_.size(); ++i) os << i << ',' << values_[i] << '\n';
}

LoadedData load_data(const QuerySpec& spec, std::ostream& warn) {
  std::vector<RawRelation> raw;
  for (std::size_t e = 0; e < spec.relations.size(); ++e) {
    if (!spec.relations[e].file) throw FormatError("relation " + spec.relations[e].name + " has no file");
    raw.push_back(read_relation_file(spec.query, e, *spec.relations[e].file));
  }
  LoadedData out;
  out.dict = Dictionary::build(raw);
  for (std::size_t e = 0; e < raw.size(); ++e) {
    PlainRelation p{raw[e].schema, {}};
    std::set<Row> seen;
    std::uint64_t dups = 0;
    for (const auto& row : raw[e].rows) {
      Row enc;
      for (const auto& v : row) enc.push_back(out.dict.encode(v));
      if (seen.insert(enc).second) {
        p.rows.push_back(std::move(enc));
      } else {
        ++dups;
      }
    }
    if (dups) warn << "warning: " << spec.relations[e].name << ": dropped " << dups << " duplicate rows\n";
    out.duplicates += dups;
    out.instance.push_back(std::move(p));
  }
  return out;
}

void write_relation_csv(std::ostream& os, const JoinQuery& q, AttrSet schema, const std::vector<Row>& rows,
                        const Dictionary* dict) {
  const auto ids = schema.ids();
  for (std::size_t k = 0; k < ids.size(); ++k) os << (k ? "," : "") << q.attr_name(ids[k]);
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      os << (k ? "," : "");
      if (dict) {
        os << dict->decode(row[k]);
      } else {
        os << row[k];
      }
    }
    os << '\n';
  }
}

int cmd_bounds(const fs::path& query, std::optional<std::uint64_t> n, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const QuerySpec spec = load_query_file(query);
    const JoinQuery& q = spec.query;
    if (!n) {
      const bool have_files = std::all_of(spec.relations.begin(), spec.relations.end(),
                                          [](const RelationSpec& r) { return r.file.has_value(); });
      if (have_files) {
        n = 0;
        for (const auto& r : load_data(spec, err).instance) *n += r.rows.size();
      }
    }
    const auto fc = fractional_edge_cover(q);
    const auto ic = integral_edge_cover(q);
    out << "attributes: " << q.describe(q.vars()) << "\n";
    out << "rho*: " << to_string(fc.total) << "\n";
    out << "rho: " << to_string(ic.total) << "\n";
    out << "fractional cover:";
    for (std::size_t e = 0; e < q.num_edges(); ++e) out << ' ' << q.edge(e).id << '=' << to_string(fc.weights[e]);
    out << "\nintegral cover:";
    for (std::size_t e = 0; e < q.num_edges(); ++e) out << ' ' << q.edge(e).id << '=' << to_string(ic.weights[e]);
    out << "\n";
    std::optional<Ghd> ghd = spec.ghd;
    if (!ghd && q.vars().size() <= 8) ghd = search_ghd(q);
    if (ghd) {
      out << "fhtw: " << to_string(validate_ghd(q, *ghd)) << "\n";
      for (std::size_t u = 0; u < ghd->bags.size(); ++u) {
        out << "ghd bag " << u << ": " << q.describe(ghd->bags[u]) << " parent=";
        if (ghd->parent[u]) {
          out << *ghd->parent[u];
        } else {
          out << "root";
        }
        out << "\n";
      }
    }
    for (const auto& s : elimination_order(q)) {
      out << "elimination: " << q.describe(s.vars) << " I=" << q.describe(s.i) << " J=" << q.describe(s.j) << "\n";
    }
    if (n) {
      out << "N: " << *n << "\n";
      out << "N^rho: " << power_budget(*n, ic.total) << "\n";
      std::vector<Strategy> strategies{Strategy::kGeneric};
      if (ghd) strategies.push_back(Strategy::kGhdRelaxed);
      try {
        triangle_roles(q);
        strategies.insert(strategies.begin(), {Strategy::kTriangleV1, Strategy::kTriangleV2});
      } catch (const InvalidArgument&) {
      }
      for (Strategy s : strategies) {
        RunOptions o = run_options(spec, s, std::nullopt);
        o.ghd = ghd;
        for (const auto& [site, tau] : make_plan(q, o, *n).budgets) out << "tau " << site << ": " << tau << "\n";
      }
    }
    return kExitOk;
  });
}

namespace {

int run_impl(const RunArgs& args, bool write_result, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const QuerySpec spec = load_query_file(args.query);
    const JoinQuery& q = spec.query;
    LoadedData data = load_data(spec, err);
    std::uint64_t total = 0;
    for (const auto& r : data.instance) total += r.rows.size();

    std::ofstream trace_file;
    ContextOptions co;
    co.keep_events = false;
    co.hash = true;
    if (args.trace_out && !args.digest_only) {
      trace_file.open(*args.trace_out, std::ios::binary | std::ios::trunc);
      if (!trace_file) throw FormatError("cannot write " + args.trace_out->string());
      co.sink = &trace_file;
    }
    EngineContext ctx(co);
    const Instance inst = load_instance(ctx, data.instance, args.pad_to_n ? total : 0);
    RunOptions o = run_options(spec, args.strategy, args.tau);
    if (args.pad_to_n) o.public_n = total;
    const Relation result = evaluate(ctx, q, inst, o);
    const Digest digest = ctx.digest();
    if (co.sink) {
      trace_file.close();
      std::ofstream side(sidecar_path(args.trace_out->string()));
      side << "digest=" << to_hex(digest) << "\n";
    }

    const auto rows = result_rows(q, result);
    if (write_result && args.output) {
      std::ofstream os(*args.output);
      if (!os) throw FormatError("cannot write " + args.output->string());
      write_relation_csv(os, q, q.vars(), rows, &data.dict);
      std::ofstream dict(args.output->string() + ".dict");
      data.dict.write(dict);
    }
    const auto report = check_budget_report(ctx.budget_log());
    out << "strategy: " << to_string(args.strategy) << "\n";
    out << "N: " << input_size(inst) << " slots, " << total << " tuples\n";
    out << "OUT: " << rows.size() << "\n";
    out << "output slots: " << result.size() << "\n";
    out << "peak slots: " << ctx.peak_slots() << "\n";
    out << "events: " << ctx.event_count() << "\n";
    out << "digest: " << to_hex(digest) << "\n";
    out << "budgets: " << report.summary() << "\n";
    if (write_result && !args.output) write_relation_csv(out, q, q.vars(), rows, &data.dict);
    return kExitOk;
  });
}

std::vector<std::uint64_t> instance_sizes(std::size_t m, const VerifyArgs& args, std::uint64_t seed) {
  if (!args.pad_to_n) return split_sizes(args.n, m);
  // Per-relation sizes vary with the seed; only the total is public.
  if (args.n < m) throw InvalidArgument("N is smaller than the number of relations");
  std::mt19937_64 g(seed ^ 0xA5A5A5A5ull);
  std::vector<std::uint64_t> sizes(m, 1);
  for (std::uint64_t i = m; i < args.n; ++i) ++sizes[g() % m];
  return sizes;
}

struct RunDigest {
  Digest digest;
  std::uint64_t events;
};

RunDigest run_instance(const JoinQuery& q, const VerifyArgs& args, const std::optional<Ghd>& ghd,
                       std::uint64_t seed, std::vector<AccessEvent>* keep) {
  const auto sizes = instance_sizes(q.num_edges(), args, seed);
  const auto plain = gen_instance(q, args.gen, sizes, seed);
  ContextOptions co;
  co.keep_events = keep != nullptr;
  EngineContext ctx(co);
  Instance inst;
  for (std::size_t e = 0; e < plain.size(); ++e) {
    inst.push_back(load_relation(ctx, plain[e], args.pad_to_n ? args.n : sizes[e]));
  }
  RunOptions o;
  o.strategy = args.strategy;
  o.tau = args.tau;
  o.ghd = ghd;
  if (args.pad_to_n) o.public_n = args.n;
  evaluate(ctx, q, inst, o);
  RunDigest r{ctx.digest(), ctx.event_count()};
  if (keep) *keep = ctx.take_trace().events;
  return r;
}

}  // namespace

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) { return run_impl(args, true, out, err); }

int cmd_trace(const RunArgs& args, std::ostream& out, std::ostream& err) {
  if (!args.trace_out && !args.digest_only) {
    err << "error: trace needs --trace-out or --digest-only\n";
    return kExitConfig;
  }
  return run_impl(args, false, out, err);
}

VerifyResult verify_oblivious(const JoinQuery& q, const VerifyArgs& args, const std::optional<Ghd>& ghd) {
  if (args.k < 2) throw InvalidArgument("verify-oblivious needs k >= 2");
  VerifyResult res;
  const RunDigest first = run_instance(q, args, ghd, args.seed, nullptr);
  res.events = first.events;
  res.runs = 1;
  for (std::size_t i = 1; i < args.k; ++i) {
    const std::uint64_t seed = args.seed + i;
    const RunDigest cur = run_instance(q, args, ghd, seed, nullptr);
    ++res.runs;
    if (cur.digest == first.digest && cur.events == first.events) continue;
    res.equal = false;
    std::ostringstream os;
    os << "seed " << args.seed << " vs seed " << seed << ": ";
    constexpr std::uint64_t kReplayLimit = 20'000'000;
    if (std::max(cur.events, first.events) <= kReplayLimit) {
      AccessTrace a, b;
      run_instance(q, args, ghd, args.seed, &a.events);
      run_instance(q, args, ghd, seed, &b.events);
      os << traces_equal(a, b).describe();
    } else {
      os << "digests " << to_hex(first.digest) << " and " << to_hex(cur.digest) << " (" << first.events
         << " vs " << cur.events << " events)";
    }
    res.divergence = os.str();
    break;
  }
  return res;
}

int cmd_verify_oblivious(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const QuerySpec spec = load_query_file(args.query);
    const VerifyResult r = verify_oblivious(spec.query, args, spec.ghd);
    if (r.equal) {
      out << "EQUAL: " << r.runs << " instances, " << r.events << " events each\n";
      return kExitOk;
    }
    out << "UNEQUAL: " << r.divergence << "\n";
    return kExitUnequal;
  });
}

int cmd_cache_sim(const fs::path& trace, CacheParams p, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (p.block == 0) throw InvalidArgument("block size must be positive");
    if (!p.tall()) err << "warning: M=" << p.capacity << " is below 2B; the cache holds fewer than two blocks\n";
    const AccessTrace t = read_trace_file(trace.string());
    const std::uint64_t transfers = simulate_cache(t, p);
    out << "events: " << t.events.size() << "\n";
    out << "transfers: " << transfers << "\n";
    const double ratio = t.events.empty() ? 0.0
                                          : static_cast<double>(transfers) * static_cast<double>(p.block) /
                                                static_cast<double>(t.events.size());
    out << "ratio: " << std::setprecision(6) << ratio << "\n";
    return kExitOk;
  });
}

std::vector<BenchPoint> bench(const JoinQuery& q, const BenchArgs& args, const std::optional<Ghd>& ghd) {
  if (!std::is_sorted(args.grid.begin(), args.grid.end())) throw InvalidArgument("grid must be ascending");
  std::vector<BenchPoint> pts;
  for (std::uint64_t n : args.grid) {
    const auto sizes = split_sizes(n, q.num_edges());
    const auto plain = gen_instance(q, args.gen, sizes, args.seed);
    ContextOptions co;
    co.keep_events = false;
    co.hash = false;
    co.online_cache = args.cache;
    EngineContext ctx(co);
    Instance inst;
    for (std::size_t e = 0; e < plain.size(); ++e) inst.push_back(load_relation(ctx, plain[e], sizes[e]));
    RunOptions o;
    o.strategy = args.strategy;
    o.ghd = ghd;
    evaluate(ctx, q, inst, o);
    pts.push_back({n, ctx.event_count(), ctx.transfers().value_or(0)});
  }
  return pts;
}

std::optional<double> loglog_slope(const std::vector<BenchPoint>& pts) {
  if (pts.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    const double x = std::log(static_cast<double>(p.n)), y = std::log(static_cast<double>(p.events));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(pts.size());
  const double den = k * sxx - sx * sx;
  if (den == 0) return std::nullopt;
  return (k * sxy - sx * sy) / den;
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const QuerySpec spec = load_query_file(args.query);
    const auto pts = bench(spec.query, args, spec.ghd);
    out << "N,events,transfers\n";
    for (const auto& p : pts) out << p.n << ',' << p.events << ',' << p.transfers << '\n';
    const auto slope = loglog_slope(pts);
    out << "slope: ";
    if (slope) {
      out << std::fixed << std::setprecision(3) << *slope;
    } else {
      out << "n/a";
    }
    out << " rho*: " << to_string(fractional_edge_cover(spec.query).total)
        << " rho: " << to_string(integral_edge_cover(spec.query).total) << "\n";
    return kExitOk;
  });
}

int cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    QuerySpec spec = load_query_file(args.query);
    const auto sizes = split_sizes(args.n, spec.query.num_edges());
    const auto plain = gen_instance(spec.query, args.gen, sizes, args.seed);
    fs::create_directories(args.out_dir);
    for (std::size_t e = 0; e < plain.size(); ++e) {
      const fs::path file = args.out_dir / (spec.relations[e].name + ".csv");
      std::ofstream os(file);
      if (!os) throw FormatError("cannot write " + file.string());
      write_relation_csv(os, spec.query, plain[e].schema, plain[e].rows);
      spec.relations[e].file = file;
      out << file.string() << ": " << plain[e].rows.size() << " rows\n";
    }
    std::ofstream qf(args.out_dir / "query.json");
    qf << query_to_json(spec);
    return kExitOk;
  });
}

}  // namespace ojoin
