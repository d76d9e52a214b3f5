// Command-line frontend: instance ingestion, enumeration, canonical or
// streaming output, statistics, progress display, and oracle verification.
//
// Exit codes: 0 success, 1 input error, 2 oracle mismatch in --verify-oracle.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qvert/qvert.hpp"

namespace {

struct RunConfig {
  std::string input;
  std::string stats_path;
  std::string arith = "auto";
  unsigned jobs = 1;
  bool stream = false;
  bool canonical = false;
  bool stats_only = false;
  bool verify_oracle = false;
  bool progress = false;
  bool check_invariants = false;
  std::uint64_t progress_interval = 4096;
  std::uint64_t max_solutions = 0;
  std::uint64_t seed = 1;
  long long gen_tets = 0;
  long long gen_rows = -1;
  bool gen_orientable = false;
};

qvert::ArithMode parse_arith(const std::string& name) {
  if (name == "auto") return qvert::ArithMode::kAuto;
  if (name == "wide") return qvert::ArithMode::kWide;
  if (name == "big") return qvert::ArithMode::kBig;
  throw CLI::ValidationError("--arith", "expected auto, wide or big");
}

qvert::ProblemInstance load_instance(const RunConfig& cfg) {
  if (cfg.gen_tets > 0) {
    qvert::GeneratorOptions opts;
    opts.rows = static_cast<Eigen::Index>(cfg.gen_rows);
    opts.orientable = cfg.gen_orientable;
    return qvert::random_sparse_instance(
        static_cast<Eigen::Index>(cfg.gen_tets), cfg.seed, opts);
  }
  std::ifstream in(cfg.input);
  if (!in) {
    throw std::runtime_error("cannot open input file '" + cfg.input + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return qvert::parse_problem(text.str());
}

nlohmann::ordered_json stats_document(const qvert::ProblemInstance& inst,
                                      const qvert::TraversalStats& stats,
                                      const RunConfig& cfg) {
  const qvert::BigInt sols(stats.solutions);
  nlohmann::ordered_json doc;
  doc["tets"] = inst.tets;
  doc["rows"] = inst.rows();
  doc["rank"] = stats.rank;
  doc["jobs"] = cfg.jobs;
  doc["arith_used"] = qvert::to_string(stats.arith_used);
  doc["nodes_visited"] = stats.nodes_visited;
  doc["dead_ends"] = stats.dead_ends;
  doc["solutions"] = stats.solutions;
  doc["ten_solutions_squared"] = (qvert::BigInt(10) * sols * sols).str();
  doc["pivots"] = stats.pivots;
  doc["max_tableau_entry"] = stats.max_tableau_entry.str();
  doc["delta"] = stats.delta.str();
  doc["coordinate_bound"] = stats.coordinate_bound.str();
  doc["elapsed_ms"] = stats.elapsed_ms;
  doc["aborted"] = stats.aborted;
  return doc;
}

void emit_stats(const nlohmann::ordered_json& doc, const RunConfig& cfg) {
  const std::string text = doc.dump(2) + "\n";
  if (!cfg.stats_path.empty()) {
    std::ofstream out(cfg.stats_path);
    if (out) {
      out << text;
      if (out) return;
    }
    std::cerr << "warning: cannot write stats to '" << cfg.stats_path
              << "'; writing to standard error\n";
    std::cerr << text;
    return;
  }
  if (cfg.stats_only) {
    std::cout << text;
  }
}

int run_verify_oracle(const qvert::ProblemInstance& inst,
                      const RunConfig& cfg,
                      const qvert::EnumerateOptions& opts) {
  qvert::EnumerationResult found =
      qvert::enumerate_collect(inst, opts, cfg.jobs);
  qvert::BruteForceResult expected = qvert::brute_force_enumerate(inst);

  const std::string got = qvert::canonical_text(found.solutions);
  const std::string want = qvert::canonical_text(expected.solutions);
  if (!cfg.stats_path.empty() || cfg.stats_only) {
    emit_stats(stats_document(inst, found.stats, cfg), cfg);
  }
  if (got == want) {
    std::cout << "MATCH: " << found.solutions.size() << " solutions\n";
    return 0;
  }
  std::cerr << "MISMATCH: enumerator found " << found.solutions.size()
            << " solutions, oracle found " << expected.solutions.size()
            << "\n";
  std::set<std::string> got_lines, want_lines;
  {
    std::istringstream g(got), w(want);
    std::string line;
    while (std::getline(g, line)) got_lines.insert(line);
    while (std::getline(w, line)) want_lines.insert(line);
  }
  for (const std::string& line : want_lines) {
    if (!got_lines.count(line)) std::cerr << "missing: " << line << "\n";
  }
  for (const std::string& line : got_lines) {
    if (!want_lines.count(line)) std::cerr << "spurious: " << line << "\n";
  }
  return 2;
}

int run(const RunConfig& cfg) {
  qvert::ProblemInstance inst = load_instance(cfg);
  for (const std::string& w : qvert::sparsity_warnings(inst)) {
    std::cerr << "warning: " << w << "\n";
  }

  qvert::EnumerateOptions opts;
  opts.arith = parse_arith(cfg.arith);
  opts.check_invariants = cfg.check_invariants;
  opts.progress_interval = cfg.progress_interval;
  if (cfg.progress) {
    opts.on_progress = [](const qvert::Progress& p) {
      std::ostringstream line;
      line << "progress " << p.resolved << "/" << p.total << " ("
           << p.fraction() * 100.0 << "%)\n";
      std::cerr << line.str();
    };
  }

  if (cfg.verify_oracle) return run_verify_oracle(inst, cfg, opts);

  qvert::TraversalStats stats;
  if (cfg.stream) {
    std::uint64_t emitted = 0;
    auto sink = [&](const qvert::VertexSolution& sol) {
      if (!cfg.stats_only) {
        std::cout << qvert::to_line(sol) << "\n" << std::flush;
      }
      ++emitted;
      return (cfg.max_solutions > 0 && emitted >= cfg.max_solutions)
                 ? qvert::SinkAction::kStop
                 : qvert::SinkAction::kContinue;
    };
    stats = qvert::enumerate_parallel(inst, sink, cfg.jobs, opts);
  } else {
    qvert::EnumerationResult result =
        qvert::enumerate_collect(inst, opts, cfg.jobs, cfg.max_solutions);
    stats = result.stats;
    if (!cfg.stats_only) {
      std::cout << qvert::canonical_text(std::move(result.solutions));
    }
  }

  if (parse_arith(cfg.arith) == qvert::ArithMode::kWide &&
      stats.arith_used == qvert::ArithMode::kBig) {
    std::cerr << "warning: wide arithmetic would overflow on this instance; "
                 "big integers were used instead\n";
  }
  if (!cfg.stats_path.empty() || cfg.stats_only) {
    emit_stats(stats_document(inst, stats, cfg), cfg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{
      "Enumerates the admissible vertices of the projective solution space "
      "of a matching-equation system under quadrilateral constraints."};
  app.get_formatter()->column_width(34);

  auto* input = app.add_option("--input", cfg.input,
                               "instance file (tets/rows/matrix text format)");
  auto* gen = app.add_option(
      "--gen", cfg.gen_tets,
      "generate a random sparse instance with this many tetrahedra");
  app.add_option("--seed", cfg.seed, "random seed for --gen")
      ->default_val(1);
  app.add_option("--gen-rows", cfg.gen_rows,
                 "row count for --gen (default: random in [1, 2n])");
  app.add_flag("--gen-orientable", cfg.gen_orientable,
               "generate an orientable-profile instance");
  app.add_option("--jobs", cfg.jobs, "worker thread count")
      ->default_val(1)
      ->check(CLI::Range(1u, 512u));
  auto* canonical = app.add_flag(
      "--canonical", cfg.canonical,
      "sort output lines by type vector (default)");
  app.add_flag("--stream", cfg.stream,
               "emit solutions in discovery order as they are found")
      ->excludes(canonical);
  app.add_flag("--stats-only", cfg.stats_only,
               "suppress solution lines, report statistics only");
  app.add_flag("--verify-oracle", cfg.verify_oracle,
               "also run the brute-force reference and compare solution sets");
  app.add_flag("--progress", cfg.progress, "report traversal progress");
  app.add_option("--progress-interval", cfg.progress_interval,
                 "visited nodes between progress reports")
      ->default_val(4096);
  app.add_option("--stats-json", cfg.stats_path,
                 "write run statistics to this file as JSON");
  app.add_option("--arith", cfg.arith, "integer arithmetic: auto, wide or big")
      ->default_val("auto")
      ->check(CLI::IsMember({"auto", "wide", "big"}));
  app.add_option("--max-solutions", cfg.max_solutions,
                 "stop after this many solutions (0 = unlimited)");
  app.add_flag("--check-invariants", cfg.check_invariants,
               "verify tableau invariants after every pivot (slow)");
  input->excludes(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (cfg.input.empty() && cfg.gen_tets <= 0) {
    std::cerr << "error: provide --input FILE or --gen N\n";
    return 1;
  }

  try {
    return run(cfg);
  } catch (const qvert::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
