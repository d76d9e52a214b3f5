#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qvert/qvert.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("qvert_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch_dir() / ("out" + std::to_string(counter));
  const fs::path err = scratch_dir() / ("err" + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string(QVERT_CLI_PATH) + " " + args + " >" +
                          out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_instance(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

const char* kFreeInstance = "tets 1\nrows 0\nmatrix\n";
const char* kExampleInstance =
    "tets 2\nrows 2\nmatrix\n0 1 -1 2 -1 -1\n-2 0 2 -2 0 2\n";

}  // namespace

TEST_CASE("canonical enumeration of the unconstrained instance") {
  const fs::path p = write_instance("free.txt", kFreeInstance);
  const CliResult r = run_cli("--input " + p.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1 : 1 0 0\n2 : 0 1 0\n3 : 0 0 1\n");
}

TEST_CASE("solution lines round-trip through the library parser") {
  const fs::path p = write_instance("example.txt", kExampleInstance);
  const CliResult r = run_cli("--input " + p.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "22 : 0 1 0 0 1 0\n");

  const qvert::ProblemInstance inst = qvert::parse_problem(kExampleInstance);
  const qvert::CoordinateBound bound = qvert::ReducedSystem::build(inst).bound;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    const qvert::VertexSolution sol = qvert::parse_solution_line(line);
    CHECK_NOTHROW(qvert::validate_solution(sol, inst, bound));
  }
}

TEST_CASE("malformed input exits 1 with no solution lines") {
  const fs::path p = write_instance("bad.txt", "tets 1\nrows 1\nmatrix\n1 2\n");
  const CliResult r = run_cli("--input " + p.string());
  CHECK(r.exit_code == 1);
  CHECK(r.out.empty());
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("a missing file exits 1") {
  const CliResult r = run_cli("--input /nonexistent/instance.txt");
  CHECK(r.exit_code == 1);
  CHECK(r.out.empty());
}

TEST_CASE("missing both --input and --gen exits 1") {
  const CliResult r = run_cli("");
  CHECK(r.exit_code == 1);
}

TEST_CASE("unknown flags exit 1") {
  const CliResult r = run_cli("--bogus");
  CHECK(r.exit_code == 1);
}

TEST_CASE("--help exits 0") {
  const CliResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("--input") != std::string::npos);
}

TEST_CASE("verify-oracle reports a match") {
  const fs::path p = write_instance("example2.txt", kExampleInstance);
  const CliResult r = run_cli("--input " + p.string() + " --verify-oracle");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "MATCH: 1 solutions\n");

  const CliResult gen = run_cli("--gen 4 --seed 11 --verify-oracle");
  CHECK(gen.exit_code == 0);
  CHECK(gen.out.find("MATCH:") == 0);
}

TEST_CASE("verify-oracle refuses oversized instances") {
  const CliResult r = run_cli("--gen 8 --seed 3 --verify-oracle");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("stats json contains the stable keys") {
  const fs::path p = write_instance("example3.txt", kExampleInstance);
  const fs::path stats = scratch_dir() / "stats.json";
  const CliResult r =
      run_cli("--input " + p.string() + " --stats-json " + stats.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "22 : 0 1 0 0 1 0\n");

  const nlohmann::json doc = nlohmann::json::parse(slurp(stats));
  CHECK(doc.at("tets") == 2);
  CHECK(doc.at("rows") == 2);
  CHECK(doc.at("rank") == 2);
  CHECK(doc.at("solutions") == 1);
  CHECK(doc.at("nodes_visited") == 6);
  CHECK(doc.at("dead_ends") == 3);
  CHECK(doc.at("ten_solutions_squared") == "10");
  CHECK(doc.at("delta") == "5");
  CHECK(doc.at("coordinate_bound") == "780");
  CHECK(doc.at("arith_used") == "wide");
  CHECK(doc.at("aborted") == false);
  CHECK(doc.at("elapsed_ms").is_number());
  CHECK(doc.at("max_tableau_entry").is_string());
  CHECK(doc.at("pivots").is_number_unsigned());
  CHECK(doc.at("jobs") == 1);
}

TEST_CASE("stats-only suppresses solutions and prints the document") {
  const fs::path p = write_instance("example4.txt", kExampleInstance);
  const CliResult r = run_cli("--input " + p.string() + " --stats-only");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find(" : ") == std::string::npos);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("solutions") == 1);
}

TEST_CASE("an unwritable stats path degrades to standard error") {
  const fs::path p = write_instance("example5.txt", kExampleInstance);
  const CliResult r = run_cli("--input " + p.string() +
                              " --stats-json /nonexistent-dir/stats.json");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "22 : 0 1 0 0 1 0\n");
  CHECK(r.err.find("warning:") != std::string::npos);
  CHECK(r.err.find("\"solutions\"") != std::string::npos);
}

TEST_CASE("early termination emits exactly K solutions and exits cleanly") {
  const fs::path p = write_instance("free2.txt", kFreeInstance);
  const fs::path stats = scratch_dir() / "aborted.json";
  const CliResult r = run_cli("--input " + p.string() +
                              " --stream --max-solutions 1 --stats-json " +
                              stats.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1 : 1 0 0\n");
  const nlohmann::json doc = nlohmann::json::parse(slurp(stats));
  CHECK(doc.at("aborted") == true);
  CHECK(doc.at("solutions") == 1);
}

TEST_CASE("streaming mode emits discovery order") {
  const fs::path p = write_instance("free3.txt", kFreeInstance);
  const CliResult r = run_cli("--input " + p.string() + " --stream");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1 : 1 0 0\n2 : 0 1 0\n3 : 0 0 1\n");
}

TEST_CASE("canonical and stream flags are mutually exclusive") {
  const fs::path p = write_instance("free4.txt", kFreeInstance);
  const CliResult r =
      run_cli("--input " + p.string() + " --canonical --stream");
  CHECK(r.exit_code == 1);
}

TEST_CASE("arithmetic modes agree on output") {
  const fs::path p = write_instance("example6.txt", kExampleInstance);
  const CliResult wide = run_cli("--input " + p.string() + " --arith wide");
  const CliResult big = run_cli("--input " + p.string() + " --arith big");
  const CliResult automatic = run_cli("--input " + p.string() + " --arith auto");
  CHECK(wide.exit_code == 0);
  CHECK(big.exit_code == 0);
  CHECK(wide.out == big.out);
  CHECK(automatic.out == big.out);
  const CliResult invalid = run_cli("--input " + p.string() + " --arith float");
  CHECK(invalid.exit_code == 1);
}

TEST_CASE("generated instances work end to end across job counts") {
  const CliResult one = run_cli("--gen 5 --seed 21 --jobs 1");
  const CliResult two = run_cli("--gen 5 --seed 21 --jobs 2");
  const CliResult eight = run_cli("--gen 5 --seed 21 --jobs 8");
  CHECK(one.exit_code == 0);
  CHECK(one.out == two.out);
  CHECK(one.out == eight.out);
}

TEST_CASE("progress reporting surfaces on standard error") {
  const fs::path p = write_instance("example7.txt", kExampleInstance);
  const CliResult r = run_cli("--input " + p.string() +
                              " --progress --progress-interval 1");
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("progress") != std::string::npos);
  CHECK(r.err.find("(100") != std::string::npos);
}

TEST_CASE("sparsity violations surface as warnings, not failures") {
  const fs::path p = write_instance(
      "heavy.txt", "tets 1\nrows 1\nmatrix\n5 -5 0\n");
  const CliResult r = run_cli("--input " + p.string());
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("warning:") != std::string::npos);
}
