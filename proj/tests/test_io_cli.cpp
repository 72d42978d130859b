#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "sparsereg/errors.hpp"
#include "sparsereg/io.hpp"
#include "test_util.hpp"

using namespace sparsereg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sparsereg_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SPARSEREG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("read_delimited_matrix") {
  TempDir dir;

  SUBCASE("mixed delimiters and comments") {
    write_file(dir.file("a.csv"), "# header comment\n1, 2.5, 3\n4\t5 6\n");
    const MatrixXd m = read_delimited_matrix(dir.file("a.csv"));
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    CHECK(m(0, 1) == 2.5);
    CHECK(m(1, 2) == 6.0);
  }

  SUBCASE("empty file is a data error") {
    write_file(dir.file("empty.csv"), "");
    CHECK_THROWS_WITH_AS(read_delimited_matrix(dir.file("empty.csv")),
                         doctest::Contains("no rows"), DataError);
  }

  SUBCASE("ragged rows are rejected with the line number") {
    write_file(dir.file("ragged.csv"), "1 2 3\n4 5\n");
    CHECK_THROWS_WITH_AS(read_delimited_matrix(dir.file("ragged.csv")),
                         doctest::Contains(":2"), DataError);
  }

  SUBCASE("non-numeric field is rejected") {
    write_file(dir.file("bad.csv"), "1 2\n3 four\n");
    CHECK_THROWS_AS(read_delimited_matrix(dir.file("bad.csv")), DataError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_delimited_matrix(dir.file("nope.csv")), DataError);
  }
}

TEST_CASE("problem_from_table response column handling") {
  MatrixXd table(3, 3);
  table << 1, 10, 100, 2, 20, 200, 3, 30, 350;

  const RegressionProblem last = problem_from_table(table, 0);
  CHECK(last.p() == 2);
  CHECK(last.y[2] == 350.0);

  const RegressionProblem first = problem_from_table(table, 1);
  CHECK(first.y[0] == 1.0);
  CHECK(first.p() == 2);

  CHECK_THROWS_AS(problem_from_table(table, 4), DataError);
  MatrixXd narrow(3, 1);
  narrow << 1, 2, 3;
  CHECK_THROWS_AS(problem_from_table(narrow, 0), DataError);
}

TEST_CASE("atomic_write_text") {
  TempDir dir;
  const std::string target = dir.file("out.txt");
  atomic_write_text(target, "hello\n");
  CHECK(read_file(target) == "hello\n");
  CHECK_FALSE(fs::exists(target + ".tmp"));
  // overwrite is atomic as well
  atomic_write_text(target, "bye\n");
  CHECK(read_file(target) == "bye\n");
}

TEST_CASE("cli: usage and help") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("simulate --records-out /dev/null --aggregate-out /dev/null --design mars "
                "--replications 1 --c-grid 0.5 --n 10 --p 4") == 2);
}

TEST_CASE("cli: fit on the packaged sample") {
  TempDir dir;
  const std::string out = dir.file("report.txt");

  SUBCASE("fitness scheme produces a report with a bounded solve count") {
    const int code = run_cli("fit --data " + std::string(SPARSEREG_SAMPLE_DATA) +
                             " --scheme fitness --mc-draws 300 --seed 5 --out " + out);
    CHECK(code == 0);
    const std::string report = read_file(out);
    CHECK(report.find("scheme: fitness") != std::string::npos);
    CHECK(report.find("selected_columns:") != std::string::npos);
    CHECK(report.find("ols_solves:") != std::string::npos);

    // <= ceil(log2 |T-hat|) + 2
    std::istringstream ss(report);
    std::string line;
    int solves = -1, support = -1;
    while (std::getline(ss, line)) {
      if (line.rfind("ols_solves: ", 0) == 0) solves = std::stoi(line.substr(12));
      if (line.rfind("lasso_support_size: ", 0) == 0) support = std::stoi(line.substr(20));
    }
    REQUIRE(solves > 0);
    REQUIRE(support > 0);
    int bound = 2;
    while ((1 << (bound - 2)) < support) ++bound;
    CHECK(solves <= bound);
  }

  SUBCASE("empty file exits 3 with no partial output") {
    TempDir d2;
    write_file(d2.file("empty.tsv"), "");
    const int code =
        run_cli("fit --data " + d2.file("empty.tsv") + " --out " + d2.file("r.txt"));
    CHECK(code == 3);
    CHECK_FALSE(fs::exists(d2.file("r.txt")));
  }

  SUBCASE("huge lambda reports the zero model with exit 0") {
    const int code = run_cli("fit --data " + std::string(SPARSEREG_SAMPLE_DATA) +
                             " --lambda 1e9 --out " + out);
    CHECK(code == 0);
    const std::string report = read_file(out);
    CHECK(report.find("lasso_support_size: 0") != std::string::npos);
  }
}

TEST_CASE("cli: simulate determinism and config file") {
  TempDir dir;
  const std::string base = "simulate --n 30 --p 8 --s-true 2 --design isotropic "
                           "--model parametric --replications 2 --c-grid 0.5,1.0 "
                           "--estimators lasso,post_lasso --mc-draws 200 --seed 9 ";
  const int c1 = run_cli(base + "--records-out " + dir.file("r1.csv") +
                         " --aggregate-out " + dir.file("a1.csv"));
  const int c2 = run_cli(base + "--records-out " + dir.file("r2.csv") +
                         " --aggregate-out " + dir.file("a2.csv"));
  REQUIRE(c1 == 0);
  REQUIRE(c2 == 0);
  CHECK(read_file(dir.file("r1.csv")) == read_file(dir.file("r2.csv")));
  CHECK(read_file(dir.file("a1.csv")) == read_file(dir.file("a2.csv")));
  CHECK(read_file(dir.file("r1.csv")).find("estimator,c,replication") == 0);

  // the same run expressed as a config file matches byte for byte
  write_file(dir.file("cfg.txt"),
             "n = 30\np = 8\ns_true = 2\ndesign = isotropic\nmodel = parametric\n"
             "replications = 2\nc_grid = 0.5,1.0\nestimators = lasso,post_lasso\n"
             "mc_draws = 200\nseed = 9\n");
  const int c3 = run_cli("simulate --config " + dir.file("cfg.txt") + " --records-out " +
                         dir.file("r3.csv") + " --aggregate-out " + dir.file("a3.csv"));
  REQUIRE(c3 == 0);
  CHECK(read_file(dir.file("r3.csv")) == read_file(dir.file("r1.csv")));
}

TEST_CASE("cli: diagnose") {
  TempDir dir;

  SUBCASE("small synthetic instance gives the full report") {
    const std::string out = dir.file("diag.txt");
    const int code = run_cli("diagnose --n 40 --p 8 --s-true 2 --c-value 1.5 "
                             "--instance-seed 3 --k-max 6 --m-max 2 --mc-draws 200 --out " + out);
    CHECK(code == 0);
    const std::string report = read_file(out);
    CHECK(report.find("[oracle]") != std::string::npos);
    CHECK(report.find("[design_constants]") != std::string::npos);
    CHECK(report.find("[bounds]") != std::string::npos);
    CHECK(report.find("prediction_bound") != std::string::npos);
  }

  SUBCASE("large p without the heuristic flag exits 5") {
    CHECK(run_cli("diagnose --n 50 --p 200 --s-true 2 --mc-draws 200") == 5);
    CHECK(run_cli("diagnose --n 50 --p 200 --s-true 2 --mc-draws 200 --heuristic "
                  "--m-max 1 --out " + dir.file("h.txt")) == 0);
  }

  SUBCASE("data mode reports design constants for an explicit support") {
    const std::string out = dir.file("dd.txt");
    const int code = run_cli("diagnose --data " + std::string(SPARSEREG_SAMPLE_DATA) +
                             " --support 1,3 --m-max 2 --out " + out);
    CHECK(code == 0);
    const std::string report = read_file(out);
    CHECK(report.find("mode: data") != std::string::npos);
    CHECK(report.find("support: 1 3") != std::string::npos);
    CHECK(report.find("kappa(") != std::string::npos);
    CHECK(report.find("m phi kappa_tilde mu") != std::string::npos);
    CHECK(report.find("[oracle]") == std::string::npos);
  }

  SUBCASE("m-max 0 keeps only the m = 0 row") {
    const std::string out = dir.file("m0.txt");
    const int code = run_cli("diagnose --n 30 --p 6 --s-true 1 --m-max 0 "
                             "--mc-draws 200 --out " + out);
    CHECK(code == 0);
    const std::string report = read_file(out);
    const auto header = report.find("m phi kappa_tilde mu\n");
    REQUIRE(header != std::string::npos);
    std::istringstream rest(report.substr(header));
    std::string line;
    std::getline(rest, line);  // header
    int rows = 0;
    while (std::getline(rest, line) && !line.empty() && line[0] != '[') {
      if (line.rfind("0 ", 0) == 0 || (line.size() > 1 && std::isdigit(line[0]))) ++rows;
      else break;
    }
    CHECK(rows == 1);
  }
}
