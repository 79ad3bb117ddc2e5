#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "stowardrop/cli.hpp"
#include "stowardrop/errors.hpp"

using namespace stowardrop;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "stowardrop");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) { return std::string(SCENARIO_DIR) + "/" + name; }

class TempFile {
 public:
  explicit TempFile(const std::string& content = {}) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("stowardrop_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".json");
    if (!content.empty()) {
      std::ofstream(path_) << content;
    }
  }
  ~TempFile() { std::filesystem::remove(path_); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  [[nodiscard]] std::string path() const { return path_.string(); }
  [[nodiscard]] std::string read() const {
    std::ifstream in(path_);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

 private:
  std::filesystem::path path_;
};

json two_link_doc(double theta) {
  return {{"version", 1},
          {"nodes", {"o", "t"}},
          {"edges",
           {{{"id", "upper"}, {"from", "o"}, {"to", "t"}, {"cost", {1.0}}},
            {{"id", "lower"}, {"from", "o"}, {"to", "t"}, {"cost", {0.0, 1.0}}}}},
          {"od_pairs",
           {{{"id", "od"},
             {"origin", "o"},
             {"destination", "t"},
             {"demand", {{"type", "normal"}, {"mean", 1.0}, {"stddev", theta}}}}}}};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("validate accepts the shipped scenarios") {
  for (const char* name : {"two_link_affine.json", "grid_quadratic.json"}) {
    const Outcome r = invoke({"validate", scenario(name)});
    CHECK(r.code == cli::kSuccess);
    CHECK(json::parse(r.out)["valid"] == true);
  }
}

TEST_CASE("validate rejects a path that skips a node") {
  const Outcome r = invoke({"validate", scenario("skipped_node.json")});
  CHECK(r.code == cli::kInvalidInput);
  CHECK(r.err.find("disconnected") != std::string::npos);
}

TEST_CASE("malformed JSON reports line and column") {
  TempFile f("{\n  \"version\": 1,\n  \"nodes\": [\"a\" \"b\"]\n}\n");
  const Outcome r = invoke({"validate", f.path()});
  CHECK(r.code == cli::kInvalidInput);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(r.err.find("column") != std::string::npos);
}

TEST_CASE("structural scenario errors exit with the validation code") {
  auto rejected = [](const json& doc, const std::string& needle) {
    TempFile f(doc.dump());
    const Outcome r = invoke({"validate", f.path()});
    CHECK(r.code == cli::kInvalidInput);
    CHECK_MESSAGE(r.err.find(needle) != std::string::npos, r.err);
  };
  json doc = two_link_doc(0.5);
  SUBCASE("version") {
    doc["version"] = 2;
    rejected(doc, "version");
  }
  SUBCASE("missing version") {
    doc.erase("version");
    rejected(doc, "version");
  }
  SUBCASE("unknown field") {
    doc["extra"] = 1;
    rejected(doc, "extra");
  }
  SUBCASE("unknown node") {
    doc["edges"][1]["to"] = "x";
    rejected(doc, "edges[1].to");
  }
  SUBCASE("duplicate edge") {
    doc["edges"][1]["id"] = "upper";
    rejected(doc, "duplicate edge");
  }
  SUBCASE("negative coefficient") {
    doc["edges"][0]["cost"] = {-1.0};
    rejected(doc, "edges[0].cost");
  }
  SUBCASE("bad demand") {
    doc["od_pairs"][0]["demand"] = {{"type", "normal"}, {"mean", 1.0}, {"stddev", -1.0}};
    rejected(doc, "od_pairs[0].demand");
  }
  SUBCASE("unknown demand type") {
    doc["od_pairs"][0]["demand"] = {{"type", "poisson"}, {"mean", 1.0}};
    rejected(doc, "poisson");
  }
  SUBCASE("unknown path edge") {
    doc["od_pairs"][0]["paths"] = {{"nowhere"}};
    rejected(doc, "nowhere");
  }
  SUBCASE("bad solver override") {
    doc["solver"] = {{"relative_gap_tolerance", -1.0}};
    rejected(doc, "solver");
  }
}

TEST_CASE("poa on the two-link affine network at theta = 1") {
  // UE puts all demand on the variable link: E[D^2] = 2. The optimum sends 1/4
  // there: 3/4 + E[D^2]/16 = 7/8. Ratio 16/7.
  const Outcome r = invoke({"poa", scenario("two_link_affine.json")});
  REQUIRE(r.code == cli::kSuccess);
  const json j = json::parse(r.out);
  CHECK(j["poa"].get<double>() == doctest::Approx(16.0 / 7.0).epsilon(1e-9));
  CHECK(j["affine_bound"].get<double>() == doctest::Approx(16.0 / 7.0).epsilon(1e-12));
  CHECK(j["tight"] == true);
  CHECK(j["converged"] == true);
}

TEST_CASE("poa --bound exits 4 when the named bound does not apply") {
  CHECK(invoke({"poa", scenario("two_link_affine.json"), "--bound", "polynomial_positive"}).code ==
        cli::kBoundNotApplicable);
  CHECK(invoke({"poa", scenario("grid_quadratic.json"), "--bound", "affine"}).code == cli::kBoundNotApplicable);
  CHECK(invoke({"poa", scenario("grid_quadratic.json"), "--bound", "polynomial_positive"}).code == cli::kSuccess);

  // Two commodities share each link and demand is highly variable: the
  // normal-family condition fails at quartic costs.
  json doc = two_link_doc(2.5);
  doc["edges"][1]["cost"] = {0.0, 0.0, 0.0, 0.0, 1.0};
  doc["od_pairs"].push_back(doc["od_pairs"][0]);
  doc["od_pairs"][1]["id"] = "od2";
  TempFile f(doc.dump());
  const Outcome r = invoke({"poa", f.path(), "--bound", "polynomial_normal"});
  CHECK(r.code == cli::kBoundNotApplicable);
  CHECK(r.err.find("not applicable") != std::string::npos);
  CHECK(json::parse(r.out)["bounds"][0]["applicable"] == false);
}

TEST_CASE("solver non-convergence exits 3 but still emits the result") {
  json doc = json::parse(std::ifstream(scenario("grid_quadratic.json")));
  doc["solver"] = {{"max_iterations", 1}, {"restarts", 0}, {"so_gradient_tolerance", 1e-14}};
  TempFile f(doc.dump());
  const Outcome r = invoke({"solve-so", f.path()});
  CHECK(r.code == cli::kNotConverged);
  CHECK(json::parse(r.out)["converged"] == false);
}

TEST_CASE("solve-ue output round-trips through --warm-start") {
  TempFile first;
  REQUIRE(invoke({"solve-ue", scenario("grid_quadratic.json"), "--out", first.path()}).code == cli::kSuccess);
  const json a = json::parse(first.read());
  const Outcome again = invoke({"solve-ue", scenario("grid_quadratic.json"), "--warm-start", first.path()});
  REQUIRE(again.code == cli::kSuccess);
  const json b = json::parse(again.out);
  CHECK(b["gap"].get<double>() <= a["gap"].get<double>());
  CHECK(b["paths"] == a["paths"]);

  SUBCASE("mismatched strategy shape is rejected") {
    json bad = a;
    bad["strategy"][0].push_back(0.0);
    TempFile f(bad.dump());
    CHECK(invoke({"solve-ue", scenario("grid_quadratic.json"), "--warm-start", f.path()}).code ==
          cli::kInvalidInput);
  }
}

TEST_CASE("parse_strategy checks simplex membership") {
  const auto s = cli::parse_scenario(two_link_doc(0.3));
  CHECK_THROWS_AS((void)cli::parse_strategy(json::parse("[[0.5, 0.6]]"), s.network), ValidationError);
  CHECK_THROWS_AS((void)cli::parse_strategy(json::parse("[[1.0]]"), s.network), ValidationError);
  const Strategy ok = cli::parse_strategy(json::parse("[[0.25, 0.75]]"), s.network);
  CHECK(ok.p[0][1] == 0.75);
}

TEST_CASE("reproduce table1 and table2") {
  const auto t1 = csv_rows(invoke({"reproduce", "table1"}).out);
  REQUIRE(t1.size() == 4);
  CHECK(t1[0] == std::vector<std::string>{"m", "threshold"});
  const double expected1[] = {1.889, 1.754, 1.649};
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(std::stod(t1[k + 1][1]) - expected1[k]) < 1e-3);
  }

  const auto t2 = csv_rows(invoke({"reproduce", "table2"}).out);
  REQUIRE(t2.size() == 4);
  CHECK(t2[1] == std::vector<std::string>{"2", "inf"});
  CHECK(std::abs(std::stod(t2[2][1]) - 14.241) < 1e-3);
  CHECK(std::abs(std::stod(t2[3][1]) - 3.556) < 1e-3);
}

TEST_CASE("reproduce curve grids") {
  const auto f2 = csv_rows(invoke({"reproduce", "fig2", "--m", "2", "--n-max", "10"}).out);
  REQUIRE(f2.size() == 11);
  CHECK(f2[1][1] == "inf");
  CHECK(std::abs(std::stod(f2[3][1]) - 3.4537) < 1e-2);
  CHECK(std::abs(std::stod(f2[10][1]) - 1.133) < 1e-2);

  const Outcome a = invoke({"reproduce", "fig3", "--n", "1,3,10"});
  const Outcome b = invoke({"reproduce", "fig3", "--n", "1,3,10"});
  CHECK(a.out == b.out);
  const auto f3 = csv_rows(a.out);
  REQUIRE(f3.size() == 102);
  CHECK(f3[0] == std::vector<std::string>{"theta", "n=1", "n=3", "n=10", "n=inf"});
  CHECK(f3[1][0] == "0");
  CHECK(f3[101][0] == "1");
  // theta = 0: every curve sits at the deterministic value 9/(9 - 2 sqrt 3)
  for (std::size_t k = 1; k < 5; ++k) {
    CHECK(std::stod(f3[1][k]) == doctest::Approx(9.0 / (9.0 - 2.0 * std::sqrt(3.0))).epsilon(1e-11));
  }

  CHECK(invoke({"reproduce", "fig3", "--n", "0.5"}).code == cli::kInvalidInput);
}

TEST_CASE("reproduce example tables agree with their closed forms") {
  for (const auto& args : std::vector<std::vector<std::string>>{{"reproduce", "example1", "--theta", "0.7"},
                                                                {"reproduce", "example2", "--j", "2", "--theta", "0.4"},
                                                                {"reproduce", "example2", "--j", "3", "--theta", "1"}}) {
    const Outcome r = invoke(args);
    REQUIRE(r.code == cli::kSuccess);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 7);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      CHECK_MESSAGE(std::stod(rows[k][3]) <= 1e-6 * std::max(1.0, std::abs(std::stod(rows[k][1]))), rows[k][0]);
    }
  }
}

TEST_CASE("mc estimates are seeded and consistent with the exact value") {
  const std::vector<std::string> args{"mc", scenario("grid_quadratic.json"), "--samples", "50000", "--seed", "11"};
  const Outcome a = invoke(args);
  REQUIRE(a.code == cli::kSuccess);
  CHECK(a.out == invoke(args).out);
  const json j = json::parse(a.out);
  CHECK(j["samples"] == 50000);
  CHECK(std::abs(j["z_score"].get<double>()) < 5.0);

  const Outcome m = invoke({"mc", scenario("grid_quadratic.json"), "--target", "moment", "--edge", "cd", "--order",
                            "3", "--samples", "50000", "--regime", "so"});
  REQUIRE(m.code == cli::kSuccess);
  CHECK(std::abs(json::parse(m.out)["z_score"].get<double>()) < 5.0);

  CHECK(invoke({"mc", scenario("grid_quadratic.json"), "--target", "moment"}).code == cli::kInvalidInput);
  CHECK(invoke({"mc", scenario("grid_quadratic.json"), "--target", "moment", "--edge", "zz"}).code ==
        cli::kInvalidInput);
  CHECK(invoke({"mc", scenario("grid_quadratic.json"), "--samples", "1"}).code == cli::kInvalidInput);
}

TEST_CASE("argument errors and CSV number format") {
  CHECK(invoke({}).code == cli::kInvalidInput);
  CHECK(invoke({"frobnicate"}).code == cli::kInvalidInput);
  CHECK(invoke({"reproduce", "example1"}).code == cli::kInvalidInput);
  CHECK(invoke({"validate", "/nonexistent/scenario.json"}).code == cli::kInvalidInput);
  CHECK(invoke({"--help"}).code == cli::kSuccess);

  CHECK(cli::format_csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(cli::format_csv_number(2.0) == "2");
  CHECK(cli::format_csv_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(cli::format_csv_number(1234567.891234567) == "1234567.89123");
}
