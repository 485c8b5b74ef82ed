#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("thermocap_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch() / "stdout.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" THERMOCAP_CLI "\" " + args +
                          " > \"" + out.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> f;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, ',')) f.push_back(cell);
  return f;
}

std::string write_file(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p.string();
}

}  // namespace

TEST_CASE("capacity table") {
  const Run r = run("capacity --grid 0.1:0.4:0.05");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# thermocap-csv capacity schema_version=1\n", 0) == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0] == "noise,q,certified,nc,ns0,mi_bound");
  double prev = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double q = std::stod(split(rows[i])[1]);
    CHECK(q <= prev);
    prev = q;
  }
  CHECK(split(rows[1])[0] == "0.1");
  CHECK(std::abs(std::stod(split(rows[1])[1]) - 1.879233) < 1e-6);
  CHECK(split(rows[7])[1] == "0");
}

TEST_CASE("zero noise is unbounded") {
  const Run csv = run("capacity --noise 0");
  REQUIRE(csv.code == 0);
  CHECK(split(data_lines(csv.out)[1])[1] == "inf");

  const Run js = run("capacity --noise 0 --format json");
  REQUIRE(js.code == 0);
  const auto j = nlohmann::json::parse(js.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["rows"][0]["q"].is_null());
  CHECK(j["rows"][0]["unbounded"] == true);
}

TEST_CASE("coherent-information curve") {
  const Run r = run("ci-curve --points 5");
  REQUIRE(r.code == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 16);
  const auto last = split(rows.back());
  CHECK(last[0] == "0.175");
  CHECK(std::stod(last[1]) == doctest::Approx(1e4));
  CHECK(std::abs(std::stod(last[2]) + std::log2(std::exp(1.0) * 0.175)) < 1e-3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = split(rows[i]);
    CHECK(std::stod(f[3]) >= std::stod(f[2]));
  }
}

TEST_CASE("exit codes") {
  CHECK(run("capacity --noise -1").code == 2);
  CHECK(run("capacity --bogus").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("--help").code == 0);
  // A certifying tolerance that cannot be met is a run failure.
  CHECK(run("oracle vacuum --dim 12 --noise 0.5 --tol 1e-12").code == 1);
  CHECK(run("oracle pair-identity --j 1 --dim 20 --placement channel").code == 1);
  CHECK(run("oracle vacuum").code == 0);
}

TEST_CASE("config files") {
  const std::string cfg = write_file("cap.json", R"({"noise": 0.2, "format": "json"})");
  const Run r = run("capacity --config " + cfg);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["config"]["noise"] == 0.2);
  CHECK(j["certifying"] == true);

  // Explicit flags win over the file.
  const Run o = run("capacity --config " + cfg + " --noise 0.25");
  REQUIRE(o.code == 0);
  CHECK(nlohmann::json::parse(o.out)["config"]["noise"] == 0.25);

  CHECK(run("capacity --config " + write_file("bad.json", "{noise: ")).code == 2);
  CHECK(run("capacity --config " + write_file("unk.json", R"({"nosie": 0.2})")).code == 2);
  CHECK(run("capacity --config " + write_file("typ.json", R"({"noise": "x"})")).code == 2);
  CHECK(run("capacity --config " + (scratch() / "missing.json").string()).code == 2);

  // A tolerance loosened through the file marks the run non-certifying.
  const Run t = run("oracle vacuum --format json --config " +
                    write_file("tol.json", R"({"tol": 0.5})"));
  REQUIRE(t.code == 0);
  CHECK(nlohmann::json::parse(t.out)["certifying"] == false);
}

TEST_CASE("scan and verify summaries") {
  const Run s = run("verify scan --noise 0.1 --points 31");
  REQUIRE(s.code == 0);
  CHECK(s.out.rfind("# thermocap-csv", 0) == 0);

  const Run v = run("verify trace --samples 50 --format json");
  REQUIRE(v.code == 0);
  const auto j = nlohmann::json::parse(v.out);
  CHECK(j["schema_version"] == 1);
}
