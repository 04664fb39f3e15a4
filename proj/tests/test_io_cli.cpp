#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include <json.hpp>

#include "dimred/io.hpp"

using namespace dimred;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

// Runs the command-line tool with stderr folded into the captured output.
Result cli(const std::string& args) {
  const std::string cmd = std::string(DIMRED_NLS_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dimred_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("number formatting round trips") {
  for (double x : {0.1, -1.329776479990563, 1e-300, 6.02214076e23, 1.0 / 3.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
  CsvWriter csv({"a", "b"});
  csv.row({1.5, -2.0});
  CHECK(csv.str() == "a,b\n1.5,-2\n");
}

TEST_CASE("snapshot files") {
  const fs::path d = scratch("snapshot");
  const TorusGrid t(4, 4);
  const auto f = ComplexField2D::from_function(t, [](double x1, double) { return cd(x1, 1.0); });
  write_snapshot(d / "f.bin", f, 0.25);
  CHECK(fs::file_size(d / "f.bin") == 16 * 8);
  std::ifstream side(d / "f.bin.json");
  const auto j = nlohmann::json::parse(side);
  CHECK(j.at("t") == 0.25);
  fs::remove_all(d);
}

TEST_CASE("g0 of the zero potential prints 0.0") {
  const fs::path d = scratch("g0");
  std::ofstream(d / "zero.json") << R"({"kind": "zero"})";
  const Result r = cli("g0 --potential " + (d / "zero.json").string() + " --out " + d.string());
  CHECK(r.status == 0);
  CHECK(r.out == "0.0\n");
  CHECK(fs::exists(d / "report.json"));
  fs::remove_all(d);
}

TEST_CASE("validation errors exit with 1 and a JSON line") {
  const fs::path d = scratch("validation");
  std::ofstream(d / "cfg.json") << R"({"dt": 0.001, "colour": "red"})";
  for (const std::string& args :
       {"evolve2d --config " + (d / "cfg.json").string(), std::string("evolve2d --dt 0.5"),
        std::string("check --suite missing"), std::string("evolve3d --set L=2")}) {
    const Result r = cli(args + " --out " + d.string());
    CHECK(r.status == 1);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("error") == "validation");
  }
  fs::remove_all(d);
}

TEST_CASE("dry run prints the resolved configuration") {
  const Result r = cli("minimize --dry-run --c 0.5 --L 0.25");
  CHECK(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("c") == doctest::Approx(0.5));
  CHECK(j.at("N") == doctest::Approx(0.25 * 16));
  CHECK(j.at("cgn").is_null());
}

TEST_CASE("numerical failure exits with 2") {
  const fs::path d = scratch("blowup");
  const Result r = cli("evolve2d --g0 -40 --t-final 0.5 --set blowup_factor=1.01 --out " + d.string());
  CHECK(r.status == 2);
  CHECK(r.out.find("\"numerical\"") != std::string::npos);
  CHECK(fs::exists(d / "report.json"));
  fs::remove_all(d);
}

TEST_CASE("check runs a suite and writes the instance list") {
  const fs::path d = scratch("check");
  const Result r = cli("check --suite scalar-interpolation --samples 10000 --out " + d.string());
  CHECK(r.status == 0);
  std::ifstream in(d / "report.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j.at("result").at("passed") == 10000);
  CHECK(j.at("result").at("instances").size() == 10000);
  CHECK(j.contains("metadata"));
  CHECK_FALSE(j.at("config").contains("out"));
  fs::remove_all(d);
}
