#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fwtriage/cli.hpp"

namespace fs = std::filesystem;
using fwtriage::cli::run;
namespace exit_code = fwtriage::cli::exit_code;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path dir = fs::temp_directory_path() / "fwtriage-unit-cli";
  Workspace() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == exit_code::usage);
  CHECK(invoke({"frobnicate"}).code == exit_code::usage);
  CHECK(invoke({"entropy"}).code == exit_code::usage);
  CHECK(invoke({"entropy", "/nonexistent/dump.bin"}).code == exit_code::usage);
  CHECK(invoke({"scan", "x", "--format", "xml"}).code == exit_code::usage);
  const auto v = invoke({"--version"});
  CHECK(v.code == exit_code::ok);
  CHECK(v.out.find("fwtriage") != std::string::npos);
  CHECK(invoke({"--help"}).code == exit_code::ok);
}

TEST_CASE("synth, scan, validate and compare") {
  Workspace ws;
  const auto a = ws.file("sparse.bin");
  const auto synth = invoke({"synth", "sparse", "--seed", "1", "--out", a});
  REQUIRE(synth.code == exit_code::ok);
  CHECK(fs::file_size(a) == 8u << 20);
  const auto manifest = nlohmann::json::parse(std::ifstream(a + ".json"));
  CHECK(manifest["total_size"] == 8u << 20);

  const auto scanned = invoke({"scan", a, "--format", "jsonl"});
  CHECK(scanned.code == exit_code::ok);
  std::size_t lines = 0;
  std::istringstream in(scanned.out);
  for (std::string line; std::getline(in, line);) {
    CHECK(nlohmann::json::parse(line).contains("format"));
    ++lines;
  }
  CHECK(lines == manifest["expected_hits"].size());

  const auto ok = invoke({"validate", a, a, "--capacity", "8MiB", "--model", "HS720"});
  CHECK(ok.code == exit_code::ok);
  CHECK(ok.out.find("PASS/PASS/VALIDATED_FIRMWARE") != std::string::npos);
  const auto single = invoke({"validate", a, "--capacity", "8MiB", "--model", "HS720"});
  CHECK(single.code == exit_code::incomplete);
  const auto small = invoke({"validate", a, a, "--capacity", "16MiB", "--model", "HS720",
                             "--format", "json"});
  CHECK(small.code == exit_code::incomplete);
  CHECK(nlohmann::json::parse(small.out)["tier1"] == "FAIL");
  CHECK(invoke({"validate", a, "--capacity", "8 furlongs", "--model", "HS720"}).code ==
        exit_code::usage);

  const auto b = ws.file("sparse2.bin");
  REQUIRE(invoke({"synth", "sparse", "--seed", "2", "--out", b}).code == exit_code::ok);
  CHECK(invoke({"compare", a, a}).code == exit_code::ok);
  const auto diff = invoke({"compare", a, b, "--format", "json"});
  CHECK(diff.code == exit_code::divergent);
  CHECK(nlohmann::json::parse(diff.out)["digest_equal"] == false);
}

TEST_CASE("entropy and map output") {
  Workspace ws;
  const auto e = ws.file("erased.bin");
  REQUIRE(invoke({"synth", "erased", "--size", "64KiB", "--noise-windows", "2", "--out", e})
              .code == exit_code::ok);
  const auto csv = invoke({"entropy", e, "--format", "csv"});
  CHECK(csv.code == exit_code::ok);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 17);
  const auto json = nlohmann::json::parse(invoke({"entropy", e, "--format", "json"}).out);
  CHECK(json["window_count"] == 16);
  const auto map = invoke({"map", e, "--width", "16"});
  CHECK(map.code == exit_code::ok);
  CHECK(map.out.rfind("|", 0) == 0);
  CHECK(invoke({"synth", "erased", "--size", "64KiB", "--noise-windows", "17", "--out", e}).code ==
        exit_code::usage);

  const auto tiny = ws.file("tiny.bin");
  std::ofstream(tiny) << "short";
  CHECK(invoke({"entropy", tiny}).code == exit_code::usage);
}

TEST_CASE("corpus commands") {
  Workspace ws;
  const auto store = ws.file("store");
  const auto attempt = [&](std::string outcome, std::string failure) {
    return invoke({"corpus", "--store", store, "attempt", "--model", "HS720", "--interface", "spi",
                   "--fixture", "alligator", "--outcome", outcome, "--failure-type", failure});
  };
  for (int i = 0; i < 5; ++i) REQUIRE(attempt("SUCCESS", "NONE").code == exit_code::ok);
  for (int i = 0; i < 3; ++i) REQUIRE(attempt("FAILURE", "BAD_RDID").code == exit_code::ok);
  CHECK(attempt("SUCCESS", "BAD_RDID").code == exit_code::usage);
  CHECK(attempt("MAYBE", "NONE").code == exit_code::usage);

  const std::string digest(64, 'a');
  CHECK(invoke({"corpus", "--store", store, "dump", "--digest", digest, "--model", "HS720",
                "--canonical"})
            .code == exit_code::ok);
  CHECK(invoke({"corpus", "--store", store, "dump", "--digest", digest, "--model", "HS720",
                "--canonical"})
            .code == exit_code::usage);
  CHECK(invoke({"corpus", "--store", store, "demote", "--model", "HS720"}).code == exit_code::ok);

  const auto summary = invoke({"corpus", "--store", store, "summary", "--format", "csv"});
  CHECK(summary.code == exit_code::ok);
  CHECK(summary.out.find("HS720,SPI/ALLIGATOR,8,5,0.625000,N/A") != std::string::npos);

  ::setenv(fwtriage::cli::store_env, store.c_str(), 1);
  const auto table = invoke({"corpus", "summary"});
  ::unsetenv(fwtriage::cli::store_env);
  CHECK(table.out.find("~63%") != std::string::npos);
  CHECK(invoke({"corpus", "summary"}).code == exit_code::usage);

  const auto failures = invoke({"corpus", "--store", store, "failures", "--format", "json"});
  CHECK(nlohmann::json::parse(failures.out)["BAD_RDID"] == 3);
}
