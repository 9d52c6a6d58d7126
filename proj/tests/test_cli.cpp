#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "asearch/cli.hpp"
#include "asearch/metrics.hpp"

namespace fs = std::filesystem;
using namespace asearch;

namespace {

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "asearch");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("asearch_cli_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("validate accepts the shipped demo scenario") {
    CHECK(cli({"validate", "--scenario", ASEARCH_SOURCE_DIR "/scenarios/demo.json"}) == kExitOk);
}

TEST_CASE("usage and schema errors exit with 2") {
    CHECK(cli({}) == kExitUsage);
    CHECK(cli({"run", "--bogus"}) == kExitUsage);
    CHECK(cli({"validate", "--scenario", "/nonexistent/file.json"}) == kExitUsage);
    const fs::path dir = scratch("bad");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "bad.json") << R"({"version": 1, "region": {"polygon": [[0,0],[1,0]]}})";
        std::ofstream(dir / "garbage.json") << "{not json";
    }
    CHECK(cli({"validate", "--scenario", (dir / "bad.json").string()}) == kExitUsage);
    CHECK(cli({"validate", "--scenario", (dir / "garbage.json").string()}) == kExitUsage);
    CHECK(cli({"run", "--seeds", "x-y", "--out", (dir / "o").string()}) == kExitUsage);
    CHECK(cli({"run", "--algorithm", "RANDOM", "--out", (dir / "o").string()}) == kExitUsage);
    CHECK(cli({"run", "--subsample", "0", "--out", (dir / "o").string()}) == kExitUsage);
    fs::remove_all(dir);
}

TEST_CASE("sweep writes one log per algorithm and seed plus one CSV") {
    const fs::path out = scratch("sweep");
    REQUIRE(cli({"sweep", "--seeds", "0-1", "--out", out.string(), "--algorithms", "GUTS,NATS,COVERAGE"}) ==
            kExitOk);
    int logs = 0;
    for (const auto& e : fs::directory_iterator(out / "episodes")) logs += e.path().extension() == ".json";
    CHECK(logs == 6);
    std::ifstream csv(out / "results.csv");
    const auto rows = read_csv(csv);
    CHECK(rows.front().algorithm == "GUTS");
    CHECK(rows.back().algorithm == "COVERAGE");
    CHECK(fs::exists(out / "metrics.json"));
    fs::remove_all(out);
}

TEST_CASE("run honours --algorithm and --subsample") {
    const fs::path out = scratch("run");
    REQUIRE(cli({"run", "--seeds", "3", "--algorithm", "NATS", "--subsample", "0.5", "--out", out.string()}) ==
            kExitOk);
    CHECK(fs::exists(out / "episodes" / "NATS_seed3.json"));
    fs::remove_all(out);
}
