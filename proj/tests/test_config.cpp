#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gibbsgeom/runner.hpp"

using namespace gibbsgeom;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("minimal config parses with defaults") {
    const json j = {{"dim", 2}, {"tau", 1.0}, {"lambda", 16.0}};
    const auto cfg = parse_config_json(j);
    CHECK(cfg.mode == "sample");
    CHECK(cfg.lambdas == std::vector<double>{16.0});
    CHECK_FALSE(cfg.hash.empty());
}

TEST_CASE("validation reports every error with field names") {
    const json j = {{"dim", 7},
                    {"tau", -1.0},
                    {"replications", 0},
                    {"lambdas", json::array({-4.0})},
                    {"functional", {{"functional", "nope"}}}};
    try {
        parse_config_json(j);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("dim") != std::string::npos);
        CHECK(msg.find("tau") != std::string::npos);
        CHECK(msg.find("replications") != std::string::npos);
        CHECK(msg.find("lambdas") != std::string::npos);
        CHECK(msg.find("nope") != std::string::npos);
        CHECK(msg.find("knn_length") != std::string::npos); // supported list included
    }
}

TEST_CASE("unknown potential type lists the supported set") {
    const json j = {{"potential", {{"type", "banana"}}}, {"lambda", 4.0}};
    try {
        parse_config_json(j);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("banana") != std::string::npos);
        CHECK(msg.find("strauss") != std::string::npos);
    }
}

TEST_CASE("points csv round trip") {
    TempDir dir("gg_csv_test");
    PointConfig cfg;
    cfg.dim = 2;
    cfg.points = {make_point(0.125, -3.5), make_point(1.0 / 3.0, 2e-17)};
    cfg.marks = {0.25, 0.75};
    const auto path = (dir.path / "pts.csv").string();
    write_points_csv(path, cfg);
    const auto back = read_points_csv(path, 2);
    REQUIRE(back.size() == cfg.size());
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        CHECK(back.points[i] == cfg.points[i]);
        CHECK(back.marks[i] == cfg.marks[i]);
    }
    const std::string text = slurp(path);
    CHECK(text.rfind("x1,x2,mark\n", 0) == 0);
}

TEST_CASE("run: sample mode emits points.csv and report.json deterministically") {
    TempDir dir("gg_run_sample");
    json j = {{"mode", "sample"},   {"dim", 2},   {"tau", 0.8},
              {"lambda", 9.0},      {"seed", 42}, {"potential", {{"type", "hardcore"}, {"r", 0.2}}},
              {"out_dir", dir.path.string()}};
    auto cfg = parse_config_json(j);
    const auto rep = run(cfg);
    CHECK(rep.exit_code == 0);
    CHECK(fs::exists(dir.path / "points.csv"));
    CHECK(fs::exists(dir.path / "report.json"));
    const std::string first = slurp(dir.path / "points.csv");

    const auto rep2 = run(cfg);
    CHECK(rep2.exit_code == 0);
    CHECK(slurp(dir.path / "points.csv") == first);

    const auto report = json::parse(slurp(dir.path / "report.json"));
    CHECK(report["config_hash"] == cfg.hash);
    CHECK(report["seed"] == 42);
}

TEST_CASE("run: experiment mode is byte-identical across thread counts") {
    TempDir dir1("gg_run_exp1");
    TempDir dir8("gg_run_exp8");
    json base = {{"mode", "experiment"},
                 {"experiment", "variance"},
                 {"dim", 2},
                 {"tau", 1.0},
                 {"lambdas", json::array({16.0, 32.0})},
                 {"replications", 60},
                 {"seed", 7},
                 {"potential", {{"type", "strauss"}, {"beta", 1.0}, {"r0", 0.4}}},
                 {"functional", {{"functional", "knn_length"}, {"parameters", {{"k", 1}}}}}};
    auto c1 = parse_config_json(base);
    c1.out_dir = dir1.path.string();
    c1.threads = 1;
    auto c8 = parse_config_json(base);
    c8.out_dir = dir8.path.string();
    c8.threads = 8;
    CHECK(run(c1).exit_code == 0);
    CHECK(run(c8).exit_code == 0);
    CHECK(slurp(dir1.path / "variance_table.csv") == slurp(dir8.path / "variance_table.csv"));
}

TEST_CASE("run: clan explosion maps to exit code 2") {
    TempDir dir("gg_run_boom");
    json j = {{"mode", "sample"},
              {"dim", 2},
              {"tau", 0.8},
              {"lambda", 25.0},
              {"seed", 3},
              {"t0", 0.5},
              {"t_max", 1.0},
              {"potential", {{"type", "hardcore"}, {"r", 0.25}}},
              {"out_dir", dir.path.string()}};
    const auto rep = run(parse_config_json(j));
    CHECK(rep.exit_code == 2);
}

TEST_CASE("run: estimate mode emits the radial two-point table") {
    TempDir dir("gg_run_est");
    json j = {{"mode", "estimate"},
              {"dim", 2},
              {"tau", 1.0},
              {"lambda", 16.0},
              {"seed", 5},
              {"replications", 60},
              {"probe_half_width", 2.5},
              {"v_cutoff", 1.5},
              {"v_radii", 6},
              {"out_dir", dir.path.string()}};
    const auto rep = run(parse_config_json(j));
    CHECK(rep.exit_code == 0);
    CHECK(fs::exists(dir.path / "sigma_radial.csv"));
    const auto report = json::parse(slurp(dir.path / "report.json"));
    CHECK(report["E"]["value"].get<double>() == doctest::Approx(1.0));
}
