#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "parallelobox/batch.hpp"
#include "parallelobox/errors.hpp"

using namespace parallelobox;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("parallelobox_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t stl_count(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ".stl";
  return n;
}

}  // namespace

TEST_CASE("printer config") {
  const fs::path dir = scratch("config");

  const PrinterConfig defaults = parse_config(write_text(dir / "empty.ini", "[printer]\n"));
  CHECK(defaults.volume == Vec3(250, 250, 250));
  CHECK(defaults.speed_shell == 20.0);
  CHECK(defaults.speed_infill == 20.0);
  CHECK(defaults.line_width == 0.4);
  CHECK(defaults.layer_height == 0.25);

  const PrinterConfig tall = parse_config(write_text(dir / "z.ini", "[printer]\nvolume_z = 205\nspeed_infill=40\n"));
  CHECK(tall.volume == Vec3(250, 250, 205));
  CHECK(tall.speed_infill == 40.0);

  CHECK_THROWS_AS(parse_config(write_text(dir / "neg.ini", "[printer]\nspeed_shell = -1\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(write_text(dir / "zero.ini", "[printer]\nline_width = 0\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(write_text(dir / "text.ini", "[printer]\nvolume_x = wide\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(write_text(dir / "broken.ini", "[printer\nvolume_x = 1\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(dir / "missing.ini"), ConfigError);

  RunPlan plan;
  tall.apply(plan);
  CHECK(plan.objective.printer_dims.z() == 205.0);
  CHECK(plan.objective.speed_infill == 40.0);
}

TEST_CASE("batch accounting and exports") {
  const fs::path dir = scratch("batch");
  write_stl_binary(fixtures::l_bracket(), dir / "bracket.stl");
  BatchSettings s;
  s.models = {dir / "bracket.stl"};
  s.printer_counts = {1, 2};
  s.plan.sample_tries = 2;
  s.out_dir = dir / "out";
  const std::vector<ResultRow> rows = run_batch(s);
  REQUIRE(rows.size() == 4);

  const auto csv = read_csv(s.out_dir / "results.csv");
  REQUIRE(csv.size() == 5);
  CHECK(csv[0].size() == 9);
  const MeshMeasures whole = measure(fixtures::l_bracket());
  for (std::size_t i = 1; i < csv.size(); ++i) {
    const auto& r = csv[i];
    CHECK(r[0] == "bracket");
    CHECK(r[8] == "true");
    const fs::path parts_dir = s.out_dir / "bracket" / r[2] / (r[1] == "symmetry" ? "baseline" : "");
    CHECK(std::to_string(stl_count(parts_dir)) == r[3]);

    double volume = 0.0;
    for (std::size_t k = 0; k < stl_count(parts_dir); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "part_%03zu.stl", k);
      const TriangleMesh part = load_mesh(parts_dir / name);
      CHECK(validate_watertight(part).is_watertight);
      volume += measure(part).volume;
    }
    CHECK(volume == doctest::Approx(whole.volume).epsilon(1e-4));
  }

  std::ifstream plot_in(s.out_dir / "plotdata.json");
  const nlohmann::json plot = nlohmann::json::parse(plot_in);
  CHECK(plot.at("bracket").at("printers") == nlohmann::json::array({1, 2}));
  CHECK(plot["bracket"]["parallelobox"]["parallel_time_s"].size() == 2);

  std::ifstream log(s.out_dir / "runlog.jsonl");
  std::string line;
  std::size_t records = 0;
  while (std::getline(log, line)) ++records;
  CHECK(records == 2 * (1 + 2));
}

TEST_CASE("oversized model gives invalid rows and no parts") {
  const fs::path dir = scratch("oversized");
  write_stl_binary(fixtures::box(Vec3::Zero(), Vec3(300, 10, 10)), dir / "rod.stl");
  BatchSettings s;
  s.models = {dir / "rod.stl", dir / "absent.stl"};
  s.printer_counts = {1};
  s.plan.sample_tries = 1;
  s.out_dir = dir / "out";
  const std::vector<ResultRow> rows = run_batch(s);
  REQUIRE(rows.size() == 4);
  for (const ResultRow& r : rows) {
    CHECK_FALSE(r.valid);
    CHECK(r.parts == 0);
  }
  CHECK(stl_count(s.out_dir / "rod" / "1") == 0);
  CHECK(stl_count(s.out_dir / "rod" / "1" / "baseline") == 0);
}

TEST_CASE("reruns reproduce the numeric columns") {
  const fs::path dir = scratch("rerun");
  write_stl_binary(fixtures::dumbbell(), dir / "dumbbell.stl");
  std::vector<std::vector<std::vector<std::string>>> runs;
  for (const char* out : {"a", "b"}) {
    BatchSettings s;
    s.models = {dir / "dumbbell.stl"};
    s.printer_counts = {3};
    s.plan.rng_seed = 42;
    s.out_dir = dir / out;
    run_batch(s);
    runs.push_back(read_csv(s.out_dir / "results.csv"));
  }
  REQUIRE(runs[0].size() == runs[1].size());
  for (std::size_t i = 0; i < runs[0].size(); ++i) {
    for (std::size_t c = 0; c < runs[0][i].size(); ++c) {
      if (c == 7 && i > 0) continue;  // compute time
      CHECK(runs[0][i][c] == runs[1][i][c]);
    }
  }
}

TEST_CASE("manifest") {
  const fs::path dir = scratch("manifest");
  write_text(dir / "p.ini", "[printer]\nvolume_x = 200\n");
  const fs::path m = write_text(dir / "m.json", R"({"models": ["a.stl"], "printers": [2, 4], "config": "p.ini",
    "seed": 9, "granularity": "coarse", "baseline": "symmetry", "sample_tries": 5})");
  const BatchSettings s = load_manifest(m);
  CHECK(s.models.front() == dir / "a.stl");
  CHECK(s.printer_counts == std::vector<int>{2, 4});
  CHECK(s.out_dir == dir / "out");
  CHECK(s.plan.objective.printer_dims.x() == 200.0);
  CHECK(s.plan.rng_seed == 9u);
  CHECK(s.plan.granularity == Granularity::Coarse);
  CHECK(s.algorithms == Algorithms::Symmetry);
  CHECK(s.plan.sample_tries == 5);

  CHECK_THROWS_AS(load_manifest(write_text(dir / "bad.json", R"({"printers": [1]})")), ConfigError);
  CHECK_THROWS_AS(load_manifest(write_text(dir / "zero.json", R"({"models": [], "printers": [0]})")), ConfigError);
  CHECK_THROWS_AS(load_manifest(write_text(dir / "gran.json", R"({"models": [], "printers": [1], "granularity": "x"})")),
                  ConfigError);
}
