#include "parallelobox/batch.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "parallelobox/errors.hpp"

namespace parallelobox {

namespace fs = std::filesystem;

void PrinterConfig::apply(RunPlan& plan) const {
  plan.objective.printer_dims = volume;
  plan.objective.speed_shell = speed_shell;
  plan.objective.speed_infill = speed_infill;
  plan.calibration.line_width = line_width;
  plan.calibration.layer_height = layer_height;
}

PrinterConfig parse_config(const fs::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  PrinterConfig cfg;
  auto read = [&](const char* key, double& value) {
    const auto text = tree.get_optional<std::string>(std::string("printer.") + key);
    if (!text) return;
    try {
      std::size_t used = 0;
      value = std::stod(*text, &used);
      if (used != text->size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError(std::string("cannot parse ") + key + " = '" + *text + "'");
    }
    if (!(value > 0) || !std::isfinite(value)) throw ConfigError(std::string(key) + " must be positive");
  };
  read("volume_x", cfg.volume.x());
  read("volume_y", cfg.volume.y());
  read("volume_z", cfg.volume.z());
  read("speed_shell", cfg.speed_shell);
  read("speed_infill", cfg.speed_infill);
  read("line_width", cfg.line_width);
  read("layer_height", cfg.layer_height);
  return cfg;
}

Algorithms parse_algorithms(std::string_view text) {
  if (text == "parallelobox") return Algorithms::Parallelobox;
  if (text == "symmetry") return Algorithms::Symmetry;
  if (text == "both") return Algorithms::Both;
  throw ConfigError("unknown baseline selection '" + std::string(text) + "'");
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string part_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "part_%03zu.stl", i);
  return buf;
}

std::size_t export_parts(const Decomposition& d, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    TriangleMesh m = d.parts[i].mesh;
    compact_vertices(m);
    write_stl_binary(m, dir / part_name(i));
  }
  return d.parts.size();
}

ResultRow blank_row(const std::string& model, const std::string& algorithm, int printers) {
  ResultRow row;
  row.model = model;
  row.algorithm = algorithm;
  row.printers = printers;
  return row;
}

void fill(ResultRow& row, const Decomposition& d) {
  row.parallel_time = d.parallel_time;
  row.aggregate_time = d.aggregate_time;
  row.parallel_score = d.parallel_score;
  row.valid = d.valid;
  row.reason = d.reason;
}

}  // namespace

void write_row(std::ostream& out, const ResultRow& row) {
  out << row.model << ',' << row.algorithm << ',' << row.printers << ',' << row.parts << ','
      << number(row.parallel_time) << ',' << number(row.aggregate_time) << ',' << number(row.parallel_score) << ','
      << number(row.compute_time) << ',' << (row.valid ? "true" : "false") << '\n';
}

std::vector<ResultRow> run_batch(const BatchSettings& settings, std::ostream* progress) {
  fs::create_directories(settings.out_dir);
  const fs::path csv_path = settings.out_dir / "results.csv";
  const bool fresh = !fs::exists(csv_path) || fs::file_size(csv_path) == 0;
  std::ofstream csv(csv_path, std::ios::app);
  if (fresh) csv << kResultsHeader << '\n';
  std::ofstream runlog(settings.out_dir / "runlog.jsonl", std::ios::app);

  const bool want_meta = settings.algorithms != Algorithms::Symmetry;
  const bool want_base = settings.algorithms != Algorithms::Parallelobox;
  std::vector<ResultRow> rows;
  const fs::path plot_path = settings.out_dir / "plotdata.json";
  nlohmann::json plot = nlohmann::json::object();
  if (fs::exists(plot_path)) {
    plot = nlohmann::json::parse(std::ifstream(plot_path), nullptr, false);
    if (!plot.is_object()) plot = nlohmann::json::object();
  }

  for (const fs::path& model_path : settings.models) {
    const std::string model = model_path.stem().string();
    TriangleMesh mesh;
    std::string load_error;
    try {
      mesh = load_mesh(model_path);
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    nlohmann::json& entry = plot[model];
    entry = nlohmann::json::object();
    entry["printers"] = nlohmann::json::array();

    for (int printers : settings.printer_counts) {
      entry["printers"].push_back(printers);
      const fs::path run_dir = settings.out_dir / model / std::to_string(printers);
      auto emit = [&](ResultRow row) {
        write_row(csv, row);
        csv.flush();
        nlohmann::json& series = entry[row.algorithm];
        series["parallel_time_s"].push_back(row.valid ? nlohmann::json(row.parallel_time) : nlohmann::json());
        series["aggregate_time_s"].push_back(row.valid ? nlohmann::json(row.aggregate_time) : nlohmann::json());
        series["parts"].push_back(row.parts);
        if (progress) {
          *progress << model << " p=" << printers << ' ' << row.algorithm << ": "
                    << (row.valid ? "parallel " + number(row.parallel_time) + " s" : "invalid (" + row.reason + ")")
                    << '\n';
        }
        rows.push_back(std::move(row));
      };

      if (want_meta) {
        ResultRow row = blank_row(model, "parallelobox", printers);
        const auto start = std::chrono::steady_clock::now();
        if (!load_error.empty()) {
          row.reason = load_error;
        } else {
          RunPlan plan = settings.plan;
          plan.printers_available = printers;
          try {
            const MetaResult r = search_decompositions(mesh, plan);
            if (r.found) {
              fill(row, r.best);
              row.parts = export_parts(r.best, run_dir);
            } else {
              row.reason = NoValidDecomposition().what();
            }
            for (const IterationRecord& rec : r.log) {
              nlohmann::json j = to_json(rec);
              j["model"] = model;
              j["printers_available"] = printers;
              runlog << j.dump() << '\n';
            }
          } catch (const Error& e) {
            row.reason = e.what();
          }
        }
        row.compute_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit(std::move(row));
      }

      if (want_base) {
        ResultRow row = blank_row(model, "symmetry", printers);
        const auto start = std::chrono::steady_clock::now();
        if (!load_error.empty()) {
          row.reason = load_error;
        } else {
          try {
            const Decomposition d = recursive_symmetry_baseline(mesh, printers, settings.plan.objective,
                                                                settings.plan.calibration);
            fill(row, d);
            if (d.valid) row.parts = export_parts(d, run_dir / "baseline");
          } catch (const Error& e) {
            row.reason = e.what();
          }
        }
        row.compute_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit(std::move(row));
      }
    }
  }

  std::ofstream(plot_path) << plot.dump(2) << '\n';
  return rows;
}

BatchSettings load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad manifest: ") + e.what());
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  BatchSettings s;
  try {
    for (const auto& m : j.at("models")) s.models.push_back(resolve(m.get<std::string>()));
    s.printer_counts = j.at("printers").get<std::vector<int>>();
    s.out_dir = resolve(j.value("out", std::string("out")));
    if (j.contains("config")) parse_config(resolve(j["config"].get<std::string>())).apply(s.plan);
    s.plan.sample_tries = j.value("sample_tries", s.plan.sample_tries);
    s.plan.min_printers = j.value("min_printers", s.plan.min_printers);
    s.plan.rng_seed = j.value("seed", s.plan.rng_seed);
    s.plan.granularity = parse_granularity(j.value("granularity", std::string("very_fine")));
    s.plan.skip_symmetry = j.value("skip_symmetry", false);
    s.plan.symmetry_threshold = j.value("symmetry_threshold", s.plan.symmetry_threshold);
    s.plan.objective.overhang_tolerance = j.value("overhang_tolerance", s.plan.objective.overhang_tolerance);
    s.plan.objective.infill_fraction = j.value("infill", s.plan.objective.infill_fraction);
    s.algorithms = parse_algorithms(j.value("baseline", std::string("both")));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad manifest: ") + e.what());
  }
  for (int p : s.printer_counts) {
    if (p < 1) throw ConfigError("printer counts must be at least 1");
  }
  if (s.plan.sample_tries < 1) throw ConfigError("sample_tries must be at least 1");
  return s;
}

}  // namespace parallelobox
