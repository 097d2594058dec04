#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "parallelobox/meta.hpp"

namespace parallelobox {

struct PrinterConfig {
  Vec3 volume = Vec3(250.0, 250.0, 250.0);  // mm
  double speed_shell = 20.0;                 // mm/s
  double speed_infill = 20.0;                // mm/s
  double line_width = 0.4;                   // mm
  double layer_height = 0.25;                // mm

  void apply(RunPlan& plan) const;
};

/// Reads the [printer] section of an INI file; missing keys keep their
/// defaults. Throws ConfigError on unreadable files, unparseable or
/// non-positive values.
PrinterConfig parse_config(const std::filesystem::path& path);

enum class Algorithms { Parallelobox, Symmetry, Both };
Algorithms parse_algorithms(std::string_view text);

struct BatchSettings {
  std::vector<std::filesystem::path> models;
  std::vector<int> printer_counts;
  RunPlan plan;  // printers_available is set per count
  Algorithms algorithms = Algorithms::Both;
  std::filesystem::path out_dir = "out";
};

struct ResultRow {
  std::string model;
  std::string algorithm;
  int printers = 0;
  std::size_t parts = 0;  // exported part files
  double parallel_time = 0.0;
  double aggregate_time = 0.0;
  double parallel_score = 0.0;
  double compute_time = 0.0;
  bool valid = false;
  std::string reason;
};

inline constexpr const char* kResultsHeader =
    "model,algorithm,printers,parts,parallel_time_s,aggregate_time_s,parallel_score,compute_time_s,valid";

void write_row(std::ostream& out, const ResultRow& row);

/**
 * Runs every (model, printer count) pair through the selected algorithms.
 * Writes out/<model>/<p>/part_###.stl (baseline parts under baseline/),
 * appends results.csv, rewrites plotdata.json and appends runlog.jsonl.
 * Per-model failures become invalid rows and the batch continues.
 */
std::vector<ResultRow> run_batch(const BatchSettings& settings, std::ostream* progress = nullptr);

/// Reads a batch manifest (JSON); relative paths resolve against its folder.
BatchSettings load_manifest(const std::filesystem::path& path);

}  // namespace parallelobox
