#include <iostream>

#include <CLI11.hpp>

#include "parallelobox/batch.hpp"
#include "parallelobox/errors.hpp"

using namespace parallelobox;

namespace {

int exit_code(const std::vector<ResultRow>& rows) {
  for (const ResultRow& r : rows) {
    if (r.valid) return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split a mesh into axis-aligned parts for parallel 3D printing"};
  app.require_subcommand(1);

  std::string model;
  int printers = 1;
  std::string granularity = "very_fine";
  int sample_tries = 3;
  bool skip_symmetry = false;
  double symmetry_threshold = kDefaultSymmetryThreshold;
  double overhang_tolerance = 1.0;
  double infill = 0.05;
  std::string config;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string baseline = "both";
  int min_printers = 1;

  CLI::App* decompose = app.add_subcommand("decompose", "Decompose one model");
  decompose->add_option("model", model, "Input mesh (.stl or .obj)")->required()->check(CLI::ExistingFile);
  decompose->add_option("--printers", printers, "Printers available")->check(CLI::PositiveNumber);
  decompose->add_option("--granularity", granularity, "Grid preset")
      ->check(CLI::IsMember({"coarse", "medium", "fine", "very_fine"}));
  decompose->add_option("--sample-tries", sample_tries, "Seeds per printer budget")->check(CLI::PositiveNumber);
  decompose->add_flag("--skip-symmetry", skip_symmetry, "Never cut at a symmetry plane");
  decompose->add_option("--symmetry-threshold", symmetry_threshold, "Largest symmetry error that triggers a cut");
  decompose->add_option("--overhang-tolerance", overhang_tolerance, "Overhang tolerance in degrees");
  decompose->add_option("--infill", infill, "Infill fraction")->check(CLI::Range(0.0, 1.0));
  decompose->add_option("--config", config, "Printer INI file")->check(CLI::ExistingFile);
  decompose->add_option("--seed", seed, "Base random seed");
  decompose->add_option("--out", out, "Output folder");
  decompose->add_option("--baseline", baseline, "Algorithms to run")
      ->check(CLI::IsMember({"parallelobox", "symmetry", "both"}));
  decompose->add_option("--min-printers", min_printers, "Lowest printer budget tried")->check(CLI::PositiveNumber);

  std::string manifest;
  CLI::App* batch = app.add_subcommand("batch", "Run a sweep described by a JSON manifest");
  batch->add_option("manifest", manifest, "Manifest file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    BatchSettings settings;
    if (*decompose) {
      settings.models = {model};
      settings.printer_counts = {printers};
      settings.out_dir = out;
      settings.algorithms = parse_algorithms(baseline);
      RunPlan& plan = settings.plan;
      if (!config.empty()) parse_config(config).apply(plan);
      plan.granularity = parse_granularity(granularity);
      plan.sample_tries = sample_tries;
      plan.skip_symmetry = skip_symmetry;
      plan.symmetry_threshold = symmetry_threshold;
      plan.objective.overhang_tolerance = overhang_tolerance;
      plan.objective.infill_fraction = infill;
      plan.rng_seed = seed;
      plan.min_printers = min_printers;
    } else {
      settings = load_manifest(manifest);
    }
    return exit_code(run_batch(settings, &std::cout));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
