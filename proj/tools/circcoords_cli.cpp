#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "circcoords/errors.hpp"
#include "circcoords/io.hpp"
#include "circcoords/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kOther = 1, kNoLoop = 2, kDegenerate = 3 };

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
};

circcoords::PipelineConfig load_config(const CommonOptions& opts) {
  nlohmann::json doc = nlohmann::json::object();
  if (!opts.config_path.empty()) doc = circcoords::read_json(opts.config_path);
  for (const auto& o : opts.overrides) circcoords::apply_override(doc, o);
  if (!opts.output_dir.empty()) doc["output_dir"] = opts.output_dir;
  return circcoords::PipelineConfig::from_json(doc);
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "JSON config file");
  cmd->add_option("-s,--set", opts.overrides, "Override a config key, e.g. sampling.subsamples=20")
      ->take_all();
  cmd->add_option("-o,--output-dir", opts.output_dir, "Directory for artifacts");
}

void print_report(const circcoords::RunReport& r) {
  std::cout << "mode: " << r.mode << '\n'
            << "coordinates: " << r.coordinates_path.string() << '\n'
            << "barcode: " << r.barcode_path.string() << '\n'
            << "report: " << r.report_path.string() << '\n'
            << "wall_seconds: " << r.wall_seconds << '\n';
  if (r.evaluation) {
    std::cout << "mi_norm: " << r.evaluation->mi.normalized << " (" << r.evaluation->reference << ")\n";
    if (r.evaluation->rmse_aligned) std::cout << "rmse_aligned: " << *r.evaluation->rmse_aligned << '\n';
    if (r.evaluation->winding) std::cout << "winding: " << *r.evaluation->winding << '\n';
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust circular coordinates from persistent cohomology"};
  app.require_subcommand(1);

  CommonOptions synth_opts, coords_opts, corrected_opts, mi_opts, bench_opts;
  std::size_t replicates = 20;
  std::size_t repeats = 20;

  auto* synth = app.add_subcommand("synth", "Write the configured synthetic sample as CSV");
  add_common(synth, synth_opts);
  auto* coords = app.add_subcommand("coords", "Uncorrected coordinate on the full cloud");
  add_common(coords, coords_opts);
  auto* corrected = app.add_subcommand("coords-corrected", "Subsample ensemble coordinate");
  add_common(corrected, corrected_opts);
  auto* eval_mi = app.add_subcommand("eval-mi", "Paired MI comparison of both modes over seeds");
  add_common(eval_mi, mi_opts);
  eval_mi->add_option("-r,--replicates", replicates, "Number of seeds")->check(CLI::PositiveNumber);
  auto* bench_cmd = app.add_subcommand("bench", "Time both modes on identical input");
  add_common(bench_cmd, bench_opts);
  bench_cmd->add_option("-n,--repeats", repeats, "Runs per mode")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const auto config = load_config(synth_opts);
      const auto data = circcoords::load_dataset(config);
      const auto path = std::filesystem::path(config.output_dir) / "synthetic.csv";
      circcoords::SyntheticSample sample{data.cloud, data.truth.value_or(std::vector<double>(data.cloud.size(), 0.0)),
                                         {}, config.seed};
      circcoords::write_synthetic_csv(path, sample);
      std::cout << "wrote " << path.string() << " (" << data.cloud.size() << " points)\n";
    } else if (coords->parsed()) {
      print_report(circcoords::run_uncorrected(load_config(coords_opts)));
    } else if (corrected->parsed()) {
      print_report(circcoords::run_corrected(load_config(corrected_opts)));
    } else if (eval_mi->parsed()) {
      const auto cmp = circcoords::mi_compare(load_config(mi_opts), replicates);
      std::cout << "seed,mi_norm_corrected,mi_norm_uncorrected\n";
      for (const auto& row : cmp.rows) std::cout << row.seed << ',' << row.corrected << ',' << row.uncorrected << '\n';
      std::cout << "mean corrected " << cmp.corrected_mean << ", uncorrected " << cmp.uncorrected_mean
                << ", t = " << cmp.test.t_statistic << ", p = " << cmp.test.p_value << '\n'
                << "table: " << cmp.table_path.string() << '\n';
    } else if (bench_cmd->parsed()) {
      const auto result = circcoords::bench(load_config(bench_opts), repeats);
      std::cout << "mode,min_seconds,median_seconds\n"
                << "uncorrected," << result.uncorrected_min << ',' << result.uncorrected_median << '\n'
                << "corrected," << result.corrected_min << ',' << result.corrected_median << '\n'
                << "speedup " << result.speedup << ", outputs identical across repeats: "
                << (result.outputs_identical ? "yes" : "no") << '\n'
                << "timing: " << result.timing_path.string() << '\n';
    }
  } catch (const circcoords::NoLoopDetected& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoLoop;
  } catch (const circcoords::DegenerateEnsemble& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& d : e.diagnostics()) std::cerr << "  " << d << '\n';
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}
