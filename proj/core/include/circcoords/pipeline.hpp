#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "circcoords/alignment.hpp"
#include "circcoords/circular_coords.hpp"
#include "circcoords/data_prep.hpp"
#include "circcoords/density_sampling.hpp"
#include "circcoords/evaluation.hpp"
#include "circcoords/persistence.hpp"

namespace circcoords {

struct SyntheticInput {
  std::string kind = "circle";  // circle | ellipse | limit_cycle
  CircleParams circle;
  double dilation = 1.6;
  LimitCycleParams limit_cycle;
};

struct CsvInput {
  std::string path;
  std::string kind = "points";  // points | time_series
  /// Optional column holding a ground-truth angle; excluded from the coordinates.
  std::string truth_column;
  double rate = 4.0;
};

struct PreprocessSpec {
  std::size_t detrend_window = 120;
  std::size_t delay = 4;
  std::size_t tau = 20;
  std::size_t pca_dim = 5;
};

struct PipelineConfig {
  std::string source = "synthetic";  // synthetic | csv
  SyntheticInput synthetic;
  CsvInput csv;
  PreprocessSpec preprocess;

  std::optional<double> bandwidth;  // Scott's rule when unset
  int intrinsic_dim = 1;
  std::size_t subsamples = 30;
  double target_size = 50.0;

  std::optional<double> max_scale;  // factor * enclosing radius when unset
  std::optional<double> max_scale_cap;
  double max_scale_factor = 1.05;
  std::size_t triangle_cap = 20'000'000;
  CocycleOptions cocycle;
  /// Corrected mode: discard subsamples whose longest bar triggers the smallness warning.
  bool drop_small_subsamples = true;

  std::optional<double> kernel_rate;  // 1 / (kernel_width_factor * bandwidth)^2 when unset
  double kernel_width_factor = 2.0;
  HillClimbOptions alignment;
  int mi_k = 3;

  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::string output_dir = "circcoords_out";

  /// Fills unspecified keys with defaults; throws Error on unknown keys or bad values.
  static PipelineConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
  void validate() const;
};

nlohmann::json default_config_json();

/// Applies "a.b.c=value" to a config document. The value is parsed as JSON
/// when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

struct Dataset {
  PointCloud cloud;
  std::optional<std::vector<double>> truth;
  std::string description;
};

Dataset load_dataset(const PipelineConfig& config);

/// detrend -> delay_embed -> pca_reduce with the configured settings.
PointCloud preprocess_series(const TimeSeries& ts, const PreprocessSpec& spec);

struct SingleShot {
  CircularCoordinate coordinate;
  /// Barcode without representatives.
  std::vector<PersistenceBar> bars;
  PersistenceBar selected;
  double max_scale = 0.0;
  double scale = 0.0;
  std::uint32_t prime = 0;
  std::size_t edge_count = 0;
  std::vector<std::string> warnings;
  bool too_small = false;
};

double resolve_max_scale(const PointCloud& cloud, const PipelineConfig& config);

/// Rips -> PH1 -> bar -> lift -> harmonic smoothing on one cloud.
SingleShot single_shot_coordinate(const PointCloud& cloud, const PipelineConfig& config);

struct SubsampleOutcome {
  std::size_t index = 0;
  std::size_t size = 0;
  bool ok = false;
  std::string diagnostic;
  double birth = 0.0;
  double death = 0.0;
  double scale = 0.0;
  std::uint32_t prime = 0;
  std::vector<std::string> warnings;
};

struct CoordinateRun {
  std::string mode;
  CircularCoordinate coordinate;
  std::vector<PersistenceBar> bars;
  /// Subsample of each bar in `bars`; empty for uncorrected runs.
  std::vector<std::size_t> bar_subsample;
  std::vector<std::string> warnings;
  std::optional<AlignmentResult> alignment;
  std::optional<SubsampleSet> subsamples;
  std::vector<SubsampleOutcome> outcomes;
  double bandwidth = 0.0;
  double kernel_rate = 0.0;
  double wall_seconds = 0.0;
};

CoordinateRun compute_uncorrected(const PointCloud& cloud, const PipelineConfig& config);
/// Throws DegenerateEnsemble when fewer than two subsample coordinates survive.
CoordinateRun compute_corrected(const PointCloud& cloud, const PipelineConfig& config);

struct Evaluation {
  MIEstimate mi;
  std::string reference;  // truth | ambient
  std::optional<double> rmse_aligned;
  std::optional<long> winding;
};

/// MI against the ground truth when present, otherwise against the cloud.
Evaluation evaluate(const CircularCoordinate& coord, const Dataset& data, int k);

struct RunReport {
  std::string mode;
  std::filesystem::path coordinates_path;
  std::filesystem::path barcode_path;
  std::filesystem::path report_path;
  std::optional<Evaluation> evaluation;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

RunReport run_uncorrected(const PipelineConfig& config);
RunReport run_corrected(const PipelineConfig& config);

struct BenchResult {
  std::vector<double> uncorrected_seconds;
  std::vector<double> corrected_seconds;
  double uncorrected_min = 0.0;
  double uncorrected_median = 0.0;
  double corrected_min = 0.0;
  double corrected_median = 0.0;
  /// uncorrected_min / corrected_min.
  double speedup = 0.0;
  bool outputs_identical = true;
  std::filesystem::path timing_path;
};

BenchResult bench(const PipelineConfig& config, std::size_t repeats);

struct MiComparisonRow {
  std::uint64_t seed = 0;
  double corrected = 0.0;
  double uncorrected = 0.0;
};

struct MiComparison {
  std::vector<MiComparisonRow> rows;
  double corrected_mean = 0.0;
  double uncorrected_mean = 0.0;
  PairedTTest test;
  std::filesystem::path table_path;
};

/// Normalized MI of both modes over seeds config.seed + r, r < replicates.
MiComparison mi_compare(const PipelineConfig& config, std::size_t replicates);

}  // namespace circcoords
