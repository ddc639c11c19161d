#include "circcoords/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "circcoords/circle.hpp"
#include "circcoords/errors.hpp"
#include "circcoords/io.hpp"
#include "circcoords/random.hpp"

namespace circcoords {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_keys(const json& defaults, const json& doc, const std::string& prefix) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key())) throw Error("unknown config key '" + key + "'");
    const json& ref = defaults.at(it.key());
    if (ref.is_object()) {
      if (!it.value().is_object()) throw Error("config key '" + key + "' must be an object");
      check_keys(ref, it.value(), key);
    }
  }
}

void overlay(json& base, const json& doc) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      overlay(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

template <typename T>
T read(const json& doc, const char* a, const char* b = nullptr, const char* c = nullptr) {
  const json* node = &doc.at(a);
  std::string path = a;
  if (b) node = &node->at(b), path += std::string(".") + b;
  if (c) node = &node->at(c), path += std::string(".") + c;
  try {
    return node->get<T>();
  } catch (const json::exception&) {
    throw Error("config key '" + path + "' has the wrong type");
  }
}

std::optional<double> read_optional(const json& doc, const char* a, const char* b) {
  const json& node = doc.at(a).at(b);
  if (node.is_null()) return std::nullopt;
  if (!node.is_number()) throw Error(std::string("config key '") + a + "." + b + "' must be a number or null");
  return node.get<double>();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(); }

template <typename Fn>
void run_pool(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

PersistenceBar strip(PersistenceBar bar) {
  bar.representative.clear();
  bar.representative.shrink_to_fit();
  return bar;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::filesystem::path output_path(const PipelineConfig& config, const std::string& name) {
  return std::filesystem::path(config.output_dir) / name;
}

json evaluation_json(const std::optional<Evaluation>& eval) {
  if (!eval) return json();
  return {{"mi", eval->mi.value},
          {"mi_max", eval->mi.maximum},
          {"mi_norm", eval->mi.normalized},
          {"k", eval->mi.k_neighbors},
          {"n", eval->mi.sample_count},
          {"tie_jitter", eval->mi.tie_jitter},
          {"reference", eval->reference},
          {"rmse_aligned", eval->rmse_aligned ? json(*eval->rmse_aligned) : json()},
          {"winding", eval->winding ? json(*eval->winding) : json()}};
}

json outcomes_json(const std::vector<SubsampleOutcome>& outcomes) {
  auto doc = json::array();
  for (const auto& o : outcomes) {
    json entry = {{"index", o.index}, {"size", o.size}, {"ok", o.ok}};
    if (o.ok) {
      entry["birth"] = o.birth;
      entry["death"] = std::isfinite(o.death) ? json(o.death) : json();
      entry["scale"] = o.scale;
      entry["prime"] = o.prime;
      entry["warnings"] = o.warnings;
    } else {
      entry["diagnostic"] = o.diagnostic;
    }
    doc.push_back(std::move(entry));
  }
  return doc;
}

RunReport write_run(const PipelineConfig& config, const Dataset& data, const CoordinateRun& run) {
  RunReport report;
  report.mode = run.mode;
  report.wall_seconds = run.wall_seconds;
  report.warnings = run.warnings;
  report.evaluation = evaluate(run.coordinate, data, config.mi_k);

  report.coordinates_path = output_path(config, run.mode + "_coordinates.csv");
  report.barcode_path = output_path(config, run.mode + "_barcode.json");
  report.report_path = output_path(config, run.mode + "_report.json");
  write_coordinates_csv(report.coordinates_path, run.coordinate);

  json barcode = barcode_json(run.bars);
  for (std::size_t i = 0; i < run.bar_subsample.size() && i < barcode.size(); ++i)
    barcode[i]["subsample"] = run.bar_subsample[i];
  write_json(report.barcode_path, barcode);

  json doc = {{"mode", run.mode},
              {"input", data.description},
              {"coordinates", report.coordinates_path.string()},
              {"barcode", report.barcode_path.string()},
              {"evaluation", evaluation_json(report.evaluation)},
              {"wall_time_seconds", run.wall_seconds},
              {"warnings", run.warnings},
              {"bandwidth", run.bandwidth},
              {"kernel_rate", run.kernel_rate},
              {"config", config.to_json()}};
  if (run.alignment) {
    const auto path = output_path(config, run.mode + "_alignment.json");
    write_json(path, alignment_json(*run.alignment));
    doc["alignment"] = path.string();
  }
  if (run.subsamples) {
    const auto path = output_path(config, run.mode + "_subsamples.json");
    json subs = subsamples_json(*run.subsamples);
    subs["outcomes"] = outcomes_json(run.outcomes);
    write_json(path, subs);
    doc["subsamples"] = path.string();
  }
  write_json(report.report_path, doc);
  return report;
}

}  // namespace

json default_config_json() {
  const PipelineConfig d;
  return d.to_json();
}

json PipelineConfig::to_json() const {
  const auto& lc = synthetic.limit_cycle;
  return {
      {"input",
       {{"source", source},
        {"synthetic",
         {{"kind", synthetic.kind},
          {"n", synthetic.circle.n},
          {"dispersion", synthetic.circle.dispersion},
          {"radius_mean", synthetic.circle.radius_mean},
          {"radius_sd", synthetic.circle.radius_sd},
          {"dilation", synthetic.dilation},
          {"limit_cycle",
           {{"length", lc.length},
            {"rate", lc.rate},
            {"period", lc.period},
            {"speed_modulation", lc.speed_modulation},
            {"noise_sd", lc.noise_sd},
            {"drift", lc.drift}}}}},
        {"csv", {{"path", csv.path}, {"kind", csv.kind}, {"truth_column", csv.truth_column}, {"rate", csv.rate}}},
        {"preprocess",
         {{"detrend_window", preprocess.detrend_window},
          {"delay", preprocess.delay},
          {"tau", preprocess.tau},
          {"pca_dim", preprocess.pca_dim}}}}},
      {"density", {{"bandwidth", optional_json(bandwidth)}, {"intrinsic_dim", intrinsic_dim}}},
      {"sampling", {{"subsamples", subsamples}, {"target_size", target_size}}},
      {"persistence",
       {{"max_scale", optional_json(max_scale)},
        {"max_scale_cap", optional_json(max_scale_cap)},
        {"max_scale_factor", max_scale_factor},
        {"triangle_cap", triangle_cap},
        {"primes", cocycle.primes},
        {"scale_fraction", cocycle.scale_fraction},
        {"smallness_factor", cocycle.selection.smallness_factor},
        {"multiplicity_fraction", cocycle.selection.multiplicity_fraction},
        {"drop_small_subsamples", drop_small_subsamples}}},
      {"extension", {{"kernel_rate", optional_json(kernel_rate)}, {"kernel_width_factor", kernel_width_factor}}},
      {"alignment", {{"rate0", alignment.rate0}, {"tol", alignment.tol}, {"max_iter", alignment.max_iter}}},
      {"evaluation", {{"k", mi_k}}},
      {"seed", seed},
      {"threads", threads},
      {"output_dir", output_dir},
  };
}

PipelineConfig PipelineConfig::from_json(const json& user) {
  if (!user.is_object()) throw Error("config must be a JSON object");
  json doc = default_config_json();
  check_keys(doc, user, "");
  overlay(doc, user);

  PipelineConfig c;
  c.source = read<std::string>(doc, "input", "source");
  c.synthetic.kind = read<std::string>(doc, "input", "synthetic", "kind");
  c.synthetic.circle.n = read<std::size_t>(doc, "input", "synthetic", "n");
  c.synthetic.circle.dispersion = read<double>(doc, "input", "synthetic", "dispersion");
  c.synthetic.circle.radius_mean = read<double>(doc, "input", "synthetic", "radius_mean");
  c.synthetic.circle.radius_sd = read<double>(doc, "input", "synthetic", "radius_sd");
  c.synthetic.dilation = read<double>(doc, "input", "synthetic", "dilation");
  const json& lc = doc.at("input").at("synthetic").at("limit_cycle");
  c.synthetic.limit_cycle.length = read<std::size_t>(lc, "length");
  c.synthetic.limit_cycle.rate = read<double>(lc, "rate");
  c.synthetic.limit_cycle.period = read<double>(lc, "period");
  c.synthetic.limit_cycle.speed_modulation = read<double>(lc, "speed_modulation");
  c.synthetic.limit_cycle.noise_sd = read<double>(lc, "noise_sd");
  c.synthetic.limit_cycle.drift = read<double>(lc, "drift");
  c.csv.path = read<std::string>(doc, "input", "csv", "path");
  c.csv.kind = read<std::string>(doc, "input", "csv", "kind");
  c.csv.truth_column = read<std::string>(doc, "input", "csv", "truth_column");
  c.csv.rate = read<double>(doc, "input", "csv", "rate");
  c.preprocess.detrend_window = read<std::size_t>(doc, "input", "preprocess", "detrend_window");
  c.preprocess.delay = read<std::size_t>(doc, "input", "preprocess", "delay");
  c.preprocess.tau = read<std::size_t>(doc, "input", "preprocess", "tau");
  c.preprocess.pca_dim = read<std::size_t>(doc, "input", "preprocess", "pca_dim");

  c.bandwidth = read_optional(doc, "density", "bandwidth");
  c.intrinsic_dim = read<int>(doc, "density", "intrinsic_dim");
  c.subsamples = read<std::size_t>(doc, "sampling", "subsamples");
  c.target_size = read<double>(doc, "sampling", "target_size");

  c.max_scale = read_optional(doc, "persistence", "max_scale");
  c.max_scale_cap = read_optional(doc, "persistence", "max_scale_cap");
  c.max_scale_factor = read<double>(doc, "persistence", "max_scale_factor");
  c.triangle_cap = read<std::size_t>(doc, "persistence", "triangle_cap");
  c.cocycle.primes = read<std::vector<std::uint32_t>>(doc, "persistence", "primes");
  c.cocycle.scale_fraction = read<double>(doc, "persistence", "scale_fraction");
  c.cocycle.selection.smallness_factor = read<double>(doc, "persistence", "smallness_factor");
  c.cocycle.selection.multiplicity_fraction = read<double>(doc, "persistence", "multiplicity_fraction");

  c.drop_small_subsamples = read<bool>(doc, "persistence", "drop_small_subsamples");
  c.kernel_rate = read_optional(doc, "extension", "kernel_rate");
  c.kernel_width_factor = read<double>(doc, "extension", "kernel_width_factor");
  c.alignment.rate0 = read<double>(doc, "alignment", "rate0");
  c.alignment.tol = read<double>(doc, "alignment", "tol");
  c.alignment.max_iter = read<std::size_t>(doc, "alignment", "max_iter");
  c.mi_k = read<int>(doc, "evaluation", "k");
  c.seed = read<std::uint64_t>(doc, "seed");
  c.threads = read<std::size_t>(doc, "threads");
  c.output_dir = read<std::string>(doc, "output_dir");
  c.validate();
  return c;
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error("invalid config: " + what);
  };
  require(source == "synthetic" || source == "csv", "input.source must be synthetic or csv");
  require(synthetic.kind == "circle" || synthetic.kind == "ellipse" || synthetic.kind == "limit_cycle",
          "input.synthetic.kind must be circle, ellipse or limit_cycle");
  require(source != "csv" || !csv.path.empty(), "input.csv.path is required for csv input");
  require(csv.kind == "points" || csv.kind == "time_series", "input.csv.kind must be points or time_series");
  require(!bandwidth || *bandwidth > 0.0, "density.bandwidth must be positive");
  require(intrinsic_dim >= 1, "density.intrinsic_dim must be at least 1");
  require(subsamples >= 1, "sampling.subsamples must be at least 1");
  require(target_size > 0.0, "sampling.target_size must be positive");
  require(!max_scale || *max_scale > 0.0, "persistence.max_scale must be positive");
  require(!max_scale_cap || *max_scale_cap > 0.0, "persistence.max_scale_cap must be positive");
  require(max_scale_factor >= 1.0, "persistence.max_scale_factor must be at least 1");
  require(!cocycle.primes.empty(), "persistence.primes must not be empty");
  require(cocycle.scale_fraction > 0.0 && cocycle.scale_fraction < 1.0,
          "persistence.scale_fraction must lie in (0, 1)");
  require(!kernel_rate || *kernel_rate > 0.0, "extension.kernel_rate must be positive");
  require(kernel_width_factor > 0.0, "extension.kernel_width_factor must be positive");
  require(alignment.rate0 > 0.0, "alignment.rate0 must be positive");
  require(mi_k >= 1, "evaluation.k must be positive");
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error("override '" + assignment + "' has an empty key segment");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& child = (*node)[part];
    if (child.is_null()) child = json::object();
    node = &child;
    start = dot + 1;
  }
}

PointCloud preprocess_series(const TimeSeries& ts, const PreprocessSpec& spec) {
  const TimeSeries flat = detrend(ts, std::min(spec.detrend_window, ts.length()));
  const PointCloud embedded = delay_embed(flat, spec.delay, spec.tau);
  return pca_reduce(embedded, std::min(spec.pca_dim, embedded.dim())).cloud;
}

Dataset load_dataset(const PipelineConfig& config) {
  if (config.source == "synthetic") {
    const auto& s = config.synthetic;
    if (s.kind == "circle") {
      auto sample = gen_unbalanced_circle(s.circle, config.seed);
      return {std::move(sample.cloud), std::move(sample.true_parameter), "synthetic circle"};
    }
    if (s.kind == "ellipse") {
      auto sample = gen_unbalanced_ellipse(s.circle, s.dilation, config.seed);
      return {std::move(sample.cloud), std::move(sample.true_parameter), "synthetic ellipse"};
    }
    auto series = gen_limit_cycle_series(s.limit_cycle, config.seed);
    PointCloud cloud = preprocess_series(series.series, config.preprocess);
    // Each embedded row spans frames t .. t + d tau; its truth is the phase at the center.
    const std::size_t offset = config.preprocess.delay * config.preprocess.tau / 2;
    std::vector<double> truth(cloud.size());
    for (std::size_t t = 0; t < cloud.size(); ++t) truth[t] = series.phase[t + offset];
    return {std::move(cloud), std::move(truth), "synthetic limit cycle"};
  }

  const CsvTable table = read_csv(config.csv.path);
  std::optional<std::size_t> truth_col;
  if (!config.csv.truth_column.empty()) {
    truth_col = table.column_index(config.csv.truth_column);
    if (!truth_col) throw Error("column '" + config.csv.truth_column + "' not found in " + config.csv.path);
  }
  const std::size_t dims = table.columns - (truth_col ? 1 : 0);
  if (dims == 0) throw Error(config.csv.path + ": no coordinate columns");
  std::optional<std::vector<double>> truth;
  if (truth_col) truth = table.column(*truth_col);
  if (config.csv.kind == "points") {
    return {PointCloud(dims, table.without_column(truth_col)), std::move(truth), config.csv.path};
  }
  const TimeSeries series(dims, table.without_column(truth_col), config.csv.rate);
  PointCloud cloud = preprocess_series(series, config.preprocess);
  if (truth) {
    const std::size_t offset = config.preprocess.delay * config.preprocess.tau / 2;
    std::vector<double> rows(cloud.size());
    for (std::size_t t = 0; t < cloud.size(); ++t) rows[t] = (*truth)[t + offset];
    truth = std::move(rows);
  }
  return {std::move(cloud), std::move(truth), config.csv.path};
}

double resolve_max_scale(const PointCloud& cloud, const PipelineConfig& config) {
  double scale = config.max_scale ? *config.max_scale : config.max_scale_factor * enclosing_radius(cloud);
  if (config.max_scale_cap) scale = std::min(scale, *config.max_scale_cap);
  if (!(scale > 0.0)) throw NoLoopDetected("cloud has no positive scale (all points coincide)");
  return scale;
}

SingleShot single_shot_coordinate(const PointCloud& cloud, const PipelineConfig& config) {
  SingleShot out;
  out.max_scale = resolve_max_scale(cloud, config);
  RipsOptions rips;
  rips.materialize_triangles = false;
  rips.triangle_cap = config.triangle_cap;
  const RipsFiltration filtration = build_rips(cloud, out.max_scale, rips);
  CocycleExtraction extraction = extract_cocycle(filtration, cloud, config.cocycle);

  const std::vector<Edge> graph = filtration.edges_up_to(extraction.scale);
  const HarmonicRepresentative rep = harmonic_smooth(extraction.cocycle, graph, cloud.size());
  out.coordinate = to_circle(rep);
  out.selected = strip(extraction.selection.bar);
  out.scale = extraction.scale;
  out.prime = extraction.prime;
  out.edge_count = graph.size();
  out.warnings = extraction.selection.warnings;
  out.too_small = extraction.selection.too_small;
  out.bars.reserve(extraction.bars.size());
  for (auto& bar : extraction.bars) out.bars.push_back(strip(std::move(bar)));
  return out;
}

CoordinateRun compute_uncorrected(const PointCloud& cloud, const PipelineConfig& config) {
  const auto start = Clock::now();
  SingleShot shot = single_shot_coordinate(cloud, config);
  CoordinateRun run;
  run.mode = "uncorrected";
  run.coordinate = std::move(shot.coordinate);
  run.bars = std::move(shot.bars);
  run.warnings = std::move(shot.warnings);
  run.wall_seconds = seconds_since(start);
  return run;
}

CoordinateRun compute_corrected(const PointCloud& cloud, const PipelineConfig& config) {
  const auto start = Clock::now();
  CoordinateRun run;
  run.mode = "corrected";
  run.bandwidth = config.bandwidth ? *config.bandwidth : scott_bandwidth(cloud, config.intrinsic_dim);
  const double width = config.kernel_width_factor * run.bandwidth;
  run.kernel_rate = config.kernel_rate ? *config.kernel_rate : 1.0 / (width * width);

  const DensityField density = estimate_density(cloud, run.bandwidth);
  const double target = std::min(config.target_size, static_cast<double>(cloud.size()));
  const AcceptanceField acceptance = make_acceptance(density, target);
  run.subsamples = rejection_sample(cloud, acceptance, config.subsamples, config.seed);
  const SubsampleSet& set = *run.subsamples;

  const std::size_t k = set.count();
  std::vector<SubsampleOutcome> outcomes(k);
  std::vector<std::optional<Configuration>> extended(k);
  std::vector<std::vector<PersistenceBar>> bars(k);
  run_pool(k, config.threads, [&](std::size_t i) {
    SubsampleOutcome& o = outcomes[i];
    o.index = i;
    o.size = set.subsamples[i].size();
    if (set.undersized[i]) {
      o.diagnostic = "no loop detected: subsample has " + std::to_string(o.size) + " points";
      return;
    }
    try {
      const PointCloud sub = cloud.subset(set.subsamples[i]);
      SingleShot shot = single_shot_coordinate(sub, config);
      if (shot.too_small && config.drop_small_subsamples) {
        o.diagnostic = "no loop detected: " + shot.warnings.front();
        return;
      }
      shot.coordinate.domain = set.subsamples[i];
      const CircularCoordinate full = extend_coordinate(shot.coordinate, cloud, run.kernel_rate);
      extended[i] = full.angles;
      o.ok = true;
      o.birth = shot.selected.birth;
      o.death = shot.selected.death;
      o.scale = shot.scale;
      o.prime = shot.prime;
      o.warnings = std::move(shot.warnings);
      bars[i] = std::move(shot.bars);
    } catch (const NoLoopDetected& e) {
      o.diagnostic = std::string("no loop detected: ") + e.what();
    } catch (const Error& e) {
      o.diagnostic = e.what();
    }
  });

  std::vector<Configuration> configs;
  std::vector<std::string> diagnostics;
  for (std::size_t i = 0; i < k; ++i) {
    if (extended[i]) {
      configs.push_back(std::move(*extended[i]));
      for (auto& bar : bars[i]) {
        run.bars.push_back(std::move(bar));
        run.bar_subsample.push_back(i);
      }
      for (const auto& w : outcomes[i].warnings) run.warnings.push_back("subsample " + std::to_string(i) + ": " + w);
    } else {
      diagnostics.push_back("subsample " + std::to_string(i) + ": " + outcomes[i].diagnostic);
      run.warnings.push_back("dropped " + diagnostics.back());
    }
  }
  run.outcomes = std::move(outcomes);
  if (configs.size() < 2) {
    throw DegenerateEnsemble("only " + std::to_string(configs.size()) + " of " + std::to_string(k) +
                                 " subsample coordinates survived; at least two are required",
                             std::move(diagnostics));
  }

  AlignmentResult aligned = align_and_average(configs, config.alignment);
  const std::size_t n = cloud.size();
  run.coordinate.angles = aligned.centroid;
  run.coordinate.domain.resize(n);
  run.coordinate.flags.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    run.coordinate.domain[j] = j;
    if (aligned.tie[j]) run.coordinate.flags[j] |= kFlagCentroidTie;
  }
  if (!aligned.converged) run.warnings.push_back("hill climbing stopped at the iteration cap");
  run.alignment = std::move(aligned);
  run.wall_seconds = seconds_since(start);
  return run;
}

Evaluation evaluate(const CircularCoordinate& coord, const Dataset& data, int k) {
  Evaluation eval;
  const MetricSample ours = MetricSample::circular(coord.angles);
  if (data.truth) {
    eval.reference = "truth";
    eval.mi = ksg_mi(ours, MetricSample::circular(*data.truth), k);
    eval.rmse_aligned = circular_rmse_aligned(coord.angles, *data.truth);
    const auto path = ordering_path(*data.truth);
    eval.winding = winding_number(coord.angles, path);
  } else {
    eval.reference = "ambient";
    eval.mi = ksg_mi(ours, MetricSample::euclidean(data.cloud), k);
  }
  return eval;
}

RunReport run_uncorrected(const PipelineConfig& config) {
  const Dataset data = load_dataset(config);
  return write_run(config, data, compute_uncorrected(data.cloud, config));
}

RunReport run_corrected(const PipelineConfig& config) {
  const Dataset data = load_dataset(config);
  return write_run(config, data, compute_corrected(data.cloud, config));
}

BenchResult bench(const PipelineConfig& config, std::size_t repeats) {
  if (repeats < 1) throw Error("bench: repeats must be at least 1");
  const Dataset data = load_dataset(config);
  BenchResult result;
  std::optional<std::vector<double>> first_uncorrected;
  std::optional<std::vector<double>> first_corrected;
  for (std::size_t r = 0; r < repeats; ++r) {
    CoordinateRun u = compute_uncorrected(data.cloud, config);
    CoordinateRun c = compute_corrected(data.cloud, config);
    result.uncorrected_seconds.push_back(u.wall_seconds);
    result.corrected_seconds.push_back(c.wall_seconds);
    if (!first_uncorrected) {
      first_uncorrected = u.coordinate.angles;
      first_corrected = c.coordinate.angles;
    } else if (*first_uncorrected != u.coordinate.angles || *first_corrected != c.coordinate.angles) {
      result.outputs_identical = false;
    }
  }
  result.uncorrected_min = *std::min_element(result.uncorrected_seconds.begin(), result.uncorrected_seconds.end());
  result.corrected_min = *std::min_element(result.corrected_seconds.begin(), result.corrected_seconds.end());
  result.uncorrected_median = median(result.uncorrected_seconds);
  result.corrected_median = median(result.corrected_seconds);
  result.speedup = result.corrected_min > 0.0 ? result.uncorrected_min / result.corrected_min
                                               : std::numeric_limits<double>::infinity();

  result.timing_path = output_path(config, "timing.csv");
  std::filesystem::create_directories(config.output_dir);
  std::ofstream out(result.timing_path);
  if (!out) throw Error("cannot open " + result.timing_path.string() + " for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "mode,repeat,wall_seconds\n";
  for (std::size_t r = 0; r < repeats; ++r) out << "uncorrected," << r << ',' << result.uncorrected_seconds[r] << '\n';
  for (std::size_t r = 0; r < repeats; ++r) out << "corrected," << r << ',' << result.corrected_seconds[r] << '\n';

  write_json(output_path(config, "bench.json"),
             {{"repeats", repeats},
              {"rows",
               {{{"mode", "uncorrected"}, {"min", result.uncorrected_min}, {"median", result.uncorrected_median}},
                {{"mode", "corrected"}, {"min", result.corrected_min}, {"median", result.corrected_median}}}},
              {"speedup", result.speedup},
              {"outputs_identical", result.outputs_identical},
              {"config", config.to_json()}});
  return result;
}

MiComparison mi_compare(const PipelineConfig& config, std::size_t replicates) {
  if (replicates < 2) throw Error("mi_compare: at least two replicates are needed for the t-test");
  MiComparison cmp;
  std::vector<double> corrected;
  std::vector<double> uncorrected;
  for (std::size_t r = 0; r < replicates; ++r) {
    PipelineConfig c = config;
    c.seed = config.seed + r;
    const Dataset data = load_dataset(c);
    const CoordinateRun u = compute_uncorrected(data.cloud, c);
    const CoordinateRun v = compute_corrected(data.cloud, c);
    MiComparisonRow row;
    row.seed = c.seed;
    row.uncorrected = evaluate(u.coordinate, data, c.mi_k).mi.normalized;
    row.corrected = evaluate(v.coordinate, data, c.mi_k).mi.normalized;
    corrected.push_back(row.corrected);
    uncorrected.push_back(row.uncorrected);
    cmp.rows.push_back(row);
  }
  cmp.corrected_mean = std::accumulate(corrected.begin(), corrected.end(), 0.0) / static_cast<double>(replicates);
  cmp.uncorrected_mean = std::accumulate(uncorrected.begin(), uncorrected.end(), 0.0) / static_cast<double>(replicates);
  cmp.test = paired_t_test_greater(corrected, uncorrected);

  cmp.table_path = output_path(config, "mi_compare.csv");
  std::filesystem::create_directories(config.output_dir);
  std::ofstream out(cmp.table_path);
  if (!out) throw Error("cannot open " + cmp.table_path.string() + " for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "seed,mi_norm_corrected,mi_norm_uncorrected\n";
  for (const auto& row : cmp.rows) out << row.seed << ',' << row.corrected << ',' << row.uncorrected << '\n';

  write_json(output_path(config, "mi_compare.json"),
             {{"replicates", replicates},
              {"corrected_mean", cmp.corrected_mean},
              {"uncorrected_mean", cmp.uncorrected_mean},
              {"mean_difference", cmp.test.mean_difference},
              {"t_statistic", std::isfinite(cmp.test.t_statistic) ? json(cmp.test.t_statistic) : json()},
              {"p_value", cmp.test.p_value},
              {"degrees_of_freedom", cmp.test.degrees_of_freedom},
              {"config", config.to_json()}});
  return cmp;
}

}  // namespace circcoords
