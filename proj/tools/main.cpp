#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "binpose/io.hpp"
#include "binpose/knn_predictor.hpp"
#include "binpose/parallel.hpp"
#include "binpose/rng.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace binpose;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Config file entries override command-line flags; every bound value also
/// feeds the provenance hash.
struct ConfigBinding {
  std::function<void(const json&)> set;
  std::function<json()> get;
  bool hashed = true;  // output-location and worker-count knobs stay out
};
using ConfigMap = std::map<std::string, ConfigBinding>;

template <typename T>
void bind_value(ConfigMap& map, const std::string& key, T& var, bool hashed = true) {
  map[key] = ConfigBinding{[&var](const json& v) { var = v.get<T>(); },
                           [&var] { return json(var); }, hashed};
}

void apply_config_file(ConfigMap& map, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error(path + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    auto it = map.find(key);
    if (it == map.end()) throw std::runtime_error(path + ": unknown config key " + key);
    try {
      it->second.set(value);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ": key " + key + ": " + e.what());
    }
  }
}

io::Provenance make_provenance(const std::string& command, const ConfigMap& map,
                               std::uint64_t seed) {
  json j;
  j["command"] = command;
  for (const auto& [key, binding] : map) {
    if (binding.hashed) j[key] = binding.get();
  }
  return io::Provenance{io::hash_config(j.dump()), seed};
}

struct PipelineOpts {
  double v_min = 0.25;
  double eps = 0.05;
  std::size_t min_pts = 0;
  double bandwidth = 0.3;
  int max_iters = 100;
  double tol = 1e-3;
  std::size_t min_instance_points = 10;
};

void add_pipeline_opts(CLI::App* cmd, PipelineOpts& o, ConfigMap& map) {
  cmd->add_option("--v-min", o.v_min, "visibility threshold for scene points");
  cmd->add_option("--eps", o.eps, "DBSCAN radius, fraction of object diameter");
  cmd->add_option("--min-pts", o.min_pts, "DBSCAN core threshold (0 = auto)");
  cmd->add_option("--bandwidth", o.bandwidth, "mean-shift bandwidth, fraction of diameter");
  cmd->add_option("--max-iters", o.max_iters, "mean-shift iteration cap");
  cmd->add_option("--tol", o.tol, "mean-shift convergence tolerance, fraction of diameter");
  cmd->add_option("--min-instance-points", o.min_instance_points,
                  "smallest instance cluster kept");
  bind_value(map, "v-min", o.v_min);
  bind_value(map, "eps", o.eps);
  bind_value(map, "min-pts", o.min_pts);
  bind_value(map, "bandwidth", o.bandwidth);
  bind_value(map, "max-iters", o.max_iters);
  bind_value(map, "tol", o.tol);
  bind_value(map, "min-instance-points", o.min_instance_points);
}

PipelineConfig pipeline_config(const PipelineOpts& o, bool filtering) {
  PipelineConfig config;
  config.v_min = o.v_min;
  config.cluster.eps = o.eps;
  config.cluster.min_pts = o.min_pts;
  config.cluster.bandwidth = o.bandwidth;
  config.cluster.max_iters = o.max_iters;
  config.cluster.convergence_tol = o.tol;
  config.min_instance_points = o.min_instance_points;
  config.keypoint_filtering = filtering;
  return config;
}

void check_ablations(const std::vector<std::string>& ablations,
                     const std::vector<std::string>& allowed) {
  for (const auto& a : ablations) {
    if (std::find(allowed.begin(), allowed.end(), a) == allowed.end()) {
      std::string msg = "unknown ablation " + a + " (allowed:";
      for (const auto& ok : allowed) msg += " " + ok;
      throw UsageError(msg + ")");
    }
  }
}

bool has_ablation(const std::vector<std::string>& ablations, const std::string& name) {
  return std::find(ablations.begin(), ablations.end(), name) != ablations.end();
}

std::vector<fs::path> list_scene_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error(dir.string() + ": not a directory");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ply") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::runtime_error(dir.string() + ": no .ply scenes");
  return out;
}

fs::path sidecar_path(const fs::path& ply) {
  fs::path p = ply;
  p.replace_extension(".json");
  return p;
}

std::vector<Scene> load_scene_dir(const fs::path& dir) {
  std::vector<fs::path> files = list_scene_files(dir);
  std::vector<Scene> scenes;
  scenes.reserve(files.size());
  for (const auto& f : files) scenes.push_back(io::read_scene(f, sidecar_path(f)));
  return scenes;
}

KeypointSet strip_equivalents(KeypointSet set) {
  for (std::size_t j = 0; j < set.n_k(); ++j) {
    set.equivalents[j] = {set.keypoints[j]};
  }
  return set;
}

AxisAlignedBox box_from(const std::vector<double>& lo, const std::vector<double>& hi) {
  AxisAlignedBox box{Vec3{lo[0], lo[1], lo[2]}, Vec3{hi[0], hi[1], hi[2]}};
  if (!box.valid()) throw UsageError("bin min must be below bin max");
  return box;
}

// ---------------------------------------------------------------- keypoints

struct KeypointsOpts {
  std::string object;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string out;
  std::string config_file;
  ConfigMap map;
};

int run_keypoints(KeypointsOpts& o) {
  apply_config_file(o.map, o.config_file);
  io::Provenance prov = make_provenance("keypoints", o.map, o.seed);

  ObjectModel model = io::load_object_spec(o.object);
  KeypointSet keypoints = make_keypoints(model, o.seed);
  fs::path out = o.out.empty() ? fs::path(o.out_dir) / (model.id + "_keypoints.json")
                               : fs::path(o.out);
  io::write_keypoints(out, model.id, keypoints, prov);
  std::cout << out.string() << "\n";
  return 0;
}

// -------------------------------------------------------------------- synth

struct SynthOpts {
  std::string object;
  std::size_t scenes = 1;
  std::size_t instances = 10;
  std::uint64_t seed = 0;
  std::vector<double> bin_min{-0.2, -0.2, 0.0};
  std::vector<double> bin_max{0.2, 0.2, 0.2};
  double shift_dropout = 0.0;
  double shift_z_noise = 0.0;
  double shift_resample_bias = 0.0;
  std::string prefix = "scene";
  std::string out_dir = ".";
  std::size_t jobs = 1;
  std::string config_file;
  ConfigMap map;
};

int run_synth(SynthOpts& o) {
  apply_config_file(o.map, o.config_file);
  io::Provenance prov = make_provenance("synth", o.map, o.seed);

  ObjectModel model = io::load_object_spec(o.object);
  AxisAlignedBox bin = box_from(o.bin_min, o.bin_max);
  ShiftParams shift{o.shift_dropout, o.shift_z_noise, o.shift_resample_bias};
  bool shifted = shift.dropout > 0.0 || shift.z_noise > 0.0 || shift.resample_bias > 0.0;

  std::vector<Scene> scenes(o.scenes);
  parallel_for(o.scenes, o.jobs, [&](std::size_t s) {
    std::uint64_t scene_seed = derive_seed(o.seed, "scene", s);
    Scene scene = synth_scene(model, o.instances, bin, scene_seed);
    if (shifted) scene = domain_shift(scene, shift, scene_seed);
    scenes[s] = std::move(scene);
  });

  for (std::size_t s = 0; s < scenes.size(); ++s) {
    std::string num = std::to_string(s);
    if (num.size() < 4) num.insert(0, 4 - num.size(), '0');
    fs::path ply = fs::path(o.out_dir) / (o.prefix + "_" + num + ".ply");
    io::write_scene(ply, sidecar_path(ply), scenes[s], model.id, prov);
    std::cout << ply.string() << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- estimate

struct EstimateOpts {
  std::string object;
  std::string scene;
  std::string scenes_dir;
  bool oracle = false;
  double sigma = 0.0;
  double p_amb = 0.0;
  double p_out = 0.0;
  double visibility_noise = 0.0;
  std::uint64_t keypoint_seed = 0;
  std::uint64_t seed = 0;
  PipelineOpts pipeline;
  std::vector<std::string> ablations;
  std::string out;
  std::string out_dir = ".";
  std::size_t jobs = 1;
  std::string config_file;
  ConfigMap map;
};

int run_estimate(EstimateOpts& o) {
  apply_config_file(o.map, o.config_file);
  check_ablations(o.ablations, {"no-kf"});
  if (!o.oracle) {
    throw UsageError("estimate needs --oracle (the only standalone predictor)");
  }
  if (o.scene.empty() == o.scenes_dir.empty()) {
    throw UsageError("give exactly one of --scene and --scenes-dir");
  }
  io::Provenance prov = make_provenance("estimate", o.map, o.seed);

  ObjectModel model = io::load_object_spec(o.object);
  KeypointSet keypoints = make_keypoints(model, o.keypoint_seed);
  NoiseModel noise{o.sigma, o.p_amb, o.p_out, o.visibility_noise};
  PipelineConfig config = pipeline_config(o.pipeline, !has_ablation(o.ablations, "no-kf"));

  std::vector<fs::path> files = o.scene.empty()
                                    ? list_scene_files(o.scenes_dir)
                                    : std::vector<fs::path>{fs::path(o.scene)};
  std::vector<Scene> scenes(files.size());
  std::vector<std::vector<PoseEstimate>> results(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    scenes[i] = io::read_scene(files[i], sidecar_path(files[i]));
  }
  parallel_for(files.size(), o.jobs, [&](std::size_t i) {
    std::uint64_t oracle_seed = derive_seed(o.seed, files[i].stem().string());
    PredictionField field = oracle_predictor(scenes[i], keypoints, model, noise, oracle_seed);
    results[i] = estimate_scene(scenes[i].cloud, field, model, keypoints, config);
  });

  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::path out;
    if (!o.out.empty() && files.size() == 1) {
      out = fs::path(o.out);
    } else {
      out = fs::path(o.out_dir) / (files[i].stem().string() + "_poses.json");
    }
    io::write_estimates(out, results[i], model.id, files[i].filename().string(), prov);
    std::cout << out.string() << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- pseudo-label

struct PseudoLabelOpts {
  std::string object;
  std::string scene;
  std::string poses;
  std::string scenes_dir;
  std::string poses_dir;
  double kappa = 0.0;
  std::uint64_t keypoint_seed = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> ablations;
  std::string out;
  std::string out_dir = ".";
  std::string config_file;
  ConfigMap map;
};

PseudoLabelSet label_one(const Scene& scene, const std::vector<PoseEstimate>& estimates,
                         const ObjectModel& model, const KeypointSet& keypoints,
                         double kappa, bool bidirectional, const std::string& name) {
  std::vector<QualityScore> scores = score_scene(scene, estimates, model, bidirectional);
  if (scores.size() < 2) {
    std::cerr << "binpose: " << name
              << ": fewer than two scored instances, masking everything\n";
    return make_pseudo_labels(scene, {}, {}, 0.0, keypoints);
  }
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& s : scores) values.push_back(s.d);
  double d_g = dynamic_threshold(values, kappa);
  return make_pseudo_labels(scene, estimates, scores, d_g, keypoints);
}

int run_pseudo_label(PseudoLabelOpts& o) {
  apply_config_file(o.map, o.config_file);
  check_ablations(o.ablations, {"chamfer", "no-eks"});
  bool single = !o.scene.empty();
  if (single == !o.scenes_dir.empty()) {
    throw UsageError("give exactly one of --scene and --scenes-dir");
  }
  if (single && o.poses.empty()) throw UsageError("--scene needs --poses");
  if (!single && o.poses_dir.empty()) throw UsageError("--scenes-dir needs --poses-dir");
  io::Provenance prov = make_provenance("pseudo-label", o.map, o.seed);

  ObjectModel model = io::load_object_spec(o.object);
  KeypointSet keypoints = make_keypoints(model, o.keypoint_seed);
  if (has_ablation(o.ablations, "no-eks")) keypoints = strip_equivalents(keypoints);
  bool bidirectional = has_ablation(o.ablations, "chamfer");

  std::vector<fs::path> files = single ? std::vector<fs::path>{fs::path(o.scene)}
                                       : list_scene_files(o.scenes_dir);
  for (const auto& file : files) {
    Scene scene = io::read_scene(file, sidecar_path(file));
    fs::path poses = single ? fs::path(o.poses)
                            : fs::path(o.poses_dir) / (file.stem().string() + "_poses.json");
    std::vector<PoseEstimate> estimates = io::read_estimates(poses);
    PseudoLabelSet labels = label_one(scene, estimates, model, keypoints, o.kappa,
                                      bidirectional, file.stem().string());
    fs::path out = (single && !o.out.empty())
                       ? fs::path(o.out)
                       : fs::path(o.out_dir) / (file.stem().string() + "_labels.json");
    io::write_pseudo_labels(out, labels, prov);
    std::cout << out.string() << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- self-train

struct SelfTrainOpts {
  std::string object;
  std::string source_dir;
  std::string target_dir;
  std::string holdout_dir;
  int rounds = 2;
  double kappa = 0.0;
  std::uint64_t keypoint_seed = 0;
  std::uint64_t seed = 0;
  double knn_radius_frac = 0.35;
  std::size_t knn_max_entries = 4000;
  bool retain_source = true;
  double threshold_frac = 0.1;
  double min_visibility = 0.5;
  PipelineOpts pipeline;
  std::vector<std::string> ablations;
  std::string out_dir = ".";
  std::size_t jobs = 1;
  std::string config_file;
  ConfigMap map;
};

double holdout_ap(const Predictor& predictor, const std::vector<Scene>& scenes,
                  const ObjectModel& model, const KeypointSet& keypoints,
                  const PipelineConfig& config, double threshold_frac,
                  double min_visibility, std::size_t jobs) {
  std::vector<std::vector<MatchedEstimate>> per(scenes.size());
  parallel_for(scenes.size(), jobs, [&](std::size_t i) {
    PredictionField field = predictor.predict(scenes[i].cloud);
    std::vector<PoseEstimate> estimates =
        estimate_scene(scenes[i].cloud, field, model, keypoints, config);
    per[i] = match_estimates(estimates, scenes[i], model, threshold_frac, min_visibility);
  });
  std::vector<MatchedEstimate> pooled;
  std::size_t eligible = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    pooled.insert(pooled.end(), per[i].begin(), per[i].end());
    eligible += count_eligible(scenes[i], min_visibility);
  }
  return pr_curve(std::move(pooled), eligible).ap;
}

int run_self_train(SelfTrainOpts& o) {
  apply_config_file(o.map, o.config_file);
  check_ablations(o.ablations, {"no-da", "no-eks", "chamfer", "no-kf"});
  io::Provenance prov = make_provenance("self-train", o.map, o.seed);

  ObjectModel model = io::load_object_spec(o.object);
  KeypointSet keypoints = make_keypoints(model, o.keypoint_seed);
  bool no_eks = has_ablation(o.ablations, "no-eks");
  KeypointSet label_keypoints = no_eks ? strip_equivalents(keypoints) : keypoints;

  std::vector<Scene> source = load_scene_dir(o.source_dir);
  std::vector<LabeledScene> labeled_source;
  labeled_source.reserve(source.size());
  for (const Scene& scene : source) {
    labeled_source.push_back({scene.cloud, ground_truth_labels(scene, label_keypoints)});
  }

  KnnConfig knn;
  knn.radius = o.knn_radius_frac * model.diameter;
  knn.max_entries = o.knn_max_entries;
  knn.seed = derive_seed(o.seed, "trainer");
  knn.retain_source = o.retain_source;
  KnnTrainer trainer(knn, std::move(labeled_source));
  std::shared_ptr<const Predictor> teacher = trainer.train({});

  SelfTrainConfig config;
  config.pipeline = pipeline_config(o.pipeline, !has_ablation(o.ablations, "no-kf"));
  config.kappa = o.kappa;
  config.bidirectional_chamfer = has_ablation(o.ablations, "chamfer");
  config.use_equivalents = !no_eks;

  SelfTrainResult result;
  result.predictor = teacher;
  if (!has_ablation(o.ablations, "no-da")) {
    std::vector<Scene> target = load_scene_dir(o.target_dir);
    result = self_train(teacher, target, trainer, model, keypoints, o.rounds, config);
  }

  std::vector<Scene> holdout;
  if (!o.holdout_dir.empty()) holdout = load_scene_dir(o.holdout_dir);
  auto ap_of = [&](const Predictor& p) {
    return holdout.empty() ? 0.0
                           : holdout_ap(p, holdout, model, keypoints, config.pipeline,
                                        o.threshold_frac, o.min_visibility, o.jobs);
  };

  std::vector<io::RoundRow> rows;
  io::RoundRow teacher_row;
  teacher_row.report.round = 0;
  teacher_row.ap = ap_of(*teacher);
  rows.push_back(teacher_row);
  double last_ap = teacher_row.ap;
  for (std::size_t i = 0; i < result.rounds.size(); ++i) {
    io::RoundRow row;
    row.report = result.rounds[i];
    row.report.round += 1;
    if (i < result.round_predictors.size()) {
      last_ap = ap_of(*result.round_predictors[i]);
    }
    row.ap = last_ap;
    rows.push_back(row);
  }
  fs::path csv = fs::path(o.out_dir) / "rounds.csv";
  io::write_rounds_csv(csv, rows);

  io::MetricsReport report;
  report.object_id = model.id;
  report.ap = rows.back().ap;
  report.threshold_frac = o.threshold_frac;
  report.min_visibility = o.min_visibility;
  if (!holdout.empty()) {
    for (const Scene& scene : holdout) {
      report.eligible += count_eligible(scene, o.min_visibility);
    }
  }
  fs::path metrics = fs::path(o.out_dir) / "self_train_metrics.json";
  io::write_metrics(metrics, report, prov);
  if (result.halted_early) {
    std::cerr << "binpose: self-train halted early, a round accepted nothing\n";
  }
  std::cout << csv.string() << "\n" << metrics.string() << "\n";
  return 0;
}

// --------------------------------------------------------------------- eval

struct EvalOpts {
  std::string object;
  std::string scene;
  std::string poses;
  std::string scenes_dir;
  std::string poses_dir;
  double threshold_frac = 0.1;
  double min_visibility = 0.5;
  std::uint64_t seed = 0;
  std::string out;
  std::string pr_csv;
  std::string out_dir = ".";
  std::string config_file;
  ConfigMap map;
};

int run_eval(EvalOpts& o) {
  apply_config_file(o.map, o.config_file);
  bool single = !o.scene.empty();
  if (single == !o.scenes_dir.empty()) {
    throw UsageError("give exactly one of --scene and --scenes-dir");
  }
  if (single && o.poses.empty()) throw UsageError("--scene needs --poses");
  if (!single && o.poses_dir.empty()) throw UsageError("--scenes-dir needs --poses-dir");
  io::Provenance prov = make_provenance("eval", o.map, o.seed);

  ObjectModel model = io::load_object_spec(o.object);
  std::vector<fs::path> files = single ? std::vector<fs::path>{fs::path(o.scene)}
                                       : list_scene_files(o.scenes_dir);
  std::vector<MatchedEstimate> pooled;
  std::size_t eligible = 0;
  std::size_t tp = 0, fp = 0, ignored = 0;
  for (const auto& file : files) {
    Scene scene = io::read_scene(file, sidecar_path(file));
    fs::path poses = single ? fs::path(o.poses)
                            : fs::path(o.poses_dir) / (file.stem().string() + "_poses.json");
    std::vector<PoseEstimate> estimates = io::read_estimates(poses);
    std::vector<MatchedEstimate> matches =
        match_estimates(estimates, scene, model, o.threshold_frac, o.min_visibility);
    for (const auto& m : matches) {
      if (m.outcome == MatchOutcome::tp) ++tp;
      else if (m.outcome == MatchOutcome::fp) ++fp;
      else ++ignored;
    }
    eligible += count_eligible(scene, o.min_visibility);
    pooled.insert(pooled.end(), matches.begin(), matches.end());
  }
  PRCurve curve = pr_curve(pooled, eligible);

  io::MetricsReport report;
  report.object_id = model.id;
  report.ap = curve.ap;
  report.eligible = eligible;
  report.true_positives = tp;
  report.false_positives = fp;
  report.ignored = ignored;
  report.threshold_frac = o.threshold_frac;
  report.min_visibility = o.min_visibility;
  fs::path out = o.out.empty() ? fs::path(o.out_dir) / "metrics.json" : fs::path(o.out);
  io::write_metrics(out, report, prov);
  if (!o.pr_csv.empty()) io::write_pr_csv(o.pr_csv, curve);
  std::cout << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keypoint-voting 6D pose estimation toolchain"};
  app.require_subcommand(1);

  KeypointsOpts kp;
  CLI::App* kp_cmd = app.add_subcommand("keypoints", "select keypoints for an object");
  kp_cmd->add_option("--object", kp.object, "object spec JSON or zoo:<name>")->required();
  kp_cmd->add_option("--seed", kp.seed, "axis selection seed");
  kp_cmd->add_option("--out", kp.out, "output path");
  kp_cmd->add_option("--out-dir", kp.out_dir, "output directory")->envname("BINPOSE_OUT_DIR");
  kp_cmd->add_option("--config", kp.config_file, "JSON config overriding flags");
  bind_value(kp.map, "object", kp.object);
  bind_value(kp.map, "seed", kp.seed);
  bind_value(kp.map, "out", kp.out, false);
  bind_value(kp.map, "out-dir", kp.out_dir, false);

  SynthOpts sy;
  CLI::App* sy_cmd = app.add_subcommand("synth", "synthesize bin-picking scenes");
  sy_cmd->add_option("--object", sy.object, "object spec JSON or zoo:<name>")->required();
  sy_cmd->add_option("--scenes", sy.scenes, "number of scenes");
  sy_cmd->add_option("--instances", sy.instances, "instances per scene");
  sy_cmd->add_option("--seed", sy.seed, "master seed");
  sy_cmd->add_option("--bin-min", sy.bin_min, "bin lower corner")->expected(3);
  sy_cmd->add_option("--bin-max", sy.bin_max, "bin upper corner")->expected(3);
  sy_cmd->add_option("--shift-dropout", sy.shift_dropout, "domain shift: dropout probability");
  sy_cmd->add_option("--shift-z-noise", sy.shift_z_noise, "domain shift: z noise std");
  sy_cmd->add_option("--shift-resample-bias", sy.shift_resample_bias,
                     "domain shift: density ramp along x");
  sy_cmd->add_option("--prefix", sy.prefix, "scene file prefix");
  sy_cmd->add_option("--out-dir", sy.out_dir, "output directory")->envname("BINPOSE_OUT_DIR");
  sy_cmd->add_option("--jobs", sy.jobs, "worker threads");
  sy_cmd->add_option("--config", sy.config_file, "JSON config overriding flags");
  bind_value(sy.map, "object", sy.object);
  bind_value(sy.map, "scenes", sy.scenes);
  bind_value(sy.map, "instances", sy.instances);
  bind_value(sy.map, "seed", sy.seed);
  bind_value(sy.map, "bin-min", sy.bin_min);
  bind_value(sy.map, "bin-max", sy.bin_max);
  bind_value(sy.map, "shift-dropout", sy.shift_dropout);
  bind_value(sy.map, "shift-z-noise", sy.shift_z_noise);
  bind_value(sy.map, "shift-resample-bias", sy.shift_resample_bias);
  bind_value(sy.map, "prefix", sy.prefix, false);
  bind_value(sy.map, "out-dir", sy.out_dir, false);

  EstimateOpts es;
  CLI::App* es_cmd = app.add_subcommand("estimate", "estimate instance poses");
  es_cmd->add_option("--object", es.object, "object spec JSON or zoo:<name>")->required();
  es_cmd->add_option("--scene", es.scene, "scene PLY (JSON sidecar beside it)");
  es_cmd->add_option("--scenes-dir", es.scenes_dir, "directory of scene PLYs");
  es_cmd->add_flag("--oracle", es.oracle, "use the ground-truth-driven predictor");
  es_cmd->add_option("--sigma", es.sigma, "oracle keypoint noise, fraction of diameter");
  es_cmd->add_option("--p-amb", es.p_amb, "oracle symmetry ambiguity probability");
  es_cmd->add_option("--p-out", es.p_out, "oracle outlier probability");
  es_cmd->add_option("--visibility-noise", es.visibility_noise, "oracle visibility noise std");
  es_cmd->add_option("--keypoint-seed", es.keypoint_seed, "keypoint axis seed");
  es_cmd->add_option("--seed", es.seed, "oracle noise seed");
  es_cmd->add_option("--ablation", es.ablations, "ablations: no-kf");
  es_cmd->add_option("--out", es.out, "output path (single scene only)");
  es_cmd->add_option("--out-dir", es.out_dir, "output directory")->envname("BINPOSE_OUT_DIR");
  es_cmd->add_option("--jobs", es.jobs, "worker threads");
  es_cmd->add_option("--config", es.config_file, "JSON config overriding flags");
  add_pipeline_opts(es_cmd, es.pipeline, es.map);
  bind_value(es.map, "object", es.object);
  bind_value(es.map, "scene", es.scene, false);
  bind_value(es.map, "scenes-dir", es.scenes_dir, false);
  bind_value(es.map, "oracle", es.oracle);
  bind_value(es.map, "sigma", es.sigma);
  bind_value(es.map, "p-amb", es.p_amb);
  bind_value(es.map, "p-out", es.p_out);
  bind_value(es.map, "visibility-noise", es.visibility_noise);
  bind_value(es.map, "keypoint-seed", es.keypoint_seed);
  bind_value(es.map, "seed", es.seed);
  bind_value(es.map, "ablation", es.ablations);
  bind_value(es.map, "out", es.out, false);
  bind_value(es.map, "out-dir", es.out_dir, false);

  PseudoLabelOpts pl;
  CLI::App* pl_cmd = app.add_subcommand("pseudo-label", "score estimates into pseudo-labels");
  pl_cmd->add_option("--object", pl.object, "object spec JSON or zoo:<name>")->required();
  pl_cmd->add_option("--scene", pl.scene, "scene PLY");
  pl_cmd->add_option("--poses", pl.poses, "estimates JSON for --scene");
  pl_cmd->add_option("--scenes-dir", pl.scenes_dir, "directory of scene PLYs");
  pl_cmd->add_option("--poses-dir", pl.poses_dir, "directory of *_poses.json");
  pl_cmd->add_option("--kappa", pl.kappa, "threshold spread factor");
  pl_cmd->add_option("--keypoint-seed", pl.keypoint_seed, "keypoint axis seed");
  pl_cmd->add_option("--seed", pl.seed, "provenance seed");
  pl_cmd->add_option("--ablation", pl.ablations, "ablations: chamfer, no-eks");
  pl_cmd->add_option("--out", pl.out, "output path (single scene only)");
  pl_cmd->add_option("--out-dir", pl.out_dir, "output directory")->envname("BINPOSE_OUT_DIR");
  pl_cmd->add_option("--config", pl.config_file, "JSON config overriding flags");
  bind_value(pl.map, "object", pl.object);
  bind_value(pl.map, "scene", pl.scene, false);
  bind_value(pl.map, "poses", pl.poses, false);
  bind_value(pl.map, "scenes-dir", pl.scenes_dir, false);
  bind_value(pl.map, "poses-dir", pl.poses_dir, false);
  bind_value(pl.map, "kappa", pl.kappa);
  bind_value(pl.map, "keypoint-seed", pl.keypoint_seed);
  bind_value(pl.map, "seed", pl.seed);
  bind_value(pl.map, "ablation", pl.ablations);
  bind_value(pl.map, "out", pl.out, false);
  bind_value(pl.map, "out-dir", pl.out_dir, false);

  SelfTrainOpts st;
  CLI::App* st_cmd = app.add_subcommand("self-train", "teacher-student adaptation rounds");
  st_cmd->add_option("--object", st.object, "object spec JSON or zoo:<name>")->required();
  st_cmd->add_option("--source-dir", st.source_dir, "labeled source scenes")->required();
  st_cmd->add_option("--target-dir", st.target_dir, "unlabeled target scenes")->required();
  st_cmd->add_option("--holdout-dir", st.holdout_dir, "held-out target scenes for AP");
  st_cmd->add_option("--rounds", st.rounds, "self-training rounds");
  st_cmd->add_option("--kappa", st.kappa, "threshold spread factor");
  st_cmd->add_option("--keypoint-seed", st.keypoint_seed, "keypoint axis seed");
  st_cmd->add_option("--seed", st.seed, "master seed");
  st_cmd->add_option("--knn-radius-frac", st.knn_radius_frac,
                     "descriptor radius, fraction of diameter");
  st_cmd->add_option("--knn-max-entries", st.knn_max_entries, "database size cap");
  st_cmd->add_flag("--retain-source,!--no-retain-source", st.retain_source,
                   "students keep the source database");
  st_cmd->add_option("--threshold-frac", st.threshold_frac, "AP distance threshold");
  st_cmd->add_option("--min-visibility", st.min_visibility, "AP eligibility threshold");
  st_cmd->add_option("--ablation", st.ablations, "ablations: no-da, no-eks, chamfer, no-kf");
  st_cmd->add_option("--out-dir", st.out_dir, "output directory")->envname("BINPOSE_OUT_DIR");
  st_cmd->add_option("--jobs", st.jobs, "worker threads");
  st_cmd->add_option("--config", st.config_file, "JSON config overriding flags");
  add_pipeline_opts(st_cmd, st.pipeline, st.map);
  bind_value(st.map, "object", st.object);
  bind_value(st.map, "source-dir", st.source_dir, false);
  bind_value(st.map, "target-dir", st.target_dir, false);
  bind_value(st.map, "holdout-dir", st.holdout_dir, false);
  bind_value(st.map, "rounds", st.rounds);
  bind_value(st.map, "kappa", st.kappa);
  bind_value(st.map, "keypoint-seed", st.keypoint_seed);
  bind_value(st.map, "seed", st.seed);
  bind_value(st.map, "knn-radius-frac", st.knn_radius_frac);
  bind_value(st.map, "knn-max-entries", st.knn_max_entries);
  bind_value(st.map, "retain-source", st.retain_source);
  bind_value(st.map, "threshold-frac", st.threshold_frac);
  bind_value(st.map, "min-visibility", st.min_visibility);
  bind_value(st.map, "ablation", st.ablations);
  bind_value(st.map, "out-dir", st.out_dir, false);

  EvalOpts ev;
  CLI::App* ev_cmd = app.add_subcommand("eval", "score estimates against ground truth");
  ev_cmd->add_option("--object", ev.object, "object spec JSON or zoo:<name>")->required();
  ev_cmd->add_option("--scene", ev.scene, "scene PLY");
  ev_cmd->add_option("--poses", ev.poses, "estimates JSON for --scene");
  ev_cmd->add_option("--scenes-dir", ev.scenes_dir, "directory of scene PLYs");
  ev_cmd->add_option("--poses-dir", ev.poses_dir, "directory of *_poses.json");
  ev_cmd->add_option("--threshold-frac", ev.threshold_frac, "distance threshold, fraction of diameter");
  ev_cmd->add_option("--min-visibility", ev.min_visibility, "eligibility threshold");
  ev_cmd->add_option("--seed", ev.seed, "provenance seed");
  ev_cmd->add_option("--out", ev.out, "metrics output path");
  ev_cmd->add_option("--pr-csv", ev.pr_csv, "write the PR curve here");
  ev_cmd->add_option("--out-dir", ev.out_dir, "output directory")->envname("BINPOSE_OUT_DIR");
  ev_cmd->add_option("--config", ev.config_file, "JSON config overriding flags");
  bind_value(ev.map, "object", ev.object);
  bind_value(ev.map, "scene", ev.scene, false);
  bind_value(ev.map, "poses", ev.poses, false);
  bind_value(ev.map, "scenes-dir", ev.scenes_dir, false);
  bind_value(ev.map, "poses-dir", ev.poses_dir, false);
  bind_value(ev.map, "threshold-frac", ev.threshold_frac);
  bind_value(ev.map, "min-visibility", ev.min_visibility);
  bind_value(ev.map, "seed", ev.seed);
  bind_value(ev.map, "out", ev.out, false);
  bind_value(ev.map, "pr-csv", ev.pr_csv, false);
  bind_value(ev.map, "out-dir", ev.out_dir, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (kp_cmd->parsed()) return run_keypoints(kp);
    if (sy_cmd->parsed()) return run_synth(sy);
    if (es_cmd->parsed()) return run_estimate(es);
    if (pl_cmd->parsed()) return run_pseudo_label(pl);
    if (st_cmd->parsed()) return run_self_train(st);
    if (ev_cmd->parsed()) return run_eval(ev);
  } catch (const UsageError& e) {
    std::cerr << "binpose: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "binpose: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
