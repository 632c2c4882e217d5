#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "binpose/evaluation.hpp"
#include "binpose/keypoints.hpp"
#include "binpose/object_model.hpp"
#include "binpose/pipeline.hpp"
#include "binpose/self_training.hpp"
#include "binpose/synth.hpp"

namespace binpose::io {

/// Embedded in every output file so results can be traced back to the exact
/// configuration and seed that produced them.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// FNV-1a 64 over the canonical config serialization, as fixed-width hex.
std::string hash_config(const std::string& canonical);

/// Shortest round-trip decimal form.
std::string format_double(double value);

/// Reads .ply (ASCII or binary little-endian; x/y/z float32/float64, optional
/// instance_id integer and visibility float properties) or whitespace XYZ
/// text. Errors carry the path plus line or byte offset.
PointCloud load_point_cloud(const std::filesystem::path& path);

/// ASCII PLY with x/y/z and any instance_id/visibility channels the cloud
/// carries; provenance goes into comment lines.
void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud,
                       const Provenance& provenance);

/// Object spec reference: either "zoo:<name>" or a JSON file
/// {id, model_points, symmetry{class, rotation_axis?, mirror_plane_axes?,
/// group?}} with model_points relative to the spec file.
ObjectModel load_object_spec(const std::string& ref);

void write_keypoints(const std::filesystem::path& path, const std::string& object_id,
                     const KeypointSet& keypoints, const Provenance& provenance);
KeypointSet read_keypoints(const std::filesystem::path& path);

/// Scene = PLY cloud plus JSON sidecar (poses, visibility, bin, seed).
void write_scene(const std::filesystem::path& ply_path,
                 const std::filesystem::path& json_path, const Scene& scene,
                 const std::string& object_id, const Provenance& provenance);
Scene read_scene(const std::filesystem::path& ply_path,
                 const std::filesystem::path& json_path);

/// Estimates keep their member indices so later stages can rebuild instance
/// point sets.
void write_estimates(const std::filesystem::path& path,
                     const std::vector<PoseEstimate>& estimates,
                     const std::string& object_id, const std::string& scene_ref,
                     const Provenance& provenance);
std::vector<PoseEstimate> read_estimates(const std::filesystem::path& path);

void write_pseudo_labels(const std::filesystem::path& path, const PseudoLabelSet& labels,
                         const Provenance& provenance);
PseudoLabelSet read_pseudo_labels(const std::filesystem::path& path);

struct MetricsReport {
  std::string object_id;
  double ap = 0.0;
  std::size_t eligible = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t ignored = 0;
  double threshold_frac = 0.0;
  double min_visibility = 0.0;
};

void write_metrics(const std::filesystem::path& path, const MetricsReport& report,
                   const Provenance& provenance);
void write_pr_csv(const std::filesystem::path& path, const PRCurve& curve);

struct RoundRow {
  RoundReport report;
  double ap = 0.0;  // holdout AP of the predictor this round produced
};
void write_rounds_csv(const std::filesystem::path& path, const std::vector<RoundRow>& rows);

}  // namespace binpose::io
