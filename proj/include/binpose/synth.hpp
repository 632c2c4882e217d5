#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "binpose/keypoints.hpp"
#include "binpose/object_model.hpp"
#include "binpose/prediction.hpp"
#include "binpose/rng.hpp"

namespace binpose {

/// Synthetic bin-picking scene with full ground truth. Per-instance
/// visibility is V_i = N_i / N_max where N_i counts the instance's points
/// surviving occlusion and N_max is the scene maximum.
struct Scene {
  PointCloud cloud;                 // instance_ids and visibility channels set
  std::vector<RigidPose> poses;     // per instance
  std::vector<double> visibility;   // per instance, N_i / N_max
  AxisAlignedBox bin;
  std::uint64_t seed = 0;
};

struct SynthParams {
  std::size_t grid_resolution = 128;  // top-down depth-grid cells per bin side
  int placement_budget = 1000;        // attempts per instance before giving up
};

/// Uniformly distributed random rotation (quaternion method).
Rot3 random_rotation(Rng& rng);

/// Drops instances into the bin at uniform random poses, rejecting
/// placements closer than half a diameter to an existing instance, then
/// keeps only the highest point per top-down grid cell as the visible
/// cloud. Throws std::runtime_error("bin overfull") when the placement
/// budget runs out.
Scene synth_scene(const ObjectModel& model, std::size_t n_instances,
                  const AxisAlignedBox& bin, std::uint64_t seed,
                  const SynthParams& params = {});

/// Error model of a keypoint-predicting network: outliers, symmetry
/// ambiguity, offset noise, visibility noise.
struct NoiseModel {
  double sigma = 0.0;             // keypoint noise std, fraction of diameter
  double p_amb = 0.0;             // chance of targeting a random equivalent
  double p_out = 0.0;             // chance of a uniform-in-bin outlier
  double visibility_noise = 0.0;  // visibility label noise std
};

/// Ground-truth-driven predictor with the configured corruption, standing in
/// for a trained network. Deterministic per seed.
PredictionField oracle_predictor(const Scene& scene, const KeypointSet& keypoints,
                                 const ObjectModel& model, const NoiseModel& noise,
                                 std::uint64_t seed);

/// Synthetic-to-real style corruption: dropout, depth noise along z, and a
/// sampling-density ramp across x. Poses are untouched; visibility is
/// recomputed from the surviving counts.
struct ShiftParams {
  double dropout = 0.0;        // uniform point removal probability
  double z_noise = 0.0;        // additive Gaussian std on z, absolute units
  double resample_bias = 0.0;  // extra removal probability ramping up along x
};

Scene domain_shift(const Scene& scene, const ShiftParams& params, std::uint64_t seed);

/// Built-in object generators, one per symmetry class:
///   cylinder  revolution (plus a flip)   hexprism  finite C6 (tapered)
///   brick     finite D2                  bracket   mirror (L profile)
///   tetra     no proper symmetry
/// Fixed internal sampling seeds make repeated calls identical.
ObjectModel zoo_object(std::string_view name, std::size_t n_points = 500);
std::vector<std::string> zoo_names();

}  // namespace binpose
