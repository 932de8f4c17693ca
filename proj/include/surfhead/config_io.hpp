// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "surfhead/energy.hpp"

namespace surfhead {

/// One run's worth of configuration, loaded from JSON. Referenced paths are
/// checked for existence at load time and numeric ranges validated.
struct RunConfig {
    std::string canonical_mesh;
    std::optional<std::string> deformed_mesh;
    std::optional<std::string> surfel_set;
    std::string output_dir = "out";
    Camera camera;
    Vec3 background = Vec3::Zero();
    double near = 0.01;
    double far = 10.0;
    AdjacencyMode adjacency = AdjacencyMode::Edge;
    int surfels_per_triangle = 1;
    int sh_degree = 3;
    int asg_grid = 4;
    std::uint64_t seed = 1;
    EnergyConfig energy;
    // Fit block.
    std::optional<std::string> fit_target;
    int fit_iterations = 200;
    TrainMask fit_mask;
};

RunConfig load_run_config(const std::string& path);

/// On-disk surfel set: records with quaternion rotations plus the blend
/// logits and the specular head. Quaternions are stored (w, x, y, z) with
/// w >= 0 and must be unit within 1e-6 on load.
struct SurfelSet {
    std::vector<Surfel> surfels;
    std::vector<std::vector<double>> blend_logits;
    SpecularHead head = SpecularHead::zero();
    int sh_degree = 3;
};

inline constexpr int kSurfelSchemaVersion = 1;

SurfelSet load_surfel_set(const std::string& path);
void save_surfel_set(const SurfelSet& set, const std::string& path);

/// Binary little-endian PLY of deformed surfels (positions, normals, the
/// two tangent scales, opacity) for external viewers.
void save_deformed_ply(std::span<const DeformedSurfel> surfels, const std::string& path);

Eigen::Vector4d quat_from_rotation(const Mat3& r); ///< (w, x, y, z), w >= 0
Mat3 rotation_from_quat(const Eigen::Vector4d& q);

} // namespace surfhead
