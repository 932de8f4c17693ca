// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surfhead/image.hpp"
#include "surfhead/render.hpp"

namespace surfhead {

struct EnergyConfig {
    double lambda_depth = 100.0;
    double lambda_normal = 0.05;
    double lambda_eye = 0.1;
    double beta = 0.8;       ///< photometric mix: beta L1 + (1 - beta) D-SSIM
    double eps_pos = 1.0;    ///< position hinge, parent-edge-length units
    double eps_scale = 0.6;  ///< scale hinge, parent-edge-length units
    double lambda_reg = 0.01;///< weight on both binding regularizers
    bool freeze_eyes = true; ///< exclude eye surfels' R_c and mu_c from fits
};

/// Mean absolute difference over all pixels and channels.
double l1_loss(const Image& a, const Image& b);

/// Mean SSIM with the standard 11x11 Gaussian window (sigma 1.5,
/// k1 = 0.01, k2 = 0.03, dynamic range 1), valid-window convolution,
/// averaged over channels. Throws DimensionMismatch on size mismatch or
/// images smaller than the window.
double ssim(const Image& a, const Image& b);

/// beta * L1 + (1 - beta) * (1 - SSIM) / 2.
double photometric_loss(const Image& rendered, const Image& target, double beta);

/// Per pixel sum over ordered pairs i != j of w_i w_j |t_i - t_j|,
/// averaged over all pixels.
double depth_distortion(const RenderBuffers& buffers);

/// Per covered pixel sum of w_i (1 - n_i . N) against the central-difference
/// normal of the backprojected depth surface, averaged over covered interior
/// pixels. Both normals are oriented toward the camera.
double normal_consistency(const RenderBuffers& buffers, const Camera& camera);

/// sum over eye-flagged surfels of (1 - alpha)^2.
double eye_opacity_loss(std::span<const Surfel> surfels);

/// (position, scaling) hinge regularizers measured in parent-edge-length
/// units, each averaged over surfels.
std::pair<double, double> binding_regularizers(std::span<const Surfel> surfels,
                                               const TriMesh& mesh, double eps_pos,
                                               double eps_scale);

struct EnergyBreakdown {
    double photo = 0.0;
    double depth = 0.0;
    double normal = 0.0;
    double eye = 0.0;
    double scaling = 0.0;
    double position = 0.0;
    double total = 0.0;
};

/// Weighted combination; kept separate so tests can feed synthetic terms.
double weighted_total(const EnergyConfig& cfg, double photo, double depth, double normal,
                      double eye, double scaling, double position);

EnergyBreakdown total_energy(const RenderBuffers& buffers, const Image& target,
                             std::span<const Surfel> surfels, const TriMesh& mesh,
                             const Camera& camera, const EnergyConfig& cfg);

/// Everything needed to pose and render one toy scene.
struct FitScene {
    TriMesh canonical;
    std::optional<TriMesh> deformed;
    std::vector<Surfel> surfels;
    BlendTopology topology;
    SpecularHead head = SpecularHead::zero();
    Camera camera;
    Vec3 background = Vec3::Zero();
    double far = 10.0;
    int threads = 1;
};

/// Deform (identity pose when no deformed mesh is set) and render.
RenderBuffers render_scene(const FitScene& scene);

/// Selects which parameter groups a fit may touch.
struct TrainMask {
    bool sh = false;
    bool alpha = false;
    bool logits = false;
    bool head = false;
    bool lobes = false;
    bool position = false; ///< mu_c
    bool rotation = false; ///< R_c, updated multiplicatively via axis-angle steps
};

struct FitState {
    int iterations = 0;
    double initial_total = 0.0;
    double final_total = 0.0;
    EnergyBreakdown last;
    std::vector<std::string> log_lines; ///< line-delimited JSON records
};

/// Minimizes total_energy by central-finite-difference gradient descent
/// with a backtracking line search (monotone in the accepted iterates).
/// Eye-flagged surfels' R_c and mu_c stay untouched when cfg.freeze_eyes
/// is set. Throws DivergedLoss when any term becomes non-finite.
FitState fit(FitScene& scene, const Image& target, const EnergyConfig& cfg,
             const TrainMask& mask, int iterations);

} // namespace surfhead
