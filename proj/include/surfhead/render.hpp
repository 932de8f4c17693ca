// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "surfhead/image.hpp"
#include "surfhead/rig.hpp"

namespace surfhead {

inline constexpr double kCutoff = 3.0;            ///< 3-sigma disk support
inline constexpr double kTNear = 1e-4;            ///< minimum hit depth, scene units
inline constexpr double kMinTransmittance = 1e-4; ///< early-termination threshold

struct Camera {
    Vec3 position{0.0, 0.0, 5.0};
    Vec3 look_at{0.0, 0.0, 0.0};
    Vec3 up{0.0, 1.0, 0.0};
    double fov_y = 45.0; ///< degrees
    int width = 64;
    int height = 64;

    /// Throws InvalidCamera on a bad field (fov out of (0, 180), size < 1,
    /// up parallel to the view direction).
    void validate() const;

    /// Orthonormal basis: forward toward look_at, right, true up.
    struct Basis {
        Vec3 forward, right, up;
    };
    Basis basis() const;

    /// Unit ray direction through a pixel position (px, py measured in
    /// pixels from the top-left corner; pass i + 0.5 for pixel centers).
    Vec3 ray_dir(const Basis& b, double px, double py) const;
};

struct SplatHit {
    int surfel = -1;
    double u = 0.0, v = 0.0; ///< local splat coordinates in scaled-tangent units
    double t = 0.0;          ///< ray depth, scene units
    double G = 0.0;          ///< exp(-(u^2 + v^2)/2)
    double alpha_eff = 0.0;  ///< alpha * G
};

/// Solves origin + t dir = mu + u h1 + v h2 for the splat plane spanned by
/// the first two columns of H. Misses (parallel ray, t <= t_near, or point
/// outside the cutoff disk) return nullopt.
std::optional<SplatHit> ray_splat_intersect(const Vec3& origin, const Vec3& dir,
                                            const DeformedSurfel& ds, double cutoff = kCutoff,
                                            double t_near = kTNear);

/// One compositing term retained for the energies: the splat's blending
/// weight w = alpha_eff * prod(1 - alpha_eff_j) over closer splats, its
/// depth, and its (camera-facing) normal.
struct HitWeight {
    int surfel = -1;
    double weight = 0.0;
    double t = 0.0;
    Vec3 normal = Vec3::Zero();
};

struct PixelRecord {
    Vec3 color = Vec3::Zero();
    double depth = 0.0;
    Vec3 normal = Vec3::Zero();
    double transmittance = 1.0;
    std::vector<HitWeight> weights;
};

/// Front-to-back alpha compositing of the given hits. Sorts by depth (ties
/// by surfel index), shades each splat through appearance::total_color,
/// early-terminates below kMinTransmittance, and composites the remaining
/// transmittance against the background. Splat normals are flipped toward
/// the camera before accumulation.
PixelRecord composite_pixel(std::vector<SplatHit> hits, std::span<const DeformedSurfel> surfels,
                            const SpecularHead& head, const Vec3& view_dir,
                            const Vec3& background, double far);

struct RenderBuffers {
    int width = 0;
    int height = 0;
    std::vector<Vec3> color;
    std::vector<double> depth;
    std::vector<Vec3> normal;
    std::vector<double> transmittance;
    std::vector<std::vector<HitWeight>> hits;

    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }
};

/// Renders all surfels through the pinhole camera. Deterministic and
/// independent of the thread count: pixels are partitioned by row and each
/// pixel is computed in isolation.
RenderBuffers render(std::span<const DeformedSurfel> surfels, const SpecularHead& head,
                     const Camera& camera, const Vec3& background, double far, int threads = 1);

/// Worst per-pixel violation of sum(w_i) + transmittance = 1.
double weight_closure_residual(const RenderBuffers& buffers);

/// Clamped color buffer as an Image.
Image buffers_to_image(const RenderBuffers& buffers);

} // namespace surfhead
