// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "surfhead/energy.hpp"

namespace surfhead {

/// Two-triangle strip sharing the edge (0,0,0)-(1,0,0), apexes at
/// y = -1 and y = +1, normals +z.
TriMesh make_hinge_mesh();

/// Copy with the +y apex rotated about the shared x-axis edge.
TriMesh bend_hinge(const TriMesh& hinge, double angle_rad);

/// Copy with every vertex scaled component-wise.
TriMesh stretch_mesh(const TriMesh& mesh, const Vec3& factors);

/// lerp_blend vs jbs between two fixed transforms (identity and an almost
/// half-turn about z), per blend weight.
struct InterpRow {
    double t = 0.0;
    double det_lerp = 0.0;
    double cond_lerp = 0.0;
    double det_jbs = 0.0;
    double cond_jbs = 0.0;
};
std::vector<InterpRow> interp_table();

/// Knobs for the stretched-hinge comparison scene.
struct HingeDemoParams {
    Vec3 stretch{2.5, 1.0, 1.0};
    double scale_shrink = 0.3; ///< applied to the bound surfel scales
    int image_size = 96;
    int per_triangle = 48;
    std::uint64_t seed = 7;
    int threads = 1;
};

/// Silhouette coverage of the anisotropically stretched hinge: pixels of
/// the deformed-mesh footprint missed by the Jacobian-deformed render vs
/// the GA-baseline render.
struct HingeCoverage {
    int target_pixels = 0;
    int gap_jacobian = 0;
    int gap_ga = 0;
};
HingeCoverage hinge_coverage(const HingeDemoParams& params = {});

/// Renders used by the coverage comparison, for writing out demo images.
struct HingeRenders {
    RenderBuffers jacobian;
    RenderBuffers ga;
    Camera camera;
};
HingeRenders hinge_renders(const HingeDemoParams& params = {});

/// One big opaque surfel filling the view; target rendered at the given
/// gray level, scene initialized at another. Fits the DC color.
struct GrayPatchSetup {
    FitScene scene;
    Image target;
};
GrayPatchSetup make_gray_patch(double target_gray = 0.8, double init_gray = 0.2);

/// Same scene with opacity as the unknown.
GrayPatchSetup make_opacity_patch(double target_alpha = 0.6, double init_alpha = 0.3);

/// Hinge bent by `angle_rad` whose target was rendered with self-only blend
/// weights; the scene starts from uniform logits.
struct HingeFitSetup {
    FitScene scene;
    Image target;
    double baseline_photo = 0.0; ///< photometric loss of the uniform-weight start
};
HingeFitSetup make_hinge_fit(double angle_rad, int image_size = 48, int per_triangle = 8,
                             std::uint64_t seed = 11);

/// Two-surfel scene with one eye-flagged surfel, for freeze tests.
GrayPatchSetup make_eye_scene();

} // namespace surfhead
