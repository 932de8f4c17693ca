// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "surfhead/appearance.hpp"
#include "surfhead/mesh.hpp"

namespace surfhead {

/// One canonical 2D Gaussian disk bound to a parent triangle. The tangent
/// frame R_c has columns [r1; r2; n] with n = r1 x r2; the third scale is
/// fixed at 1 (flat disk).
struct Surfel {
    int parent = 0;
    Vec3 mu_c = Vec3::Zero(); ///< offset from the canonical parent barycenter
    Mat3 R_c = Mat3::Identity();
    double s1 = 1.0;
    double s2 = 1.0;
    double alpha = 0.5;
    SHBlock sh;
    bool eye_flag = false;

    Vec3 normal_c() const { return R_c.col(2); }
    Mat3 scale_matrix() const
    {
        Mat3 s = Mat3::Zero();
        s(0, 0) = s1;
        s(1, 1) = s2;
        s(2, 2) = 1.0;
        return s;
    }
};

/// A surfel carried into world space: H is the half-covariance (Sigma^{1/2}),
/// whose first two columns span the splat plane; U_b is the rotation factor
/// used to rotate view directions for appearance lookups.
struct DeformedSurfel {
    Vec3 mu = Vec3::Zero();
    Mat3 H = Mat3::Identity();
    Vec3 n_d = Vec3::UnitZ();
    double alpha = 0.5;
    SHBlock sh;
    Mat3 U_b = Mat3::Identity();
};

/// Adjacency plus per-(triangle, neighbor) blend logits shared by all
/// surfels of a triangle. Weights are sigmoid-activated then normalized,
/// so they are strictly positive and sum to 1.
struct BlendTopology {
    Adjacency adjacency;
    std::vector<std::vector<double>> logits;

    static BlendTopology uniform(Adjacency adj);

    std::vector<double> weights(int tri) const;
};

/// Scatters `per_triangle` surfels on every face: the first at the
/// barycenter, the rest jittered in-plane; frames from the parent's GA
/// frame, scales ell/3 from the parent's mean edge length. Deterministic
/// for a given seed.
std::vector<Surfel> bind_surfels(const TriMesh& mesh, int per_triangle, std::uint64_t seed);

/// Deformation gradient E_def * E^{-1}. Throws SingularMatrix when E is
/// singular at the scaled tolerance.
Mat3 jacobian(const Mat3& e, const Mat3& e_def, double tol = kDefaultTol);

/// Sigmoid-activated convex weights: sigma(l_i) / sum_j sigma(l_j).
std::vector<double> blend_weights(std::span<const double> logits);

/// Blends rotation factors in log-space and stretch factors linearly:
/// exp(sum w_i log U_i) * sum w_i P_i. Decomposition errors carry the
/// offending neighbor index.
Mat3 jbs(std::span<const Mat3> jacobians, std::span<const double> weights);

/// Same blend given precomputed polar factors (log U_i, P_i).
Mat3 jbs_from_factors(std::span<const Vec3> log_u, std::span<const Mat3> p,
                      std::span<const double> weights);

/// Element-wise weighted sum, the prior-work baseline.
Mat3 lerp_blend(std::span<const Mat3> jacobians, std::span<const double> weights);

/// H = J_b R_c S_c, mu = J_b mu_c + T_p, normal by the inverse-transpose
/// rule, U_b from the polar factorization of J_b.
DeformedSurfel deform_surfel(const Surfel& s, const Mat3& j_b, const Vec3& t_p);

/// normalize(J_b^{-T} n_c).
Vec3 deform_normal(const Vec3& n_c, const Mat3& j_b);

/// Similarity-transform baseline: relative rotation R_p^def (R_p^can)^T and
/// relative isotropic scale s_p^def / s_p^can; normals ride the rotation.
DeformedSurfel ga_deform_surfel(const Surfel& s, const GaFrame& canonical,
                                const GaFrame& deformed);

/// U_b^T d.
Vec3 rotate_view_dir(const Vec3& d, const Mat3& u_b);

/// Per-pose cache: triangle Jacobians, their polar factors, and deformed
/// barycenters/frames. Built once per deformed pose, then immutable.
struct PoseJacobians {
    std::vector<Mat3> J;
    std::vector<Mat3> U;
    std::vector<Vec3> log_u;
    std::vector<Mat3> P;
    std::vector<GaFrame> frames_canonical;
    std::vector<GaFrame> frames_deformed;
};

PoseJacobians build_pose_jacobians(const TriMesh& canonical, const TriMesh& deformed);

/// JBS over the triangle's adjacency with the topology's weights.
Mat3 blended_jacobian(const PoseJacobians& pose, const BlendTopology& topology, int tri);

/// Deforms every surfel with its parent's blended Jacobian.
std::vector<DeformedSurfel> deform_all(std::span<const Surfel> surfels, const PoseJacobians& pose,
                                       const BlendTopology& topology);

/// GA-baseline deformation of every surfel.
std::vector<DeformedSurfel> ga_deform_all(std::span<const Surfel> surfels,
                                          const PoseJacobians& pose);

} // namespace surfhead
