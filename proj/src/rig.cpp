// SPDX-License-Identifier: Apache-2.0
#include "surfhead/rig.hpp"

#include <cmath>
#include <sstream>

#include "surfhead/rng.hpp"

namespace surfhead {

BlendTopology BlendTopology::uniform(Adjacency adj)
{
    BlendTopology topo;
    topo.logits.resize(adj.neighbors.size());
    for (std::size_t t = 0; t < adj.neighbors.size(); ++t) {
        topo.logits[t].assign(adj.neighbors[t].size(), 0.0);
    }
    topo.adjacency = std::move(adj);
    return topo;
}

std::vector<double> BlendTopology::weights(int tri) const
{
    return blend_weights(logits.at(static_cast<std::size_t>(tri)));
}

std::vector<Surfel> bind_surfels(const TriMesh& mesh, int per_triangle, std::uint64_t seed)
{
    validate_mesh(mesh);
    Rng rng(seed);
    std::vector<Surfel> surfels;
    surfels.reserve(static_cast<std::size_t>(mesh.face_count() * per_triangle));

    for (int t = 0; t < mesh.face_count(); ++t) {
        const auto& f = mesh.faces[static_cast<std::size_t>(t)];
        const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
        const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
        const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
        const GaFrame frame = build_ga_frame(a, b, c);
        const double ell = mean_edge_length(mesh, t);

        for (int k = 0; k < per_triangle; ++k) {
            Surfel s;
            s.parent = t;
            s.R_c = frame.R_p;
            s.s1 = ell / 3.0;
            s.s2 = ell / 3.0;
            s.sh = SHBlock::constant(Vec3::Constant(0.5));
            if (k == 0) {
                s.mu_c = Vec3::Zero();
            } else {
                // Uniform barycentric sample, expressed as an offset from
                // the barycenter so the rest pose stays exact.
                double u = rng.uniform();
                double v = rng.uniform();
                if (u + v > 1.0) {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                const Vec3 point = a + u * (b - a) + v * (c - a);
                s.mu_c = point - frame.T_p;
            }
            surfels.push_back(std::move(s));
        }
    }
    return surfels;
}

Mat3 jacobian(const Mat3& e, const Mat3& e_def, double tol)
{
    const double det = e.determinant();
    if (!(std::abs(det) > scaled_det_tol(e, tol))) {
        std::ostringstream msg;
        msg << "jacobian: edge matrix determinant " << det << " below tolerance";
        throw SingularMatrix(msg.str());
    }
    return e_def * e.inverse();
}

std::vector<double> blend_weights(std::span<const double> logits)
{
    std::vector<double> w(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        w[i] = 1.0 / (1.0 + std::exp(-logits[i]));
        total += w[i];
    }
    for (double& wi : w) wi /= total;
    return w;
}

Mat3 jbs_from_factors(std::span<const Vec3> log_u, std::span<const Mat3> p,
                      std::span<const double> weights)
{
    Vec3 omega = Vec3::Zero();
    Mat3 p_b = Mat3::Zero();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        omega += weights[i] * log_u[i];
        p_b += weights[i] * p[i];
    }
    return rotation_exp({omega}) * p_b;
}

Mat3 jbs(std::span<const Mat3> jacobians, std::span<const double> weights)
{
    std::vector<Vec3> log_u(jacobians.size());
    std::vector<Mat3> p(jacobians.size());
    for (std::size_t i = 0; i < jacobians.size(); ++i) {
        try {
            const PolarFactors f = polar_decompose(jacobians[i]);
            log_u[i] = rotation_log(f.U).omega;
            p[i] = f.P;
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "jbs: neighbor " << i << ": " << e.what();
            if (dynamic_cast<const NearPiRotation*>(&e) != nullptr) throw NearPiRotation(msg.str());
            throw SingularOrInverted(msg.str());
        }
    }
    return jbs_from_factors(log_u, p, weights);
}

Mat3 lerp_blend(std::span<const Mat3> jacobians, std::span<const double> weights)
{
    Mat3 out = Mat3::Zero();
    for (std::size_t i = 0; i < jacobians.size(); ++i) {
        out += weights[i] * jacobians[i];
    }
    return out;
}

Vec3 deform_normal(const Vec3& n_c, const Mat3& j_b)
{
    return (inverse_transpose(j_b) * n_c).normalized();
}

DeformedSurfel deform_surfel(const Surfel& s, const Mat3& j_b, const Vec3& t_p)
{
    DeformedSurfel out;
    out.mu = j_b * s.mu_c + t_p;
    out.H = j_b * s.R_c * s.scale_matrix();
    out.n_d = deform_normal(s.normal_c(), j_b);
    out.alpha = s.alpha;
    out.sh = s.sh;
    out.U_b = polar_decompose(j_b).U;
    return out;
}

DeformedSurfel ga_deform_surfel(const Surfel& s, const GaFrame& canonical, const GaFrame& deformed)
{
    const Mat3 r_rel = deformed.R_p * canonical.R_p.transpose();
    const double s_rel = deformed.s_p / canonical.s_p;

    DeformedSurfel out;
    out.mu = s_rel * (r_rel * s.mu_c) + deformed.T_p;
    out.H = r_rel * s.R_c * (s_rel * s.scale_matrix());
    out.n_d = r_rel * s.normal_c();
    out.alpha = s.alpha;
    out.sh = s.sh;
    out.U_b = r_rel;
    return out;
}

Vec3 rotate_view_dir(const Vec3& d, const Mat3& u_b)
{
    return u_b.transpose() * d;
}

PoseJacobians build_pose_jacobians(const TriMesh& canonical, const TriMesh& deformed)
{
    validate_pair(canonical, deformed);

    const int nt = canonical.face_count();
    PoseJacobians pose;
    pose.J.resize(static_cast<std::size_t>(nt));
    pose.U.resize(static_cast<std::size_t>(nt));
    pose.log_u.resize(static_cast<std::size_t>(nt));
    pose.P.resize(static_cast<std::size_t>(nt));
    pose.frames_canonical.resize(static_cast<std::size_t>(nt));
    pose.frames_deformed.resize(static_cast<std::size_t>(nt));

    for (int t = 0; t < nt; ++t) {
        const auto& f = canonical.faces[static_cast<std::size_t>(t)];
        const TriangleFrame can = build_triangle_frame(
            canonical.vertices[static_cast<std::size_t>(f[0])],
            canonical.vertices[static_cast<std::size_t>(f[1])],
            canonical.vertices[static_cast<std::size_t>(f[2])]);
        const TriangleFrame def = build_triangle_frame(
            deformed.vertices[static_cast<std::size_t>(f[0])],
            deformed.vertices[static_cast<std::size_t>(f[1])],
            deformed.vertices[static_cast<std::size_t>(f[2])]);

        const std::size_t idx = static_cast<std::size_t>(t);
        pose.J[idx] = jacobian(can.E, def.E);
        try {
            const PolarFactors factors = polar_decompose(pose.J[idx]);
            pose.U[idx] = factors.U;
            pose.P[idx] = factors.P;
            pose.log_u[idx] = rotation_log(factors.U).omega;
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "triangle " << t << ": " << e.what();
            if (dynamic_cast<const NearPiRotation*>(&e) != nullptr) throw NearPiRotation(msg.str());
            throw SingularOrInverted(msg.str());
        }
        pose.frames_canonical[idx] = can.ga();
        pose.frames_deformed[idx] = def.ga();
    }
    return pose;
}

Mat3 blended_jacobian(const PoseJacobians& pose, const BlendTopology& topology, int tri)
{
    const auto& neighbors = topology.adjacency.neighbors.at(static_cast<std::size_t>(tri));
    const std::vector<double> w = topology.weights(tri);

    Vec3 omega = Vec3::Zero();
    Mat3 p_b = Mat3::Zero();
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        const std::size_t n = static_cast<std::size_t>(neighbors[i]);
        omega += w[i] * pose.log_u[n];
        p_b += w[i] * pose.P[n];
    }
    return rotation_exp({omega}) * p_b;
}

std::vector<DeformedSurfel> deform_all(std::span<const Surfel> surfels, const PoseJacobians& pose,
                                       const BlendTopology& topology)
{
    // One blended Jacobian per triangle, shared by all its surfels.
    std::vector<Mat3> j_b(pose.J.size());
    std::vector<bool> built(pose.J.size(), false);

    std::vector<DeformedSurfel> out;
    out.reserve(surfels.size());
    for (const Surfel& s : surfels) {
        const std::size_t t = static_cast<std::size_t>(s.parent);
        if (!built[t]) {
            j_b[t] = blended_jacobian(pose, topology, s.parent);
            built[t] = true;
        }
        out.push_back(deform_surfel(s, j_b[t], pose.frames_deformed[t].T_p));
    }
    return out;
}

std::vector<DeformedSurfel> ga_deform_all(std::span<const Surfel> surfels,
                                          const PoseJacobians& pose)
{
    std::vector<DeformedSurfel> out;
    out.reserve(surfels.size());
    for (const Surfel& s : surfels) {
        const std::size_t t = static_cast<std::size_t>(s.parent);
        out.push_back(ga_deform_surfel(s, pose.frames_canonical[t], pose.frames_deformed[t]));
    }
    return out;
}

} // namespace surfhead
