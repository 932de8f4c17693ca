// SPDX-License-Identifier: Apache-2.0
#include "surfhead/toy_scenes.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace surfhead {

TriMesh make_hinge_mesh()
{
    TriMesh mesh;
    mesh.vertices = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.5, -1.0, 0.0}, {0.5, 1.0, 0.0}};
    mesh.faces = {{0, 2, 1}, {0, 1, 3}};
    return mesh;
}

TriMesh bend_hinge(const TriMesh& hinge, double angle_rad)
{
    TriMesh out = hinge;
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    Vec3& q = out.vertices[3];
    q = Vec3(q.x(), c * q.y() - s * q.z(), s * q.y() + c * q.z());
    return out;
}

TriMesh stretch_mesh(const TriMesh& mesh, const Vec3& factors)
{
    TriMesh out = mesh;
    for (Vec3& v : out.vertices) v = v.cwiseProduct(factors);
    return out;
}

namespace {

Mat3 rot_z(double angle)
{
    AxisAngle w;
    w.omega = Vec3(0.0, 0.0, angle);
    return rotation_exp(w);
}

double condition_number(const Mat3& m)
{
    Eigen::JacobiSVD<Mat3> svd(m);
    const double smin = svd.singularValues().minCoeff();
    return smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                      : std::numeric_limits<double>::infinity();
}

bool point_in_triangle_2d(double px, double py, const Eigen::Vector2d& a,
                          const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
    auto side = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
        return (q.x() - p.x()) * (py - p.y()) - (q.y() - p.y()) * (px - p.x());
    };
    const double d0 = side(a, b);
    const double d1 = side(b, c);
    const double d2 = side(c, a);
    const bool has_neg = d0 < 0 || d1 < 0 || d2 < 0;
    const bool has_pos = d0 > 0 || d1 > 0 || d2 > 0;
    return !(has_neg && has_pos);
}

/// Screen-space footprint of the deformed mesh at pixel centers.
std::vector<bool> mesh_silhouette(const TriMesh& mesh, const Camera& camera)
{
    const Camera::Basis basis = camera.basis();
    const double tan_half = std::tan(0.5 * camera.fov_y * M_PI / 180.0);
    const double aspect = static_cast<double>(camera.width) / camera.height;

    auto project = [&](const Vec3& p) {
        const Vec3 rel = p - camera.position;
        const double depth = rel.dot(basis.forward);
        const double ndc_x = rel.dot(basis.right) / (depth * tan_half * aspect);
        const double ndc_y = rel.dot(basis.up) / (depth * tan_half);
        return Eigen::Vector2d((ndc_x + 1.0) * 0.5 * camera.width,
                               (1.0 - ndc_y) * 0.5 * camera.height);
    };

    std::vector<bool> mask(static_cast<std::size_t>(camera.width) * camera.height, false);
    for (const auto& f : mesh.faces) {
        const Eigen::Vector2d a = project(mesh.vertices[static_cast<std::size_t>(f[0])]);
        const Eigen::Vector2d b = project(mesh.vertices[static_cast<std::size_t>(f[1])]);
        const Eigen::Vector2d c = project(mesh.vertices[static_cast<std::size_t>(f[2])]);
        for (int y = 0; y < camera.height; ++y) {
            for (int x = 0; x < camera.width; ++x) {
                if (mask[static_cast<std::size_t>(y) * camera.width + x]) continue;
                if (point_in_triangle_2d(x + 0.5, y + 0.5, a, b, c)) {
                    mask[static_cast<std::size_t>(y) * camera.width + x] = true;
                }
            }
        }
    }
    return mask;
}

int coverage_gap(const std::vector<bool>& target, const RenderBuffers& buffers)
{
    int gap = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] && buffers.transmittance[i] > 0.5) ++gap;
    }
    return gap;
}

SpecularHead tiny_head()
{
    return SpecularHead::zero(1, 1, 2);
}

} // namespace

std::vector<InterpRow> interp_table()
{
    const Mat3 a = Mat3::Identity();
    const Mat3 b = rot_z(M_PI - 0.01);
    std::vector<InterpRow> rows;
    for (int k = 0; k <= 10; ++k) {
        const double t = 0.1 * k;
        const double w[2] = {1.0 - t, t};
        const Mat3 js[2] = {a, b};
        const Mat3 lerp = lerp_blend(js, w);
        const Mat3 blended = jbs(js, w);
        InterpRow row;
        row.t = t;
        row.det_lerp = lerp.determinant();
        row.cond_lerp = condition_number(lerp);
        row.det_jbs = blended.determinant();
        row.cond_jbs = condition_number(blended);
        rows.push_back(row);
    }
    return rows;
}

HingeRenders hinge_renders(const HingeDemoParams& params)
{
    const TriMesh canonical = make_hinge_mesh();
    const TriMesh deformed = stretch_mesh(canonical, params.stretch);

    std::vector<Surfel> surfels = bind_surfels(canonical, params.per_triangle, params.seed);
    for (Surfel& s : surfels) {
        s.alpha = 1.0;
        s.s1 *= params.scale_shrink;
        s.s2 *= params.scale_shrink;
    }

    HingeRenders out;
    out.camera.position = Vec3(0.5 * params.stretch.x(), 0.0, 4.0);
    out.camera.look_at = Vec3(0.5 * params.stretch.x(), 0.0, 0.0);
    out.camera.up = Vec3(0.0, 1.0, 0.0);
    out.camera.fov_y = 45.0;
    out.camera.width = params.image_size;
    out.camera.height = params.image_size;

    const PoseJacobians pose = build_pose_jacobians(canonical, deformed);
    const BlendTopology topo = BlendTopology::uniform(build_adjacency(canonical));
    const SpecularHead head = tiny_head();
    const Vec3 background = Vec3::Zero();

    out.jacobian = render(deform_all(surfels, pose, topo), head, out.camera, background, 10.0,
                          params.threads);
    out.ga = render(ga_deform_all(surfels, pose), head, out.camera, background, 10.0,
                    params.threads);
    return out;
}

HingeCoverage hinge_coverage(const HingeDemoParams& params)
{
    const HingeRenders renders = hinge_renders(params);
    const TriMesh deformed = stretch_mesh(make_hinge_mesh(), params.stretch);
    const std::vector<bool> target = mesh_silhouette(deformed, renders.camera);

    HingeCoverage out;
    for (bool b : target) out.target_pixels += b ? 1 : 0;
    out.gap_jacobian = coverage_gap(target, renders.jacobian);
    out.gap_ga = coverage_gap(target, renders.ga);
    return out;
}

namespace {

FitScene patch_scene()
{
    FitScene scene;
    scene.canonical.vertices = {{0.0, 0.0, 0.0}, {4.0, 0.0, 0.0}, {0.0, 4.0, 0.0}};
    scene.canonical.faces = {{0, 1, 2}};
    scene.topology = BlendTopology::uniform(build_adjacency(scene.canonical));
    scene.head = tiny_head();

    Surfel s;
    s.parent = 0;
    s.R_c = Mat3::Identity();
    s.s1 = 2.0;
    s.s2 = 2.0;
    s.alpha = 1.0;
    s.sh = SHBlock::constant(Vec3::Constant(0.5), 0);
    scene.surfels = {s};

    scene.camera.position = Vec3(4.0 / 3.0, 4.0 / 3.0, 2.5);
    scene.camera.look_at = Vec3(4.0 / 3.0, 4.0 / 3.0, 0.0);
    scene.camera.up = Vec3(0.0, 1.0, 0.0);
    scene.camera.fov_y = 45.0;
    scene.camera.width = 32;
    scene.camera.height = 32;
    scene.background = Vec3::Constant(0.1);
    return scene;
}

} // namespace

GrayPatchSetup make_gray_patch(double target_gray, double init_gray)
{
    GrayPatchSetup setup;
    setup.scene = patch_scene();

    setup.scene.surfels[0].sh = SHBlock::constant(Vec3::Constant(target_gray), 0);
    setup.target = buffers_to_image(render_scene(setup.scene));

    setup.scene.surfels[0].sh = SHBlock::constant(Vec3::Constant(init_gray), 0);
    return setup;
}

GrayPatchSetup make_opacity_patch(double target_alpha, double init_alpha)
{
    GrayPatchSetup setup;
    setup.scene = patch_scene();
    setup.scene.surfels[0].sh = SHBlock::constant(Vec3::Constant(0.9), 0);

    setup.scene.surfels[0].alpha = target_alpha;
    setup.target = buffers_to_image(render_scene(setup.scene));

    setup.scene.surfels[0].alpha = init_alpha;
    return setup;
}

HingeFitSetup make_hinge_fit(double angle_rad, int image_size, int per_triangle,
                             std::uint64_t seed)
{
    HingeFitSetup setup;
    FitScene& scene = setup.scene;
    scene.canonical = make_hinge_mesh();
    scene.deformed = bend_hinge(scene.canonical, angle_rad);
    scene.surfels = bind_surfels(scene.canonical, per_triangle, seed);
    for (Surfel& s : scene.surfels) {
        s.alpha = 0.95;
        s.sh = SHBlock::constant(Vec3(0.8, 0.6, 0.3), 0);
    }
    scene.head = tiny_head();
    scene.topology = BlendTopology::uniform(build_adjacency(scene.canonical));

    scene.camera.position = Vec3(0.5, 0.0, 3.0);
    scene.camera.look_at = Vec3(0.5, 0.0, 0.0);
    scene.camera.up = Vec3(0.0, 1.0, 0.0);
    scene.camera.fov_y = 50.0;
    scene.camera.width = image_size;
    scene.camera.height = image_size;

    // Target: each triangle follows its own Jacobian (self-only weights).
    BlendTopology self_only = scene.topology;
    for (auto& row : self_only.logits) {
        row[0] = 20.0;
        for (std::size_t i = 1; i < row.size(); ++i) row[i] = -20.0;
    }
    const PoseJacobians pose = build_pose_jacobians(scene.canonical, *scene.deformed);
    setup.target = buffers_to_image(render(deform_all(scene.surfels, pose, self_only), scene.head,
                                           scene.camera, scene.background, scene.far, 1));

    setup.baseline_photo = photometric_loss(buffers_to_image(render_scene(scene)), setup.target,
                                            0.8);
    return setup;
}

GrayPatchSetup make_eye_scene()
{
    GrayPatchSetup setup;
    setup.scene = patch_scene();

    Surfel eye = setup.scene.surfels[0];
    eye.eye_flag = true;
    eye.mu_c = Vec3(0.5, 0.25, 0.1);
    eye.s1 = 0.8;
    eye.s2 = 0.8;
    eye.alpha = 0.7;
    eye.sh = SHBlock::constant(Vec3(0.9, 0.2, 0.2), 0);
    setup.scene.surfels.push_back(eye);

    setup.scene.surfels[0].sh = SHBlock::constant(Vec3::Constant(0.75), 0);
    setup.target = buffers_to_image(render_scene(setup.scene));
    setup.scene.surfels[0].sh = SHBlock::constant(Vec3::Constant(0.3), 0);
    setup.scene.surfels[1].mu_c += Vec3(0.05, -0.03, 0.0);
    return setup;
}

} // namespace surfhead
