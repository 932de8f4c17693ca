// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "surfhead/rig.hpp"
#include "surfhead/rng.hpp"

using namespace surfhead;

namespace {

Mat3 rot_z(double angle)
{
    AxisAngle w;
    w.omega = Vec3(0.0, 0.0, angle);
    return rotation_exp(w);
}

/// Cofactor-matrix inverse transpose, written out longhand as an oracle.
Mat3 cofactor_inverse_transpose(const Mat3& m)
{
    Mat3 cof;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            const int r1 = (r + 1) % 3, r2 = (r + 2) % 3;
            const int c1 = (c + 1) % 3, c2 = (c + 2) % 3;
            cof(r, c) = m(r1, c1) * m(r2, c2) - m(r1, c2) * m(r2, c1);
        }
    }
    return cof / m.determinant();
}

TriMesh two_triangle_mesh()
{
    TriMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    mesh.faces = {{0, 1, 2}, {1, 3, 2}};
    return mesh;
}

} // namespace

TEST_CASE("binding one surfel per triangle starts at the barycenter")
{
    TriMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    mesh.faces = {{0, 1, 2}};
    const auto surfels = bind_surfels(mesh, 1, 5);
    REQUIRE(surfels.size() == 1);
    CHECK(surfels[0].parent == 0);
    CHECK(surfels[0].mu_c.norm() == 0.0);
    CHECK((surfels[0].R_c - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    const double ell = mean_edge_length(mesh, 0);
    CHECK(surfels[0].s1 == doctest::Approx(ell / 3.0));
    CHECK(surfels[0].s2 == doctest::Approx(ell / 3.0));
}

TEST_CASE("binding counts and parents")
{
    const auto surfels = bind_surfels(two_triangle_mesh(), 3, 5);
    REQUIRE(surfels.size() == 6);
    for (int i = 0; i < 3; ++i) CHECK(surfels[static_cast<std::size_t>(i)].parent == 0);
    for (int i = 3; i < 6; ++i) CHECK(surfels[static_cast<std::size_t>(i)].parent == 1);
}

TEST_CASE("binding is deterministic and jitters in-plane")
{
    const auto a = bind_surfels(two_triangle_mesh(), 4, 99);
    const auto b = bind_surfels(two_triangle_mesh(), 4, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::memcmp(a[i].mu_c.data(), b[i].mu_c.data(), sizeof(Vec3)) == 0);
        CHECK(std::memcmp(a[i].R_c.data(), b[i].R_c.data(), sizeof(Mat3)) == 0);
        // In-plane: no offset along the parent normal (flat mesh, normal z).
        CHECK(std::abs(a[i].mu_c.z()) < 1e-14);
    }
    const auto c = bind_surfels(two_triangle_mesh(), 4, 100);
    CHECK(std::memcmp(a[1].mu_c.data(), c[1].mu_c.data(), sizeof(Vec3)) != 0);
}

TEST_CASE("jacobian on reference deformations")
{
    const Mat3 e = build_edge_matrix({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    CHECK((jacobian(e, e) - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((jacobian(e, Mat3(2.0 * e)) - 2.0 * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(jacobian(Mat3::Zero(), e), SingularMatrix);
}

TEST_CASE("jacobian residual over random pairs")
{
    Rng rng(11);
    double worst = 0.0;
    int tested = 0;
    while (tested < 1000) {
        Mat3 e, ed;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                e(r, c) = rng.uniform(-1, 1);
                ed(r, c) = rng.uniform(-1, 1);
            }
        }
        if (std::abs(e.determinant()) < 0.05) continue;
        const Mat3 j = jacobian(e, ed);
        worst = std::max(worst, (j * e - ed).cwiseAbs().maxCoeff());
        ++tested;
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("blend weights are convex")
{
    const double zeros[4] = {0, 0, 0, 0};
    for (double w : blend_weights(zeros)) CHECK(w == doctest::Approx(0.25).epsilon(1e-12));

    const double saturated[3] = {20.0, -20.0, -20.0};
    const auto w = blend_weights(saturated);
    CHECK(w[0] > 1.0 - 1e-8);

    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> logits(1 + static_cast<std::size_t>(rng.uniform(0, 6)));
        for (double& l : logits) l = rng.uniform(-5, 5);
        const auto ws = blend_weights(logits);
        double sum = 0.0;
        for (double v : ws) {
            CHECK(v > 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("jbs degenerate blends and the geodesic midpoint")
{
    Rng rng(13);
    Mat3 j0, j1;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            j0(r, c) = rng.uniform(-1, 1);
            j1(r, c) = rng.uniform(-1, 1);
        }
    }
    j0 += 2.0 * Mat3::Identity(); // keep det > 0
    j1 += 2.0 * Mat3::Identity();

    const Mat3 js[2] = {j0, j1};
    const double w_first[2] = {1.0, 0.0};
    CHECK((jbs(js, w_first) - j0).cwiseAbs().maxCoeff() < 1e-10);

    const Mat3 rots[2] = {Mat3::Identity(), rot_z(M_PI / 2.0)};
    const double w_mid[2] = {0.5, 0.5};
    CHECK((jbs(rots, w_mid) - rot_z(M_PI / 4.0)).cwiseAbs().maxCoeff() < 1e-12);

    Mat3 d0 = Mat3::Identity(), d1 = Mat3::Identity();
    d0(0, 0) = 2.0;
    d1(1, 1) = 2.0;
    const Mat3 stretches[2] = {d0, d1};
    Mat3 expected = Mat3::Identity();
    expected(0, 0) = 1.5;
    expected(1, 1) = 1.5;
    CHECK((jbs(stretches, w_mid) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("jbs rotation factor always has determinant +1")
{
    Rng rng(14);
    for (int i = 0; i < 100; ++i) {
        Mat3 j0 = rng.rotation() * Eigen::DiagonalMatrix<double, 3>(rng.uniform(0.5, 2.0),
                                                                    rng.uniform(0.5, 2.0),
                                                                    rng.uniform(0.5, 2.0));
        Mat3 j1 = rng.rotation() * Eigen::DiagonalMatrix<double, 3>(rng.uniform(0.5, 2.0),
                                                                    rng.uniform(0.5, 2.0),
                                                                    rng.uniform(0.5, 2.0));
        const Mat3 js[2] = {j0, j1};
        const double t = rng.uniform(0.0, 1.0);
        const double w[2] = {1.0 - t, t};
        const Mat3 blended = jbs(js, w);
        const PolarFactors f = polar_decompose(blended);
        CHECK(f.U.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("lerp blend collapses where jbs does not")
{
    const Mat3 js[2] = {Mat3::Identity(), rot_z(M_PI)};
    const double w[2] = {0.5, 0.5};
    const Mat3 collapsed = lerp_blend(js, w);
    CHECK(std::abs(collapsed(0, 0)) < 1e-12);
    CHECK(std::abs(collapsed(1, 1)) < 1e-12);
    CHECK(collapsed(2, 2) == doctest::Approx(1.0));
    CHECK(std::abs(collapsed.determinant()) < 1e-12);

    Rng rng(15);
    Mat3 a, b;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            a(r, c) = rng.uniform(-1, 1);
            b(r, c) = rng.uniform(-1, 1);
        }
    }
    const Mat3 random_js[2] = {a, b};
    const double wr[2] = {0.3, 0.7};
    CHECK((lerp_blend(random_js, wr) - (0.3 * a + 0.7 * b)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("deform_surfel at rest and under a similarity")
{
    Surfel s;
    s.mu_c = Vec3(0.1, -0.2, 0.05);
    s.s1 = 0.4;
    s.s2 = 0.3;

    const DeformedSurfel rest = deform_surfel(s, Mat3::Identity(), Vec3::Zero());
    CHECK((rest.mu - s.mu_c).norm() == 0.0);
    CHECK((rest.H - s.R_c * s.scale_matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rest.n_d - s.normal_c()).norm() < 1e-15);
    CHECK((rest.U_b - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);

    const DeformedSurfel moved = deform_surfel(s, Mat3(2.0 * Mat3::Identity()), Vec3(1, 0, 0));
    CHECK((moved.mu - (2.0 * s.mu_c + Vec3(1, 0, 0))).norm() < 1e-14);
    CHECK((moved.H - 2.0 * s.R_c * s.scale_matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("deform_surfel under shear keeps PSD and tangent orthogonality")
{
    Surfel s;
    s.s1 = 0.7;
    s.s2 = 0.5;
    Mat3 shear;
    shear << 1, 0.5, 0, 0, 1, 0, 0, 0, 1;

    const DeformedSurfel ds = deform_surfel(s, shear, Vec3::Zero());
    CHECK(is_psd(ds.H * ds.H.transpose()));
    CHECK(std::abs(ds.n_d.dot(ds.H.col(0))) < 1e-8);
    CHECK(std::abs(ds.n_d.dot(ds.H.col(1))) < 1e-8);
    CHECK(ds.n_d.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("deform_normal references")
{
    Rng rng(16);
    const Mat3 r = rng.rotation();
    const Vec3 n = rng.unit_vector();
    CHECK((deform_normal(n, r) - r * n).norm() < 1e-12);

    Mat3 d = Mat3::Identity();
    d(0, 0) = 2.0;
    CHECK((deform_normal(Vec3(1, 0, 0), d) - Vec3(1, 0, 0)).norm() < 1e-15);

    Mat3 shear;
    shear << 1, 0.5, 0, 0, 1, 0, 0, 0, 1;
    const Vec3 n_d = deform_normal(Vec3(1, 0, 0), shear);
    const Vec3 expected = Vec3(1, -0.5, 0).normalized();
    CHECK((n_d - expected).norm() < 1e-12);
    CHECK(std::abs(n_d.dot(shear * Vec3(0, 1, 0))) < 1e-12);

    // Cofactor oracle agreement on random nonsingular maps.
    for (int i = 0; i < 200; ++i) {
        Mat3 m;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) m(a, b) = rng.uniform(-1, 1);
        if (std::abs(m.determinant()) < 0.05) continue;
        const Vec3 nc = rng.unit_vector();
        const Vec3 via_lib = deform_normal(nc, m);
        const Vec3 via_cof = (cofactor_inverse_transpose(m) * nc).normalized();
        CHECK((via_lib - via_cof).norm() < 1e-10);
    }
}

TEST_CASE("ga deformation matches the jacobian path on similarities only")
{
    Surfel s;
    s.mu_c = Vec3(0.2, 0.1, 0.0);
    s.s1 = 0.3;
    s.s2 = 0.2;

    const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
    const GaFrame can = build_ga_frame(a, b, c);
    s.R_c = can.R_p;

    SUBCASE("identity")
    {
        const DeformedSurfel ds = ga_deform_surfel(s, can, can);
        CHECK((ds.mu - (s.mu_c + can.T_p)).norm() < 1e-14);
        CHECK((ds.H - s.R_c * s.scale_matrix()).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("pure rotation parity")
    {
        const Mat3 r = rot_z(M_PI / 2.0);
        const GaFrame def = build_ga_frame(r * a, r * b, r * c);
        const Mat3 j = jacobian(build_edge_matrix(a, b, c),
                                build_edge_matrix(r * a, r * b, r * c));
        const DeformedSurfel ga = ga_deform_surfel(s, can, def);
        const DeformedSurfel jac = deform_surfel(s, j, def.T_p);
        CHECK((ga.mu - jac.mu).norm() < 1e-10);
        CHECK((ga.H - jac.H).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((ga.n_d - jac.n_d).norm() < 1e-10);
    }

    SUBCASE("anisotropic stretch diverges")
    {
        const Vec3 bd(2, 0, 0), cd(0, 1, 0);
        const GaFrame def = build_ga_frame(a, bd, cd);
        const Mat3 j = jacobian(build_edge_matrix(a, b, c), build_edge_matrix(a, bd, cd));
        const DeformedSurfel ga = ga_deform_surfel(s, can, def);
        const DeformedSurfel jac = deform_surfel(s, j, def.T_p);
        // The similarity baseline cannot represent the stretch.
        CHECK((ga.H - jac.H).cwiseAbs().maxCoeff() > 0.1);
    }
}

TEST_CASE("rotate_view_dir")
{
    const Vec3 d = Vec3(1, 0, 0);
    CHECK((rotate_view_dir(d, Mat3::Identity()) - d).norm() == 0.0);
    CHECK((rotate_view_dir(d, rot_z(M_PI / 2.0)) - Vec3(0, -1, 0)).norm() < 1e-15);

    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const Vec3 v = rng.unit_vector();
        CHECK(std::abs(rotate_view_dir(v, rng.rotation()).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("pose cache and blended deformation on a two-triangle mesh")
{
    const TriMesh canonical = two_triangle_mesh();
    TriMesh deformed = canonical;
    for (Vec3& v : deformed.vertices) v *= 2.0;

    const PoseJacobians pose = build_pose_jacobians(canonical, deformed);
    for (const Mat3& j : pose.J) {
        CHECK(j.determinant() == doctest::Approx(8.0).epsilon(1e-9));
    }

    const BlendTopology topo = BlendTopology::uniform(build_adjacency(canonical));
    const Mat3 j_b = blended_jacobian(pose, topo, 0);
    CHECK((j_b - 2.0 * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);

    const auto surfels = bind_surfels(canonical, 2, 3);
    const auto out = deform_all(surfels, pose, topo);
    REQUIRE(out.size() == surfels.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Vec3 expect =
            2.0 * surfels[i].mu_c + pose.frames_deformed[static_cast<std::size_t>(
                                                             surfels[i].parent)].T_p;
        CHECK((out[i].mu - expect).norm() < 1e-10);
    }
}
