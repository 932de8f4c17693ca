// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "surfhead/render.hpp"
#include "surfhead/rng.hpp"

using namespace surfhead;

namespace {

DeformedSurfel flat_surfel(const Vec3& mu, double s1 = 1.0, double s2 = 1.0, double alpha = 1.0)
{
    DeformedSurfel ds;
    ds.mu = mu;
    ds.H = Eigen::DiagonalMatrix<double, 3>(s1, s2, 1.0);
    ds.n_d = Vec3(0, 0, 1);
    ds.alpha = alpha;
    ds.sh = SHBlock::constant(Vec3::Constant(0.8), 0);
    return ds;
}

const SpecularHead kHead = SpecularHead::zero(1, 1, 2);

} // namespace

TEST_CASE("head-on intersection")
{
    const DeformedSurfel ds = flat_surfel(Vec3::Zero());
    const auto hit = ray_splat_intersect(Vec3(0, 0, 5), Vec3(0, 0, -1), ds);
    REQUIRE(hit.has_value());
    CHECK(hit->u == doctest::Approx(0.0));
    CHECK(hit->v == doctest::Approx(0.0));
    CHECK(hit->t == doctest::Approx(5.0));
    CHECK(hit->G == doctest::Approx(1.0));
}

TEST_CASE("parallel rays miss")
{
    const DeformedSurfel ds = flat_surfel(Vec3::Zero());
    CHECK_FALSE(ray_splat_intersect(Vec3(0, 0, 1), Vec3(1, 0, 0), ds).has_value());
}

TEST_CASE("hits outside the cutoff or behind the origin are rejected")
{
    const DeformedSurfel ds = flat_surfel(Vec3::Zero());
    CHECK_FALSE(ray_splat_intersect(Vec3(4, 0, 5), Vec3(0, 0, -1), ds).has_value());
    CHECK_FALSE(ray_splat_intersect(Vec3(0, 0, -5), Vec3(0, 0, -1), ds).has_value());
}

TEST_CASE("oblique intersection agrees with the plane-projection oracle")
{
    Rng rng(31);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        DeformedSurfel ds;
        ds.mu = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        ds.H = rng.rotation() * Eigen::DiagonalMatrix<double, 3>(rng.uniform(0.5, 2.0),
                                                                 rng.uniform(0.5, 2.0), 1.0);
        ds.n_d = ds.H.col(0).cross(ds.H.col(1)).normalized();

        const Vec3 origin(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(4, 6));
        const Vec3 dir = (ds.mu + 0.3 * rng.unit_vector() - origin).normalized();

        const auto hit = ray_splat_intersect(origin, dir, ds, 1e9);
        if (!hit) continue;

        // Independent route: ray-plane intersection, then project the
        // in-plane offset onto the scaled tangents.
        const Vec3 h1 = ds.H.col(0);
        const Vec3 h2 = ds.H.col(1);
        const Vec3 n = h1.cross(h2);
        const double t_plane = n.dot(ds.mu - origin) / n.dot(dir);
        const Vec3 p = origin + t_plane * dir - ds.mu;
        Eigen::Matrix2d gram;
        gram << h1.dot(h1), h1.dot(h2), h2.dot(h1), h2.dot(h2);
        const Eigen::Vector2d uv = gram.inverse() * Eigen::Vector2d(h1.dot(p), h2.dot(p));

        worst = std::max({worst, std::abs(hit->t - t_plane), std::abs(hit->u - uv(0)),
                          std::abs(hit->v - uv(1))});
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("composite: one opaque hit")
{
    std::vector<DeformedSurfel> scene = {flat_surfel(Vec3::Zero())};
    std::vector<SplatHit> hits;
    hits.push_back({0, 0.0, 0.0, 5.0, 1.0, 1.0});
    const PixelRecord px =
        composite_pixel(hits, scene, kHead, Vec3(0, 0, -1), Vec3::Zero(), 10.0);
    CHECK((px.color - Vec3::Constant(0.8)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(px.transmittance == 0.0);
    CHECK(px.depth == doctest::Approx(5.0));
}

TEST_CASE("composite: two-layer closed form")
{
    std::vector<DeformedSurfel> scene = {flat_surfel(Vec3::Zero()), flat_surfel(Vec3(0, 0, -1))};
    scene[0].sh = SHBlock::constant(Vec3::Constant(1.0), 0);
    scene[1].sh = SHBlock::constant(Vec3::Constant(0.0), 0);

    std::vector<SplatHit> hits;
    hits.push_back({0, 0, 0, 5.0, 1.0, 0.5}); // front, alpha_eff 0.5, white
    hits.push_back({1, 0, 0, 6.0, 1.0, 1.0}); // back, opaque black
    const PixelRecord px =
        composite_pixel(hits, scene, kHead, Vec3(0, 0, -1), Vec3::Zero(), 10.0);
    CHECK(px.color.x() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(px.transmittance == 0.0);
}

TEST_CASE("composite matches the brute-force sum on random hits")
{
    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<DeformedSurfel> scene;
        std::vector<SplatHit> hits;
        for (int i = 0; i < 3; ++i) {
            DeformedSurfel ds = flat_surfel(Vec3::Zero());
            ds.sh = SHBlock::constant(
                Vec3(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)), 0);
            scene.push_back(ds);
            SplatHit h;
            h.surfel = i;
            h.t = rng.uniform(1.0, 9.0);
            h.G = rng.uniform(0.1, 1.0);
            h.alpha_eff = rng.uniform(0.05, 0.9);
            hits.push_back(h);
        }
        const Vec3 bg(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1));
        const Vec3 dir(0, 0, -1);
        const PixelRecord px = composite_pixel(hits, scene, kHead, dir, bg, 10.0);

        std::sort(hits.begin(), hits.end(),
                  [](const SplatHit& a, const SplatHit& b) { return a.t < b.t; });
        Vec3 expect = Vec3::Zero();
        double trans = 1.0;
        for (const SplatHit& h : hits) {
            const Vec3 c = eval_sh(scene[static_cast<std::size_t>(h.surfel)].sh, dir)
                               .cwiseMax(0.0)
                               .cwiseMin(1.0);
            expect += h.alpha_eff * trans * c;
            trans *= 1.0 - h.alpha_eff;
        }
        expect += trans * bg;
        CHECK((px.color - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("empty scene renders background, far depth, unit transmittance")
{
    Camera cam;
    cam.width = 8;
    cam.height = 8;
    const Vec3 bg(0.3, 0.2, 0.1);
    const RenderBuffers buf = render({}, kHead, cam, bg, 7.5, 1);
    for (std::size_t i = 0; i < buf.color.size(); ++i) {
        CHECK((buf.color[i] - bg).cwiseAbs().maxCoeff() == 0.0);
        CHECK(buf.depth[i] == 7.5);
        CHECK(buf.transmittance[i] == 1.0);
    }
}

TEST_CASE("a fronto-parallel surfel renders its color, depth, and normal")
{
    Camera cam;
    cam.position = Vec3(0, 0, 5);
    cam.look_at = Vec3(0, 0, 0);
    cam.width = 17;
    cam.height = 17;

    std::vector<DeformedSurfel> scene = {flat_surfel(Vec3::Zero(), 4.0, 4.0, 1.0)};
    const RenderBuffers buf = render(scene, kHead, cam, Vec3::Zero(), 10.0, 1);

    const std::size_t center = buf.index(8, 8);
    CHECK((buf.color[center] - Vec3::Constant(0.8)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(buf.depth[center] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK((buf.normal[center] - Vec3(0, 0, 1)).norm() < 1e-12);

    // Interior pixels share the (camera-facing) normal.
    for (int y = 6; y <= 10; ++y) {
        for (int x = 6; x <= 10; ++x) {
            CHECK((buf.normal[buf.index(x, y)] - Vec3(0, 0, 1)).norm() < 1e-12);
        }
    }
}

TEST_CASE("single-surfel depth equals the analytic ray-plane distance")
{
    Camera cam;
    cam.position = Vec3(0.3, -0.2, 5);
    cam.look_at = Vec3(0, 0, 0);
    cam.width = 21;
    cam.height = 21;
    const Camera::Basis basis = cam.basis();

    DeformedSurfel ds = flat_surfel(Vec3(0.1, 0.2, 0.0), 2.0, 2.0, 1.0);
    AxisAngle tilt;
    tilt.omega = Vec3(0.5, 0.2, 0.0);
    ds.H = rotation_exp(tilt) * ds.H;
    ds.n_d = ds.H.col(0).cross(ds.H.col(1)).normalized();

    const std::vector<DeformedSurfel> scene = {ds};
    const RenderBuffers buf = render(scene, kHead, cam, Vec3::Zero(), 10.0, 1);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            if (buf.hits[buf.index(x, y)].empty()) continue;
            const Vec3 dir = cam.ray_dir(basis, x + 0.5, y + 0.5);
            const double t_plane = ds.n_d.dot(ds.mu - cam.position) / ds.n_d.dot(dir);
            CHECK(buf.depth[buf.index(x, y)] == doctest::Approx(t_plane).epsilon(1e-6));
        }
    }
}

TEST_CASE("weight closure holds per pixel")
{
    Rng rng(33);
    std::vector<DeformedSurfel> scene;
    for (int i = 0; i < 6; ++i) {
        DeformedSurfel ds = flat_surfel(
            Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)),
            rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), rng.uniform(0.2, 1.0));
        scene.push_back(ds);
    }
    Camera cam;
    cam.width = 32;
    cam.height = 32;
    const RenderBuffers buf = render(scene, kHead, cam, Vec3::Zero(), 10.0, 1);
    CHECK(weight_closure_residual(buf) < 1e-4);
}

TEST_CASE("renders are byte-identical across thread counts")
{
    Rng rng(34);
    std::vector<DeformedSurfel> scene;
    for (int i = 0; i < 5; ++i) {
        scene.push_back(flat_surfel(Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                         rng.uniform(-0.5, 0.5)),
                                    rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5),
                                    rng.uniform(0.3, 1.0)));
    }
    Camera cam;
    cam.width = 37;
    cam.height = 29;
    const RenderBuffers one = render(scene, kHead, cam, Vec3(0.1, 0.2, 0.3), 10.0, 1);
    const RenderBuffers many = render(scene, kHead, cam, Vec3(0.1, 0.2, 0.3), 10.0, 7);
    CHECK(std::memcmp(one.color.data(), many.color.data(), one.color.size() * sizeof(Vec3)) == 0);
    CHECK(std::memcmp(one.depth.data(), many.depth.data(), one.depth.size() * sizeof(double)) ==
          0);
    CHECK(std::memcmp(one.normal.data(), many.normal.data(), one.normal.size() * sizeof(Vec3)) ==
          0);
}

TEST_CASE("invalid cameras are rejected")
{
    Camera cam;
    cam.fov_y = 0.0;
    CHECK_THROWS_AS(cam.validate(), InvalidCamera);
    cam.fov_y = 45.0;
    cam.width = 0;
    CHECK_THROWS_AS(cam.validate(), InvalidCamera);
    cam.width = 8;
    cam.up = Vec3(0, 0, 1);
    cam.position = Vec3(0, 0, 5);
    cam.look_at = Vec3(0, 0, 0);
    CHECK_THROWS_AS(cam.validate(), InvalidCamera);
}
