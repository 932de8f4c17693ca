// SPDX-License-Identifier: Apache-2.0
#include "surfhead/render.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace surfhead {

void Camera::validate() const
{
    if (!(fov_y > 0.0 && fov_y < 180.0)) {
        throw InvalidCamera("fov_y must lie in (0, 180) degrees");
    }
    if (width < 1 || height < 1) {
        throw InvalidCamera("image size must be at least 1x1");
    }
    const Vec3 view = look_at - position;
    if (view.norm() < 1e-12) {
        throw InvalidCamera("look_at coincides with position");
    }
    if (view.normalized().cross(up.normalized()).norm() < 1e-9) {
        throw InvalidCamera("up direction is parallel to the view direction");
    }
}

Camera::Basis Camera::basis() const
{
    validate();
    Basis b;
    b.forward = (look_at - position).normalized();
    b.right = b.forward.cross(up).normalized();
    b.up = b.right.cross(b.forward);
    return b;
}

Vec3 Camera::ray_dir(const Basis& b, double px, double py) const
{
    const double tan_half = std::tan(0.5 * fov_y * M_PI / 180.0);
    const double aspect = static_cast<double>(width) / static_cast<double>(height);
    const double ndc_x = (2.0 * px / width - 1.0) * tan_half * aspect;
    const double ndc_y = (1.0 - 2.0 * py / height) * tan_half;
    return (b.forward + ndc_x * b.right + ndc_y * b.up).normalized();
}

std::optional<SplatHit> ray_splat_intersect(const Vec3& origin, const Vec3& dir,
                                            const DeformedSurfel& ds, double cutoff,
                                            double t_near)
{
    const Vec3 h1 = ds.H.col(0);
    const Vec3 h2 = ds.H.col(1);

    Mat3 a;
    a.col(0) = dir;
    a.col(1) = -h1;
    a.col(2) = -h2;

    const double det = a.determinant();
    const double scale = a.cwiseAbs().maxCoeff();
    if (std::abs(det) <= 1e-12 * scale * scale * scale) {
        return std::nullopt; // ray parallel to the splat plane, or degenerate tangents
    }

    // Cramer's rule for (t, u, v).
    const Vec3 rhs = ds.mu - origin;
    Mat3 m = a;
    m.col(0) = rhs;
    const double t = m.determinant() / det;
    m = a;
    m.col(1) = rhs;
    const double u = m.determinant() / det;
    m = a;
    m.col(2) = rhs;
    const double v = m.determinant() / det;

    if (t <= t_near) return std::nullopt;
    const double r2 = u * u + v * v;
    if (r2 > cutoff * cutoff) return std::nullopt;

    SplatHit hit;
    hit.u = u;
    hit.v = v;
    hit.t = t;
    hit.G = std::exp(-0.5 * r2);
    hit.alpha_eff = ds.alpha * hit.G;
    return hit;
}

PixelRecord composite_pixel(std::vector<SplatHit> hits, std::span<const DeformedSurfel> surfels,
                            const SpecularHead& head, const Vec3& view_dir,
                            const Vec3& background, double far)
{
    std::sort(hits.begin(), hits.end(), [](const SplatHit& a, const SplatHit& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.surfel < b.surfel;
    });

    PixelRecord px;
    double transmittance = 1.0;
    double weight_sum = 0.0;
    double depth_sum = 0.0;

    for (const SplatHit& hit : hits) {
        const DeformedSurfel& ds = surfels[static_cast<std::size_t>(hit.surfel)];
        const Vec3 c = total_color(ds.sh, head, view_dir, ds.U_b, ds.n_d)
                           .cwiseMax(0.0)
                           .cwiseMin(1.0);
        const Vec3 n = ds.n_d.dot(view_dir) < 0.0 ? ds.n_d : Vec3(-ds.n_d);

        const double w = hit.alpha_eff * transmittance;
        px.color += w * c;
        depth_sum += w * hit.t;
        px.normal += w * n;
        weight_sum += w;
        px.weights.push_back({hit.surfel, w, hit.t, n});

        transmittance *= 1.0 - hit.alpha_eff;
        if (transmittance < kMinTransmittance) break;
    }

    px.color += transmittance * background;
    px.transmittance = transmittance;
    px.depth = weight_sum > 0.0 ? depth_sum / weight_sum : far;
    if (weight_sum > 0.0 && px.normal.norm() > 0.0) px.normal.normalize();
    return px;
}

namespace {

void render_rows(RenderBuffers& buffers, std::span<const DeformedSurfel> surfels,
                 const SpecularHead& head, const Camera& camera, const Camera::Basis& basis,
                 const Vec3& background, double far, int y_begin, int y_end)
{
    std::vector<SplatHit> hits;
    for (int y = y_begin; y < y_end; ++y) {
        for (int x = 0; x < camera.width; ++x) {
            const Vec3 dir = camera.ray_dir(basis, x + 0.5, y + 0.5);
            hits.clear();
            for (std::size_t i = 0; i < surfels.size(); ++i) {
                if (auto hit = ray_splat_intersect(camera.position, dir, surfels[i])) {
                    hit->surfel = static_cast<int>(i);
                    hits.push_back(*hit);
                }
            }
            PixelRecord px = composite_pixel(hits, surfels, head, dir, background, far);
            const std::size_t idx = buffers.index(x, y);
            buffers.color[idx] = px.color;
            buffers.depth[idx] = px.depth;
            buffers.normal[idx] = px.normal;
            buffers.transmittance[idx] = px.transmittance;
            buffers.hits[idx] = std::move(px.weights);
        }
    }
}

} // namespace

RenderBuffers render(std::span<const DeformedSurfel> surfels, const SpecularHead& head,
                     const Camera& camera, const Vec3& background, double far, int threads)
{
    const Camera::Basis basis = camera.basis();

    RenderBuffers buffers;
    buffers.width = camera.width;
    buffers.height = camera.height;
    const std::size_t n = static_cast<std::size_t>(camera.width) *
                          static_cast<std::size_t>(camera.height);
    buffers.color.assign(n, Vec3::Zero());
    buffers.depth.assign(n, far);
    buffers.normal.assign(n, Vec3::Zero());
    buffers.transmittance.assign(n, 1.0);
    buffers.hits.assign(n, {});

    threads = std::max(1, std::min(threads, camera.height));
    if (threads == 1) {
        render_rows(buffers, surfels, head, camera, basis, background, far, 0, camera.height);
        return buffers;
    }

    std::vector<std::future<void>> jobs;
    const int rows_per = (camera.height + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
        const int y0 = k * rows_per;
        const int y1 = std::min(camera.height, y0 + rows_per);
        if (y0 >= y1) break;
        jobs.push_back(std::async(std::launch::async, [&, y0, y1] {
            render_rows(buffers, surfels, head, camera, basis, background, far, y0, y1);
        }));
    }
    for (auto& job : jobs) job.get();
    return buffers;
}

Image buffers_to_image(const RenderBuffers& buffers)
{
    Image img(buffers.width, buffers.height);
    for (int y = 0; y < buffers.height; ++y) {
        for (int x = 0; x < buffers.width; ++x) {
            const Vec3 c = buffers.color[buffers.index(x, y)].cwiseMax(0.0).cwiseMin(1.0);
            for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = c[ch];
        }
    }
    return img;
}

double weight_closure_residual(const RenderBuffers& buffers)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < buffers.transmittance.size(); ++i) {
        double sum = buffers.transmittance[i];
        for (const HitWeight& w : buffers.hits[i]) sum += w.weight;
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

} // namespace surfhead
