// SPDX-License-Identifier: Apache-2.0
#include "surfhead/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace surfhead {

double l1_loss(const Image& a, const Image& b)
{
    if (a.width != b.width || a.height != b.height) {
        throw DimensionMismatch("l1_loss: image sizes differ");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rgb.size(); ++i) sum += std::abs(a.rgb[i] - b.rgb[i]);
    return sum / static_cast<double>(a.rgb.size());
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;

std::array<double, kSsimWindow> ssim_kernel()
{
    std::array<double, kSsimWindow> k{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - (kSsimWindow - 1) / 2.0;
        k[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d / (kSsimSigma * kSsimSigma));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (double& v : k) v /= sum;
    return k;
}

/// Valid-mode separable convolution of one channel with the SSIM kernel.
std::vector<double> blur_valid(const std::vector<double>& img, int w, int h, int& ow, int& oh)
{
    const auto k = ssim_kernel();
    ow = w - kSsimWindow + 1;
    oh = h - kSsimWindow + 1;

    std::vector<double> tmp(static_cast<std::size_t>(ow) * h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < kSsimWindow; ++i) {
                s += k[static_cast<std::size_t>(i)] * img[static_cast<std::size_t>(y) * w + x + i];
            }
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh, 0.0);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < kSsimWindow; ++i) {
                s += k[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            }
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

} // namespace

double ssim(const Image& a, const Image& b)
{
    if (a.width != b.width || a.height != b.height) {
        throw DimensionMismatch("ssim: image sizes differ");
    }
    if (a.width < kSsimWindow || a.height < kSsimWindow) {
        std::ostringstream msg;
        msg << "ssim: image smaller than the " << kSsimWindow << "x" << kSsimWindow << " window";
        throw DimensionMismatch(msg.str());
    }

    const double c1 = kSsimK1 * kSsimK1;
    const double c2 = kSsimK2 * kSsimK2;
    const std::size_t npx = static_cast<std::size_t>(a.width) * a.height;

    double total = 0.0;
    std::vector<double> ca(npx), cb(npx), caa(npx), cbb(npx), cab(npx);
    for (int ch = 0; ch < 3; ++ch) {
        for (std::size_t i = 0; i < npx; ++i) {
            const double va = a.rgb[i * 3 + static_cast<std::size_t>(ch)];
            const double vb = b.rgb[i * 3 + static_cast<std::size_t>(ch)];
            ca[i] = va;
            cb[i] = vb;
            caa[i] = va * va;
            cbb[i] = vb * vb;
            cab[i] = va * vb;
        }
        int ow = 0, oh = 0;
        const auto mu_a = blur_valid(ca, a.width, a.height, ow, oh);
        const auto mu_b = blur_valid(cb, a.width, a.height, ow, oh);
        const auto m_aa = blur_valid(caa, a.width, a.height, ow, oh);
        const auto m_bb = blur_valid(cbb, a.width, a.height, ow, oh);
        const auto m_ab = blur_valid(cab, a.width, a.height, ow, oh);

        double channel = 0.0;
        for (std::size_t i = 0; i < mu_a.size(); ++i) {
            const double va = m_aa[i] - mu_a[i] * mu_a[i];
            const double vb = m_bb[i] - mu_b[i] * mu_b[i];
            const double cov = m_ab[i] - mu_a[i] * mu_b[i];
            channel += ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
                       ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
        }
        total += channel / static_cast<double>(mu_a.size());
    }
    return total / 3.0;
}

double photometric_loss(const Image& rendered, const Image& target, double beta)
{
    const double dssim = 0.5 * (1.0 - ssim(rendered, target));
    return beta * l1_loss(rendered, target) + (1.0 - beta) * dssim;
}

double depth_distortion(const RenderBuffers& buffers)
{
    double total = 0.0;
    for (const auto& hits : buffers.hits) {
        double px = 0.0;
        for (std::size_t i = 0; i < hits.size(); ++i) {
            for (std::size_t j = 0; j < hits.size(); ++j) {
                if (i == j) continue;
                px += hits[i].weight * hits[j].weight * std::abs(hits[i].t - hits[j].t);
            }
        }
        total += px;
    }
    return total / static_cast<double>(buffers.hits.size());
}

double normal_consistency(const RenderBuffers& buffers, const Camera& camera)
{
    const Camera::Basis basis = camera.basis();
    const int w = buffers.width;
    const int h = buffers.height;

    auto covered = [&](int x, int y) { return !buffers.hits[buffers.index(x, y)].empty(); };
    auto point = [&](int x, int y) {
        const Vec3 dir = camera.ray_dir(basis, x + 0.5, y + 0.5);
        return Vec3(camera.position + buffers.depth[buffers.index(x, y)] * dir);
    };

    double total = 0.0;
    int counted = 0;
    for (int y = 1; y + 1 < h; ++y) {
        for (int x = 1; x + 1 < w; ++x) {
            if (!covered(x, y) || !covered(x - 1, y) || !covered(x + 1, y) || !covered(x, y - 1) ||
                !covered(x, y + 1)) {
                continue;
            }
            const Vec3 dx = 0.5 * (point(x + 1, y) - point(x - 1, y));
            const Vec3 dy = 0.5 * (point(x, y + 1) - point(x, y - 1));
            Vec3 n = dx.cross(dy);
            const double len = n.norm();
            if (len < 1e-15) continue;
            n /= len;
            const Vec3 dir = camera.ray_dir(basis, x + 0.5, y + 0.5);
            if (n.dot(dir) > 0.0) n = -n;

            double px = 0.0;
            for (const HitWeight& hit : buffers.hits[buffers.index(x, y)]) {
                px += hit.weight * (1.0 - hit.normal.dot(n));
            }
            total += px;
            ++counted;
        }
    }
    return counted > 0 ? total / counted : 0.0;
}

double eye_opacity_loss(std::span<const Surfel> surfels)
{
    double total = 0.0;
    for (const Surfel& s : surfels) {
        if (s.eye_flag) {
            const double d = 1.0 - s.alpha;
            total += d * d;
        }
    }
    return total;
}

std::pair<double, double> binding_regularizers(std::span<const Surfel> surfels,
                                               const TriMesh& mesh, double eps_pos,
                                               double eps_scale)
{
    if (surfels.empty()) return {0.0, 0.0};
    double pos = 0.0;
    double scale = 0.0;
    for (const Surfel& s : surfels) {
        const double ell = mean_edge_length(mesh, s.parent);
        for (int c = 0; c < 3; ++c) {
            const double d = std::max(std::abs(s.mu_c[c]) / ell - eps_pos, 0.0);
            pos += d * d;
        }
        for (double sc : {s.s1, s.s2}) {
            const double d = std::max(sc / ell - eps_scale, 0.0);
            scale += d * d;
        }
    }
    const double n = static_cast<double>(surfels.size());
    return {pos / n, scale / n};
}

double weighted_total(const EnergyConfig& cfg, double photo, double depth, double normal,
                      double eye, double scaling, double position)
{
    return photo + cfg.lambda_depth * depth + cfg.lambda_normal * normal + cfg.lambda_eye * eye +
           cfg.lambda_reg * (scaling + position);
}

EnergyBreakdown total_energy(const RenderBuffers& buffers, const Image& target,
                             std::span<const Surfel> surfels, const TriMesh& mesh,
                             const Camera& camera, const EnergyConfig& cfg)
{
    EnergyBreakdown out;
    out.photo = photometric_loss(buffers_to_image(buffers), target, cfg.beta);
    out.depth = depth_distortion(buffers);
    out.normal = normal_consistency(buffers, camera);
    out.eye = eye_opacity_loss(surfels);
    const auto [pos, scale] = binding_regularizers(surfels, mesh, cfg.eps_pos, cfg.eps_scale);
    out.position = pos;
    out.scaling = scale;
    out.total = weighted_total(cfg, out.photo, out.depth, out.normal, out.eye, out.scaling,
                               out.position);
    return out;
}

RenderBuffers render_scene(const FitScene& scene)
{
    std::vector<DeformedSurfel> deformed;
    if (scene.deformed.has_value()) {
        const PoseJacobians pose = build_pose_jacobians(scene.canonical, *scene.deformed);
        deformed = deform_all(scene.surfels, pose, scene.topology);
    } else {
        // Rest pose: the identity Jacobian keeps surfels bit-exact.
        const std::vector<TriangleFrame> frames = build_frames(scene.canonical);
        deformed.reserve(scene.surfels.size());
        for (const Surfel& s : scene.surfels) {
            deformed.push_back(
                deform_surfel(s, Mat3::Identity(),
                              frames[static_cast<std::size_t>(s.parent)].T_p));
        }
    }
    return render(deformed, scene.head, scene.camera, scene.background, scene.far, scene.threads);
}

namespace {

double softplus(double x)
{
    return x > 30.0 ? x : std::log1p(std::exp(x));
}

double softplus_inv(double y)
{
    return y > 30.0 ? y : std::log(std::expm1(std::max(y, 1e-12)));
}

/// Flat view of every trainable scalar: base values live in `base`,
/// candidate values are applied onto a scratch scene before evaluation.
struct ParamSpace {
    std::vector<double> values;
    std::vector<double> fd_steps;
    std::vector<double> rates;

    // Layout bookkeeping.
    struct SurfelSlot {
        std::size_t surfel;
        std::size_t offset; ///< into values
    };
    std::vector<SurfelSlot> sh_slots;
    std::vector<SurfelSlot> alpha_slots;
    std::vector<SurfelSlot> mu_slots;
    std::vector<SurfelSlot> rot_slots; ///< 3 values: axis-angle around the initial R_c
    std::vector<std::pair<std::size_t, std::size_t>> logit_slots; ///< (tri, neighbor) -> offset
    std::size_t logit_offset = 0;
    std::size_t head_offset = 0;
    std::size_t head_count = 0;
    std::size_t lobe_offset = 0;
    std::size_t lobe_count = 0;
    std::vector<Mat3> rot_base;

    void push(double v, double step, double rate)
    {
        values.push_back(v);
        fd_steps.push_back(step);
        rates.push_back(rate);
    }
};

ParamSpace collect_params(const FitScene& scene, const EnergyConfig& cfg, const TrainMask& mask)
{
    ParamSpace ps;
    for (std::size_t i = 0; i < scene.surfels.size(); ++i) {
        const Surfel& s = scene.surfels[i];
        if (mask.sh) {
            ps.sh_slots.push_back({i, ps.values.size()});
            for (double c : s.sh.coeffs) ps.push(c, 1e-3, 1.0);
        }
        if (mask.alpha) {
            ps.alpha_slots.push_back({i, ps.values.size()});
            ps.push(s.alpha, 1e-3, 1.0);
        }
        const bool frozen = cfg.freeze_eyes && s.eye_flag;
        if (mask.position && !frozen) {
            ps.mu_slots.push_back({i, ps.values.size()});
            for (int c = 0; c < 3; ++c) ps.push(s.mu_c[c], 1e-4, 0.2);
        }
        if (mask.rotation && !frozen) {
            ps.rot_slots.push_back({i, ps.values.size()});
            ps.rot_base.push_back(s.R_c);
            for (int c = 0; c < 3; ++c) ps.push(0.0, 1e-4, 0.2);
        }
    }
    if (mask.logits) {
        ps.logit_offset = ps.values.size();
        for (std::size_t t = 0; t < scene.topology.logits.size(); ++t) {
            for (std::size_t n = 0; n < scene.topology.logits[t].size(); ++n) {
                ps.logit_slots.push_back({t, n});
                ps.push(scene.topology.logits[t][n], 1e-3, 5.0);
            }
        }
    }
    if (mask.head) {
        ps.head_offset = ps.values.size();
        const SpecularHead& h = scene.head;
        for (const auto* m : {&h.W1, &h.W2, &h.W3}) {
            for (Eigen::Index j = 0; j < m->cols(); ++j)
                for (Eigen::Index i = 0; i < m->rows(); ++i) ps.push((*m)(i, j), 1e-3, 0.5);
        }
        for (const auto* v : {&h.b1, &h.b2, &h.b3}) {
            for (Eigen::Index i = 0; i < v->size(); ++i) ps.push((*v)(i), 1e-3, 0.5);
        }
        ps.head_count = ps.values.size() - ps.head_offset;
    }
    if (mask.lobes) {
        // Sharpness and amplitude through softplus so they stay positive.
        ps.lobe_offset = ps.values.size();
        for (const ASGLobe& lobe : scene.head.lobes) {
            ps.push(softplus_inv(std::max(lobe.lambda, 1e-9)), 1e-3, 0.5);
            ps.push(softplus_inv(std::max(lobe.mu, 1e-9)), 1e-3, 0.5);
            ps.push(softplus_inv(std::max(lobe.xi, 1e-9)), 1e-3, 0.5);
        }
        ps.lobe_count = ps.values.size() - ps.lobe_offset;
    }
    return ps;
}

void apply_params(const ParamSpace& ps, const std::vector<double>& x, FitScene& scene)
{
    for (const auto& slot : ps.sh_slots) {
        auto& coeffs = scene.surfels[slot.surfel].sh.coeffs;
        for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] = x[slot.offset + k];
    }
    for (const auto& slot : ps.alpha_slots) {
        scene.surfels[slot.surfel].alpha = std::clamp(x[slot.offset], 1e-4, 1.0);
    }
    for (const auto& slot : ps.mu_slots) {
        for (int c = 0; c < 3; ++c) {
            scene.surfels[slot.surfel].mu_c[c] = x[slot.offset + static_cast<std::size_t>(c)];
        }
    }
    for (std::size_t r = 0; r < ps.rot_slots.size(); ++r) {
        const auto& slot = ps.rot_slots[r];
        const Vec3 omega(x[slot.offset], x[slot.offset + 1], x[slot.offset + 2]);
        scene.surfels[slot.surfel].R_c = rotation_exp({omega}) * ps.rot_base[r];
    }
    for (std::size_t k = 0; k < ps.logit_slots.size(); ++k) {
        const auto [t, n] = ps.logit_slots[k];
        scene.topology.logits[t][n] = x[ps.logit_offset + k];
    }
    if (ps.head_count > 0) {
        std::size_t k = ps.head_offset;
        SpecularHead& h = scene.head;
        for (auto* m : {&h.W1, &h.W2, &h.W3}) {
            for (Eigen::Index j = 0; j < m->cols(); ++j)
                for (Eigen::Index i = 0; i < m->rows(); ++i) (*m)(i, j) = x[k++];
        }
        for (auto* v : {&h.b1, &h.b2, &h.b3}) {
            for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = x[k++];
        }
    }
    if (ps.lobe_count > 0) {
        std::size_t k = ps.lobe_offset;
        for (ASGLobe& lobe : scene.head.lobes) {
            lobe.lambda = softplus(x[k++]);
            lobe.mu = softplus(x[k++]);
            lobe.xi = softplus(x[k++]);
        }
    }
}

void check_finite(const EnergyBreakdown& e)
{
    for (double v : {e.photo, e.depth, e.normal, e.eye, e.scaling, e.position, e.total}) {
        if (!std::isfinite(v)) throw DivergedLoss("energy term became non-finite");
    }
}

} // namespace

FitState fit(FitScene& scene, const Image& target, const EnergyConfig& cfg, const TrainMask& mask,
             int iterations)
{
    ParamSpace ps = collect_params(scene, cfg, mask);
    std::vector<double> x = ps.values;

    FitScene scratch = scene;
    auto evaluate = [&](const std::vector<double>& params) {
        apply_params(ps, params, scratch);
        const RenderBuffers buffers = render_scene(scratch);
        const EnergyBreakdown e = total_energy(buffers, target, scratch.surfels, scratch.canonical,
                                               scratch.camera, cfg);
        check_finite(e);
        return e;
    };

    FitState state;
    EnergyBreakdown current = evaluate(x);
    state.initial_total = current.total;
    state.last = current;

    double eta = 1.0;
    std::vector<double> grad(x.size(), 0.0);
    std::vector<double> probe = x;
    std::vector<double> candidate = x;

    for (int iter = 0; iter < iterations; ++iter) {
        if (x.empty()) break;

        for (std::size_t j = 0; j < x.size(); ++j) {
            const double h = ps.fd_steps[j];
            probe = x;
            probe[j] = x[j] + h;
            const double e_plus = evaluate(probe).total;
            probe[j] = x[j] - h;
            const double e_minus = evaluate(probe).total;
            grad[j] = (e_plus - e_minus) / (2.0 * h);
        }

        bool accepted = false;
        double step = eta;
        for (int attempt = 0; attempt < 24; ++attempt) {
            for (std::size_t j = 0; j < x.size(); ++j) {
                candidate[j] = x[j] - step * ps.rates[j] * grad[j];
            }
            const EnergyBreakdown trial = evaluate(candidate);
            if (trial.total <= current.total) {
                x = candidate;
                current = trial;
                accepted = true;
                eta = std::min(step * 1.5, 8.0);
                break;
            }
            step *= 0.5;
        }

        state.iterations = iter + 1;
        state.last = current;
        {
            nlohmann::json rec{{"iter", iter},
                               {"photo", current.photo},
                               {"depth", current.depth},
                               {"normal", current.normal},
                               {"eye", current.eye},
                               {"scaling", current.scaling},
                               {"position", current.position},
                               {"total", current.total},
                               {"step", accepted ? eta : 0.0}};
            state.log_lines.push_back(rec.dump());
        }
        if (!accepted) break; // no descent direction at this resolution
    }

    apply_params(ps, x, scene);
    state.final_total = current.total;
    return state;
}

} // namespace surfhead
