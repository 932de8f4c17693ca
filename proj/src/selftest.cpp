// SPDX-License-Identifier: Apache-2.0
#include "surfhead/selftest.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <sstream>

#include "surfhead/energy.hpp"
#include "surfhead/rng.hpp"
#include "surfhead/toy_scenes.hpp"

namespace surfhead {

namespace {

// ---------------------------------------------------------------------------
// Independent oracles. These deliberately avoid the production code paths:
// the eigendecomposition below is a hand-rolled cyclic Jacobi sweep and the
// second polar route is the Newton iteration, so agreement with
// polar_decompose is a genuine cross-check.
// ---------------------------------------------------------------------------

void jacobi_eigen_sym(const Mat3& a_in, Mat3& vecs, Vec3& vals)
{
    Mat3 a = 0.5 * (a_in + a_in.transpose());
    vecs = Mat3::Identity();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                Mat3 g = Mat3::Identity();
                g(p, p) = c;
                g(q, q) = c;
                g(p, q) = s;
                g(q, p) = -s;
                a = g.transpose() * a * g;
                vecs = vecs * g;
            }
        }
    }
    vals = a.diagonal();
}

/// Polar factors via the Jacobi eigendecomposition of M^T M.
void polar_oracle_eig(const Mat3& m, Mat3& u, Mat3& p)
{
    Mat3 vecs;
    Vec3 vals;
    jacobi_eigen_sym(m.transpose() * m, vecs, vals);
    const Vec3 sigma = vals.cwiseMax(0.0).cwiseSqrt();
    p = vecs * sigma.asDiagonal() * vecs.transpose();
    u = m * (vecs * sigma.cwiseInverse().asDiagonal() * vecs.transpose());
}

/// Polar rotation via the Newton iteration U <- (U + U^-T)/2.
Mat3 polar_oracle_newton(const Mat3& m)
{
    Mat3 u = m;
    for (int i = 0; i < 200; ++i) {
        const Mat3 next = 0.5 * (u + u.inverse().transpose());
        if ((next - u).cwiseAbs().maxCoeff() < 1e-15) return next;
        u = next;
    }
    return u;
}

Mat3 random_nonsingular(Rng& rng, double min_det = 0.05)
{
    for (;;) {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
        if (m.determinant() < 0.0) m = -m;
        if (m.determinant() > min_det) return m;
    }
}

Surfel random_surfel(Rng& rng)
{
    Surfel s;
    s.R_c = rng.rotation();
    s.s1 = rng.uniform(0.2, 2.0);
    s.s2 = rng.uniform(0.2, 2.0);
    s.alpha = rng.uniform(0.1, 1.0);
    return s;
}

Mat3 rot_z(double angle)
{
    AxisAngle w;
    w.omega = Vec3(0.0, 0.0, angle);
    return rotation_exp(w);
}

double min_eigenvalue(const Mat3& sym)
{
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (sym + sym.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

CriterionResult check_polar_uniqueness()
{
    Rng rng(101);
    double worst_orth = 0.0, worst_recon = 0.0, worst_sym = 0.0;
    double worst_psd = 0.0, worst_agree = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Mat3 m = random_nonsingular(rng);
        const PolarFactors f = polar_decompose(m);

        worst_orth = std::max(worst_orth,
                              (f.U.transpose() * f.U - Mat3::Identity()).cwiseAbs().maxCoeff());
        worst_sym = std::max(worst_sym, (f.P - f.P.transpose()).cwiseAbs().maxCoeff());
        worst_psd = std::max(worst_psd, -min_eigenvalue(f.P));
        worst_recon = std::max(worst_recon, (f.U * f.P - m).norm() / m.norm());

        Mat3 u_eig, p_eig;
        polar_oracle_eig(m, u_eig, p_eig);
        const Mat3 u_newton = polar_oracle_newton(m);
        worst_agree = std::max({worst_agree, (f.U - u_eig).cwiseAbs().maxCoeff(),
                                (f.P - p_eig).cwiseAbs().maxCoeff(),
                                (f.U - u_newton).cwiseAbs().maxCoeff()});
    }
    CriterionResult r;
    r.name = "polar factorization uniqueness sweep";
    r.pass = worst_orth < 1e-9 && worst_recon < 1e-8 && worst_sym < 1e-9 && worst_psd < 1e-9 &&
             worst_agree < 1e-8;
    r.detail = "orth " + fmt(worst_orth) + ", recon " + fmt(worst_recon) + ", oracle " +
               fmt(worst_agree);
    return r;
}

CriterionResult check_psd_preservation()
{
    Rng rng(202);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Surfel s = random_surfel(rng);
        const Mat3 j = random_nonsingular(rng);
        const Mat3 h = j * s.R_c * s.scale_matrix();
        worst = std::min(worst, min_eigenvalue(h * h.transpose()));
    }
    CriterionResult r;
    r.name = "PSD preservation sweep";
    r.pass = worst >= -1e-10;
    r.detail = "min eigenvalue " + fmt(worst);
    return r;
}

CriterionResult check_normal_rule()
{
    Rng rng(303);
    double worst_orth = 0.0, worst_rot = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Surfel s = random_surfel(rng);
        const Mat3 j = random_nonsingular(rng);
        const Vec3 n_d = deform_normal(s.normal_c(), j);
        worst_orth = std::max({worst_orth, std::abs(n_d.dot(j * s.R_c.col(0))),
                               std::abs(n_d.dot(j * s.R_c.col(1)))});

        const Mat3 rot = rng.rotation();
        const Vec3 n_rot = deform_normal(s.normal_c(), rot);
        worst_rot = std::max(worst_rot, (n_rot - rot * s.normal_c()).norm());
    }
    CriterionResult r;
    r.name = "inverse-transpose normal rule";
    r.pass = worst_orth < 1e-8 && worst_rot < 1e-12;
    r.detail = "tangent dot " + fmt(worst_orth) + ", rotation residual " + fmt(worst_rot);
    return r;
}

CriterionResult check_similarity_parity()
{
    Rng rng(404);
    double worst_mu = 0.0, worst_sigma = 0.0;
    for (int i = 0; i < 200; ++i) {
        // Random triangle, then a similarity deformation k R + translation.
        Vec3 a(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        Vec3 b = a + Vec3(rng.uniform(0.5, 1.5), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
        Vec3 c = a + Vec3(rng.uniform(-0.2, 0.2), rng.uniform(0.5, 1.5), rng.uniform(-0.2, 0.2));
        const double k = rng.uniform(0.3, 3.0);
        const Mat3 rot = rng.rotation();
        const Vec3 shift(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Vec3 ad = k * (rot * a) + shift;
        const Vec3 bd = k * (rot * b) + shift;
        const Vec3 cd = k * (rot * c) + shift;

        Surfel s = random_surfel(rng);
        const GaFrame can = build_ga_frame(a, b, c);
        s.R_c = can.R_p; // bound to the canonical frame
        s.mu_c = Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));

        const Mat3 j = jacobian(build_edge_matrix(a, b, c), build_edge_matrix(ad, bd, cd));
        const GaFrame def = build_ga_frame(ad, bd, cd);

        const DeformedSurfel jac = deform_surfel(s, j, def.T_p);
        const DeformedSurfel ga = ga_deform_surfel(s, can, def);

        worst_mu = std::max(worst_mu, (jac.mu - ga.mu).norm());
        const Mat3 sigma_j = jac.H * jac.H.transpose();
        const Mat3 sigma_g = ga.H * ga.H.transpose();
        worst_sigma = std::max(worst_sigma, (sigma_j - sigma_g).norm() / sigma_j.norm());
    }
    CriterionResult r;
    r.name = "similarity parity with the GA baseline";
    r.pass = worst_mu < 1e-8 && worst_sigma < 1e-8;
    r.detail = "mu " + fmt(worst_mu) + ", sigma rel " + fmt(worst_sigma);
    return r;
}

CriterionResult check_jbs_geodesic()
{
    Rng rng(505);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double theta = rng.uniform(1e-3, M_PI - 0.01);
        const double t = rng.uniform(0.0, 1.0);
        const Mat3 js[2] = {rot_z(0.0), rot_z(theta)};
        const double w[2] = {1.0 - t, t};
        worst = std::max(worst, (jbs(js, w) - rot_z(t * theta)).cwiseAbs().maxCoeff());
    }

    const Mat3 js[2] = {Mat3::Identity(), rot_z(M_PI - 0.01)};
    const double w[2] = {0.5, 0.5};
    const double det_lerp = lerp_blend(js, w).determinant();
    const double det_jbs = jbs(js, w).determinant();

    CriterionResult r;
    r.name = "blend geodesic vs element-wise collapse";
    r.pass = worst < 1e-8 && det_lerp < 0.02 && det_jbs > 0.999 && det_jbs < 1.001;
    r.detail = "geodesic " + fmt(worst) + ", lerp det " + fmt(det_lerp) + ", jbs det " +
               fmt(det_jbs);
    return r;
}

CriterionResult check_hinge_coverage(int threads)
{
    HingeDemoParams params;
    params.threads = threads;
    const HingeCoverage cov = hinge_coverage(params);
    CriterionResult r;
    r.name = "stretched-hinge silhouette coverage";
    r.pass = cov.gap_jacobian < cov.gap_ga && cov.target_pixels > 0;
    std::ostringstream os;
    os << "gap jacobian " << cov.gap_jacobian << ", gap ga " << cov.gap_ga << ", target "
       << cov.target_pixels << " px";
    r.detail = os.str();
    return r;
}

CriterionResult check_rasterizer(int threads)
{
    Rng rng(606);
    const SpecularHead head = SpecularHead::zero(1, 1, 2);

    // Single tilted surfel: rendered depth vs analytic ray-plane distance.
    double worst_depth = 0.0;
    {
        DeformedSurfel ds;
        ds.mu = Vec3(0.05, -0.08, 0.2);
        AxisAngle tilt;
        tilt.omega = Vec3(0.4, -0.3, 0.1);
        ds.H = rotation_exp(tilt) * Eigen::DiagonalMatrix<double, 3>(1.5, 1.2, 1.0);
        ds.n_d = ds.H.col(0).cross(ds.H.col(1)).normalized();
        ds.alpha = 1.0;
        ds.sh = SHBlock::constant(Vec3::Constant(0.5));

        Camera cam;
        cam.position = Vec3(0, 0, 5);
        cam.look_at = Vec3(0, 0, 0);
        cam.width = 33;
        cam.height = 33;
        const Camera::Basis basis = cam.basis();
        const std::vector<DeformedSurfel> scene = {ds};
        const RenderBuffers buf = render(scene, head, cam, Vec3::Zero(), 10.0, 1);
        for (int y = 0; y < cam.height; ++y) {
            for (int x = 0; x < cam.width; ++x) {
                if (buf.hits[buf.index(x, y)].empty()) continue;
                const Vec3 dir = cam.ray_dir(basis, x + 0.5, y + 0.5);
                const double t_plane = ds.n_d.dot(ds.mu - cam.position) / ds.n_d.dot(dir);
                worst_depth = std::max(worst_depth,
                                       std::abs(buf.depth[buf.index(x, y)] - t_plane));
            }
        }
    }

    // Random scene: weight closure, brute-force compositing, determinism.
    std::vector<DeformedSurfel> scene;
    for (int i = 0; i < 3; ++i) {
        DeformedSurfel ds;
        ds.mu = Vec3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
        ds.H = rng.rotation() * Eigen::DiagonalMatrix<double, 3>(rng.uniform(0.5, 1.5),
                                                                 rng.uniform(0.5, 1.5), 1.0);
        ds.n_d = ds.H.col(0).cross(ds.H.col(1)).normalized();
        ds.alpha = rng.uniform(0.3, 0.9);
        ds.sh = SHBlock::constant(
            Vec3(rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)));
        scene.push_back(ds);
    }
    Camera cam;
    cam.position = Vec3(0, 0, 4);
    cam.look_at = Vec3(0, 0, 0);
    cam.width = 48;
    cam.height = 48;
    const Vec3 background(0.2, 0.1, 0.4);
    const RenderBuffers buf = render(scene, head, cam, background, 10.0, 1);
    const double closure = weight_closure_residual(buf);

    // Closed-form compositing sum against the recorded per-pixel weights.
    const Camera::Basis basis = cam.basis();
    double worst_comp = 0.0;
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            const Vec3 dir = cam.ray_dir(basis, x + 0.5, y + 0.5);
            std::vector<SplatHit> hits;
            for (std::size_t i = 0; i < scene.size(); ++i) {
                if (auto h = ray_splat_intersect(cam.position, dir, scene[i])) {
                    h->surfel = static_cast<int>(i);
                    hits.push_back(*h);
                }
            }
            std::sort(hits.begin(), hits.end(),
                      [](const SplatHit& a, const SplatHit& b) { return a.t < b.t; });
            Vec3 expect = Vec3::Zero();
            double trans = 1.0;
            for (const SplatHit& h : hits) {
                const DeformedSurfel& ds = scene[static_cast<std::size_t>(h.surfel)];
                const Vec3 c = total_color(ds.sh, head, dir, ds.U_b, ds.n_d)
                                   .cwiseMax(0.0)
                                   .cwiseMin(1.0);
                expect += h.alpha_eff * trans * c;
                trans *= 1.0 - h.alpha_eff;
                if (trans < kMinTransmittance) break;
            }
            expect += trans * background;
            worst_comp = std::max(worst_comp,
                                  (expect - buf.color[buf.index(x, y)]).cwiseAbs().maxCoeff());
        }
    }

    const RenderBuffers multi = render(scene, head, cam, background, 10.0, std::max(threads, 4));
    bool identical = buf.color.size() == multi.color.size();
    if (identical) {
        identical = std::memcmp(buf.color.data(), multi.color.data(),
                                buf.color.size() * sizeof(Vec3)) == 0 &&
                    std::memcmp(buf.depth.data(), multi.depth.data(),
                                buf.depth.size() * sizeof(double)) == 0 &&
                    std::memcmp(buf.normal.data(), multi.normal.data(),
                                buf.normal.size() * sizeof(Vec3)) == 0 &&
                    std::memcmp(buf.transmittance.data(), multi.transmittance.data(),
                                buf.transmittance.size() * sizeof(double)) == 0;
    }

    CriterionResult r;
    r.name = "rasterizer exactness";
    r.pass = worst_depth < 1e-6 && closure < 1e-4 && worst_comp < 1e-12 && identical;
    r.detail = "depth " + fmt(worst_depth) + ", closure " + fmt(closure) + ", compositing " +
               fmt(worst_comp) + (identical ? ", threads byte-identical" : ", THREAD MISMATCH");
    return r;
}

CriterionResult check_asg_specular()
{
    Rng rng(707);

    // Lobe geometry: peak at the axis, hard zero behind.
    std::vector<ASGLobe> lobes = sample_lobes(4);
    double worst_peak = 0.0;
    bool back_zero = true;
    for (ASGLobe& lobe : lobes) {
        lobe.lambda = rng.uniform(0.0, 10.0);
        lobe.mu = rng.uniform(0.0, 10.0);
        lobe.xi = rng.uniform(0.1, 2.0);
        worst_peak = std::max(worst_peak, std::abs(eval_asg(lobe, lobe.z) - lobe.xi));
        for (int i = 0; i < 1000; ++i) {
            Vec3 nu = rng.unit_vector();
            if (nu.dot(lobe.z) > 0.0) nu = -nu;
            if (eval_asg(lobe, nu) != 0.0) back_zero = false;
        }
    }

    // Analytic gradients against central differences, all parameters.
    double worst_rel = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        Rng draw_rng(1000 + static_cast<std::uint64_t>(draw));
        SpecularHead head = SpecularHead::random(draw_rng);
        const Vec3 omega_o = draw_rng.unit_vector();
        const Vec3 d_rot = draw_rng.unit_vector();
        const Vec3 n = draw_rng.unit_vector();

        SpecularGradients grads;
        eval_specular(head, omega_o, d_rot, n, &grads);

        const double h = 1e-5;
        auto check_entry = [&](double* p, double analytic) {
            const double saved = *p;
            *p = saved + h;
            const double plus = eval_specular(head, omega_o, d_rot, n);
            *p = saved - h;
            const double minus = eval_specular(head, omega_o, d_rot, n);
            *p = saved;
            const double fd = (plus - minus) / (2.0 * h);
            const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-6});
            worst_rel = std::max(worst_rel, std::abs(analytic - fd) / denom);
        };
        for (Eigen::Index j = 0; j < head.W1.cols(); ++j)
            for (Eigen::Index i = 0; i < head.W1.rows(); ++i)
                check_entry(&head.W1(i, j), grads.dW1(i, j));
        for (Eigen::Index i = 0; i < head.b1.size(); ++i) check_entry(&head.b1(i), grads.db1(i));
        for (Eigen::Index j = 0; j < head.W2.cols(); ++j)
            for (Eigen::Index i = 0; i < head.W2.rows(); ++i)
                check_entry(&head.W2(i, j), grads.dW2(i, j));
        for (Eigen::Index i = 0; i < head.b2.size(); ++i) check_entry(&head.b2(i), grads.db2(i));
        for (Eigen::Index j = 0; j < head.W3.cols(); ++j)
            check_entry(&head.W3(0, j), grads.dW3(0, j));
        check_entry(&head.b3(0), grads.db3(0));
    }

    CriterionResult r;
    r.name = "ASG lobes and specular-head gradients";
    r.pass = worst_peak < 1e-12 && back_zero && worst_rel < 1e-4;
    r.detail = "peak " + fmt(worst_peak) + ", back hemisphere " +
               (back_zero ? "exact zero" : "NONZERO") + ", grad rel " + fmt(worst_rel);
    return r;
}

CriterionResult check_energy_terms()
{
    // Perfect inputs per term.
    Image img(24, 24);
    img.fill(Vec3(0.3, 0.5, 0.7));
    const double photo_zero = photometric_loss(img, img, 0.8);

    GrayPatchSetup patch = make_gray_patch(0.8, 0.8);
    const RenderBuffers buf = render_scene(patch.scene);
    const double depth_zero = depth_distortion(buf); // single-hit pixels
    const double normal_zero = normal_consistency(buf, patch.scene.camera); // fronto-parallel

    std::vector<Surfel> eyes(3);
    for (Surfel& s : eyes) {
        s.eye_flag = true;
        s.alpha = 1.0;
    }
    const double eye_zero = eye_opacity_loss(eyes);

    const EnergyConfig cfg;
    const double total = weighted_total(cfg, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0);

    CriterionResult r;
    r.name = "energy terms at their zeros and the weighted total";
    r.pass = photo_zero == 0.0 && depth_zero == 0.0 && normal_zero < 1e-6 && eye_zero == 0.0 &&
             std::abs(total - 101.15) < 1e-12;
    r.detail = "photo " + fmt(photo_zero) + ", depth " + fmt(depth_zero) + ", normal " +
               fmt(normal_zero) + ", eye " + fmt(eye_zero) + ", unit total dev " +
               fmt(std::abs(total - 101.15));
    return r;
}

CriterionResult check_toy_fits()
{
    EnergyConfig cfg;

    // Gray-patch color fit.
    GrayPatchSetup gray = make_gray_patch(0.8, 0.2);
    TrainMask sh_mask;
    sh_mask.sh = true;
    const double photo0 =
        photometric_loss(buffers_to_image(render_scene(gray.scene)), gray.target, cfg.beta);
    fit(gray.scene, gray.target, cfg, sh_mask, 200);
    const double photo1 =
        photometric_loss(buffers_to_image(render_scene(gray.scene)), gray.target, cfg.beta);
    const Vec3 recovered = eval_sh(gray.scene.surfels[0].sh, Vec3::UnitZ());
    const double color_err = (recovered - Vec3::Constant(0.8)).cwiseAbs().maxCoeff();
    const bool gray_ok = photo1 <= 0.01 * photo0 && color_err < 0.01;

    // Hinge-seam blend-weight fit against the frozen-uniform baseline. The
    // target differs only photometrically, so the fit runs photometric-only.
    HingeFitSetup hinge = make_hinge_fit(M_PI / 3.0);
    EnergyConfig photo_cfg;
    photo_cfg.lambda_depth = 0.0;
    photo_cfg.lambda_normal = 0.0;
    photo_cfg.lambda_eye = 0.0;
    photo_cfg.lambda_reg = 0.0;
    TrainMask logit_mask;
    logit_mask.logits = true;
    fit(hinge.scene, hinge.target, photo_cfg, logit_mask, 250);
    const double hinge_photo = photometric_loss(buffers_to_image(render_scene(hinge.scene)),
                                                hinge.target, photo_cfg.beta);
    const bool hinge_ok = hinge_photo < 0.1 * hinge.baseline_photo;

    // Eye freeze: R_c and mu_c of eye surfels bit-identical across a fit.
    GrayPatchSetup eye = make_eye_scene();
    TrainMask eye_mask;
    eye_mask.sh = true;
    eye_mask.position = true;
    eye_mask.rotation = true;
    Mat3 r_before = eye.scene.surfels[1].R_c;
    Vec3 mu_before = eye.scene.surfels[1].mu_c;
    const std::vector<double> sh_before = eye.scene.surfels[0].sh.coeffs;
    fit(eye.scene, eye.target, cfg, eye_mask, 8);
    const bool frozen =
        std::memcmp(r_before.data(), eye.scene.surfels[1].R_c.data(), sizeof(Mat3)) == 0 &&
        std::memcmp(mu_before.data(), eye.scene.surfels[1].mu_c.data(), sizeof(Vec3)) == 0;
    const bool others_moved = sh_before != eye.scene.surfels[0].sh.coeffs;

    CriterionResult r;
    r.name = "toy fits (color, blend weights, eye freeze)";
    r.pass = gray_ok && hinge_ok && frozen && others_moved;
    r.detail = "gray " + fmt(photo1) + "/" + fmt(photo0) + " err " + fmt(color_err) + ", hinge " +
               fmt(hinge_photo) + "/" + fmt(hinge.baseline_photo) +
               (frozen ? ", eye frozen" : ", EYE MOVED") +
               (others_moved ? "" : ", OTHERS UNCHANGED");
    return r;
}

} // namespace

SelftestReport run_selftest(int threads)
{
    SelftestReport report;
    report.results.push_back(check_polar_uniqueness());
    report.results.push_back(check_psd_preservation());
    report.results.push_back(check_normal_rule());
    report.results.push_back(check_similarity_parity());
    report.results.push_back(check_jbs_geodesic());
    report.results.push_back(check_hinge_coverage(threads));
    report.results.push_back(check_rasterizer(threads));
    report.results.push_back(check_asg_specular());
    report.results.push_back(check_energy_terms());
    report.results.push_back(check_toy_fits());
    return report;
}

void print_report(const SelftestReport& report, std::ostream& os)
{
    int passed = 0;
    for (std::size_t i = 0; i < report.results.size(); ++i) {
        const CriterionResult& r = report.results[i];
        os << (r.pass ? "PASS" : "FAIL") << "  [" << i + 1 << "/" << report.results.size()
           << "] " << r.name << " (" << r.detail << ")\n";
        if (r.pass) ++passed;
    }
    os << passed << "/" << report.results.size() << " criteria passed\n";
}

} // namespace surfhead
