// SPDX-License-Identifier: Apache-2.0
#include "surfhead/commands.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include <nlohmann/json.hpp>

#include "surfhead/image_io.hpp"
#include "surfhead/obj_io.hpp"
#include "surfhead/selftest.hpp"
#include "surfhead/toy_scenes.hpp"

namespace surfhead {

using nlohmann::json;

namespace {

RunConfig load_config(const CommandOptions& opt)
{
    RunConfig cfg = load_run_config(opt.config_path);
    if (opt.out_dir) cfg.output_dir = *opt.out_dir;
    if (opt.seed) cfg.seed = *opt.seed;
    return cfg;
}

/// Surfel set from the config: loaded when a path is given, otherwise bound
/// fresh on the canonical mesh.
SurfelSet obtain_surfels(const RunConfig& cfg, const TriMesh& canonical)
{
    if (cfg.surfel_set) {
        SurfelSet set = load_surfel_set(*cfg.surfel_set);
        for (const Surfel& s : set.surfels) {
            if (s.parent < 0 || s.parent >= canonical.face_count()) {
                throw ParseError("surfel parent index out of range for the canonical mesh");
            }
        }
        return set;
    }
    SurfelSet set;
    set.surfels = bind_surfels(canonical, cfg.surfels_per_triangle, cfg.seed);
    set.sh_degree = 3;
    set.head = SpecularHead::zero(cfg.asg_grid);
    return set;
}

BlendTopology topology_for(const RunConfig& cfg, const TriMesh& canonical, const SurfelSet& set)
{
    BlendTopology topo = BlendTopology::uniform(build_adjacency(canonical, cfg.adjacency));
    if (!set.blend_logits.empty()) {
        if (set.blend_logits.size() != topo.logits.size()) {
            throw ParseError("blend_logits triangle count does not match the mesh");
        }
        for (std::size_t t = 0; t < topo.logits.size(); ++t) {
            if (set.blend_logits[t].size() != topo.logits[t].size()) {
                throw ParseError("blend_logits neighbor count does not match the adjacency");
            }
        }
        topo.logits = set.blend_logits;
    }
    return topo;
}

double condition_number(const Mat3& m)
{
    Eigen::JacobiSVD<Mat3> svd(m);
    const double smin = svd.singularValues().minCoeff();
    return smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                      : std::numeric_limits<double>::infinity();
}

int run_guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const DivergedLoss& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

} // namespace

int cmd_deform(const CommandOptions& opt)
{
    return run_guarded([&] {
        const RunConfig cfg = load_config(opt);
        const TriMesh canonical = load_obj(cfg.canonical_mesh);
        if (!cfg.deformed_mesh) throw ParseError("deform: config needs deformed_mesh");
        const TriMesh deformed = load_obj(*cfg.deformed_mesh);

        SurfelSet set = obtain_surfels(cfg, canonical);
        const BlendTopology topo = topology_for(cfg, canonical, set);
        const PoseJacobians pose = build_pose_jacobians(canonical, deformed);
        const std::vector<DeformedSurfel> out = deform_all(set.surfels, pose, topo);

        std::filesystem::create_directories(cfg.output_dir);
        set.blend_logits = topo.logits;
        save_surfel_set(set, cfg.output_dir + "/surfels.json");
        save_deformed_ply(out, cfg.output_dir + "/deformed.ply");

        // Diagnostics: per-triangle determinant/conditioning and the PSD
        // status of every deformed covariance.
        json diag;
        json tris = json::array();
        for (std::size_t t = 0; t < pose.J.size(); ++t) {
            tris.push_back({{"triangle", t},
                            {"det", pose.J[t].determinant()},
                            {"cond", condition_number(pose.J[t])}});
        }
        diag["triangles"] = std::move(tris);
        bool all_psd = true;
        for (const DeformedSurfel& ds : out) {
            if (!is_psd(ds.H * ds.H.transpose())) all_psd = false;
        }
        diag["all_covariances_psd"] = all_psd;
        diag["surfels"] = out.size();
        std::ofstream diag_out(cfg.output_dir + "/diagnostics.json");
        diag_out << diag.dump(1) << "\n";
        if (!diag_out) throw IoError("cannot write diagnostics.json");

        std::cout << "deformed " << out.size() << " surfels over " << pose.J.size()
                  << " triangles\n";
        return kExitOk;
    });
}

int cmd_render(const CommandOptions& opt)
{
    return run_guarded([&] {
        const RunConfig cfg = load_config(opt);
        const TriMesh canonical = load_obj(cfg.canonical_mesh);
        const SurfelSet set = obtain_surfels(cfg, canonical);
        const BlendTopology topo = topology_for(cfg, canonical, set);

        std::vector<DeformedSurfel> deformed;
        if (cfg.deformed_mesh) {
            const TriMesh target = load_obj(*cfg.deformed_mesh);
            const PoseJacobians pose = build_pose_jacobians(canonical, target);
            deformed = deform_all(set.surfels, pose, topo);
        } else {
            const std::vector<TriangleFrame> frames = build_frames(canonical);
            deformed.reserve(set.surfels.size());
            for (const Surfel& s : set.surfels) {
                deformed.push_back(deform_surfel(s, Mat3::Identity(),
                                                 frames[static_cast<std::size_t>(s.parent)].T_p));
            }
        }

        const RenderBuffers buffers = render(deformed, set.head, cfg.camera, cfg.background,
                                             cfg.far, opt.threads);
        save_buffers(buffers, cfg.output_dir, cfg.near, cfg.far);
        std::cout << "weight closure max residual: " << weight_closure_residual(buffers) << "\n";
        return kExitOk;
    });
}

int cmd_interp_demo(const CommandOptions& opt)
{
    return run_guarded([&] {
        std::string out_dir = opt.out_dir.value_or("out");
        std::filesystem::create_directories(out_dir);

        {
            std::ofstream csv(out_dir + "/interp.csv");
            csv << "t,det_lerp,cond_lerp,det_jbs,cond_jbs\n";
            for (const InterpRow& row : interp_table()) {
                csv << row.t << "," << row.det_lerp << "," << row.cond_lerp << "," << row.det_jbs
                    << "," << row.cond_jbs << "\n";
            }
            if (!csv) throw IoError("cannot write interp.csv");
        }

        HingeDemoParams params;
        params.threads = opt.threads;
        const HingeRenders renders = hinge_renders(params);
        const HingeCoverage cov = hinge_coverage(params);
        save_buffers(renders.jacobian, out_dir + "/hinge_jacobian", 0.01, 10.0);
        save_buffers(renders.ga, out_dir + "/hinge_ga", 0.01, 10.0);
        {
            std::ofstream csv(out_dir + "/coverage.csv");
            csv << "method,gap_pixels,target_pixels\n";
            csv << "jacobian," << cov.gap_jacobian << "," << cov.target_pixels << "\n";
            csv << "ga," << cov.gap_ga << "," << cov.target_pixels << "\n";
            if (!csv) throw IoError("cannot write coverage.csv");
        }

        std::cout << "coverage gap: jacobian " << cov.gap_jacobian << " px, ga " << cov.gap_ga
                  << " px (target " << cov.target_pixels << " px)\n";
        return kExitOk;
    });
}

int cmd_fit(const CommandOptions& opt)
{
    return run_guarded([&] {
        const RunConfig cfg = load_config(opt);
        if (!cfg.fit_target) throw ParseError("fit: config needs fit.target");

        const TriMesh canonical = load_obj(cfg.canonical_mesh);
        SurfelSet set = obtain_surfels(cfg, canonical);

        FitScene scene;
        scene.canonical = canonical;
        if (cfg.deformed_mesh) scene.deformed = load_obj(*cfg.deformed_mesh);
        scene.surfels = set.surfels;
        scene.topology = topology_for(cfg, canonical, set);
        scene.head = set.head;
        scene.camera = cfg.camera;
        scene.background = cfg.background;
        scene.far = cfg.far;
        scene.threads = opt.threads;

        const Image target = load_png(*cfg.fit_target);
        if (target.width != cfg.camera.width || target.height != cfg.camera.height) {
            throw DimensionMismatch("fit: target size does not match the camera");
        }

        const FitState state = fit(scene, target, cfg.energy, cfg.fit_mask, cfg.fit_iterations);

        std::filesystem::create_directories(cfg.output_dir);
        set.surfels = scene.surfels;
        set.blend_logits = scene.topology.logits;
        set.head = scene.head;
        save_surfel_set(set, cfg.output_dir + "/fitted.json");
        {
            std::ofstream log(cfg.output_dir + "/fit_log.jsonl");
            for (const std::string& line : state.log_lines) log << line << "\n";
            if (!log) throw IoError("cannot write fit_log.jsonl");
        }
        std::cout << "fit: total " << state.initial_total << " -> " << state.final_total << " in "
                  << state.iterations << " iterations\n";
        return kExitOk;
    });
}

int cmd_selftest(int threads, const std::string& mutate)
{
    if (!mutate.empty()) {
        if (mutate == "invt-sign") {
            testhooks::flip_inverse_transpose_sign = true;
        } else {
            std::cerr << "error: unknown mutation '" << mutate << "'\n";
            return kExitInputError;
        }
    }
    const SelftestReport report = run_selftest(threads);
    print_report(report, std::cout);
    return report.all_pass() ? kExitOk : kExitSelftestFail;
}

} // namespace surfhead
