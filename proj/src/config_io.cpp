// SPDX-License-Identifier: Apache-2.0
#include "surfhead/config_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace surfhead {

using nlohmann::json;

namespace {

json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Vec3 vec3_from(const json& j, const std::string& what)
{
    if (!j.is_array() || j.size() != 3) throw ParseError(what + " must be a 3-array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void require_path(const std::string& path, const std::string& what)
{
    if (!std::filesystem::exists(path)) {
        throw IoError(what + " does not exist: " + path);
    }
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& what)
{
    if (!j.is_array() || j.empty()) throw ParseError(what + " must be a nested array");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw ParseError(what + " has ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
    return m;
}

json matrix_to(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::VectorXd vector_from(const json& j)
{
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

json vector_to(const Eigen::VectorXd& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

} // namespace

RunConfig load_run_config(const std::string& path)
{
    const json j = load_json(path);
    RunConfig cfg;

    if (!j.contains("canonical_mesh")) throw ParseError(path + ": canonical_mesh is required");
    cfg.canonical_mesh = j.at("canonical_mesh").get<std::string>();
    require_path(cfg.canonical_mesh, "canonical_mesh");

    if (j.contains("deformed_mesh")) {
        cfg.deformed_mesh = j.at("deformed_mesh").get<std::string>();
        require_path(*cfg.deformed_mesh, "deformed_mesh");
    }
    if (j.contains("surfel_set")) {
        cfg.surfel_set = j.at("surfel_set").get<std::string>();
        require_path(*cfg.surfel_set, "surfel_set");
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);

    if (j.contains("camera")) {
        const json& c = j.at("camera");
        if (c.contains("position")) cfg.camera.position = vec3_from(c.at("position"), "camera.position");
        if (c.contains("look_at")) cfg.camera.look_at = vec3_from(c.at("look_at"), "camera.look_at");
        if (c.contains("up")) cfg.camera.up = vec3_from(c.at("up"), "camera.up");
        cfg.camera.fov_y = c.value("fov_y", cfg.camera.fov_y);
        cfg.camera.width = c.value("width", cfg.camera.width);
        cfg.camera.height = c.value("height", cfg.camera.height);
        cfg.camera.validate();
    }
    if (j.contains("background")) cfg.background = vec3_from(j.at("background"), "background");
    cfg.near = j.value("near", cfg.near);
    cfg.far = j.value("far", cfg.far);
    if (!(cfg.near >= 0.0) || !(cfg.far > cfg.near)) {
        throw ParseError(path + ": need 0 <= near < far");
    }

    const std::string adjacency = j.value("adjacency", std::string("edge"));
    if (adjacency == "edge") {
        cfg.adjacency = AdjacencyMode::Edge;
    } else if (adjacency == "vertex") {
        cfg.adjacency = AdjacencyMode::Vertex;
    } else {
        throw ParseError(path + ": adjacency must be 'edge' or 'vertex'");
    }

    cfg.surfels_per_triangle = j.value("surfels_per_triangle", cfg.surfels_per_triangle);
    if (cfg.surfels_per_triangle < 1) throw ParseError(path + ": surfels_per_triangle must be >= 1");
    cfg.sh_degree = j.value("sh_degree", cfg.sh_degree);
    if (cfg.sh_degree < 0 || cfg.sh_degree > 3) throw ParseError(path + ": sh_degree must be in [0, 3]");
    cfg.asg_grid = j.value("asg_grid", cfg.asg_grid);
    if (cfg.asg_grid < 1) throw ParseError(path + ": asg_grid must be >= 1");
    cfg.seed = j.value("seed", cfg.seed);

    if (j.contains("energy")) {
        const json& e = j.at("energy");
        cfg.energy.lambda_depth = e.value("lambda_depth", cfg.energy.lambda_depth);
        cfg.energy.lambda_normal = e.value("lambda_normal", cfg.energy.lambda_normal);
        cfg.energy.lambda_eye = e.value("lambda_eye", cfg.energy.lambda_eye);
        cfg.energy.beta = e.value("beta", cfg.energy.beta);
        cfg.energy.eps_pos = e.value("eps_pos", cfg.energy.eps_pos);
        cfg.energy.eps_scale = e.value("eps_scale", cfg.energy.eps_scale);
        cfg.energy.lambda_reg = e.value("lambda_reg", cfg.energy.lambda_reg);
        cfg.energy.freeze_eyes = e.value("freeze_eyes", cfg.energy.freeze_eyes);
        if (cfg.energy.lambda_depth < 0 || cfg.energy.lambda_normal < 0 ||
            cfg.energy.lambda_eye < 0 || cfg.energy.lambda_reg < 0) {
            throw ParseError(path + ": energy weights must be >= 0");
        }
        if (cfg.energy.beta < 0.0 || cfg.energy.beta > 1.0) {
            throw ParseError(path + ": energy.beta must be in [0, 1]");
        }
    }

    if (j.contains("fit")) {
        const json& f = j.at("fit");
        if (f.contains("target")) {
            cfg.fit_target = f.at("target").get<std::string>();
            require_path(*cfg.fit_target, "fit.target");
        }
        cfg.fit_iterations = f.value("iterations", cfg.fit_iterations);
        if (cfg.fit_iterations < 0) throw ParseError(path + ": fit.iterations must be >= 0");
        if (f.contains("trainable")) {
            for (const auto& name : f.at("trainable")) {
                const std::string s = name.get<std::string>();
                if (s == "sh") cfg.fit_mask.sh = true;
                else if (s == "alpha") cfg.fit_mask.alpha = true;
                else if (s == "logits") cfg.fit_mask.logits = true;
                else if (s == "head") cfg.fit_mask.head = true;
                else if (s == "lobes") cfg.fit_mask.lobes = true;
                else if (s == "position") cfg.fit_mask.position = true;
                else if (s == "rotation") cfg.fit_mask.rotation = true;
                else throw ParseError(path + ": unknown trainable group '" + s + "'");
            }
        }
    }
    return cfg;
}

Eigen::Vector4d quat_from_rotation(const Mat3& r)
{
    // Shepperd's method, then canonicalize w >= 0.
    Eigen::Vector4d q; // (w, x, y, z)
    const double tr = r.trace();
    if (tr > 0.0) {
        double s = std::sqrt(tr + 1.0) * 2.0;
        q << 0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        q << (r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        q << (r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s;
    } else {
        double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        q << (r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s;
    }
    if (q(0) < 0.0) q = -q;
    return q.normalized();
}

Mat3 rotation_from_quat(const Eigen::Vector4d& q)
{
    const double w = q(0), x = q(1), y = q(2), z = q(3);
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

SurfelSet load_surfel_set(const std::string& path)
{
    const json j = load_json(path);
    if (j.value("schema_version", 0) != kSurfelSchemaVersion) {
        throw ParseError(path + ": unsupported schema_version");
    }
    SurfelSet set;
    set.sh_degree = j.value("sh_degree", 3);

    for (const json& rec : j.at("surfels")) {
        Surfel s;
        s.parent = rec.at("parent").get<int>();
        s.mu_c = vec3_from(rec.at("mu_c"), "mu_c");
        const json& rot = rec.at("rot");
        if (!rot.is_array() || rot.size() != 4) throw ParseError(path + ": rot must be a 4-array");
        Eigen::Vector4d q(rot[0].get<double>(), rot[1].get<double>(), rot[2].get<double>(),
                          rot[3].get<double>());
        if (std::abs(q.norm() - 1.0) > 1e-6) {
            throw ParseError(path + ": non-unit quaternion in surfel record");
        }
        s.R_c = rotation_from_quat(q.normalized());
        s.s1 = rec.at("scales")[0].get<double>();
        s.s2 = rec.at("scales")[1].get<double>();
        if (!(s.s1 > 0.0) || !(s.s2 > 0.0)) throw ParseError(path + ": scales must be positive");
        s.alpha = rec.at("alpha").get<double>();
        if (s.alpha < 0.0 || s.alpha > 1.0) throw ParseError(path + ": alpha out of [0, 1]");
        s.sh = SHBlock(set.sh_degree);
        const json& sh = rec.at("sh");
        if (sh.size() != s.sh.coeffs.size()) throw ParseError(path + ": sh coefficient count");
        for (std::size_t k = 0; k < s.sh.coeffs.size(); ++k) s.sh.coeffs[k] = sh[k].get<double>();
        s.eye_flag = rec.value("eye", false);
        set.surfels.push_back(std::move(s));
    }

    if (j.contains("blend_logits")) {
        for (const json& row : j.at("blend_logits")) {
            std::vector<double> logits;
            for (const json& v : row) logits.push_back(v.get<double>());
            set.blend_logits.push_back(std::move(logits));
        }
    }

    if (j.contains("specular")) {
        const json& sp = j.at("specular");
        SpecularHead head;
        head.pe_freqs = sp.value("pe_freqs", 4);
        for (const json& lj : sp.at("lobes")) {
            ASGLobe lobe;
            lobe.z = vec3_from(lj.at("z"), "lobe.z");
            lobe.x = vec3_from(lj.at("x"), "lobe.x");
            lobe.y = vec3_from(lj.at("y"), "lobe.y");
            lobe.lambda = lj.at("lambda").get<double>();
            lobe.mu = lj.at("mu").get<double>();
            lobe.xi = lj.at("xi").get<double>();
            if (lobe.lambda < 0 || lobe.mu < 0 || lobe.xi < 0) {
                throw ParseError(path + ": lobe parameters must be >= 0");
            }
            head.lobes.push_back(lobe);
        }
        head.W1 = matrix_from(sp.at("W1"), "W1");
        head.b1 = vector_from(sp.at("b1"));
        head.W2 = matrix_from(sp.at("W2"), "W2");
        head.b2 = vector_from(sp.at("b2"));
        head.W3 = matrix_from(sp.at("W3"), "W3");
        head.b3 = vector_from(sp.at("b3"));
        head.validate();
        set.head = std::move(head);
    }
    return set;
}

void save_surfel_set(const SurfelSet& set, const std::string& path)
{
    json j;
    j["schema_version"] = kSurfelSchemaVersion;
    j["sh_degree"] = set.sh_degree;

    json surfels = json::array();
    for (const Surfel& s : set.surfels) {
        const Eigen::Vector4d q = quat_from_rotation(s.R_c);
        json rec;
        rec["parent"] = s.parent;
        rec["mu_c"] = {s.mu_c.x(), s.mu_c.y(), s.mu_c.z()};
        rec["rot"] = {q(0), q(1), q(2), q(3)};
        rec["scales"] = {s.s1, s.s2};
        rec["alpha"] = s.alpha;
        rec["sh"] = s.sh.coeffs;
        rec["eye"] = s.eye_flag;
        surfels.push_back(std::move(rec));
    }
    j["surfels"] = std::move(surfels);
    j["blend_logits"] = set.blend_logits;

    json sp;
    sp["pe_freqs"] = set.head.pe_freqs;
    json lobes = json::array();
    for (const ASGLobe& lobe : set.head.lobes) {
        lobes.push_back({{"z", {lobe.z.x(), lobe.z.y(), lobe.z.z()}},
                         {"x", {lobe.x.x(), lobe.x.y(), lobe.x.z()}},
                         {"y", {lobe.y.x(), lobe.y.y(), lobe.y.z()}},
                         {"lambda", lobe.lambda},
                         {"mu", lobe.mu},
                         {"xi", lobe.xi}});
    }
    sp["lobes"] = std::move(lobes);
    sp["W1"] = matrix_to(set.head.W1);
    sp["b1"] = vector_to(set.head.b1);
    sp["W2"] = matrix_to(set.head.W2);
    sp["b2"] = vector_to(set.head.b2);
    sp["W3"] = matrix_to(set.head.W3);
    sp["b3"] = vector_to(set.head.b3);
    j["specular"] = std::move(sp);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(1) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

void save_deformed_ply(std::span<const DeformedSurfel> surfels, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);

    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << surfels.size() << "\n";
    for (const char* name : {"x", "y", "z", "nx", "ny", "nz", "s1", "s2", "opacity"}) {
        out << "property float " << name << "\n";
    }
    out << "end_header\n";

    for (const DeformedSurfel& s : surfels) {
        const float rec[9] = {
            static_cast<float>(s.mu.x()),  static_cast<float>(s.mu.y()),
            static_cast<float>(s.mu.z()),  static_cast<float>(s.n_d.x()),
            static_cast<float>(s.n_d.y()), static_cast<float>(s.n_d.z()),
            static_cast<float>(s.H.col(0).norm()), static_cast<float>(s.H.col(1).norm()),
            static_cast<float>(s.alpha)};
        out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
    }
    if (!out) throw IoError("write failed for " + path);
}

} // namespace surfhead
