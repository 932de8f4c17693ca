// SPDX-License-Identifier: Apache-2.0
#include "surfhead/obj_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace surfhead {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what)
{
    std::ostringstream msg;
    msg << path << ":" << line << ": " << what;
    throw ParseError(msg.str());
}

/// An `f` entry is `v`, `v/vt`, `v//vn` or `v/vt/vn`; only v matters here.
int face_index(const std::string& token, const std::string& path, int line, int vertex_count)
{
    std::size_t slash = token.find('/');
    const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    int idx = 0;
    try {
        idx = std::stoi(head);
    } catch (const std::exception&) {
        parse_fail(path, line, "bad face index '" + token + "'");
    }
    if (idx < 1 || idx > vertex_count) {
        parse_fail(path, line, "face index " + head + " out of range");
    }
    return idx - 1;
}

} // namespace

TriMesh load_obj(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    TriMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ss >> v.x() >> v.y() >> v.z())) {
                parse_fail(path, line_no, "malformed vertex record");
            }
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string token;
            while (ss >> token) {
                idx.push_back(face_index(token, path, line_no, mesh.vertex_count()));
            }
            if (idx.size() < 3) parse_fail(path, line_no, "face with fewer than 3 vertices");
            if (idx.size() > 3) {
                std::ostringstream msg;
                msg << path << ":" << line_no << ": face with " << idx.size() << " vertices";
                throw NonTriangleFace(msg.str());
            }
            mesh.faces.push_back({idx[0], idx[1], idx[2]});
        }
        // vn/vt/usemtl/... are ignored
    }
    return mesh;
}

void save_obj(const TriMesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : mesh.faces) {
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

} // namespace surfhead
