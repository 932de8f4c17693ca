// SPDX-License-Identifier: Apache-2.0
#include "surfhead/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace surfhead {

double triangle_area(const Vec3& v0, const Vec3& v1, const Vec3& v2)
{
    return 0.5 * (v1 - v0).cross(v2 - v0).norm();
}

double mean_edge_length(const TriMesh& mesh, int face)
{
    const auto& f = mesh.faces.at(static_cast<std::size_t>(face));
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    return ((a - b).norm() + (b - c).norm() + (c - a).norm()) / 3.0;
}

void validate_mesh(const TriMesh& mesh)
{
    const int nv = mesh.vertex_count();
    for (int t = 0; t < mesh.face_count(); ++t) {
        const auto& f = mesh.faces[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            if (f[static_cast<std::size_t>(k)] < 0 || f[static_cast<std::size_t>(k)] >= nv) {
                std::ostringstream msg;
                msg << "face " << t << ": vertex index " << f[static_cast<std::size_t>(k)]
                    << " out of range [0, " << nv << ")";
                throw TopologyMismatch(msg.str());
            }
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
            std::ostringstream msg;
            msg << "face " << t << ": repeated vertex index";
            throw TopologyMismatch(msg.str());
        }
        const double area = triangle_area(mesh.vertices[static_cast<std::size_t>(f[0])],
                                          mesh.vertices[static_cast<std::size_t>(f[1])],
                                          mesh.vertices[static_cast<std::size_t>(f[2])]);
        if (area < kAreaEps) {
            std::ostringstream msg;
            msg << "face " << t << ": area " << area << " below " << kAreaEps;
            throw DegenerateTriangle(msg.str());
        }
    }
}

Mat3 build_edge_matrix(const Vec3& v0, const Vec3& v1, const Vec3& v2)
{
    const Vec3 e1 = v1 - v0;
    const Vec3 e2 = v2 - v0;
    const Vec3 cross = e1.cross(e2);
    const double cn = cross.norm();
    if (0.5 * cn < kAreaEps) {
        throw DegenerateTriangle("build_edge_matrix: degenerate triangle");
    }
    Mat3 e;
    e.col(0) = e1;
    e.col(1) = e2;
    e.col(2) = cross / std::sqrt(cn);
    return e;
}

GaFrame build_ga_frame(const Vec3& v0, const Vec3& v1, const Vec3& v2)
{
    const Vec3 e1 = v1 - v0;
    const Vec3 e2 = v2 - v0;
    const Vec3 cross = e1.cross(e2);
    const double cn = cross.norm();
    if (0.5 * cn < kAreaEps) {
        throw DegenerateTriangle("build_ga_frame: degenerate triangle");
    }

    const double base_len = e1.norm();
    const double height_len = cn / base_len; // distance from v2 to the base line

    GaFrame out;
    const Vec3 base = e1 / base_len;
    const Vec3 normal = cross / cn;
    out.R_p.col(0) = base;
    out.R_p.col(1) = normal.cross(base);
    out.R_p.col(2) = normal;
    out.s_p = 0.5 * (base_len + height_len);
    out.T_p = (v0 + v1 + v2) / 3.0;
    return out;
}

TriangleFrame build_triangle_frame(const Vec3& v0, const Vec3& v1, const Vec3& v2)
{
    TriangleFrame out;
    out.E = build_edge_matrix(v0, v1, v2);
    const GaFrame ga = build_ga_frame(v0, v1, v2);
    out.R_p = ga.R_p;
    out.s_p = ga.s_p;
    out.T_p = ga.T_p;
    return out;
}

std::vector<TriangleFrame> build_frames(const TriMesh& mesh)
{
    std::vector<TriangleFrame> frames;
    frames.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces) {
        frames.push_back(build_triangle_frame(mesh.vertices[static_cast<std::size_t>(f[0])],
                                              mesh.vertices[static_cast<std::size_t>(f[1])],
                                              mesh.vertices[static_cast<std::size_t>(f[2])]));
    }
    return frames;
}

Adjacency build_adjacency(const TriMesh& mesh, AdjacencyMode mode)
{
    const int nt = mesh.face_count();
    std::vector<std::set<int>> found(static_cast<std::size_t>(nt));

    if (mode == AdjacencyMode::Edge) {
        std::map<std::pair<int, int>, std::vector<int>> edge_faces;
        for (int t = 0; t < nt; ++t) {
            const auto& f = mesh.faces[static_cast<std::size_t>(t)];
            for (int k = 0; k < 3; ++k) {
                int a = f[static_cast<std::size_t>(k)];
                int b = f[static_cast<std::size_t>((k + 1) % 3)];
                if (a > b) std::swap(a, b);
                edge_faces[{a, b}].push_back(t);
            }
        }
        for (const auto& [edge, faces] : edge_faces) {
            for (std::size_t i = 0; i < faces.size(); ++i) {
                for (std::size_t j = i + 1; j < faces.size(); ++j) {
                    found[static_cast<std::size_t>(faces[i])].insert(faces[j]);
                    found[static_cast<std::size_t>(faces[j])].insert(faces[i]);
                }
            }
        }
    } else {
        std::map<int, std::vector<int>> vertex_faces;
        for (int t = 0; t < nt; ++t) {
            for (int v : mesh.faces[static_cast<std::size_t>(t)]) {
                vertex_faces[v].push_back(t);
            }
        }
        for (const auto& [vertex, faces] : vertex_faces) {
            for (std::size_t i = 0; i < faces.size(); ++i) {
                for (std::size_t j = i + 1; j < faces.size(); ++j) {
                    found[static_cast<std::size_t>(faces[i])].insert(faces[j]);
                    found[static_cast<std::size_t>(faces[j])].insert(faces[i]);
                }
            }
        }
    }

    Adjacency adj;
    adj.neighbors.resize(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        auto& list = adj.neighbors[static_cast<std::size_t>(t)];
        list.push_back(t);
        list.insert(list.end(), found[static_cast<std::size_t>(t)].begin(),
                    found[static_cast<std::size_t>(t)].end());
    }
    return adj;
}

void validate_pair(const TriMesh& canonical, const TriMesh& deformed)
{
    if (canonical.vertex_count() != deformed.vertex_count()) {
        throw TopologyMismatch("vertex counts differ");
    }
    if (canonical.face_count() != deformed.face_count()) {
        throw TopologyMismatch("face counts differ");
    }
    for (int t = 0; t < canonical.face_count(); ++t) {
        if (canonical.faces[static_cast<std::size_t>(t)] != deformed.faces[static_cast<std::size_t>(t)]) {
            std::ostringstream msg;
            msg << "face " << t << ": index lists differ";
            throw TopologyMismatch(msg.str());
        }
    }
    validate_mesh(canonical);
    validate_mesh(deformed);

    // Orientation check. Both edge matrices rebuild their synthetic normal
    // column from their own cross product, which keeps det(E_def E^-1)
    // positive even for a mirrored face; transporting the canonical fourth
    // vertex as a rigid offset instead makes the determinant sign carry the
    // face's orientation flip.
    for (int t = 0; t < canonical.face_count(); ++t) {
        const auto& f = canonical.faces[static_cast<std::size_t>(t)];
        const Mat3 e = build_edge_matrix(canonical.vertices[static_cast<std::size_t>(f[0])],
                                         canonical.vertices[static_cast<std::size_t>(f[1])],
                                         canonical.vertices[static_cast<std::size_t>(f[2])]);
        Mat3 e_def = build_edge_matrix(deformed.vertices[static_cast<std::size_t>(f[0])],
                                       deformed.vertices[static_cast<std::size_t>(f[1])],
                                       deformed.vertices[static_cast<std::size_t>(f[2])]);
        e_def.col(2) = e.col(2);
        const double det = (e_def * e.inverse()).determinant();
        if (!(det > 0.0)) {
            std::ostringstream msg;
            msg << "face " << t << ": deformation gradient determinant " << det;
            throw InvertedTriangle(msg.str());
        }
    }
}

} // namespace surfhead
