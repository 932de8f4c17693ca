// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "surfhead/mat3.hpp"

namespace surfhead {

/// Triangles below this area (scene units squared) are degenerate.
inline constexpr double kAreaEps = 1e-12;

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
};

/// Checks face indices (in range, distinct) and triangle areas. Throws
/// DegenerateTriangle / TopologyMismatch with the offending face index.
void validate_mesh(const TriMesh& mesh);

double triangle_area(const Vec3& v0, const Vec3& v1, const Vec3& v2);

/// Mean edge length of one face.
double mean_edge_length(const TriMesh& mesh, int face);

/// Edge matrix with columns v1-v0, v2-v0 and the synthetic normal column
/// (v1-v0)x(v2-v0) / sqrt(|cross|), so the third column points along the
/// unit normal with length sqrt(|cross|) and the whole matrix is
/// scale-covariant. Throws DegenerateTriangle below kAreaEps.
Mat3 build_edge_matrix(const Vec3& v0, const Vec3& v1, const Vec3& v2);

/// Orthonormal per-triangle frame in the GaussianAvatars style.
struct GaFrame {
    Mat3 R_p = Mat3::Identity(); ///< columns: unit base edge, in-plane perpendicular, unit normal
    double s_p = 1.0;            ///< mean of base length and height length
    Vec3 T_p = Vec3::Zero();     ///< barycenter
};

GaFrame build_ga_frame(const Vec3& v0, const Vec3& v1, const Vec3& v2);

/// Everything the rig needs from one triangle of one mesh.
struct TriangleFrame {
    Mat3 E = Mat3::Identity();
    Vec3 T_p = Vec3::Zero();
    Mat3 R_p = Mat3::Identity();
    double s_p = 1.0;

    GaFrame ga() const { return {R_p, s_p, T_p}; }
};

TriangleFrame build_triangle_frame(const Vec3& v0, const Vec3& v1, const Vec3& v2);
std::vector<TriangleFrame> build_frames(const TriMesh& mesh);

enum class AdjacencyMode { Edge, Vertex };

/// Per-triangle neighbor lists. Entry 0 is always the triangle itself,
/// followed by neighbor indices in ascending order.
struct Adjacency {
    std::vector<std::vector<int>> neighbors;

    int triangle_count() const { return static_cast<int>(neighbors.size()); }
};

Adjacency build_adjacency(const TriMesh& mesh, AdjacencyMode mode = AdjacencyMode::Edge);

/// Validates a canonical/deformed mesh pair: identical topology, all
/// triangles non-degenerate, and orientation preserved per face
/// (det of the deformation gradient positive). Throws TopologyMismatch,
/// DegenerateTriangle or InvertedTriangle with the offending face index.
void validate_pair(const TriMesh& canonical, const TriMesh& deformed);

} // namespace surfhead
