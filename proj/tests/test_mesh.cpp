// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "surfhead/mesh.hpp"
#include "surfhead/rng.hpp"

using namespace surfhead;

namespace {

TriMesh icosahedron()
{
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh mesh;
    mesh.vertices = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                     {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                     {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return mesh;
}

int shared_vertices(const TriMesh& mesh, int a, int b)
{
    int count = 0;
    for (int va : mesh.faces[static_cast<std::size_t>(a)]) {
        for (int vb : mesh.faces[static_cast<std::size_t>(b)]) {
            if (va == vb) ++count;
        }
    }
    return count;
}

} // namespace

TEST_CASE("edge matrix of the unit right triangle is the identity")
{
    const Mat3 e = build_edge_matrix({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    CHECK((e - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("edge matrix is scale covariant")
{
    const Mat3 e2 = build_edge_matrix({0, 0, 0}, {2, 0, 0}, {0, 2, 0});
    CHECK((e2 - 2.0 * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);

    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = rng.unit_vector();
        const Vec3 b = a + rng.unit_vector();
        const Vec3 c = a + rng.unit_vector();
        if (triangle_area(a, b, c) < 1e-3) continue;
        const double k = rng.uniform(0.1, 5.0);
        const Mat3 e = build_edge_matrix(a, b, c);
        const Mat3 ek = build_edge_matrix(k * a, k * b, k * c);
        CHECK((ek - k * e).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, k));
    }
}

TEST_CASE("edge matrix is rotation equivariant")
{
    Rng rng(8);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = rng.unit_vector();
        const Vec3 b = a + rng.unit_vector();
        const Vec3 c = a + rng.unit_vector();
        if (triangle_area(a, b, c) < 1e-3) continue;
        const Mat3 r = rng.rotation();
        const Mat3 e = build_edge_matrix(a, b, c);
        const Mat3 er = build_edge_matrix(r * a, r * b, r * c);
        CHECK((er - r * e).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("degenerate triangles are rejected")
{
    CHECK_THROWS_AS(build_edge_matrix({0, 0, 0}, {1, 0, 0}, {2, 0, 0}), DegenerateTriangle);
    CHECK_THROWS_AS(build_ga_frame({0, 0, 0}, {1, 0, 0}, {2, 0, 0}), DegenerateTriangle);
}

TEST_CASE("ga frame of the unit right triangle")
{
    const GaFrame f = build_ga_frame({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    CHECK((f.R_p - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((f.T_p - Vec3(1.0 / 3.0, 1.0 / 3.0, 0.0)).norm() < 1e-15);
    CHECK(f.s_p == doctest::Approx(1.0));
}

TEST_CASE("ga scale ratios under uniform and anisotropic stretch")
{
    const GaFrame base = build_ga_frame({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const GaFrame doubled = build_ga_frame({0, 0, 0}, {2, 0, 0}, {0, 2, 0});
    CHECK(doubled.s_p / base.s_p == doctest::Approx(2.0));

    // Base stretched x2, height unchanged: the mean-length ratio is 1.5.
    const GaFrame aniso = build_ga_frame({0, 0, 0}, {2, 0, 0}, {0, 1, 0});
    const double base_len = 2.0;
    const double height_len = ((Vec3(2, 0, 0) - Vec3(0, 0, 0)).cross(Vec3(0, 1, 0))).norm() / 2.0;
    CHECK(aniso.s_p == doctest::Approx(0.5 * (base_len + height_len)));
    CHECK(aniso.s_p / base.s_p == doctest::Approx(1.5));
}

TEST_CASE("frames of random triangles are orthonormal with positive scale")
{
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const Vec3 a = 2.0 * rng.unit_vector();
        const Vec3 b = a + rng.unit_vector();
        const Vec3 c = a + rng.unit_vector();
        if (triangle_area(a, b, c) < 1e-3) continue;
        const TriangleFrame f = build_triangle_frame(a, b, c);
        CHECK((f.R_p.transpose() * f.R_p - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(f.R_p.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.s_p > 0.0);
        CHECK(f.E.determinant() > 0.0);
    }
}

TEST_CASE("adjacency of a single triangle is just itself")
{
    TriMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    mesh.faces = {{0, 1, 2}};
    const Adjacency adj = build_adjacency(mesh);
    REQUIRE(adj.neighbors.size() == 1);
    CHECK(adj.neighbors[0] == std::vector<int>{0});
}

TEST_CASE("adjacency of two triangles sharing an edge")
{
    TriMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    mesh.faces = {{0, 1, 2}, {1, 3, 2}};
    const Adjacency adj = build_adjacency(mesh);
    CHECK(adj.neighbors[0] == std::vector<int>{0, 1});
    CHECK(adj.neighbors[1] == std::vector<int>{1, 0});
}

TEST_CASE("icosahedron edge adjacency matches brute force")
{
    const TriMesh mesh = icosahedron();
    const Adjacency adj = build_adjacency(mesh, AdjacencyMode::Edge);
    for (int t = 0; t < mesh.face_count(); ++t) {
        const auto& list = adj.neighbors[static_cast<std::size_t>(t)];
        REQUIRE(list.size() == 4); // self + 3 edge neighbors
        CHECK(list[0] == t);
        CHECK(std::is_sorted(list.begin() + 1, list.end()));

        std::set<int> brute;
        for (int o = 0; o < mesh.face_count(); ++o) {
            if (o != t && shared_vertices(mesh, t, o) == 2) brute.insert(o);
        }
        CHECK(std::set<int>(list.begin() + 1, list.end()) == brute);
    }
}

TEST_CASE("vertex adjacency matches brute force and is symmetric")
{
    const TriMesh mesh = icosahedron();
    const Adjacency adj = build_adjacency(mesh, AdjacencyMode::Vertex);
    for (int t = 0; t < mesh.face_count(); ++t) {
        const auto& list = adj.neighbors[static_cast<std::size_t>(t)];
        CHECK(list[0] == t);
        std::set<int> brute;
        for (int o = 0; o < mesh.face_count(); ++o) {
            if (o != t && shared_vertices(mesh, t, o) >= 1) brute.insert(o);
        }
        CHECK(std::set<int>(list.begin() + 1, list.end()) == brute);
        for (int n : brute) {
            const auto& other = adj.neighbors[static_cast<std::size_t>(n)];
            CHECK(std::find(other.begin(), other.end(), t) != other.end());
        }
    }
}

TEST_CASE("validate_pair accepts a mesh against itself")
{
    const TriMesh mesh = icosahedron();
    CHECK_NOTHROW(validate_pair(mesh, mesh));
}

TEST_CASE("validate_pair flags topology mismatches")
{
    const TriMesh mesh = icosahedron();
    TriMesh reindexed = mesh;
    std::swap(reindexed.faces[3][0], reindexed.faces[3][1]);
    CHECK_THROWS_AS(validate_pair(mesh, reindexed), TopologyMismatch);

    TriMesh fewer = mesh;
    fewer.faces.pop_back();
    CHECK_THROWS_AS(validate_pair(mesh, fewer), TopologyMismatch);
}

TEST_CASE("validate_pair flags an inverted triangle")
{
    TriMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    mesh.faces = {{0, 1, 2}, {1, 3, 2}};
    TriMesh mirrored = mesh;
    // Mirror the second triangle's apex across the shared edge.
    mirrored.vertices[3] = Vec3(0.0, 0.0, 0.0) + Vec3(1.0, -1.0, 0.0);
    CHECK_THROWS_AS(validate_pair(mesh, mirrored), InvertedTriangle);
}

TEST_CASE("validate_mesh rejects bad indices and repeated vertices")
{
    TriMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    mesh.faces = {{0, 1, 5}};
    CHECK_THROWS_AS(validate_mesh(mesh), TopologyMismatch);
    mesh.faces = {{0, 1, 1}};
    CHECK_THROWS_AS(validate_mesh(mesh), TopologyMismatch);
    mesh.faces = {{0, 1, 2}};
    CHECK_NOTHROW(validate_mesh(mesh));
}
