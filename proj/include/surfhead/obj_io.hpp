// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "surfhead/mesh.hpp"

namespace surfhead {

/// Parses `v` and triangular `f` records (1-based indices; texture/normal
/// slots and other record types are ignored). Throws ParseError with the
/// line number, or NonTriangleFace for polygons with more than 3 vertices.
TriMesh load_obj(const std::string& path);

void save_obj(const TriMesh& mesh, const std::string& path);

} // namespace surfhead
