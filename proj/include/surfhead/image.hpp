// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "surfhead/mat3.hpp"

namespace surfhead {

/// Row-major RGB image with double channels (usually in [0, 1]).
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> rgb;

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0.0) {}

    double& at(int x, int y, int c)
    {
        return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + static_cast<std::size_t>(c)];
    }
    double at(int x, int y, int c) const
    {
        return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + static_cast<std::size_t>(c)];
    }

    void fill(const Vec3& color)
    {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                for (int c = 0; c < 3; ++c) at(x, y, c) = color[c];
    }
};

} // namespace surfhead
