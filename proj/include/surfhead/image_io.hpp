// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "surfhead/image.hpp"
#include "surfhead/render.hpp"

namespace surfhead {

/// Loads an 8- or 16-bit PNG as RGB in [0, 1] (gray expanded, alpha dropped).
Image load_png(const std::string& path);

/// 8-bit RGB, channels clamped to [0, 1].
void save_png_rgb8(const Image& img, const std::string& path);

/// 16-bit grayscale from values already scaled to [0, 1].
void save_png_gray16(const std::vector<double>& values, int width, int height,
                     const std::string& path);

/// 8-bit grayscale.
void save_png_gray8(const std::vector<double>& values, int width, int height,
                    const std::string& path);

/// Writes color.png, normal.png (n * 0.5 + 0.5), depth.png (16-bit,
/// (t - near) / (far - near) clamped) and transmittance.png into dir.
/// Byte-deterministic for identical buffers.
void save_buffers(const RenderBuffers& buffers, const std::string& dir, double near, double far);

} // namespace surfhead
