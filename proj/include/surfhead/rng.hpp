// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "surfhead/mat3.hpp"

namespace surfhead {

/// Deterministic RNG used wherever the library promises seed-reproducible
/// output. Doubles are derived from raw engine words so results do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform on the unit sphere.
    Vec3 unit_vector()
    {
        const double z = uniform(-1.0, 1.0);
        const double phi = uniform(0.0, 2.0 * M_PI);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    /// Random rotation with angle uniform in (0, max_angle).
    Mat3 rotation(double max_angle = M_PI - 0.05)
    {
        AxisAngle w;
        w.omega = unit_vector() * uniform(1e-6, max_angle);
        return rotation_exp(w);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace surfhead
