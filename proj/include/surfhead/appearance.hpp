// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <vector>

#include "surfhead/mat3.hpp"

namespace surfhead {

class Rng;

/// One anisotropic spherical Gaussian lobe. {x, y, z} form a right-handed
/// orthonormal frame with z the lobe axis.
struct ASGLobe {
    Vec3 z = Vec3::UnitZ();
    Vec3 x = Vec3::UnitX();
    Vec3 y = Vec3::UnitY();
    double lambda = 0.0; ///< sharpness along x, >= 0
    double mu = 0.0;     ///< sharpness along y, >= 0
    double xi = 0.0;     ///< amplitude, >= 0
};

/// xi * max(nu.z, 0) * exp(-lambda (nu.x)^2 - mu (nu.y)^2). Zero on the
/// back hemisphere, peak value xi at nu == z.
double eval_asg(const ASGLobe& lobe, const Vec3& nu);

/// Mirror reflection 2 (d.n) n - d of a unit direction about a unit normal.
Vec3 reflect(const Vec3& d_rot, const Vec3& n);

/// Deterministic grid x grid lobe set covering the frontal (+z world)
/// hemisphere. Axes sit at spherical cell centers; the tangent is the
/// +pi/2-elevation direction and the bitangent its quarter turn about the
/// axis. Sharpness and amplitude are left at defaults for the caller.
std::vector<ASGLobe> sample_lobes(int grid = 4);

/// Real spherical-harmonics coefficient block for diffuse color,
/// coefficient-major: coeffs[k * 3 + channel], k < (degree + 1)^2.
struct SHBlock {
    int degree = 3;
    std::vector<double> coeffs;

    SHBlock() : coeffs(48, 0.0) {}
    explicit SHBlock(int deg)
        : degree(deg), coeffs(static_cast<std::size_t>(3 * (deg + 1) * (deg + 1)), 0.0)
    {
    }

    int basis_count() const { return (degree + 1) * (degree + 1); }

    /// Block whose DC term reproduces the given color in every direction.
    static SHBlock constant(const Vec3& rgb, int degree = 3);
};

/// Evaluates the real-SH basis (splatting convention, degree <= 3) at a
/// unit direction.
void eval_sh_basis(int degree, const Vec3& dir, double* out);

/// SH expansion at a unit direction, clamped at 0 per channel.
Vec3 eval_sh(const SHBlock& block, const Vec3& dir);

/// sin/cos ladder over `freqs` octaves per component: 6 * freqs values.
std::vector<double> positional_encoding(const Vec3& v, int freqs);

/// Gradients of the specular head output with respect to every parameter.
struct SpecularGradients {
    Eigen::MatrixXd dW1, dW2, dW3;
    Eigen::VectorXd db1, db2, db3;
};

/// Two-hidden-layer dense head over concatenated ASG responses, positional
/// encoding of the rotated view direction, and n . d_rot. tanh hidden
/// activations; output through the smooth magnitude x * tanh(x) so zero
/// parameters give exactly zero intensity and the result stays nonnegative.
struct SpecularHead {
    std::vector<ASGLobe> lobes;
    int pe_freqs = 4;
    Eigen::MatrixXd W1, W2, W3;
    Eigen::VectorXd b1, b2, b3;

    int input_dim() const { return static_cast<int>(lobes.size()) + 6 * pe_freqs + 1; }

    /// Zero-initialized head over a grid x grid lobe set.
    static SpecularHead zero(int grid = 4, int pe_freqs = 4, int hidden = 32);

    /// Small random weights, deterministic under the rng. Lobe sharpness
    /// and amplitudes are randomized too.
    static SpecularHead random(Rng& rng, int grid = 4, int pe_freqs = 4, int hidden = 32);

    /// Throws DimensionMismatch when the layer shapes do not chain.
    void validate() const;
};

/// Head output for one sample. With `grad` non-null also accumulates the
/// analytic parameter gradients.
double eval_specular(const SpecularHead& head, const Vec3& omega_o, const Vec3& d_rot,
                     const Vec3& n, SpecularGradients* grad = nullptr);

/// c = c_d + c_s: SH diffuse color queried at d_rot = U_b^T d plus the
/// monochrome specular intensity broadcast to RGB. Unclamped; the renderer
/// clamps to [0, 1] at composition time.
Vec3 total_color(const SHBlock& sh, const SpecularHead& head, const Vec3& d, const Mat3& U_b,
                 const Vec3& n);

} // namespace surfhead
