// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "surfhead/errors.hpp"

namespace surfhead {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Relative tolerance knob shared by the 3x3 kernels. Determinant checks
/// scale it by max|entry|^3 so the cutoff tracks the matrix magnitude.
inline constexpr double kDefaultTol = 1e-9;

/// Rotations with angle >= pi - O(sqrt(kBranchEps)) are rejected by
/// rotation_log: the principal log branch is ambiguous there.
inline constexpr double kBranchEps = 1e-6;

/// Result of the polar factorization M = U * P: U orthogonal with det +1,
/// P symmetric positive semidefinite.
struct PolarFactors {
    Mat3 U;
    Mat3 P;
};

/// Element of so(3): direction is the rotation axis, magnitude the angle in
/// radians. Only the principal branch (angle < pi) is ever produced.
struct AxisAngle {
    Vec3 omega = Vec3::Zero();

    double angle() const { return omega.norm(); }
};

/// Determinant cutoff for a given matrix: tol relative to max|entry|^3.
double scaled_det_tol(const Mat3& m, double tol = kDefaultTol);

/// Cross-product matrix [w]x with skew(w) * v == w.cross(v).
Mat3 skew(const Vec3& w);

/// Unique polar factorization of an orientation-preserving nonsingular
/// matrix, computed from the symmetric eigendecomposition of M^T M with one
/// orthogonality polish step on U.
///
/// Throws SingularOrInverted when det(M) <= scaled_det_tol(M, tol); a
/// negative determinant signals a degenerate or inverted triangle upstream.
PolarFactors polar_decompose(const Mat3& m, double tol = kDefaultTol);

/// Principal-branch matrix logarithm of a rotation. Throws NearPiRotation
/// when trace(R) <= -1 + branch_eps.
AxisAngle rotation_log(const Mat3& r, double branch_eps = kBranchEps);

/// Rodrigues exponential. Falls back to the series limit for tiny angles.
Mat3 rotation_exp(const AxisAngle& w);

/// (M^-1)^T. Throws SingularMatrix when |det(M)| <= scaled_det_tol(M, tol).
Mat3 inverse_transpose(const Mat3& m, double tol = kDefaultTol);

/// True iff the symmetrized input has all eigenvalues >= -tol.
bool is_psd(const Mat3& s, double tol);

/// Overload with tol = kDefaultTol * (1 + max|entry|).
bool is_psd(const Mat3& s);

namespace testhooks {
/// Flipped by `surfhead selftest --mutate invt-sign` so the suite can prove
/// it detects a broken normal rule. Never set in production paths.
extern bool flip_inverse_transpose_sign;
} // namespace testhooks

} // namespace surfhead
