// SPDX-License-Identifier: Apache-2.0
#include "surfhead/mat3.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace surfhead {

namespace testhooks {
bool flip_inverse_transpose_sign = false;
} // namespace testhooks

double scaled_det_tol(const Mat3& m, double tol)
{
    const double s = m.cwiseAbs().maxCoeff();
    return tol * s * s * s;
}

Mat3 skew(const Vec3& w)
{
    Mat3 k;
    k << 0, -w.z(), w.y(),
        w.z(), 0, -w.x(),
        -w.y(), w.x(), 0;
    return k;
}

PolarFactors polar_decompose(const Mat3& m, double tol)
{
    const double det = m.determinant();
    if (!(det > scaled_det_tol(m, tol))) {
        std::ostringstream msg;
        msg << "polar_decompose: det = " << det << " is not positive";
        throw SingularOrInverted(msg.str());
    }

    // P = (M^T M)^{1/2} via symmetric eigendecomposition, U = M P^{-1}.
    Eigen::SelfAdjointEigenSolver<Mat3> es(m.transpose() * m);
    const Vec3 lambda = es.eigenvalues().cwiseMax(0.0);
    const Vec3 sigma = lambda.cwiseSqrt();
    const Mat3 v = es.eigenvectors();

    Mat3 u = m * (v * sigma.cwiseInverse().asDiagonal() * v.transpose());

    // One Newton step U <- (U + U^-T)/2 restores orthogonality lost to
    // conditioning in P^{-1}, then P is rebuilt against the polished U.
    u = 0.5 * (u + u.inverse().transpose());

    const Mat3 utm = u.transpose() * m;
    PolarFactors out;
    out.U = u;
    out.P = 0.5 * (utm + utm.transpose());
    return out;
}

AxisAngle rotation_log(const Mat3& r, double branch_eps)
{
    const double tr = r.trace();
    if (tr <= -1.0 + branch_eps) {
        throw NearPiRotation("rotation_log: rotation angle too close to pi");
    }
    const double c = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
    const double angle = std::acos(c);

    // vee(R - R^T) = 2 sin(angle) * axis
    const Vec3 v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));

    AxisAngle out;
    if (angle < 1e-8) {
        out.omega = 0.5 * v;
    } else {
        out.omega = (angle / (2.0 * std::sin(angle))) * v;
    }
    return out;
}

Mat3 rotation_exp(const AxisAngle& w)
{
    const double theta = w.angle();
    const Mat3 k = skew(w.omega);
    if (theta < 1e-8) {
        return Mat3::Identity() + k + 0.5 * k * k;
    }
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    return Mat3::Identity() + a * k + b * k * k;
}

Mat3 inverse_transpose(const Mat3& m, double tol)
{
    const double det = m.determinant();
    if (!(std::abs(det) > scaled_det_tol(m, tol))) {
        std::ostringstream msg;
        msg << "inverse_transpose: |det| = " << std::abs(det) << " below tolerance";
        throw SingularMatrix(msg.str());
    }
    Mat3 out = m.inverse().transpose();
    if (testhooks::flip_inverse_transpose_sign) {
        out(0, 1) = -out(0, 1);
    }
    return out;
}

bool is_psd(const Mat3& s, double tol)
{
    const Mat3 sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

bool is_psd(const Mat3& s)
{
    return is_psd(s, kDefaultTol * (1.0 + s.cwiseAbs().maxCoeff()));
}

} // namespace surfhead
