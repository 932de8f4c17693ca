// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "surfhead/mat3.hpp"
#include "surfhead/rng.hpp"

using namespace surfhead;

namespace {

Mat3 rot_z(double angle)
{
    AxisAngle w;
    w.omega = Vec3(0.0, 0.0, angle);
    return rotation_exp(w);
}

/// Newton-iteration polar factor; independent of the production route.
Mat3 newton_polar_u(const Mat3& m)
{
    Mat3 u = m;
    for (int i = 0; i < 200; ++i) {
        const Mat3 next = 0.5 * (u + u.inverse().transpose());
        if ((next - u).cwiseAbs().maxCoeff() < 1e-15) return next;
        u = next;
    }
    return u;
}

} // namespace

TEST_CASE("polar decomposition of the identity and of rotations")
{
    const PolarFactors id = polar_decompose(Mat3::Identity());
    CHECK((id.U - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((id.P - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);

    const Mat3 r = rot_z(M_PI / 6.0);
    const PolarFactors f = polar_decompose(r);
    CHECK((f.U - r).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f.P - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("polar decomposition of a shear matches the iterative oracle")
{
    Mat3 m;
    m << 1, 1, 0, 0, 1, 0, 0, 0, 1;
    const PolarFactors f = polar_decompose(m);

    const Mat3 u_oracle = newton_polar_u(m);
    const Mat3 p_oracle = u_oracle.transpose() * m;
    CHECK((f.U - u_oracle).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((f.P - p_oracle).cwiseAbs().maxCoeff() < 1e-10);

    CHECK((f.U * f.P - m).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f.U.transpose() * f.U - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(f.U.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("polar decomposition rejects singular and inverted input")
{
    Mat3 singular = Mat3::Zero();
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(polar_decompose(singular), SingularOrInverted);

    Mat3 mirrored = Mat3::Identity();
    mirrored(2, 2) = -1.0;
    CHECK_THROWS_AS(polar_decompose(mirrored), SingularOrInverted);
}

TEST_CASE("rotation log on trivial inputs")
{
    CHECK(rotation_log(Mat3::Identity()).omega.norm() == 0.0);
    const AxisAngle w = rotation_log(rot_z(M_PI / 2.0));
    CHECK((w.omega - Vec3(0, 0, M_PI / 2.0)).norm() < 1e-14);
}

TEST_CASE("rotation exp on trivial inputs")
{
    CHECK((rotation_exp({Vec3::Zero()}) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rotation_exp({Vec3(0, 0, M_PI / 2.0)}) - rot_z(M_PI / 2.0)).cwiseAbs().maxCoeff() <
          1e-15);

    // Tiny-angle series limit stays orthogonal.
    const Mat3 r = rotation_exp({Vec3(1e-10, -2e-10, 5e-11)});
    CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("log/exp round trips over random rotations")
{
    Rng rng(42);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Mat3 r = rng.rotation(M_PI - 0.01);
        const Mat3 back = rotation_exp(rotation_log(r));
        worst = std::max(worst, (back - r).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("exp(w) exp(-w) is the identity")
{
    Rng rng(43);
    for (int i = 0; i < 200; ++i) {
        const Vec3 w = rng.unit_vector() * rng.uniform(0.0, 3.0);
        const Mat3 prod = rotation_exp({w}) * rotation_exp({Vec3(-w)});
        CHECK((prod - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("rotation log rejects near-pi angles")
{
    CHECK_THROWS_AS(rotation_log(rot_z(M_PI - 1e-9)), NearPiRotation);
    CHECK_THROWS_AS(rotation_log(rot_z(M_PI)), NearPiRotation);
}

TEST_CASE("inverse transpose on reference inputs")
{
    CHECK((inverse_transpose(Mat3::Identity()) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);

    Mat3 d = Mat3::Identity();
    d(0, 0) = 2.0;
    Mat3 expected = Mat3::Identity();
    expected(0, 0) = 0.5;
    CHECK((inverse_transpose(d) - expected).cwiseAbs().maxCoeff() < 1e-15);

    Mat3 shear;
    shear << 1, 0.5, 0, 0, 1, 0, 0, 0, 1;
    Mat3 want;
    want << 1, 0, 0, -0.5, 1, 0, 0, 0, 1;
    CHECK((inverse_transpose(shear) - want).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(inverse_transpose(Mat3::Zero()), SingularMatrix);
}

TEST_CASE("inverse transpose fixes rotations")
{
    Rng rng(44);
    for (int i = 0; i < 200; ++i) {
        const Mat3 r = rng.rotation();
        CHECK((inverse_transpose(r) - r).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("inverse transpose contract: transpose times input is identity")
{
    Rng rng(45);
    for (int i = 0; i < 200; ++i) {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = rng.uniform(-2.0, 2.0);
        if (std::abs(m.determinant()) < 0.05) continue;
        const Mat3 it = inverse_transpose(m);
        CHECK((it.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("is_psd classifies reference matrices")
{
    CHECK(is_psd(Mat3::Identity()));
    Mat3 indef = Mat3::Zero();
    indef(0, 0) = 1.0;
    indef(2, 2) = -1.0;
    CHECK_FALSE(is_psd(indef));
}

TEST_CASE("M M^T is always PSD")
{
    Rng rng(46);
    for (int i = 0; i < 1000; ++i) {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = rng.uniform(-3.0, 3.0);
        CHECK(is_psd(m * m.transpose()));
    }
}
