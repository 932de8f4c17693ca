// SPDX-License-Identifier: Apache-2.0
#include "surfhead/appearance.hpp"

#include <cmath>
#include <sstream>

#include "surfhead/rng.hpp"

namespace surfhead {

double eval_asg(const ASGLobe& lobe, const Vec3& nu)
{
    const double smooth = std::max(nu.dot(lobe.z), 0.0);
    if (smooth == 0.0) return 0.0;
    const double dx = nu.dot(lobe.x);
    const double dy = nu.dot(lobe.y);
    return lobe.xi * smooth * std::exp(-lobe.lambda * dx * dx - lobe.mu * dy * dy);
}

Vec3 reflect(const Vec3& d_rot, const Vec3& n)
{
    return 2.0 * d_rot.dot(n) * n - d_rot;
}

namespace {

Vec3 spherical_dir(double theta, double phi)
{
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

} // namespace

std::vector<ASGLobe> sample_lobes(int grid)
{
    std::vector<ASGLobe> lobes;
    lobes.reserve(static_cast<std::size_t>(grid * grid));
    for (int i = 0; i < grid; ++i) {
        const double theta = (i + 0.5) * (0.5 * M_PI) / grid; // frontal: z >= 0
        for (int j = 0; j < grid; ++j) {
            const double phi = (j + 0.5) * (2.0 * M_PI) / grid;
            ASGLobe lobe;
            lobe.z = spherical_dir(theta, phi);
            lobe.x = spherical_dir(theta + 0.5 * M_PI, phi);
            lobe.y = lobe.z.cross(lobe.x); // quarter turn of x about the axis
            lobes.push_back(lobe);
        }
    }
    return lobes;
}

SHBlock SHBlock::constant(const Vec3& rgb, int degree)
{
    SHBlock block(degree);
    constexpr double y00 = 0.28209479177387814;
    for (int c = 0; c < 3; ++c) {
        block.coeffs[static_cast<std::size_t>(c)] = rgb[c] / y00;
    }
    return block;
}

void eval_sh_basis(int degree, const Vec3& dir, double* out)
{
    const double x = dir.x(), y = dir.y(), z = dir.z();
    out[0] = 0.28209479177387814;
    if (degree < 1) return;
    out[1] = -0.4886025119029199 * y;
    out[2] = 0.4886025119029199 * z;
    out[3] = -0.4886025119029199 * x;
    if (degree < 2) return;
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, yz = y * z, xz = x * z;
    out[4] = 1.0925484305920792 * xy;
    out[5] = -1.0925484305920792 * yz;
    out[6] = 0.31539156525252005 * (2.0 * zz - xx - yy);
    out[7] = -1.0925484305920792 * xz;
    out[8] = 0.5462742152960396 * (xx - yy);
    if (degree < 3) return;
    out[9] = -0.5900435899266435 * y * (3.0 * xx - yy);
    out[10] = 2.890611442640554 * xy * z;
    out[11] = -0.4570457994644658 * y * (4.0 * zz - xx - yy);
    out[12] = 0.3731763325901154 * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
    out[13] = -0.4570457994644658 * x * (4.0 * zz - xx - yy);
    out[14] = 1.445305721320277 * z * (xx - yy);
    out[15] = -0.5900435899266435 * x * (xx - 3.0 * yy);
}

Vec3 eval_sh(const SHBlock& block, const Vec3& dir)
{
    double basis[16];
    eval_sh_basis(block.degree, dir, basis);
    Vec3 rgb = Vec3::Zero();
    const int n = block.basis_count();
    for (int k = 0; k < n; ++k) {
        for (int c = 0; c < 3; ++c) {
            rgb[c] += block.coeffs[static_cast<std::size_t>(k * 3 + c)] * basis[k];
        }
    }
    return rgb.cwiseMax(0.0);
}

std::vector<double> positional_encoding(const Vec3& v, int freqs)
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(6 * freqs));
    for (int k = 0; k < freqs; ++k) {
        const double scale = static_cast<double>(1 << k);
        for (int c = 0; c < 3; ++c) {
            out.push_back(std::sin(scale * v[c]));
            out.push_back(std::cos(scale * v[c]));
        }
    }
    return out;
}

SpecularHead SpecularHead::zero(int grid, int pe_freqs, int hidden)
{
    SpecularHead head;
    head.lobes = sample_lobes(grid);
    head.pe_freqs = pe_freqs;
    const int in = head.input_dim();
    head.W1 = Eigen::MatrixXd::Zero(hidden, in);
    head.b1 = Eigen::VectorXd::Zero(hidden);
    head.W2 = Eigen::MatrixXd::Zero(hidden, hidden);
    head.b2 = Eigen::VectorXd::Zero(hidden);
    head.W3 = Eigen::MatrixXd::Zero(1, hidden);
    head.b3 = Eigen::VectorXd::Zero(1);
    return head;
}

SpecularHead SpecularHead::random(Rng& rng, int grid, int pe_freqs, int hidden)
{
    SpecularHead head = zero(grid, pe_freqs, hidden);
    for (auto& lobe : head.lobes) {
        lobe.lambda = rng.uniform(0.5, 8.0);
        lobe.mu = rng.uniform(0.5, 8.0);
        lobe.xi = rng.uniform(0.1, 1.0);
    }
    auto fill = [&rng](Eigen::MatrixXd& m) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-0.5, 0.5);
    };
    auto fillv = [&rng](Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-0.5, 0.5);
    };
    fill(head.W1);
    fillv(head.b1);
    fill(head.W2);
    fillv(head.b2);
    fill(head.W3);
    fillv(head.b3);
    return head;
}

void SpecularHead::validate() const
{
    const int in = input_dim();
    const auto fail = [](const char* what) {
        std::ostringstream msg;
        msg << "specular head: " << what;
        throw DimensionMismatch(msg.str());
    };
    if (W1.cols() != in) fail("W1 column count does not match input dimension");
    if (b1.size() != W1.rows()) fail("b1 size does not match W1 rows");
    if (W2.cols() != W1.rows()) fail("W2 does not chain after W1");
    if (b2.size() != W2.rows()) fail("b2 size does not match W2 rows");
    if (W3.cols() != W2.rows()) fail("W3 does not chain after W2");
    if (W3.rows() != 1 || b3.size() != 1) fail("output layer must be scalar");
}

double eval_specular(const SpecularHead& head, const Vec3& omega_o, const Vec3& d_rot,
                     const Vec3& n, SpecularGradients* grad)
{
    head.validate();

    Eigen::VectorXd a0(head.input_dim());
    Eigen::Index k = 0;
    for (const auto& lobe : head.lobes) a0(k++) = eval_asg(lobe, omega_o);
    for (double v : positional_encoding(d_rot, head.pe_freqs)) a0(k++) = v;
    a0(k++) = n.dot(d_rot);

    const Eigen::VectorXd z1 = head.W1 * a0 + head.b1;
    const Eigen::VectorXd a1 = z1.array().tanh();
    const Eigen::VectorXd z2 = head.W2 * a1 + head.b2;
    const Eigen::VectorXd a2 = z2.array().tanh();
    const double z3 = (head.W3 * a2)(0) + head.b3(0);

    const double t3 = std::tanh(z3);
    const double out = z3 * t3;

    if (grad != nullptr) {
        // d(out)/d(z3) = tanh(z3) + z3 sech^2(z3)
        const double dz3 = t3 + z3 * (1.0 - t3 * t3);
        grad->dW3 = dz3 * a2.transpose();
        grad->db3 = Eigen::VectorXd::Constant(1, dz3);
        const Eigen::VectorXd d2 =
            (head.W3.transpose() * dz3).col(0).cwiseProduct((1.0 - a2.array().square()).matrix());
        grad->dW2 = d2 * a1.transpose();
        grad->db2 = d2;
        const Eigen::VectorXd d1 =
            (head.W2.transpose() * d2).cwiseProduct((1.0 - a1.array().square()).matrix());
        grad->dW1 = d1 * a0.transpose();
        grad->db1 = d1;
    }
    return out;
}

Vec3 total_color(const SHBlock& sh, const SpecularHead& head, const Vec3& d, const Mat3& U_b,
                 const Vec3& n)
{
    const Vec3 d_rot = U_b.transpose() * d;
    const Vec3 c_d = eval_sh(sh, d_rot);
    const Vec3 omega_o = reflect(d_rot, n);
    const double c_s = eval_specular(head, omega_o, d_rot, n);
    return c_d + Vec3::Constant(c_s);
}

} // namespace surfhead
