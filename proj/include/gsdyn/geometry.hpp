#pragma once

#include <array>
#include <cmath>

namespace gsdyn {

using Vec3 = std::array<double, 3>;
using Quat = std::array<double, 4>;  // (w, x, y, z)
using Mat3 = std::array<double, 9>;  // row-major

inline Quat quat_normalize(const Quat& q) {
    const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    return {q[0] / n, q[1] / n, q[2] / n, q[3] / n};
}

inline Mat3 quat_to_rot(const Quat& qn) {
    const double w = qn[0], x = qn[1], y = qn[2], z = qn[3];
    return {1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
            2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
            2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)};
}

// Sigma = R S S^T R^T with S = diag(exp(log_scale)). Quaternion is
// normalized internally so optimizer drift never produces a non-rotation.
inline Mat3 covariance(const Vec3& log_scale, const Quat& quat) {
    const Quat qn = quat_normalize(quat);
    const Mat3 r = quat_to_rot(qn);
    const Vec3 s = {std::exp(log_scale[0]), std::exp(log_scale[1]), std::exp(log_scale[2])};
    Mat3 m;  // M = R * diag(s)
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i * 3 + j] = r[i * 3 + j] * s[j];
    Mat3 sigma;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            sigma[i * 3 + j] =
                m[i * 3 + 0] * m[j * 3 + 0] + m[i * 3 + 1] * m[j * 3 + 1] + m[i * 3 + 2] * m[j * 3 + 2];
        }
    }
    return sigma;
}

// Eigenvalues of a symmetric 3x3 matrix, ascending (trigonometric method).
std::array<double, 3> sym3_eigenvalues(const Mat3& a);

// Spectral norm of a symmetric matrix: max |eigenvalue|.
double sym3_spectral_norm(const Mat3& a);

inline Mat3 mat3_sub(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (int i = 0; i < 9; ++i) c[i] = a[i] - b[i];
    return c;
}

}  // namespace gsdyn
