#include "gsdyn/geometry.hpp"

#include <algorithm>

namespace gsdyn {

std::array<double, 3> sym3_eigenvalues(const Mat3& a) {
    const double a00 = a[0], a01 = a[1], a02 = a[2], a11 = a[4], a12 = a[5], a22 = a[8];
    const double p1 = a01 * a01 + a02 * a02 + a12 * a12;
    std::array<double, 3> eig;
    if (p1 == 0.0) {
        eig = {a00, a11, a22};
        std::sort(eig.begin(), eig.end());
        return eig;
    }
    const double q = (a00 + a11 + a22) / 3.0;
    const double p2 = (a00 - q) * (a00 - q) + (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    // B = (A - q I) / p
    const double b00 = (a00 - q) / p, b01 = a01 / p, b02 = a02 / p;
    const double b11 = (a11 - q) / p, b12 = a12 / p, b22 = (a22 - q) / p;
    const double detb = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                        b02 * (b01 * b12 - b11 * b02);
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    eig = {e3, e2, e1};
    std::sort(eig.begin(), eig.end());
    return eig;
}

double sym3_spectral_norm(const Mat3& a) {
    const auto e = sym3_eigenvalues(a);
    return std::max(std::abs(e[0]), std::abs(e[2]));
}

}  // namespace gsdyn
