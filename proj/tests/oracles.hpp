// Independent reference implementations used only by tests. These
// deliberately avoid the library's computation paths.
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "gsdyn/image.hpp"

namespace oracles {

// Cyclic Jacobi iteration for symmetric 3x3 eigenvalues, ascending.
inline std::array<double, 3> jacobi_eigenvalues(std::array<double, 9> a) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::abs(a[1]) + std::abs(a[2]) + std::abs(a[5]);
        if (off < 1e-15) break;
        for (auto [p, q] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
            const double apq = a[p * 3 + q];
            if (std::abs(apq) < 1e-18) continue;
            const double app = a[p * 3 + p], aqq = a[q * 3 + q];
            const double theta = (aqq - app) / (2.0 * apq);
            const double t = (theta >= 0 ? 1.0 : -1.0) /
                             (std::abs(theta) + std::sqrt(theta * theta + 1.0));
            const double c = 1.0 / std::sqrt(t * t + 1.0);
            const double s = t * c;
            std::array<double, 9> r = {1, 0, 0, 0, 1, 0, 0, 0, 1};
            r[p * 3 + p] = c;
            r[q * 3 + q] = c;
            r[p * 3 + q] = s;
            r[q * 3 + p] = -s;
            // a = r^T a r
            std::array<double, 9> tmp{};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) tmp[i * 3 + j] += r[k * 3 + i] * a[k * 3 + j];
            std::array<double, 9> out{};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) out[i * 3 + j] += tmp[i * 3 + k] * r[k * 3 + j];
            a = out;
        }
    }
    std::array<double, 3> eig = {a[0], a[4], a[8]};
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Sliding-window SSIM, direct per-window loops (valid positions only),
// 11x11 Gaussian weights with sigma 1.5, constants for dynamic range 1.
inline double reference_ssim(const gsdyn::Image& x, const gsdyn::Image& y) {
    const int win = 11;
    const double c1 = 1e-4, c2 = 9e-4;
    std::vector<double> wgt(win * win);
    double wsum = 0.0;
    for (int i = 0; i < win; ++i) {
        for (int j = 0; j < win; ++j) {
            const double di = i - 5.0, dj = j - 5.0;
            wgt[i * win + j] = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
            wsum += wgt[i * win + j];
        }
    }
    for (auto& w : wgt) w /= wsum;

    double acc = 0.0;
    int count = 0;
    for (int ch = 0; ch < x.channels; ++ch) {
        for (int r = 0; r + win <= x.height; ++r) {
            for (int c = 0; c + win <= x.width; ++c) {
                double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
                for (int i = 0; i < win; ++i) {
                    for (int j = 0; j < win; ++j) {
                        const double w = wgt[i * win + j];
                        const double xv = x.at(r + i, c + j, ch);
                        const double yv = y.at(r + i, c + j, ch);
                        mx += w * xv;
                        my += w * yv;
                        mxx += w * xv * xv;
                        myy += w * yv * yv;
                        mxy += w * xv * yv;
                    }
                }
                const double vx = mxx - mx * mx, vy = myy - my * my, vxy = mxy - mx * my;
                acc += ((2 * mx * my + c1) * (2 * vxy + c2)) /
                       ((mx * mx + my * my + c1) * (vx + vy + c2));
                ++count;
            }
        }
    }
    return acc / count;
}

// Dense linear solve by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return x;
}

inline int reflect101(int idx, int n) {
    if (idx < 0) return -idx;
    if (idx >= n) return 2 * n - 2 - idx;
    return idx;
}

// Direct 2D binomial blur + decimate, loop form.
inline gsdyn::Image direct_pyramid_down(const gsdyn::Image& img) {
    static const double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    gsdyn::Image blur_rows = gsdyn::Image::zeros(img.height, img.width, img.channels);
    for (int ch = 0; ch < img.channels; ++ch)
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c)
                for (int t = 0; t < 5; ++t)
                    blur_rows.at(r, c, ch) += k[t] * img.at(reflect101(r + t - 2, img.height), c, ch);
    gsdyn::Image blurred = gsdyn::Image::zeros(img.height, img.width, img.channels);
    for (int ch = 0; ch < img.channels; ++ch)
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c)
                for (int t = 0; t < 5; ++t)
                    blurred.at(r, c, ch) += k[t] * blur_rows.at(r, reflect101(c + t - 2, img.width), ch);
    gsdyn::Image out = gsdyn::Image::zeros((img.height + 1) / 2, (img.width + 1) / 2, img.channels);
    for (int ch = 0; ch < img.channels; ++ch)
        for (int r = 0; r < out.height; ++r)
            for (int c = 0; c < out.width; ++c) out.at(r, c, ch) = blurred.at(2 * r, 2 * c, ch);
    return out;
}

// Zero-insert then blur with the doubled kernel, loop form.
inline gsdyn::Image direct_upsample(const gsdyn::Image& img, int h_out, int w_out) {
    static const double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    gsdyn::Image rows = gsdyn::Image::zeros(h_out, img.width, img.channels);
    for (int ch = 0; ch < img.channels; ++ch)
        for (int r = 0; r < h_out; ++r)
            for (int c = 0; c < img.width; ++c)
                for (int t = 0; t < 5; ++t) {
                    const int z = reflect101(r + t - 2, h_out);
                    if (z % 2 == 0 && z / 2 < img.height) rows.at(r, c, ch) += 2.0 * k[t] * img.at(z / 2, c, ch);
                }
    gsdyn::Image out = gsdyn::Image::zeros(h_out, w_out, img.channels);
    for (int ch = 0; ch < img.channels; ++ch)
        for (int r = 0; r < h_out; ++r)
            for (int c = 0; c < w_out; ++c)
                for (int t = 0; t < 5; ++t) {
                    const int z = reflect101(c + t - 2, w_out);
                    if (z % 2 == 0 && z / 2 < img.width) out.at(r, c, ch) += 2.0 * k[t] * rows.at(r, z / 2, ch);
                }
    return out;
}

}  // namespace oracles
