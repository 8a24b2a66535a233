#include "gsdyn/scene.hpp"

#include <algorithm>
#include <cmath>

namespace gsdyn {

void Scene::reset_grad_stats() {
    grad_accum.assign(count(), 0.0);
    grad_count.assign(count(), 0);
    max_radius.assign(count(), 0.0);
}

Mat3 Scene::covariance_of(int i) const {
    Vec3 ls = {log_scale.at(i, 0), log_scale.at(i, 1), log_scale.at(i, 2)};
    Quat q = {quat.at(i, 0), quat.at(i, 1), quat.at(i, 2), quat.at(i, 3)};
    return covariance(ls, q);
}

Vec3 Scene::position_of(int i) const { return {mu.at(i, 0), mu.at(i, 1), mu.at(i, 2)}; }

Scene Scene::init_from_points(const std::vector<Vec3>& points, const std::vector<Vec3>& colors,
                              int dyn_dim, Rng& rng) {
    if (points.empty()) throw ConfigError("init_from_points: empty point set");
    if (colors.size() != points.size()) {
        throw ConfigError("init_from_points: point/color count mismatch");
    }
    const int n = static_cast<int>(points.size());

    Vec3 centroid = {0, 0, 0};
    for (const auto& p : points)
        for (int k = 0; k < 3; ++k) centroid[k] += p[k] / n;
    double max_dist = 0.0;
    for (const auto& p : points) {
        double d2 = 0.0;
        for (int k = 0; k < 3; ++k) d2 += (p[k] - centroid[k]) * (p[k] - centroid[k]);
        max_dist = std::max(max_dist, std::sqrt(d2));
    }
    Scene scene;
    scene.extent = max_dist > 1e-12 ? to_f32(max_dist * 1.1) : 1.0;
    scene.center = {to_f32(centroid[0]), to_f32(centroid[1]), to_f32(centroid[2])};

    std::vector<double> mu_d(n * 3), quat_d(n * 4, 0.0), ls_d(n * 3), op_d(n), col_d(n * 3),
        dyn_d(static_cast<size_t>(n) * dyn_dim);

    const double opacity_logit_init = to_f32(std::log(0.1 / 0.9));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k) mu_d[i * 3 + k] = to_f32(points[i][k]);
        quat_d[i * 4 + 0] = 1.0;

        // mean distance to the 3 nearest other points, brute force
        std::vector<double> d2(n);
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
            d2[j] = acc;
        }
        d2[i] = std::numeric_limits<double>::infinity();
        std::partial_sort(d2.begin(), d2.begin() + std::min(3, n - 1) + 1, d2.end());
        double scale;
        if (n == 1) {
            scale = 0.01 * scene.extent;
        } else {
            const int k_nn = std::min(3, n - 1);
            double mean_d = 0.0;
            for (int k = 0; k < k_nn; ++k) mean_d += std::sqrt(d2[k]) / k_nn;
            scale = std::max(mean_d, 1e-6);
        }
        const double ls = to_f32(std::log(scale));
        for (int k = 0; k < 3; ++k) ls_d[i * 3 + k] = ls;

        op_d[i] = opacity_logit_init;
        for (int k = 0; k < 3; ++k) col_d[i * 3 + k] = to_f32(std::clamp(colors[i][k], 0.0, 1.0));
        for (int k = 0; k < dyn_dim; ++k) {
            dyn_d[static_cast<size_t>(i) * dyn_dim + k] = to_f32(rng.uniform(-1e-4, 1e-4));
        }
    }

    scene.mu = Tensor::values({n, 3}, std::move(mu_d), true);
    scene.quat = Tensor::values({n, 4}, std::move(quat_d), true);
    scene.log_scale = Tensor::values({n, 3}, std::move(ls_d), true);
    scene.opacity_logit = Tensor::values({n, 1}, std::move(op_d), true);
    scene.color = Tensor::values({n, 3}, std::move(col_d), true);
    scene.dyn_attr = Tensor::values({n, dyn_dim}, std::move(dyn_d), true);
    scene.reset_grad_stats();
    return scene;
}

void Scene::clamp_parameters() {
    const int n = count();
    auto& q = quat.data();
    for (int i = 0; i < n; ++i) {
        double norm = 0.0;
        for (int k = 0; k < 4; ++k) norm += q[i * 4 + k] * q[i * 4 + k];
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            q[i * 4 + 0] = 1.0;
            q[i * 4 + 1] = q[i * 4 + 2] = q[i * 4 + 3] = 0.0;
        } else {
            for (int k = 0; k < 4; ++k) q[i * 4 + k] /= norm;
        }
    }
    auto& ls = log_scale.data();
    const double lo = std::log(1e-6), hi = std::log(extent);
    for (auto& v : ls) v = std::clamp(v, lo, hi);
    auto& c = color.data();
    for (auto& v : c) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace gsdyn
