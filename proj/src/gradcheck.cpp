#include "gsdyn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "gsdyn/rng.hpp"
#include "gsdyn/tape.hpp"

namespace gsdyn {

namespace {

double check_coords(const std::function<double()>& fn, const std::vector<Tensor>& params,
                    const std::vector<std::vector<double>>& analytic,
                    const std::vector<std::vector<int64_t>>& coords, double eps_scale) {
    double max_err = 0.0;
    for (size_t p = 0; p < params.size(); ++p) {
        auto& x = const_cast<Tensor&>(params[p]).data();
        for (int64_t i : coords[p]) {
            const double x0 = x[i];
            const double eps = eps_scale * std::max(1.0, std::abs(x0));
            x[i] = x0 + eps;
            const double f_plus = fn();
            x[i] = x0 - eps;
            const double f_minus = fn();
            x[i] = x0;
            if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
                throw CheckedModeError("finite_diff_check: fn non-finite at parameter " +
                                       std::to_string(p) + " coordinate " + std::to_string(i));
            }
            const double central = (f_plus - f_minus) / (2.0 * eps);
            const double err = std::abs(analytic[p][i] - central) / std::max(1.0, std::abs(central));
            max_err = std::max(max_err, err);
        }
    }
    return max_err;
}

std::vector<std::vector<int64_t>> all_coords(const std::vector<Tensor>& params) {
    std::vector<std::vector<int64_t>> coords(params.size());
    for (size_t p = 0; p < params.size(); ++p) {
        coords[p].resize(params[p].size());
        for (int64_t i = 0; i < params[p].size(); ++i) coords[p][i] = i;
    }
    return coords;
}

std::vector<std::vector<double>> analytic_grads(const std::function<Tensor()>& build_loss,
                                                const std::vector<Tensor>& params) {
    Tape tape;
    {
        Tape::Scope scope(tape);
        Tensor loss = build_loss();
        tape.backward(loss);
    }
    std::vector<std::vector<double>> grads;
    grads.reserve(params.size());
    for (const auto& p : params) grads.push_back(p.grad());
    return grads;
}

}  // namespace

double finite_diff_check(const std::function<double()>& fn, const std::vector<Tensor>& params,
                         const std::vector<std::vector<double>>& analytic, double eps_scale) {
    return check_coords(fn, params, analytic, all_coords(params), eps_scale);
}

double gradcheck(const std::function<Tensor()>& build_loss, const std::vector<Tensor>& params,
                 double eps_scale) {
    auto grads = analytic_grads(build_loss, params);
    auto fn = [&]() { return build_loss().item(); };
    return check_coords(fn, params, grads, all_coords(params), eps_scale);
}

double gradcheck_sampled(const std::function<Tensor()>& build_loss,
                         const std::vector<Tensor>& params, int max_coords, uint64_t seed,
                         double eps_scale) {
    auto grads = analytic_grads(build_loss, params);
    Rng rng(seed);
    std::vector<std::vector<int64_t>> coords(params.size());
    for (size_t p = 0; p < params.size(); ++p) {
        const int64_t n = params[p].size();
        if (n <= max_coords) {
            coords[p].resize(n);
            for (int64_t i = 0; i < n; ++i) coords[p][i] = i;
        } else {
            for (int k = 0; k < max_coords; ++k) {
                coords[p].push_back(rng.uniform_int(0, static_cast<int>(n) - 1));
            }
            std::sort(coords[p].begin(), coords[p].end());
            coords[p].erase(std::unique(coords[p].begin(), coords[p].end()), coords[p].end());
        }
    }
    auto fn = [&]() { return build_loss().item(); };
    return check_coords(fn, params, grads, coords, eps_scale);
}

}  // namespace gsdyn
