#include "gsdyn/adam.hpp"

#include <cmath>

namespace gsdyn {

Adam::Adam(std::vector<Param> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
    if (!(cfg_.beta1 > 0.0 && cfg_.beta1 < 1.0) || !(cfg_.beta2 > 0.0 && cfg_.beta2 < 1.0) ||
        cfg_.eps <= 0.0 || cfg_.lr <= 0.0) {
        throw ConfigError("adam: betas must lie in (0,1), eps and lr must be positive");
    }
    states_.resize(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) {
        states_[i].m.assign(params_[i].value.data().size(), 0.0);
        states_[i].v.assign(params_[i].value.data().size(), 0.0);
    }
}

Param* Adam::find(const std::string& name) {
    for (auto& p : params_)
        if (p.name == name) return &p;
    return nullptr;
}

AdamState* Adam::state_of(const std::string& name) {
    for (size_t i = 0; i < params_.size(); ++i)
        if (params_[i].name == name) return &states_[i];
    return nullptr;
}

void Adam::step() {
    if (checked_mode()) {
        for (auto& p : params_) {
            for (double g : p.value.grad()) {
                if (!std::isfinite(g)) {
                    throw CheckedModeError("adam: non-finite gradient in parameter '" + p.name + "'");
                }
            }
        }
    }
    for (size_t i = 0; i < params_.size(); ++i) {
        Param& p = params_[i];
        AdamState& s = states_[i];
        const auto& g = p.value.grad();
        auto& x = p.value.data();
        if (g.size() != x.size() || s.m.size() != x.size()) {
            throw ShapeError("adam: state/gradient size mismatch for parameter '" + p.name + "'");
        }
        s.step_count += 1;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(s.step_count));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(s.step_count));
        const double lr = cfg_.lr * p.lr_scale;
        for (size_t j = 0; j < x.size(); ++j) {
            s.m[j] = cfg_.beta1 * s.m[j] + (1.0 - cfg_.beta1) * g[j];
            s.v[j] = cfg_.beta2 * s.v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
            const double mhat = s.m[j] / bc1;
            const double vhat = s.v[j] / bc2;
            x[j] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

void Adam::remap_param(const std::string& name, Tensor next, const std::vector<int>& row_map) {
    for (size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].name != name) continue;
        const int old_cols = params_[i].value.cols();
        const int new_cols = next.cols();
        if (old_cols != new_cols) {
            throw ShapeError("adam: remap of '" + name + "' changes column count");
        }
        AdamState fresh;
        fresh.step_count = states_[i].step_count;
        fresh.m.assign(next.data().size(), 0.0);
        fresh.v.assign(next.data().size(), 0.0);
        for (size_t r = 0; r < row_map.size(); ++r) {
            if (row_map[r] < 0) continue;
            for (int c = 0; c < new_cols; ++c) {
                fresh.m[r * new_cols + c] = states_[i].m[static_cast<size_t>(row_map[r]) * old_cols + c];
                fresh.v[r * new_cols + c] = states_[i].v[static_cast<size_t>(row_map[r]) * old_cols + c];
            }
        }
        states_[i] = std::move(fresh);
        params_[i].value = std::move(next);
        return;
    }
    throw ConfigError("adam: no parameter named '" + name + "'");
}

}  // namespace gsdyn
