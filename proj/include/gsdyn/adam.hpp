#pragma once

#include <string>
#include <vector>

#include "gsdyn/tensor.hpp"

namespace gsdyn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct Param {
    std::string name;
    Tensor value;
    double lr_scale = 1.0;  // multiplies the optimizer-wide lr for this parameter
};

struct AdamState {
    int64_t step_count = 0;
    std::vector<double> m;
    std::vector<double> v;
};

// Bias-corrected Adam over a fixed parameter list. Parameter tensors may be
// swapped out (densification resizes the scene); remap_param transplants the
// moment rows accordingly.
class Adam {
public:
    Adam(std::vector<Param> params, AdamConfig cfg);

    // Applies one update from each parameter's accumulated gradient. In
    // checked mode a non-finite gradient aborts before any parameter moves,
    // naming the offending parameter.
    void step();

    void set_lr(double lr) { cfg_.lr = lr; }
    double lr() const { return cfg_.lr; }

    const std::vector<Param>& params() const { return params_; }
    Param* find(const std::string& name);
    AdamState* state_of(const std::string& name);

    // Replaces a parameter tensor with a resized successor. row_map[i] gives
    // the old row feeding new row i, or -1 for a fresh row (zero moments).
    void remap_param(const std::string& name, Tensor next, const std::vector<int>& row_map);

private:
    std::vector<Param> params_;
    std::vector<AdamState> states_;
    AdamConfig cfg_;
};

}  // namespace gsdyn
