#pragma once

#include <functional>
#include <vector>

#include "gsdyn/tensor.hpp"

namespace gsdyn {

// Compares analytic gradients against central finite differences.
//
// fn re-evaluates the scalar objective from the parameters' current values.
// Per coordinate: eps_i = eps_scale * max(1, |x_i|), and the reported error
// is |analytic - central| / max(1, |central|). Returns the max over all
// checked coordinates.
double finite_diff_check(const std::function<double()>& fn, const std::vector<Tensor>& params,
                         const std::vector<std::vector<double>>& analytic,
                         double eps_scale = 1e-5);

// Convenience wrapper: records build_loss under a fresh tape to obtain the
// analytic gradients, then runs finite_diff_check with forward-only
// re-evaluations of the same closure.
double gradcheck(const std::function<Tensor()>& build_loss, const std::vector<Tensor>& params,
                 double eps_scale = 1e-5);

// Same, but checks at most max_coords randomly chosen coordinates per
// parameter (for large tables).
double gradcheck_sampled(const std::function<Tensor()>& build_loss,
                         const std::vector<Tensor>& params, int max_coords, uint64_t seed,
                         double eps_scale = 1e-5);

}  // namespace gsdyn
