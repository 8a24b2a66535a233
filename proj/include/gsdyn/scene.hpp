#pragma once

#include <vector>

#include "gsdyn/geometry.hpp"
#include "gsdyn/rng.hpp"
#include "gsdyn/tensor.hpp"

namespace gsdyn {

// Canonical-space Gaussian set, stored as per-attribute parameter tensors.
// Row i across all tensors is one primitive.
struct Scene {
    Tensor mu;             // [N,3] canonical position, world units
    Tensor quat;           // [N,4] (w,x,y,z), renormalized after each step
    Tensor log_scale;      // [N,3] world scale = exp(log_scale)
    Tensor opacity_logit;  // [N,1] opacity = sigmoid(.)
    Tensor color;          // [N,3] in [0,1]
    Tensor dyn_attr;       // [N,D_d] per-primitive dynamics attribute

    double extent = 1.0;    // bounding radius around center
    Vec3 center = {0, 0, 0};

    // Densification statistics, reset after each densify event.
    std::vector<double> grad_accum;   // accumulated screen-space grad norms
    std::vector<int> grad_count;      // renders in which the primitive was visible
    std::vector<double> max_radius;   // max projected 3-sigma radius seen, pixels

    int count() const { return mu.defined() ? mu.rows() : 0; }
    int dyn_dim() const { return dyn_attr.defined() ? dyn_attr.cols() : 0; }

    void reset_grad_stats();

    Mat3 covariance_of(int i) const;
    Vec3 position_of(int i) const;

    // One primitive per point. log_scale from the mean distance to the 3
    // nearest points (isotropic), 1% of extent when no neighborhood exists;
    // opacity 0.1; dyn_attr ~ U(-1e-4, 1e-4). All values are quantized to
    // float32-representable doubles so checkpoints round-trip bit-exactly.
    static Scene init_from_points(const std::vector<Vec3>& points,
                                  const std::vector<Vec3>& colors, int dyn_dim, Rng& rng);

    // Invariant maintenance after each optimizer step: renormalize rows of
    // quat, clamp exp(log_scale) into [1e-6, extent], clamp color to [0,1].
    void clamp_parameters();
};

}  // namespace gsdyn
