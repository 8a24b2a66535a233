#pragma once

#include <vector>

#include "gsdyn/image.hpp"
#include "gsdyn/tape.hpp"

namespace gsdyn {

struct LossWeights {
    double lambda_ssim = 0.2;  // inside L_orig
    double lambda_ncc = 0.1;
    double lambda_lap = 0.2;
    double lambda_dy = 0.01;
    int pyramid_levels = 3;
    double pyramid_decay = 0.5;  // level weight = decay^(l-1), level 1 = finest
    int ncc_window = 11;
    int ncc_stride = 8;
};

Tensor l1_loss(const ImageTensor& a, const ImageTensor& b);

// Mean SSIM index over valid 11x11 windows, Gaussian-weighted (sigma 1.5),
// stability constants for dynamic range 1. Channels averaged.
Tensor ssim_index(const ImageTensor& a, const ImageTensor& b);

// (1 - lambda) * L1 + lambda * (1 - SSIM)
Tensor l1_ssim_loss(const ImageTensor& render, const ImageTensor& gt, double lambda_ssim);

// 1 - mean patch NCC over strided windows; near-constant patches contribute 0.
Tensor ncc_loss(const ImageTensor& render, const ImageTensor& gt, int window, int stride);

// Blur (binomial 5-tap, reflect borders), decimate by 2.
ImageTensor gaussian_pyramid_down(const ImageTensor& img);

struct LaplacianPyramid {
    std::vector<ImageTensor> levels;  // band-pass, finest first
    ImageTensor residual;             // coarsest low-pass
};

LaplacianPyramid laplacian_pyramid(const ImageTensor& img, int num_levels);
ImageTensor collapse_pyramid(const LaplacianPyramid& pyr);

Tensor laplacian_pyramid_loss(const ImageTensor& render, const ImageTensor& gt,
                              const LossWeights& w);

struct LossBreakdown {
    Tensor total;
    Tensor l_orig;
    Tensor l_ncc;
    Tensor l_lap;
    Tensor l_dy;
};

// L = L_orig + lambda_ncc * L_ncc + lambda_lap * L_lap + lambda_dy * L_dy.
// dyn_loss may be undefined (treated as 0, e.g. for static baselines).
LossBreakdown total_loss(const ImageTensor& render, const ImageTensor& gt, const Tensor& dyn_loss,
                         const LossWeights& w);

// SSIM on plain images (metric path, no tape).
double ssim_metric(const Image& a, const Image& b);

}  // namespace gsdyn
