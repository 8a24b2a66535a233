#include "gsdyn/losses.hpp"

#include <cmath>

namespace gsdyn {

namespace {

void check_same_shape(const char* op, const ImageTensor& a, const ImageTensor& b) {
    if (a.size() != b.size() || a.empty()) {
        throw ShapeError(std::string(op) + ": channel count mismatch");
    }
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].shape() != b[i].shape()) {
            throw ShapeError(std::string(op) + ": image shape mismatch " + shape_str(a[i].shape()) +
                             " vs " + shape_str(b[i].shape()));
        }
    }
}

Tensor mean_over_channels(std::vector<Tensor> per_channel) {
    Tensor acc = per_channel[0];
    for (size_t i = 1; i < per_channel.size(); ++i) acc = add(acc, per_channel[i]);
    return mul_scalar(acc, 1.0 / static_cast<double>(per_channel.size()));
}

// Valid-mode separable convolution matrix: out length n - window + 1.
Tensor conv_valid_matrix(int n, const std::vector<double>& kernel) {
    const int w = static_cast<int>(kernel.size());
    const int m = n - w + 1;
    std::vector<double> d(static_cast<size_t>(m) * n, 0.0);
    for (int i = 0; i < m; ++i)
        for (int t = 0; t < w; ++t) d[static_cast<size_t>(i) * n + i + t] = kernel[t];
    return Tensor::values({m, n}, std::move(d));
}

int reflect101(int idx, int n) {
    if (idx < 0) return -idx;
    if (idx >= n) return 2 * n - 2 - idx;
    return idx;
}

const std::vector<double>& binomial5() {
    static const std::vector<double> k = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    return k;
}

// Blur rows at even positions: reflect-101 borders, decimation by 2.
Tensor down_matrix(int n) {
    const auto& k = binomial5();
    const int m = (n + 1) / 2;
    std::vector<double> d(static_cast<size_t>(m) * n, 0.0);
    for (int i = 0; i < m; ++i)
        for (int t = 0; t < 5; ++t) d[static_cast<size_t>(i) * n + reflect101(2 * i + t - 2, n)] += k[t];
    return Tensor::values({m, n}, std::move(d));
}

// Zero-insertion upsample followed by the same blur scaled by 2.
Tensor up_matrix(int n_out, int n_in) {
    const auto& k = binomial5();
    std::vector<double> d(static_cast<size_t>(n_out) * n_in, 0.0);
    for (int p = 0; p < n_out; ++p) {
        for (int t = 0; t < 5; ++t) {
            const int z = reflect101(p + t - 2, n_out);
            if (z % 2 == 0 && z / 2 < n_in) d[static_cast<size_t>(p) * n_in + z / 2] += 2.0 * k[t];
        }
    }
    return Tensor::values({n_out, n_in}, std::move(d));
}

Tensor conv2d_by(const Tensor& img, const Tensor& row_op, const Tensor& col_op) {
    // (row_op . img) . col_op^T, with col_op stored untransposed
    const int cm = col_op.rows(), cn = col_op.cols();
    std::vector<double> tr(static_cast<size_t>(cm) * cn);
    for (int i = 0; i < cm; ++i)
        for (int j = 0; j < cn; ++j) tr[static_cast<size_t>(j) * cm + i] = col_op.at(i, j);
    return matmul(matmul(row_op, img), Tensor::values({cn, cm}, std::move(tr)));
}

ImageTensor upsample_to(const ImageTensor& img, int h_out, int w_out) {
    Tensor uh = up_matrix(h_out, img[0].rows());
    Tensor uw = up_matrix(w_out, img[0].cols());
    ImageTensor out;
    for (const auto& ch : img) out.push_back(conv2d_by(ch, uh, uw));
    return out;
}

std::vector<double> gaussian_kernel(int window, double sigma) {
    std::vector<double> k(window);
    const double c = (window - 1) / 2.0;
    double s = 0.0;
    for (int i = 0; i < window; ++i) {
        k[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
        s += k[i];
    }
    for (auto& v : k) v /= s;
    return k;
}

Tensor row_sums(const Tensor& m) {
    return matmul(m, Tensor::full({m.cols(), 1}, 1.0));
}

}  // namespace

Tensor l1_loss(const ImageTensor& a, const ImageTensor& b) {
    check_same_shape("l1_loss", a, b);
    std::vector<Tensor> per;
    for (size_t c = 0; c < a.size(); ++c) per.push_back(mean(abs(sub(a[c], b[c]))));
    return mean_over_channels(std::move(per));
}

Tensor ssim_index(const ImageTensor& a, const ImageTensor& b) {
    check_same_shape("ssim", a, b);
    const int h = a[0].rows(), w = a[0].cols();
    const int window = 11;
    if (h < window || w < window) throw ShapeError("ssim: image smaller than the 11x11 window");
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    const auto kern = gaussian_kernel(window, 1.5);
    Tensor gv = conv_valid_matrix(h, kern);
    Tensor gh = conv_valid_matrix(w, kern);

    std::vector<Tensor> per;
    for (size_t ch = 0; ch < a.size(); ++ch) {
        const Tensor& x = a[ch];
        const Tensor& y = b[ch];
        Tensor mx = conv2d_by(x, gv, gh);
        Tensor my = conv2d_by(y, gv, gh);
        Tensor mxx = conv2d_by(mul(x, x), gv, gh);
        Tensor myy = conv2d_by(mul(y, y), gv, gh);
        Tensor mxy = conv2d_by(mul(x, y), gv, gh);
        Tensor vx = sub(mxx, mul(mx, mx));
        Tensor vy = sub(myy, mul(my, my));
        Tensor vxy = sub(mxy, mul(mx, my));
        Tensor num = mul(add_scalar(mul_scalar(mul(mx, my), 2.0), c1),
                         add_scalar(mul_scalar(vxy, 2.0), c2));
        Tensor den = mul(add_scalar(add(mul(mx, mx), mul(my, my)), c1),
                         add_scalar(add(vx, vy), c2));
        per.push_back(mean(div(num, den)));
    }
    return mean_over_channels(std::move(per));
}

Tensor l1_ssim_loss(const ImageTensor& render, const ImageTensor& gt, double lambda_ssim) {
    Tensor l1 = l1_loss(render, gt);
    if (lambda_ssim == 0.0) return l1;
    Tensor dssim = sub(Tensor::scalar(1.0), ssim_index(render, gt));
    return add(mul_scalar(l1, 1.0 - lambda_ssim), mul_scalar(dssim, lambda_ssim));
}

Tensor ncc_loss(const ImageTensor& render, const ImageTensor& gt, int window, int stride) {
    check_same_shape("ncc_loss", render, gt);
    const int h = render[0].rows(), w = render[0].cols();
    if (window > h || window > w) {
        throw ShapeError("ncc_loss: window " + std::to_string(window) + " larger than image " +
                         std::to_string(h) + "x" + std::to_string(w));
    }
    const double eps = 1e-8;
    const double var_floor = 1e-12;

    std::vector<int64_t> idx;
    for (int r = 0; r + window <= h; r += stride)
        for (int c = 0; c + window <= w; c += stride)
            for (int dr = 0; dr < window; ++dr)
                for (int dc = 0; dc < window; ++dc)
                    idx.push_back(static_cast<int64_t>(r + dr) * w + (c + dc));
    const int wsq = window * window;
    const int patches = static_cast<int>(idx.size()) / wsq;
    Tensor inv_w = Tensor::full({wsq, 1}, 1.0 / wsq);

    Tensor ncc_all;
    for (size_t ch = 0; ch < render.size(); ++ch) {
        Tensor pr = reshape(gather(reshape(render[ch], {h * w}), idx), {patches, wsq});
        Tensor pg = reshape(gather(reshape(gt[ch], {h * w}), idx), {patches, wsq});
        Tensor cr = sub(pr, matmul(pr, inv_w));
        Tensor cg = sub(pg, matmul(pg, inv_w));
        Tensor ssr = row_sums(mul(cr, cr));
        Tensor ssg = row_sums(mul(cg, cg));
        Tensor num = row_sums(mul(cr, cg));
        Tensor den = add_scalar(mul(sqrt(ssr), sqrt(ssg)), eps);
        // near-constant patches on either side are forced to zero correlation
        std::vector<double> mask(static_cast<size_t>(patches));
        for (int p = 0; p < patches; ++p) {
            mask[p] = (ssr.at(p, 0) > var_floor && ssg.at(p, 0) > var_floor) ? 1.0 : 0.0;
        }
        Tensor ncc = mul(div(num, den), Tensor::values({patches, 1}, std::move(mask)));
        ncc_all = ncc_all.defined() ? concat(ncc_all, ncc, 0) : ncc;
    }
    return sub(Tensor::scalar(1.0), mean(ncc_all));
}

ImageTensor gaussian_pyramid_down(const ImageTensor& img) {
    Tensor dh = down_matrix(img[0].rows());
    Tensor dw = down_matrix(img[0].cols());
    ImageTensor out;
    for (const auto& ch : img) out.push_back(conv2d_by(ch, dh, dw));
    return out;
}

LaplacianPyramid laplacian_pyramid(const ImageTensor& img, int num_levels) {
    const int h = img[0].rows(), w = img[0].cols();
    if (std::min(h, w) < (1 << num_levels)) {
        throw ShapeError("laplacian_pyramid: image " + std::to_string(h) + "x" + std::to_string(w) +
                         " too small for " + std::to_string(num_levels) + " levels");
    }
    LaplacianPyramid pyr;
    ImageTensor cur = img;
    for (int l = 0; l < num_levels; ++l) {
        ImageTensor next = gaussian_pyramid_down(cur);
        ImageTensor up = upsample_to(next, cur[0].rows(), cur[0].cols());
        ImageTensor band;
        for (size_t c = 0; c < cur.size(); ++c) band.push_back(sub(cur[c], up[c]));
        pyr.levels.push_back(std::move(band));
        cur = std::move(next);
    }
    pyr.residual = std::move(cur);
    return pyr;
}

ImageTensor collapse_pyramid(const LaplacianPyramid& pyr) {
    ImageTensor cur = pyr.residual;
    for (size_t l = pyr.levels.size(); l-- > 0;) {
        const ImageTensor& band = pyr.levels[l];
        ImageTensor up = upsample_to(cur, band[0].rows(), band[0].cols());
        ImageTensor next;
        for (size_t c = 0; c < band.size(); ++c) next.push_back(add(up[c], band[c]));
        cur = std::move(next);
    }
    return cur;
}

Tensor laplacian_pyramid_loss(const ImageTensor& render, const ImageTensor& gt,
                              const LossWeights& w) {
    check_same_shape("laplacian_pyramid_loss", render, gt);
    LaplacianPyramid pr = laplacian_pyramid(render, w.pyramid_levels);
    LaplacianPyramid pg = laplacian_pyramid(gt, w.pyramid_levels);
    Tensor loss = Tensor::scalar(0.0);
    double level_weight = 1.0;  // finest level carries the largest weight
    for (int l = 0; l < w.pyramid_levels; ++l) {
        loss = add(loss, mul_scalar(l1_loss(pr.levels[l], pg.levels[l]), level_weight));
        level_weight *= w.pyramid_decay;
    }
    return loss;
}

LossBreakdown total_loss(const ImageTensor& render, const ImageTensor& gt, const Tensor& dyn_loss,
                         const LossWeights& w) {
    LossBreakdown out;
    out.l_orig = l1_ssim_loss(render, gt, w.lambda_ssim);
    out.l_ncc = ncc_loss(render, gt, w.ncc_window, w.ncc_stride);
    out.l_lap = laplacian_pyramid_loss(render, gt, w);
    out.l_dy = dyn_loss.defined() ? dyn_loss : Tensor::scalar(0.0);

    auto check = [](const Tensor& t, const char* name) {
        if (!std::isfinite(t.item())) {
            throw CheckedModeError(std::string("total_loss: component '") + name + "' is non-finite");
        }
    };
    check(out.l_orig, "l_orig");
    check(out.l_ncc, "l_ncc");
    check(out.l_lap, "l_lap");
    check(out.l_dy, "l_dy");

    out.total = add(add(out.l_orig, mul_scalar(out.l_ncc, w.lambda_ncc)),
                    add(mul_scalar(out.l_lap, w.lambda_lap), mul_scalar(out.l_dy, w.lambda_dy)));
    return out;
}

double ssim_metric(const Image& a, const Image& b) {
    return ssim_index(to_tensors(a), to_tensors(b)).item();
}

}  // namespace gsdyn
