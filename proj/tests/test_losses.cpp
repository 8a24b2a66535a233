#include <doctest.h>

#include <cmath>

#include "gsdyn/gradcheck.hpp"
#include "gsdyn/losses.hpp"
#include "gsdyn/rng.hpp"
#include "oracles.hpp"

using namespace gsdyn;

namespace {

Image random_image(int h, int w, int c, uint64_t seed, double lo = 0.0, double hi = 1.0) {
    Rng rng(seed);
    Image img = Image::zeros(h, w, c);
    for (auto& p : img.pixels) p = rng.uniform(lo, hi);
    return img;
}

}  // namespace

TEST_CASE("l1_ssim: identical images give zero") {
    Image img = random_image(24, 24, 3, 9);
    Tensor loss = l1_ssim_loss(to_tensors(img), to_tensors(img), 0.2);
    CHECK(std::abs(loss.item()) < 1e-12);
}

TEST_CASE("l1_ssim: constant offset with lambda 0 is plain L1") {
    Image gt = Image::zeros(16, 16, 1);
    Image render = Image::zeros(16, 16, 1);
    for (auto& p : render.pixels) p = 0.5;
    Tensor loss = l1_ssim_loss(to_tensors(render), to_tensors(gt), 0.0);
    CHECK(loss.item() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("ssim matches the sliding-window reference implementation") {
    Image a = random_image(20, 26, 3, 10);
    Image b = random_image(20, 26, 3, 11);
    const double lib = ssim_metric(a, b);
    const double ref = oracles::reference_ssim(a, b);
    CHECK(std::abs(lib - ref) < 1e-6);
}

TEST_CASE("ssim: shape mismatch is an error") {
    Image a = random_image(16, 16, 1, 1);
    Image b = random_image(16, 18, 1, 2);
    CHECK_THROWS_AS(l1_ssim_loss(to_tensors(a), to_tensors(b), 0.2), ShapeError);
}

TEST_CASE("ncc: self-correlation of a non-constant image is ~1") {
    Image img = random_image(24, 24, 1, 12);
    Tensor loss = ncc_loss(to_tensors(img), to_tensors(img), 11, 8);
    CHECK(loss.item() >= 0.0);
    CHECK(loss.item() <= 1e-6);
}

TEST_CASE("ncc: affine brightness invariance") {
    // pixels kept in a band so a*I + b stays clamp-free
    Image img = random_image(24, 24, 1, 13, 0.2, 0.4);
    for (auto [a, b] : {std::pair{0.5, 0.0}, std::pair{0.5, 0.1}, std::pair{2.0, 0.0},
                        std::pair{2.0, 0.1}}) {
        Image scaled = img;
        for (auto& p : scaled.pixels) p = a * p + b;
        Tensor loss = ncc_loss(to_tensors(img), to_tensors(scaled), 11, 8);
        CHECK(loss.item() <= 1e-6);
    }
}

TEST_CASE("ncc: negated image correlates at -1, loss 2") {
    Image img = random_image(24, 24, 1, 14, 0.1, 0.9);
    Image neg = img;
    for (auto& p : neg.pixels) p = 1.0 - p;  // a = -1, b = 1 patchwise
    Tensor loss = ncc_loss(to_tensors(img), to_tensors(neg), 11, 8);
    CHECK(loss.item() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("ncc: window larger than image is an error") {
    Image img = random_image(8, 8, 1, 15);
    CHECK_THROWS_AS(ncc_loss(to_tensors(img), to_tensors(img), 11, 8), ShapeError);
}

TEST_CASE("pyramid: constant image has zero band levels") {
    Image img = Image::zeros(32, 32, 1);
    for (auto& p : img.pixels) p = 0.37;
    auto pyr = laplacian_pyramid(to_tensors(img), 3);
    for (const auto& level : pyr.levels)
        for (const auto& ch : level)
            for (double v : ch.data()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("pyramid: collapse reconstructs the input") {
    for (uint64_t seed : {21ull, 22ull}) {
        Image img = random_image(32, 48, 3, seed);
        auto pyr = laplacian_pyramid(to_tensors(img), 3);
        Image back = to_image(collapse_pyramid(pyr));
        for (size_t i = 0; i < img.pixels.size(); ++i)
            CHECK(std::abs(img.pixels[i] - back.pixels[i]) < 1e-6);
    }
}

TEST_CASE("pyramid: impulse response matches direct convolution") {
    Image img = Image::zeros(16, 16, 1);
    img.at(7, 9, 0) = 1.0;
    auto pyr = laplacian_pyramid(to_tensors(img), 1);
    Image down = oracles::direct_pyramid_down(img);
    Image up = oracles::direct_upsample(down, 16, 16);
    const auto& level0 = pyr.levels[0][0];
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c)
            CHECK(level0.at(r, c) == doctest::Approx(img.at(r, c, 0) - up.at(r, c, 0)).epsilon(1e-12));
}

TEST_CASE("pyramid: image too small for the level count is an error") {
    Image img = random_image(8, 8, 1, 30);
    CHECK_THROWS_AS(laplacian_pyramid(to_tensors(img), 4), ShapeError);
}

TEST_CASE("pyramid loss: zero for identical inputs, assembled otherwise") {
    Image a = random_image(32, 32, 1, 31);
    Image b = random_image(32, 32, 1, 32);
    LossWeights w;
    w.pyramid_levels = 3;
    CHECK(laplacian_pyramid_loss(to_tensors(a), to_tensors(a), w).item() < 1e-12);

    // hand-assemble sum lambda_l * L1_l from separately built pyramids
    auto pa = laplacian_pyramid(to_tensors(a), 3);
    auto pb = laplacian_pyramid(to_tensors(b), 3);
    double expect = 0.0, lam = 1.0;
    for (int l = 0; l < 3; ++l) {
        const auto& xa = pa.levels[l][0].data();
        const auto& xb = pb.levels[l][0].data();
        double acc = 0.0;
        for (size_t i = 0; i < xa.size(); ++i) acc += std::abs(xa[i] - xb[i]);
        expect += lam * acc / xa.size();
        lam *= 0.5;
    }
    CHECK(laplacian_pyramid_loss(to_tensors(a), to_tensors(b), w).item() ==
          doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("pyramid loss: difference confined to the finest band") {
    // a row-alternating perturbation sits in the nullspace of the
    // blur+decimate operator ((1-4+6-4+1)/16 = 0), so it never reaches
    // level 2: the loss must equal the finest-level term alone
    Image x = random_image(32, 32, 1, 33);
    Image y = x;
    Rng rng(34);
    for (int c = 0; c < 32; ++c) {
        const double amp = rng.uniform(0.01, 0.1);
        for (int r = 0; r < 32; ++r) y.at(r, c, 0) += (r % 2 == 0 ? amp : -amp);
    }
    LossWeights w;
    w.pyramid_levels = 2;
    auto px = laplacian_pyramid(to_tensors(x), 2);
    auto py = laplacian_pyramid(to_tensors(y), 2);
    for (double v : sub(px.residual[0], py.residual[0]).data()) CHECK(std::abs(v) < 1e-12);
    const double lvl1 = l1_loss(px.levels[0], py.levels[0]).item();
    const double total = laplacian_pyramid_loss(to_tensors(x), to_tensors(y), w).item();
    CHECK(total == doctest::Approx(lvl1).epsilon(1e-9));
}

TEST_CASE("total loss: degenerate weights reduce to l_orig") {
    Image a = random_image(24, 24, 1, 40);
    Image b = random_image(24, 24, 1, 41);
    LossWeights w;
    w.lambda_ncc = w.lambda_lap = w.lambda_dy = 0.0;
    auto parts = total_loss(to_tensors(a), to_tensors(b), Tensor(), w);
    CHECK(parts.total.item() == doctest::Approx(parts.l_orig.item()).epsilon(1e-15));
}

TEST_CASE("total loss: perfect render gives zero") {
    Image a = random_image(24, 24, 1, 42);
    LossWeights w;
    auto parts = total_loss(to_tensors(a), to_tensors(a), Tensor::scalar(0.0), w);
    CHECK(std::abs(parts.total.item()) < 1e-9);
}

TEST_CASE("total loss: equals independent recomposition of the four terms") {
    Image a = random_image(24, 24, 3, 43);
    Image b = random_image(24, 24, 3, 44);
    LossWeights w;
    Tensor ldy = Tensor::scalar(0.42);
    auto parts = total_loss(to_tensors(a), to_tensors(b), ldy, w);
    const double expect = l1_ssim_loss(to_tensors(a), to_tensors(b), w.lambda_ssim).item() +
                          w.lambda_ncc * ncc_loss(to_tensors(a), to_tensors(b), 11, 8).item() +
                          w.lambda_lap * laplacian_pyramid_loss(to_tensors(a), to_tensors(b), w).item() +
                          w.lambda_dy * 0.42;
    CHECK(parts.total.item() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("total loss: non-finite component is rejected by name") {
    Image a = random_image(24, 24, 1, 45);
    set_checked_mode(false);
    Tensor bad = Tensor::scalar(std::numeric_limits<double>::quiet_NaN());
    set_checked_mode(true);
    CHECK_THROWS_WITH_AS(total_loss(to_tensors(a), to_tensors(a), bad, {}),
                         doctest::Contains("l_dy"), CheckedModeError);
}

TEST_CASE("losses are differentiable w.r.t. render pixels") {
    Image gt_img = random_image(16, 16, 1, 50);
    Image r_img = random_image(16, 16, 1, 51);
    ImageTensor gt = to_tensors(gt_img);
    Tensor pixels = Tensor::values({16, 16}, to_tensors(r_img)[0].data(), true);
    ImageTensor render = {pixels};

    LossWeights w;
    w.pyramid_levels = 2;
    CHECK(gradcheck([&] { return l1_ssim_loss(render, gt, 0.2); }, {pixels}) < 1e-4);
    CHECK(gradcheck([&] { return ncc_loss(render, gt, 11, 8); }, {pixels}) < 1e-4);
    CHECK(gradcheck([&] { return laplacian_pyramid_loss(render, gt, w); }, {pixels}) < 1e-4);
}
