#pragma once

#include <string>
#include <vector>

#include "gsdyn/tensor.hpp"

namespace gsdyn {

// Row-major, channel-interleaved raster with values in [0,1].
struct Image {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<double> pixels;

    static Image zeros(int h, int w, int c);

    double& at(int r, int c, int ch) {
        return pixels[(static_cast<size_t>(r) * width + c) * channels + ch];
    }
    double at(int r, int c, int ch) const {
        return pixels[(static_cast<size_t>(r) * width + c) * channels + ch];
    }
    bool same_shape(const Image& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

// One [H,W] tensor per channel; the taped view of an image.
using ImageTensor = std::vector<Tensor>;

ImageTensor to_tensors(const Image& img);
Image to_image(const ImageTensor& channels);

// 8-bit binary PPM (P6) / PGM (P5).
void write_ppm(const std::string& path, const Image& img);
Image read_ppm(const std::string& path);

// 32-bit float PFM, little-endian, bottom-to-top rows.
void write_pfm(const std::string& path, const Image& img);
Image read_pfm(const std::string& path);

Image load_image(const std::string& path);  // dispatches on extension

double mse(const Image& a, const Image& b);
double psnr(const Image& a, const Image& b);  // dB, capped at 99

}  // namespace gsdyn
