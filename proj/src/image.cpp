#include "gsdyn/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace gsdyn {

Image Image::zeros(int h, int w, int c) {
    Image img;
    img.height = h;
    img.width = w;
    img.channels = c;
    img.pixels.assign(static_cast<size_t>(h) * w * c, 0.0);
    return img;
}

ImageTensor to_tensors(const Image& img) {
    ImageTensor out;
    for (int ch = 0; ch < img.channels; ++ch) {
        std::vector<double> d(static_cast<size_t>(img.height) * img.width);
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c) d[static_cast<size_t>(r) * img.width + c] = img.at(r, c, ch);
        out.push_back(Tensor::values({img.height, img.width}, std::move(d)));
    }
    return out;
}

Image to_image(const ImageTensor& channels) {
    const int h = channels[0].rows(), w = channels[0].cols();
    Image img = Image::zeros(h, w, static_cast<int>(channels.size()));
    for (size_t ch = 0; ch < channels.size(); ++ch)
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) img.at(r, c, static_cast<int>(ch)) = channels[ch].at(r, c);
    return img;
}

void write_ppm(const std::string& path, const Image& img) {
    if (img.channels != 1 && img.channels != 3) {
        throw ConfigError("write_ppm: image must have 1 or 3 channels");
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("write_ppm: cannot open '" + path + "'");
    f << (img.channels == 3 ? "P6" : "P5") << "\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> row(static_cast<size_t>(img.width) * img.channels);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            for (int ch = 0; ch < img.channels; ++ch) {
                const double v = std::clamp(img.at(r, c, ch), 0.0, 1.0);
                row[static_cast<size_t>(c) * img.channels + ch] =
                    static_cast<unsigned char>(std::lround(v * 255.0));
            }
        }
        f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!f) throw ConfigError("write_ppm: write failed for '" + path + "'");
}

namespace {
int read_pnm_int(std::istream& s) {
    int c = s.get();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            while (c != '\n' && c != EOF) c = s.get();
        }
        c = s.get();
    }
    int v = 0;
    while (std::isdigit(c)) {
        v = v * 10 + (c - '0');
        c = s.get();
    }
    return v;
}
}  // namespace

Image read_ppm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("read_ppm: cannot open '" + path + "'");
    char m0 = static_cast<char>(f.get()), m1 = static_cast<char>(f.get());
    if (m0 != 'P' || (m1 != '6' && m1 != '5')) {
        throw ConfigError("read_ppm: '" + path + "' is not a binary PPM/PGM");
    }
    const int channels = m1 == '6' ? 3 : 1;
    const int w = read_pnm_int(f), h = read_pnm_int(f), maxv = read_pnm_int(f);
    if (w <= 0 || h <= 0 || maxv != 255) throw ConfigError("read_ppm: unsupported header in '" + path + "'");
    Image img = Image::zeros(h, w, channels);
    std::vector<unsigned char> buf(static_cast<size_t>(w) * h * channels);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (f.gcount() != static_cast<std::streamsize>(buf.size())) {
        throw ConfigError("read_ppm: truncated file '" + path + "'");
    }
    for (size_t i = 0; i < buf.size(); ++i) img.pixels[i] = buf[i] / 255.0;
    return img;
}

void write_pfm(const std::string& path, const Image& img) {
    if (img.channels != 1 && img.channels != 3) {
        throw ConfigError("write_pfm: image must have 1 or 3 channels");
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("write_pfm: cannot open '" + path + "'");
    f << (img.channels == 3 ? "PF" : "Pf") << "\n" << img.width << " " << img.height << "\n-1.0\n";
    std::vector<float> row(static_cast<size_t>(img.width) * img.channels);
    for (int r = img.height - 1; r >= 0; --r) {  // bottom-to-top per the format
        for (int c = 0; c < img.width; ++c)
            for (int ch = 0; ch < img.channels; ++ch)
                row[static_cast<size_t>(c) * img.channels + ch] = static_cast<float>(img.at(r, c, ch));
        f.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!f) throw ConfigError("write_pfm: write failed for '" + path + "'");
}

Image read_pfm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("read_pfm: cannot open '" + path + "'");
    std::string magic;
    f >> magic;
    if (magic != "PF" && magic != "Pf") throw ConfigError("read_pfm: '" + path + "' is not a PFM");
    const int channels = magic == "PF" ? 3 : 1;
    int w = 0, h = 0;
    double scale = 0.0;
    f >> w >> h >> scale;
    f.get();  // single whitespace after the scale line
    if (w <= 0 || h <= 0 || scale >= 0.0) {
        throw ConfigError("read_pfm: unsupported header in '" + path + "' (big-endian or bad dims)");
    }
    Image img = Image::zeros(h, w, channels);
    std::vector<float> row(static_cast<size_t>(w) * channels);
    for (int r = h - 1; r >= 0; --r) {
        f.read(reinterpret_cast<char*>(row.data()),
               static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (f.gcount() != static_cast<std::streamsize>(row.size() * sizeof(float))) {
            throw ConfigError("read_pfm: truncated file '" + path + "'");
        }
        for (int c = 0; c < w; ++c)
            for (int ch = 0; ch < channels; ++ch)
                img.at(r, c, ch) = row[static_cast<size_t>(c) * channels + ch];
    }
    return img;
}

Image load_image(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pfm") == 0) return read_pfm(path);
    return read_ppm(path);
}

double mse(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ConfigError("mse: image shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.pixels.size());
}

double psnr(const Image& a, const Image& b) {
    const double m = mse(a, b);
    if (m <= 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(1.0 / m));
}

}  // namespace gsdyn
