#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gsdyn/adam.hpp"
#include "gsdyn/rng.hpp"
#include "gsdyn/tape.hpp"

namespace gsdyn {

struct HashConfig {
    int levels = 8;        // L
    int features = 2;      // F per level per projection
    int log2_table = 15;   // hashed table entries per grid
    double n_min = 8.0;    // spatial base resolution
    double top_res = 256.0;
    double n_min_t = 4.0;  // time axis base resolution
    double top_res_t = 64.0;

    double growth(int axis) const {  // axis 3 = t
        return axis == 3 ? std::pow(top_res_t / n_min_t, 1.0 / levels)
                         : std::pow(top_res / n_min, 1.0 / levels);
    }
    double base(int axis) const { return axis == 3 ? n_min_t : n_min; }
    int spatial_dim() const { return levels * features; }        // |H_s|
    int temporal_dim() const { return 3 * levels * features; }   // |H_t|
};

// floor(n_min * b^level), level >= 1. The tiny epsilon absorbs FP rounding
// when n_min * b^L is an exact integer by construction.
inline int level_resolution(double n_min, double b, int level) {
    return std::max(2, static_cast<int>(std::floor(n_min * std::pow(b, level) + 1e-9)));
}

// Spatial hash over integer cell coords, InstantNGP primes with pi_0 = 1.
inline int64_t hash_index(const std::array<int64_t, 3>& cell, int64_t table_size) {
    const uint64_t h = static_cast<uint64_t>(cell[0]) ^
                       (static_cast<uint64_t>(cell[1]) * 2654435761ull) ^
                       (static_cast<uint64_t>(cell[2]) * 805459861ull);
    return static_cast<int64_t>(h & static_cast<uint64_t>(table_size - 1));
}

// Four projected 3D grids per level over (x,y,z,t): xyz spatial, and
// xyt / yzt / xzt carrying time. Grids below the table size are stored
// densely; larger ones hash.
class HashGridSet {
public:
    struct GridMeta {
        std::array<int, 3> axes;  // coordinate axes of this projection
        std::array<int, 3> res;   // cells per axis (vertices: res + 1)
        bool dense = false;
        int64_t rows = 0;
    };

    HashGridSet(HashConfig cfg, Rng& rng);

    const HashConfig& config() const { return cfg_; }
    const GridMeta& meta(int proj, int level) const { return meta_[proj][level]; }
    Tensor& table(int proj, int level) { return tables_[proj][level]; }
    const Tensor& table(int proj, int level) const { return tables_[proj][level]; }

    int resolution(int level, int axis) const {  // level is 1-based
        return level_resolution(cfg_.base(axis), cfg_.growth(axis), level);
    }

    struct Encoded {
        Tensor h_s;  // [N, L*F]
        Tensor h_t;  // [N, 3*L*F]
    };

    // Trilinear interpolation over every projection's grids; differentiable
    // in both the table entries and the coordinates. Inputs are [N] tensors
    // of normalized coordinates: clamped into [0,1] in train mode, rejected
    // in checked mode.
    Encoded encode(const Tensor& x, const Tensor& y, const Tensor& z, const Tensor& t) const;

    std::vector<Param> params(double lr_scale = 1.0);

private:
    HashConfig cfg_;
    std::array<std::vector<Tensor>, 4> tables_;   // [proj][level-1] -> [rows, F]
    std::array<std::vector<GridMeta>, 4> meta_;
};

}  // namespace gsdyn
