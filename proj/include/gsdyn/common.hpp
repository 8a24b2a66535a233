#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsdyn {

using Shape = std::vector<int>;

inline int64_t numel(const Shape& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

std::string shape_str(const Shape& s);

// Thrown by tensor ops on incompatible operand shapes.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when checked mode rejects non-finite values or out-of-range inputs.
struct CheckedModeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Checked mode validates tensor finiteness at creation and turns train-mode
// clamps into hard errors. On by default; trainers switch it off for speed.
bool checked_mode();
void set_checked_mode(bool on);

// Round-trips a double through float. Parameter initialization quantizes
// through this so the float32 checkpoint encoding is lossless for fresh
// and freshly-loaded states.
inline double to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

uint32_t crc32(const void* data, size_t len, uint32_t seed = 0);

}  // namespace gsdyn
