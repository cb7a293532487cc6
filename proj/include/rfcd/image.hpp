#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfcd/vec.hpp"

namespace rfcd {

/// RGB image with float channels in [0,1], row-major from the top-left.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<Vec3> pixels;

    Image() = default;
    Image(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h) {}

    Vec3& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    const Vec3& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

/// Binary change map for one view. `provenance` is a hash of the poses,
/// thresholds, and seeds that produced it, so runs are auditable.
struct ChangeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;  // 0 = unchanged, 1 = changed
    std::string provenance;

    ChangeMap() = default;
    ChangeMap(int w, int h) : width(w), height(h), values(static_cast<size_t>(w) * h, 0) {}

    std::uint8_t& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }

    size_t count_changed() const;
};

/// Quantize a unit-range channel to 8 bits.
std::uint8_t to_u8(double channel);

// Binary PPM (P6) for RGB images, binary PGM (P5) for masks; masks encode
// changed pixels as 255 and unchanged as 0.
void write_ppm(const Image& img, const std::string& path);
Image read_ppm(const std::string& path);
void write_mask(const ChangeMap& map, const std::string& path);
ChangeMap read_mask(const std::string& path);

/// Mean squared error between two equally sized images (all channels).
double image_mse(const Image& a, const Image& b);

/// Peak signal-to-noise ratio in dB for unit-range images.
double image_psnr(const Image& a, const Image& b);

}  // namespace rfcd
