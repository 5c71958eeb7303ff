#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ct {

// Interleaved 8-bit RGB buffer, row-major. data.size() == 3*width*height.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    RgbImage() = default;
    RgbImage(int w, int h)
        : width(w), height(h), data(static_cast<std::size_t>(3) * w * h, 0) {}

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    bool operator==(const RgbImage&) const = default;
};

// Per-channel row-major double planes, each of length width*height.
struct PlanarF64Image {
    int width = 0;
    int height = 0;
    std::vector<std::vector<double>> planes;

    PlanarF64Image() = default;
    PlanarF64Image(int w, int h, int channels)
        : width(w),
          height(h),
          planes(channels, std::vector<double>(static_cast<std::size_t>(w) * h, 0.0)) {}

    int channels() const { return static_cast<int>(planes.size()); }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
};

}  // namespace ct
