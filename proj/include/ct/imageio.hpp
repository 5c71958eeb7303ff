#pragma once

#include <filesystem>

#include "ct/image.hpp"

namespace ct {

// Decodes a PNG (any standard color type; the result is normalized to 8-bit
// RGB, gray replicated across channels, alpha dropped, 16-bit scaled down
// with rounding) or a binary PPM (P6, maxval 255).
RgbImage load_image(const std::filesystem::path& path);

// Writes an 8-bit RGB PNG. load_image(save_image(x)) round-trips bit-exactly.
void save_image(const RgbImage& img, const std::filesystem::path& path);

}  // namespace ct
