#pragma once

#include <array>
#include <vector>

#include "ct/image.hpp"

namespace ct {

// CIELAB planes. After srgb_to_lab, L lies in [0,100] and a,b in roughly
// [-128,127]. The transfer engine reuses this container for the normalized
// ([0,1]-scaled) variant; normalize_image/denormalize_image convert between
// the two.
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<double> L;
    std::vector<double> a;
    std::vector<double> b;

    LabImage() = default;
    LabImage(int w, int h)
        : width(w),
          height(h),
          L(static_cast<std::size_t>(w) * h, 0.0),
          a(static_cast<std::size_t>(w) * h, 0.0),
          b(static_cast<std::size_t>(w) * h, 0.0) {}

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    // Copies the three channels into a generic planar buffer (L, a, b order).
    PlanarF64Image planar() const;
};

struct LabPixel {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

// sRGB (D65) -> CIELAB, per pixel.
LabImage srgb_to_lab(const RgbImage& img);

// CIELAB -> sRGB; linear channels are clamped to [0,1] before gamma
// encoding and rounding, so out-of-gamut pixels saturate instead of failing.
RgbImage lab_to_srgb(const LabImage& img);

// Affine map to roughly [0,1]^3: (L/100, (a+128)/255, (b+128)/255). All GMM
// distances and the regularizer operate in this space.
std::array<double, 3> normalize_lab(const LabPixel& p);

LabImage normalize_image(const LabImage& lab);
LabImage denormalize_image(const LabImage& unit);

}  // namespace ct
